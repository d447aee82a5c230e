use std::path::{Path, PathBuf};

use nonrad::current::{BuiltinSource, FourCurrent, OrbitingShell, SourceMode};
use nonrad::decomposition::{
    default_epsilon, epsilon_sweep_given, nonrad_photon_fraction_periodic, peak_wave_number, reconstruct_rad, wave_residual, CurrentSplit, GridSpec,
    HarmonicSplit, SplitDiagnostics, WaveResidual,
};
use nonrad::exchange::{action_spectral_cross, gaussian_pair_energy, neumann_mutual_inductance, static_energy};
use nonrad::propagator::run_suite;
use nonrad::quadrature::QuadratureSpec;
use nonrad::radiation::{imag_action, mean_photon_number_pulsed, photon_rate_periodic, poisson_statistics, vacuum_persistence, EmissionResult};
use nonrad::spectral::{PeriodicSpectrum, PulsedSpectrum, WindowedStatic, TUKEY_FLAT_FRACTION};
use nonrad::{Error, Vec3};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::{envelope, write_json, write_with, CliError, Outcome, EXIT_CONVERGENCE, EXIT_OK, EXIT_VERIFICATION};

/// A loaded scenario with command-line overrides applied.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: Config,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl RunContext {
    pub fn new(mut config: Config, seed: Option<u64>, tol: Option<f64>, out_dir: Option<PathBuf>) -> Result<RunContext, CliError> {
        if let Some(tol) = tol {
            config.quadrature.tol = tol;
        }
        config.quadrature.validate()?;
        let seed = seed.or(config.seed).unwrap_or(0);
        let out_dir = match (out_dir, &config.output.dir) {
            (Some(d), _) => d,
            (None, Some(d)) => config.base_dir.join(d),
            (None, None) => PathBuf::from("."),
        };
        Ok(RunContext { config, seed, out_dir })
    }

    fn quad(&self) -> &QuadratureSpec {
        &self.config.quadrature
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn save(&self, name: &str, command: &str, result: Value) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        write_json(&path, &envelope(command, self.seed, &self.config.constants, result))?;
        Ok(path)
    }
}

fn time_window(src: &FourCurrent) -> Value {
    match src {
        FourCurrent::Sampled(_) => json!({ "kind": "tukey", "flat_fraction": TUKEY_FLAT_FRACTION }),
        FourCurrent::Builtin(_) => Value::Null,
    }
}

fn emission_summary(r: &EmissionResult) -> Value {
    json!({
        "n_bar": r.n_bar,
        "radiated_energy": r.radiated_energy,
        "quadrature_error_estimate": r.quadrature_error_estimate,
        "period": r.period,
        "k_max": r.k_max,
        "evaluations": r.evaluations,
    })
}

#[derive(Debug, Clone, Serialize)]
struct ClassifyRow {
    epsilon: f64,
    n_bar_rad: f64,
    nonrad_photon_fraction: f64,
    diagnostics: Option<SplitDiagnostics>,
    rad_wave_residual: Option<WaveResidual>,
}

/// Label a source radiating or non-radiating and sweep the split width.
pub fn classify(ctx: &RunContext) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let cc = &cfg.classify;
    let consts = cfg.constants;
    let src = cfg.source()?;
    let (emission, rows) = match src.mode() {
        SourceMode::Pulsed { t_min, t_max } => {
            let spec = PulsedSpectrum::new(&src, consts)?;
            let original = mean_photon_number_pulsed(&spec, ctx.quad())?;
            let peak = peak_wave_number(&original, consts.c);
            let mut rows = Vec::new();
            if original.n_bar >= cc.threshold {
                let eps = match (cc.epsilon, peak) {
                    (Some(e), _) => e,
                    (None, Some(k)) => default_epsilon(k),
                    (None, None) => return Err(Error::InvalidParameter("no spectral peak to size epsilon; set classify.epsilon".into()).into()),
                };
                for row in epsilon_sweep_given(&spec, &original, eps, ctx.quad(), cc.samples, ctx.seed)? {
                    let wave = match (cc.wave_check, peak) {
                        (true, Some(k)) => {
                            let split = CurrentSplit::new(&spec, row.epsilon)?;
                            let dx = cc.grid_spacing / k;
                            let t_mid = 0.5 * (t_min + t_max);
                            let grid = GridSpec::centred(cc.grid_points, dx, dx / consts.c, source_center(&src, t_mid), t_mid);
                            let g = reconstruct_rad(&split, &grid, &cc.reconstruction)?;
                            Some(wave_residual(&g, &consts)?)
                        }
                        _ => None,
                    };
                    rows.push(ClassifyRow {
                        epsilon: row.epsilon,
                        n_bar_rad: row.n_bar_rad,
                        nonrad_photon_fraction: row.nonrad_photon_fraction,
                        diagnostics: Some(row.diagnostics),
                        rad_wave_residual: wave,
                    });
                }
            }
            (original, rows)
        }
        SourceMode::Periodic { .. } | SourceMode::Static => {
            let spec = PeriodicSpectrum::new(&src, consts)?;
            let original = photon_rate_periodic(&spec, cc.n_max, ctx.quad())?;
            let mut rows = Vec::new();
            if original.n_bar >= cc.threshold {
                let eps = match cc.epsilon {
                    Some(e) => e,
                    None => default_epsilon(peak_wave_number(&original, consts.c).unwrap_or(1.0)),
                };
                for div in [1.0, 2.0, 4.0] {
                    let split = HarmonicSplit::new(&spec, eps / div)?;
                    let rad = photon_rate_periodic(&split.radiating(), cc.n_max, ctx.quad())?;
                    rows.push(ClassifyRow {
                        epsilon: split.epsilon,
                        n_bar_rad: rad.n_bar,
                        nonrad_photon_fraction: nonrad_photon_fraction_periodic(&split, cc.n_max, ctx.quad())?,
                        diagnostics: None,
                        rad_wave_residual: None,
                    });
                }
            }
            (original, rows)
        }
    };
    let label = if emission.n_bar < cc.threshold { "non-radiating" } else { "radiating" };
    let result = json!({
        "label": label,
        "n_bar": emission.n_bar,
        "per_period": emission.period.is_some(),
        "threshold": cc.threshold,
        "emission": emission_summary(&emission),
        "sweep": rows,
        "time_window": time_window(&src),
    });
    let file = ctx.save("classify.json", "classify", result)?;
    Ok(Outcome { summary: format!("{label}: n_bar = {:.6e}", emission.n_bar), files: vec![file], exit_code: EXIT_OK })
}

fn source_center(src: &FourCurrent, t: f64) -> Vec3 {
    match src {
        FourCurrent::Builtin(b) => b.center(t),
        FourCurrent::Sampled(s) => s.position(s.dims[0] / 2, s.dims[1] / 2, s.dims[2] / 2),
    }
}

/// Photon spectrum of a pulsed or periodic source, with its Poisson table.
pub fn emit_spectrum(ctx: &RunContext) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let ec = &cfg.emit_spectrum;
    let consts = cfg.constants;
    let src = cfg.source()?;
    let mut result = match src.mode() {
        SourceMode::Pulsed { .. } => mean_photon_number_pulsed(&PulsedSpectrum::new(&src, consts)?, ctx.quad())?,
        SourceMode::Periodic { .. } => photon_rate_periodic(&PeriodicSpectrum::new(&src, consts)?, ec.n_max, ctx.quad())?,
        SourceMode::Static => return Err(Error::WrongMode("a static source emits nothing; use static-energy".into()).into()),
    };
    if result.n_bar == 0.0 {
        result.spectrum.clear();
        result.angular.clear();
    }
    if !ec.angular {
        result.angular.clear();
    }
    let n = result.n_bar;
    let n_max = ec.poisson_n_max.unwrap_or((n + 10.0 * n.sqrt() + 20.0).ceil() as usize);
    let poisson = poisson_statistics(n, n_max)?;
    let im_s = imag_action(n, &consts);

    let csv = ctx.path("spectrum.csv");
    write_with(&csv, |w| result.write_spectrum_csv(w))?;
    let json = ctx.save(
        "emission.json",
        "emit-spectrum",
        json!({
            "emission": result,
            "rate": result.rate(),
            "poisson": {
                "n_bar": poisson.n_bar,
                "probabilities": poisson.probabilities,
                "total": poisson.total(),
                "mean": poisson.mean(),
            },
            "imag_action": im_s,
            "vacuum_persistence": vacuum_persistence(im_s, &consts),
            "time_window": time_window(&src),
        }),
    )?;
    let unit = if result.period.is_some() { " per period" } else { "" };
    Ok(Outcome { summary: format!("n_bar = {n:.6e}{unit}"), files: vec![csv, json], exit_code: EXIT_OK })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub d_over_ct: f64,
    pub n_bar_period: Option<f64>,
    pub status: &'static str,
}

/// Diameters of the scan, both ends included.
pub fn scan_points(d_min: f64, d_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![d_max],
        _ => (0..steps).map(|i| d_min + (d_max - d_min) * i as f64 / (steps - 1) as f64).collect(),
    }
}

/// Photons per period of an orbiting shell across a range of diameters.
pub fn shell_scan(ctx: &RunContext) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let sc = &cfg.shell_scan;
    let consts = cfg.constants;
    if sc.steps == 0 {
        return Err(CliError::Config("shell_scan.steps must be at least 1".into()));
    }
    if !(sc.d_min > 0.0) || !(sc.d_max >= sc.d_min) || sc.d_max > sc.n_max as f64 + 0.5 {
        return Err(CliError::Config(format!(
            "shell_scan range must satisfy 0 < d_min <= d_max <= n_max + 1/2, got [{}, {}] with n_max {}",
            sc.d_min, sc.d_max, sc.n_max
        )));
    }
    if !(sc.orbit_speed > 0.0 && sc.orbit_speed < 1.0) {
        return Err(CliError::Config("shell_scan.orbit_speed must lie in (0, 1)".into()));
    }
    let ct = consts.c * sc.period;
    let orbit_radius = sc.orbit_speed * ct / (2.0 * std::f64::consts::PI);
    let shells: Vec<(f64, FourCurrent)> = scan_points(sc.d_min, sc.d_max, sc.steps)
        .into_iter()
        .map(|d| {
            let b = BuiltinSource::OrbitingShell(OrbitingShell {
                charge: sc.charge,
                diameter: d * ct,
                orbit_radius,
                period: sc.period,
                sigma: sc.sigma,
                center: [0.0; 3],
                axis: [0.0, 0.0, 1.0],
                phase: 0.0,
            });
            b.validate().map(|_| (d, FourCurrent::Builtin(b)))
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<ScanRow> = shells
        .par_iter()
        .map(|(d, src)| {
            let spec = PeriodicSpectrum::new(src, consts)?;
            match photon_rate_periodic(&spec, sc.n_max, ctx.quad()) {
                Ok(r) => Ok(ScanRow { d_over_ct: *d, n_bar_period: Some(r.n_bar), status: "ok" }),
                Err(Error::NonConverged(_)) => Ok(ScanRow { d_over_ct: *d, n_bar_period: None, status: "NON_CONVERGED" }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_, Error>>()?;

    let csv = ctx.path("shell_scan.csv");
    write_with(&csv, |w| write_scan_csv(w, &rows))?;
    let failed = rows.iter().filter(|r| r.n_bar_period.is_none()).count();
    let json = ctx.save(
        "shell_scan.json",
        "shell-scan",
        json!({ "orbit_radius": orbit_radius, "period": sc.period, "n_max": sc.n_max, "rows": rows, "non_converged": failed }),
    )?;
    let exit_code = if failed > 0 { EXIT_CONVERGENCE } else { EXIT_OK };
    Ok(Outcome { summary: format!("{} diameters scanned, {failed} non-converged", rows.len()), files: vec![csv, json], exit_code })
}

fn write_scan_csv<W: std::io::Write>(w: &mut W, rows: &[ScanRow]) -> std::io::Result<()> {
    writeln!(w, "d_over_cT,n_bar_period,status")?;
    for r in rows {
        match r.n_bar_period {
            Some(n) => writeln!(w, "{:.16e},{:.16e},{}", r.d_over_ct, n, r.status)?,
            None => writeln!(w, "{:.16e},nan,{}", r.d_over_ct, r.status)?,
        }
    }
    Ok(())
}

/// Closed-form interaction energy of a pair, when one is known.
fn pair_oracle(a: &BuiltinSource, b: &BuiltinSource, nodes: usize, c: f64) -> Option<(&'static str, f64)> {
    match (a, b) {
        (BuiltinSource::StaticGaussianCharge(x), BuiltinSource::StaticGaussianCharge(y)) => {
            let d = (Vec3::from(x.center) - Vec3::from(y.center)).norm();
            (d > 0.0).then(|| ("gaussian_erf", gaussian_pair_energy(x.charge, x.sigma, y.charge, y.sigma, d)))
        }
        (BuiltinSource::StaticCurrentLoop(x), BuiltinSource::StaticCurrentLoop(y)) => {
            Some(("neumann_thin_filament", -x.current * y.current * neumann_mutual_inductance(x, y, nodes) / (c * c)))
        }
        _ => None,
    }
}

/// Interaction energy of static sources, optionally with the action of the
/// windowed pair and a closed-form comparison.
pub fn static_energy_cmd(ctx: &RunContext) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let se = &cfg.static_energy;
    let consts = cfg.constants;
    let sources = &cfg.sources;
    if sources.is_empty() {
        return Err(CliError::Config("static-energy needs at least one [[sources]] entry".into()));
    }
    for s in sources {
        s.validate()?;
        if s.mode() != SourceMode::Static {
            return Err(Error::WrongMode("static-energy accepts static sources only".into()).into());
        }
    }
    let mut res = static_energy(sources, &se.statics, se.include_self, &consts)?;
    let mut action = Value::Null;
    if let Some(tau) = se.window_tau {
        if sources.len() != 2 {
            return Err(CliError::Config("window_tau needs exactly two sources".into()));
        }
        let a = WindowedStatic::new(vec![sources[0].clone()], tau, consts)?;
        let b = WindowedStatic::new(vec![sources[1].clone()], tau, consts)?;
        let ar = action_spectral_cross(&a, &b, &se.pv)?;
        res.w_action = Some(ar.w);
        res.principal_value_diagnostic = Some(ar.spread);
        let t_win = a.effective_duration();
        let mutual = static_energy(sources, &se.statics, false, &consts)?.static_energy_total;
        action = json!({
            "effective_duration": t_win,
            "windowed": ar.windowed,
            "w_over_t_plus_u": ar.w / t_win + mutual,
            "relative_mismatch": (ar.w / t_win + mutual).abs() / mutual.abs(),
        });
    }
    let mut oracle = Value::Null;
    if se.oracle && sources.len() == 2 {
        if let Some((name, value)) = pair_oracle(&sources[0], &sources[1], se.oracle_nodes, consts.c) {
            let mutual = res.coulomb_part + res.ampere_part;
            oracle = json!({ "name": name, "value": value, "computed": mutual, "rel_err": (mutual - value).abs() / value.abs() });
        }
    }
    let file = ctx.save("static_energy.json", "static-energy", json!({ "exchange": res, "action": action, "oracle": oracle }))?;
    Ok(Outcome { summary: format!("U = {:.6e}", res.static_energy_total), files: vec![file], exit_code: EXIT_OK })
}

/// Numerical checks of the propagator identities.
pub fn verify_propagator(ctx: &RunContext) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let report = run_suite(&cfg.verify_propagator, ctx.seed, &cfg.constants);
    let failed: Vec<&str> = report.entries.iter().filter(|e| !e.pass).map(|e| e.check_name.as_str()).collect();
    let file = ctx.save("propagator_report.json", "verify-propagator", serde_json::to_value(&report).expect("report serialises"))?;
    let summary = if report.pass { format!("{} checks passed", report.entries.len()) } else { format!("failed: {}", failed.join(", ")) };
    Ok(Outcome { summary, files: vec![file], exit_code: if report.pass { EXIT_OK } else { EXIT_VERIFICATION } })
}

/// Load `path` and run `command`.
pub fn run(command: &str, config: &Path, seed: Option<u64>, tol: Option<f64>, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    let ctx = RunContext::new(Config::load(config)?, seed, tol, out)?;
    match command {
        "classify" => classify(&ctx),
        "emit-spectrum" => emit_spectrum(&ctx),
        "shell-scan" => shell_scan(&ctx),
        "static-energy" => static_energy_cmd(&ctx),
        "verify-propagator" => verify_propagator(&ctx),
        other => Err(CliError::Config(format!("unknown command {other}"))),
    }
}
