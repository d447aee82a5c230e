use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: PathBuf,
    stderr: String,
    _dir: TempDir,
}

fn run(cmd: &str, config: &str, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_nonrad"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    Run { code: o.status.code().unwrap(), out, stderr: String::from_utf8_lossy(&o.stderr).into_owned(), _dir: dir }
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const COARSE: &str = "[quadrature]\nn_theta = 8\nn_phi = 16\n";

fn dipole(amplitude: f64) -> String {
    format!(
        "schema_version = 1\n{COARSE}[source]\nvariant = \"gaussian_dipole_pulse\"\ndipole_amplitude = {amplitude:?}\ncarrier_omega = 1.0\nenvelope_width = 5.0\nsigma = 0.1\n"
    )
}

#[test]
fn dipole_spectrum_peaks_at_carrier() {
    let r = run("emit-spectrum", &dipole(1.0), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(r.out.join("spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("omega_or_n,dN,cumulative"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    let peak = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap()[0];
    // |p(omega)|^2 omega is maximal a little above the carrier
    assert!((peak - 1.0).abs() < 0.1, "peak at {peak}");
    let e = json(&r.out.join("emission.json"));
    assert_eq!(e["units"], "natural");
    assert_eq!(e["schema_version"], 1);
    let n = e["result"]["emission"]["n_bar"].as_f64().unwrap();
    assert!((rows.last().unwrap()[2] - n).abs() < 1e-12 * n);
    let p0 = e["result"]["poisson"]["probabilities"][0].as_f64().unwrap();
    assert_eq!(p0, (-n).exp());
}

#[test]
fn zero_amplitude_source_is_dark() {
    let r = run("emit-spectrum", &dipole(0.0), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let e = json(&r.out.join("emission.json"));
    assert_eq!(e["result"]["emission"]["n_bar"].as_f64(), Some(0.0));
    assert_eq!(e["result"]["emission"]["spectrum"].as_array().unwrap().len(), 0);
    assert_eq!(e["result"]["poisson"]["probabilities"][0].as_f64(), Some(1.0));
    let csv = std::fs::read_to_string(r.out.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn slow_orbit_is_dipole_dominated() {
    let cfg = format!(
        "schema_version = 1\n{COARSE}[emit_spectrum]\nn_max = 4\n[source]\nvariant = \"orbiting_gaussian_charge\"\ncharge = 1.0\norbit_radius = 0.05\nomega0 = 1.0\n"
    );
    let r = run("emit-spectrum", &cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let e = json(&r.out.join("emission.json"));
    let bins = e["result"]["emission"]["spectrum"].as_array().unwrap();
    let n: Vec<f64> = bins.iter().map(|b| b["density"].as_f64().unwrap() * b["weight"].as_f64().unwrap()).collect();
    assert!(n[0] > 100.0 * n[1..].iter().sum::<f64>(), "{n:?}");
    assert!(e["result"]["rate"].as_f64().unwrap() > 0.0);
}

#[test]
fn static_sources_do_not_emit() {
    let cfg = "schema_version = 1\n[source]\nvariant = \"static_current_loop\"\ncurrent = 1.0\nradius = 1.0\nsigma = 0.02\n";
    let r = run("classify", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = json(&r.out.join("classify.json"));
    assert_eq!(c["result"]["label"], "non-radiating");
    assert!(c["result"]["n_bar"].as_f64().unwrap() < 1e-12);
    assert_eq!(run("emit-spectrum", cfg, &[]).code, 2);
}

#[test]
fn classify_dipole_sweep() {
    let mut cfg = dipole(1.0);
    cfg.push_str("[classify]\nsamples = 16\nwave_check = false\n");
    let r = run("classify", &cfg, &["--seed", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = json(&r.out.join("classify.json"));
    assert_eq!(c["result"]["label"], "radiating");
    assert_eq!(c["seed"], 3);
    let sweep = c["result"]["sweep"].as_array().unwrap();
    assert_eq!(sweep.len(), 3);
    for row in sweep {
        assert!(row["nonrad_photon_fraction"].as_f64().unwrap() < 1e-14);
        assert!(row["diagnostics"]["reconstruction_residual"].as_f64().unwrap() <= 1e-12);
    }
}

fn scan(d_min: f64, d_max: f64, steps: usize) -> String {
    format!(
        "schema_version = 1\n[quadrature]\nn_theta = 8\nn_phi = 16\nskip_angular_check = true\n[shell_scan]\nd_min = {d_min:?}\nd_max = {d_max:?}\nsteps = {steps}\n"
    )
}

#[test]
fn shell_scan_single_step_and_validation() {
    let r = run("shell-scan", &scan(0.5, 0.5, 1), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(r.out.join("shell_scan.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "d_over_cT,n_bar_period,status");
    let n: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(n > 0.0);
    assert_eq!(run("shell-scan", &scan(0.2, 3.2, 0), &[]).code, 2);
    assert_eq!(run("shell-scan", &scan(0.2, 9.2, 10), &[]).code, 2);
}

#[test]
fn static_energy_of_gaussian_pair() {
    let pair = |d: f64, sigma: f64| {
        format!(
            "schema_version = 1\n[[sources]]\nvariant = \"static_gaussian_charge\"\ncharge = 1.0\nsigma = {sigma:?}\n\
             [[sources]]\nvariant = \"static_gaussian_charge\"\ncharge = 1.0\ncenter = [0.0, 0.0, {d:?}]\nsigma = {sigma:?}\n"
        )
    };
    let r = run("static-energy", &pair(1.0, 0.1), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = json(&r.out.join("static_energy.json"));
    let coulomb = s["result"]["exchange"]["coulomb_part"].as_f64().unwrap();
    assert!((coulomb - 1.0).abs() < 1e-6);
    assert_eq!(s["result"]["oracle"]["name"], "gaussian_erf");
    assert_eq!(run("static-energy", &pair(0.0, 1e-9), &[]).code, 4);
}

#[test]
fn propagator_report_and_low_cutoff() {
    let r = run("verify-propagator", "schema_version = 1\n", &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = json(&r.out.join("propagator_report.json"));
    assert_eq!(rep["result"]["pass"], true);
    for e in rep["result"]["entries"].as_array().unwrap() {
        assert!(e["rel_err"].as_f64().unwrap() < e["tolerance"].as_f64().unwrap(), "{e}");
    }
    let r = run("verify-propagator", "schema_version = 1\n[verify_propagator]\nk_cutoff = 3.0\n", &[]);
    assert_eq!(r.code, 5);
    let rep = json(&r.out.join("propagator_report.json"));
    let errors: Vec<String> = rep["result"]["entries"].as_array().unwrap().iter().filter_map(|e| e["error"].as_str().map(String::from)).collect();
    assert!(errors.iter().any(|e| e.contains("cutoff too low")), "{errors:?}");
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(run("verify-propagator", "schema_version = 1\nbogus = 1\n", &[]).code, 2);
    assert_eq!(run("verify-propagator", "schema_version = 9\n", &[]).code, 2);
    assert_eq!(run("verify-propagator", "not toml [", &[]).code, 2);
    assert_eq!(run("classify", "schema_version = 1\n", &[]).code, 2);
    assert_eq!(run("emit-spectrum", &dipole(1.0), &["--tol", "2.0"]).code, 2);
    let o = Command::new(env!("CARGO_BIN_EXE_nonrad")).arg("classify").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sampled_source_from_file() {
    use nonrad::sampled::SampledCurrent;
    let dir = tempfile::tempdir().unwrap();
    // an oscillating dipole between two fixed points, sampled on a small grid
    let (n, nt, dx, dt) = (8usize, 32usize, 0.25, 0.25);
    let half = 0.5 * (n as f64 - 1.0) * dx;
    let s = SampledCurrent::from_fn([n, n, n, nt], dx, dt, [-half, -half, -half, 0.0], |r, t| {
        let env = (-((t - 4.0) / 1.5).powi(2)).exp();
        let g = (-r.norm_squared() / 0.3).exp();
        (0.0, nonrad::Vec3::new(0.0, 0.0, g * env * (2.0 * t).cos()))
    });
    s.save(&dir.path().join("grid.bin")).unwrap();
    let cfg = format!("schema_version = 1\n{COARSE}[source]\nvariant = \"sampled\"\npath = \"grid.bin\"\n");
    std::fs::write(dir.path().join("scenario.toml"), cfg).unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_nonrad"))
        .args(["emit-spectrum", "--tol", "1e-4", "--config"])
        .arg(dir.path().join("scenario.toml"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let e = json(&out.join("emission.json"));
    assert_eq!(e["result"]["time_window"]["kind"], "tukey");
    assert!(e["result"]["emission"]["n_bar"].as_f64().unwrap() > 0.0);
}
