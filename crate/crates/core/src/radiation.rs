//! Real-photon observables: transverse projection, mean photon number,
//! spectra, radiated energy and Poisson counting statistics.
//!
//! For a pulsed source the mean photon number reduces on the light shell to
//! `N = 1/(4 pi^2 hbar c^3) int d^3k |J_T(k, c|k|)|^2 / |k|`.
//! For a periodic source harmonic `n` (on the shell `|k| = n w0 / c`) gives
//! `N_n = T k_n / (2 pi hbar c^2) int dOmega |J_{T,n}|^2` photons per period.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite, pairwise_sum, uniform_edges, QuadratureSpec, Rule, SphereRule};
use crate::spectral::{HarmonicSpectrum, SpectralSample, Spectrum};
use crate::units::{cnorm_sqr, current_contraction, CVec3, PhysicalConstants, Vec3};

/// `(1 - k k / |k|^2) J`, re-orthogonalised once.
pub fn transverse_project(k: &Vec3, j: &CVec3) -> Result<CVec3> {
    let n = k.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroWaveVector);
    }
    let u = k / n;
    Ok(project_unit(&u, j))
}

fn project_unit(u: &Vec3, j: &CVec3) -> CVec3 {
    let uc = crate::units::complexify(u);
    let mut t = j - uc * crate::units::kdot(u, j);
    t -= uc * crate::units::kdot(u, &t);
    t
}

/// Relative mismatch between the Minkowski contraction
/// `|J|^2 - c^2 |rho|^2` and `|J_T|^2` for an on-shell sample.
pub fn gauge_identity_residual(k: &Vec3, sample: &SpectralSample, consts: &PhysicalConstants) -> Result<f64> {
    let jt = cnorm_sqr(&transverse_project(k, &sample.j)?);
    let contraction = current_contraction(sample.rho, &sample.j, consts);
    let scale = cnorm_sqr(&sample.j) + consts.c * consts.c * sample.rho.norm_sqr();
    Ok(if scale == 0.0 { 0.0 } else { (contraction - jt).abs() / scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBin {
    /// Angular frequency (pulsed) or harmonic number (periodic).
    pub omega_or_n: f64,
    /// `dN/domega` (pulsed) or `N_n` (periodic).
    pub density: f64,
    /// Quadrature weight turning densities into counts (1 for harmonics).
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularBin {
    pub direction: [f64; 3],
    /// `dN/dOmega`.
    pub density: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionResult {
    /// Photons per pulse, or per period for periodic sources.
    pub n_bar: f64,
    pub spectrum: Vec<SpectrumBin>,
    pub angular: Vec<AngularBin>,
    pub radiated_energy: f64,
    pub quadrature_error_estimate: f64,
    /// Source period for periodic results.
    pub period: Option<f64>,
    pub k_max: f64,
    /// Radial panels of the final rule (0 for periodic results).
    pub radial_panels: usize,
    pub evaluations: usize,
}

impl EmissionResult {
    /// Photons per unit time (periodic results only).
    pub fn rate(&self) -> Option<f64> {
        self.period.map(|t| self.n_bar / t)
    }

    /// `omega_or_n,dN,cumulative` rows with a header.
    pub fn write_spectrum_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega_or_n,dN,cumulative")?;
        let mut cumulative = 0.0;
        for b in &self.spectrum {
            cumulative += b.density * b.weight;
            writeln!(w, "{:.16e},{:.16e},{:.16e}", b.omega_or_n, b.density, cumulative)?;
        }
        Ok(())
    }

    /// Sum of the spectrum, which reproduces `n_bar`.
    pub fn spectrum_total(&self) -> f64 {
        pairwise_sum(&self.spectrum.iter().map(|b| b.density * b.weight).collect::<Vec<_>>())
    }

    pub fn angular_total(&self) -> f64 {
        pairwise_sum(&self.angular.iter().map(|b| b.density * b.weight).collect::<Vec<_>>())
    }
}

/// `|J_T|^2` at `k = |k| u`, `omega = c |k|`, for every direction `u`.
fn shell_values<S: Spectrum + ?Sized>(spec: &S, k: f64, sphere: &SphereRule, c: f64) -> Vec<f64> {
    sphere
        .directions
        .iter()
        .map(|u| {
            let s = spec.sample(&(u * k), c * k);
            cnorm_sqr(&project_unit(u, &s.j))
        })
        .collect()
}

struct RadialLevel {
    rule: Rule,
    values: Vec<Vec<f64>>,
    integrand: Vec<f64>,
    total: f64,
}

fn radial_level<S: Spectrum + ?Sized>(spec: &S, a: f64, b: f64, panels: usize, order: usize, sphere: &SphereRule, pref: f64) -> RadialLevel {
    let c = spec.constants().c;
    let rule = composite(&uniform_edges(a, b, panels), order);
    let values: Vec<Vec<f64>> = rule.nodes.par_iter().map(|&k| shell_values(spec, k, sphere, c)).collect();
    let integrand: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&values)
        .map(|(k, v)| {
            let ang: Vec<f64> = v.iter().zip(&sphere.weights).map(|(x, w)| x * w).collect();
            pref * k * pairwise_sum(&ang)
        })
        .collect();
    let total = pairwise_sum(&integrand.iter().zip(&rule.weights).map(|(f, w)| f * w).collect::<Vec<_>>());
    RadialLevel { rule, values, integrand, total }
}

/// Fraction of the Nyquist wave number above which a sampled spectrum should
/// carry no photons.
pub const NYQUIST_GUARD: f64 = 0.8;

/// Mean photon number, spectrum and energy of a pulsed spectrum.
pub fn mean_photon_number_pulsed<S: Spectrum + ?Sized>(spec: &S, quad: &QuadratureSpec) -> Result<EmissionResult> {
    quad.validate()?;
    let consts = spec.constants();
    let (c, hbar) = (consts.c, consts.hbar);
    let pref = 1.0 / (4.0 * PI * PI * hbar * c * c * c);
    let ext = spec.extent();
    let k_max = quad.k_max.unwrap_or_else(|| ext.k_max.min(ext.omega_max / c));
    if !(k_max > 0.0) || !k_max.is_finite() {
        return Err(Error::InvalidParameter(format!("radial cutoff must be positive and finite, got {k_max}")));
    }
    let sphere = SphereRule::new(quad.n_theta, quad.n_phi);
    let order = quad.radial_order;
    // panels must also resolve the narrowest frequency feature
    let feature = (k_max * c / ext.omega_width.max(1e-300)).ceil() as usize;
    let mut panels = quad.initial_panels.max(feature.min(1 << 14)).max(1);
    let mut evaluations = 0usize;
    let mut level = radial_level(spec, 0.0, k_max, panels, order, &sphere, pref);
    evaluations += level.rule.len();
    let mut change;
    loop {
        let next_panels = 2 * panels;
        if evaluations + next_panels * order > quad.max_evals {
            return Err(Error::NonConverged(format!(
                "radial quadrature exceeded {} evaluations (last value {:e})",
                quad.max_evals, level.total
            )));
        }
        let next = radial_level(spec, 0.0, k_max, next_panels, order, &sphere, pref);
        evaluations += next.rule.len();
        change = (next.total - level.total).abs();
        level = next;
        panels = next_panels;
        if change <= quad.tol * level.total.abs() || level.total == 0.0 && change == 0.0 {
            break;
        }
    }
    let tail = if spec.band_limited() {
        // past k_max a sampled transform only repeats itself: require the band
        // below it to be quiet instead
        let top: Vec<f64> = level
            .rule
            .nodes
            .iter()
            .zip(&level.rule.weights)
            .zip(&level.integrand)
            .filter(|((k, _), _)| **k > NYQUIST_GUARD * k_max)
            .map(|((_, w), f)| w * f)
            .collect();
        pairwise_sum(&top)
    } else {
        let t = radial_level(spec, k_max, 2.0 * k_max, panels, order, &sphere, pref);
        evaluations += t.rule.len();
        t.total
    };
    if tail > quad.tol * level.total.abs() && tail > 0.0 {
        return Err(Error::NonConverged(format!("radial tail beyond k = {k_max:e} is {tail:e} against {:e}", level.total)));
    }
    let mut error = change + tail;
    if !quad.skip_angular_check {
        let fine = SphereRule::new(2 * quad.n_theta, 2 * quad.n_phi);
        let integrand: Vec<f64> = level
            .rule
            .nodes
            .par_iter()
            .map(|&k| {
                let v = shell_values(spec, k, &fine, c);
                pref * k * pairwise_sum(&v.iter().zip(&fine.weights).map(|(x, w)| x * w).collect::<Vec<_>>())
            })
            .collect();
        let total = pairwise_sum(&integrand.iter().zip(&level.rule.weights).map(|(f, w)| f * w).collect::<Vec<_>>());
        error += (total - level.total).abs();
    }

    let spectrum: Vec<SpectrumBin> = level
        .rule
        .nodes
        .iter()
        .zip(&level.rule.weights)
        .zip(&level.integrand)
        .map(|((k, w), f)| SpectrumBin { omega_or_n: c * k, density: f / c, weight: c * w })
        .collect();
    let angular: Vec<AngularBin> = (0..sphere.len())
        .map(|d| {
            let terms: Vec<f64> = level
                .rule
                .nodes
                .iter()
                .zip(&level.rule.weights)
                .zip(&level.values)
                .map(|((k, w), v)| pref * k * w * v[d])
                .collect();
            let u = sphere.directions[d];
            AngularBin { direction: [u.x, u.y, u.z], density: pairwise_sum(&terms), weight: sphere.weights[d] }
        })
        .collect();
    let energy_terms: Vec<f64> = spectrum.iter().map(|b| hbar * b.omega_or_n * b.density * b.weight).collect();
    Ok(EmissionResult {
        n_bar: level.total,
        radiated_energy: pairwise_sum(&energy_terms),
        spectrum,
        angular,
        quadrature_error_estimate: error,
        period: None,
        k_max,
        radial_panels: panels,
        evaluations,
    })
}

/// Mean photon number on a fixed radial rule of `panels` panels over
/// `[0, k_max]`, without refinement or tail check.
pub fn mean_photon_number_fixed<S: Spectrum + ?Sized>(spec: &S, quad: &QuadratureSpec, k_max: f64, panels: usize) -> Result<f64> {
    quad.validate()?;
    if !(k_max > 0.0) || panels == 0 {
        return Err(Error::InvalidParameter("fixed radial rule needs k_max > 0 and panels > 0".into()));
    }
    let consts = spec.constants();
    let pref = 1.0 / (4.0 * PI * PI * consts.hbar * consts.c.powi(3));
    let sphere = SphereRule::new(quad.n_theta, quad.n_phi);
    Ok(radial_level(spec, 0.0, k_max, panels, quad.radial_order, &sphere, pref).total)
}

/// Photons per period from harmonics `1..=n_max` of a periodic spectrum.
pub fn photon_rate_periodic<H: HarmonicSpectrum + ?Sized>(spec: &H, n_max: u32, quad: &QuadratureSpec) -> Result<EmissionResult> {
    quad.validate()?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let consts = spec.constants();
    let (c, hbar) = (consts.c, consts.hbar);
    let w0 = spec.omega0();
    let period = 2.0 * PI / w0;
    let sphere = SphereRule::new(quad.n_theta, quad.n_phi);
    let per_harmonic = |n: u32, sphere: &SphereRule| -> Vec<f64> {
        let kn = n as f64 * w0 / c;
        let pref = period * kn / (2.0 * PI * hbar * c * c);
        sphere
            .directions
            .par_iter()
            .map(|u| pref * cnorm_sqr(&project_unit(u, &spec.harmonic(n as i32, &(u * kn)).j)))
            .collect()
    };
    let mut spectrum = Vec::with_capacity(n_max as usize);
    let mut angular_density = vec![0.0; sphere.len()];
    for n in 1..=n_max {
        let vals = per_harmonic(n, &sphere);
        let weighted: Vec<f64> = vals.iter().zip(&sphere.weights).map(|(v, w)| v * w).collect();
        for (a, v) in angular_density.iter_mut().zip(&vals) {
            *a += v;
        }
        spectrum.push(SpectrumBin { omega_or_n: n as f64, density: pairwise_sum(&weighted), weight: 1.0 });
    }
    let counts: Vec<f64> = spectrum.iter().map(|b| b.density).collect();
    let n_bar = pairwise_sum(&counts);
    let last = spectrum.last().map(|b| b.density).unwrap_or(0.0);
    if last > quad.tol * n_bar {
        return Err(Error::NonConverged(format!(
            "harmonic {n_max} still carries {last:e} of {n_bar:e} photons per period"
        )));
    }
    let mut error = last;
    if !quad.skip_angular_check {
        let fine = SphereRule::new(2 * quad.n_theta, 2 * quad.n_phi);
        let fine_total: f64 = (1..=n_max)
            .map(|n| {
                let v = per_harmonic(n, &fine);
                pairwise_sum(&v.iter().zip(&fine.weights).map(|(x, w)| x * w).collect::<Vec<_>>())
            })
            .sum();
        error += (fine_total - n_bar).abs();
    }
    let energy: Vec<f64> = spectrum.iter().map(|b| hbar * b.omega_or_n * w0 * b.density).collect();
    let angular = sphere
        .directions
        .iter()
        .zip(&sphere.weights)
        .zip(&angular_density)
        .map(|((u, w), d)| AngularBin { direction: [u.x, u.y, u.z], density: *d, weight: *w })
        .collect();
    Ok(EmissionResult {
        n_bar,
        radiated_energy: pairwise_sum(&energy),
        spectrum,
        angular,
        quadrature_error_estimate: error,
        period: Some(period),
        k_max: n_max as f64 * w0 / c,
        radial_panels: 0,
        evaluations: n_max as usize * sphere.len(),
    })
}

/// Mean photon number from the unreduced four-dimensional integral
/// `1/(4 pi^2 hbar c^3) int d^3k dq0 |J_T|^2 delta_eps(|k|^2 - q0^2)` with a
/// Gaussian mollifier of width `eps`, over both signs of the frequency.
pub fn mean_photon_number_mollified<S: Spectrum + ?Sized>(spec: &S, eps: f64, k_max: f64, radial_panels: usize, sphere: &SphereRule) -> f64 {
    let consts = spec.constants();
    let c = consts.c;
    let pref = 1.0 / (4.0 * PI * PI * consts.hbar * c * c * c);
    let radial = composite(&uniform_edges(0.0, k_max, radial_panels), 16);
    let q_rule = Rule::gauss_legendre(24);
    let width = 8.0 * eps;
    let mollifier = |x: f64| (-0.5 * x * x / (eps * eps)).exp() / ((2.0 * PI).sqrt() * eps);
    let per_k: Vec<f64> = radial
        .nodes
        .par_iter()
        .map(|&k| {
            let lo = (k * k - width).max(0.0).sqrt();
            let hi = (k * k + width).sqrt();
            // the mollifier support, split at the shell
            let mut q_nodes = Vec::new();
            for (a, b) in [(lo, k), (k, hi)] {
                if b > a {
                    let r = q_rule.on_interval(a, b);
                    q_nodes.extend(r.nodes.into_iter().zip(r.weights));
                }
            }
            let mut terms = Vec::new();
            for (q0, wq) in &q_nodes {
                let m = mollifier(k * k - q0 * q0);
                for sign in [1.0, -1.0] {
                    for (u, wu) in sphere.directions.iter().zip(&sphere.weights) {
                        let s = spec.sample(&(u * k), sign * c * q0);
                        terms.push(k * k * wq * wu * m * cnorm_sqr(&project_unit(u, &s.j)));
                    }
                }
            }
            pairwise_sum(&terms)
        })
        .collect();
    pref * pairwise_sum(&per_k.iter().zip(&radial.weights).map(|(f, w)| f * w).collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonEmission {
    pub n_bar: f64,
    pub probabilities: Vec<f64>,
}

impl PoissonEmission {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// `P_N = n^N e^{-n} / N!` for `N = 0..=n_max`.
pub fn poisson_statistics(n_bar: f64, n_max: usize) -> Result<PoissonEmission> {
    if !(n_bar >= 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidParameter(format!("mean photon number must be finite and non-negative, got {n_bar}")));
    }
    let p0 = (-n_bar).exp();
    let mut probabilities = Vec::with_capacity(n_max + 1);
    if p0 > 0.0 {
        let mut p = p0;
        probabilities.push(p);
        for n in 0..n_max {
            p *= n_bar / (n + 1) as f64;
            probabilities.push(p);
        }
    } else {
        let ln = n_bar.ln();
        for n in 0..=n_max {
            probabilities.push((n as f64 * ln - n_bar - libm::lgamma(n as f64 + 1.0)).exp());
        }
    }
    Ok(PoissonEmission { n_bar, probabilities })
}

/// Imaginary part of the vacuum action, `hbar n_bar / 2`.
pub fn imag_action(n_bar: f64, consts: &PhysicalConstants) -> f64 {
    0.5 * consts.hbar * n_bar
}

/// Vacuum persistence probability `exp(-2 Im S / hbar)`.
pub fn vacuum_persistence(imag_s: f64, consts: &PhysicalConstants) -> f64 {
    (-2.0 * imag_s / consts.hbar).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralExtent;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn projection_examples() {
        let j = CVec3::new(c(1.0), c(1.0), c(1.0));
        let t = transverse_project(&Vec3::z(), &j).unwrap();
        assert_eq!(t, CVec3::new(c(1.0), c(1.0), c(0.0)));
        let par = transverse_project(&Vec3::new(1.0, 2.0, 3.0), &CVec3::new(c(2.0), c(4.0), c(6.0))).unwrap();
        assert!(cnorm_sqr(&par) < 1e-28);
        let orth = CVec3::new(c(0.0), Complex64::new(0.3, 1.0), c(0.0));
        assert_eq!(transverse_project(&Vec3::x(), &orth).unwrap(), orth);
        assert!(matches!(transverse_project(&Vec3::zeros(), &j), Err(Error::ZeroWaveVector)));
    }

    proptest! {
        #[test]
        fn projection_is_orthogonal_and_idempotent(
            kx in -5.0..5.0f64, ky in -5.0..5.0f64, kz in 0.1..5.0f64,
            re in proptest::array::uniform3(-3.0..3.0f64), im in proptest::array::uniform3(-3.0..3.0f64)
        ) {
            let k = Vec3::new(kx, ky, kz);
            let j = CVec3::new(Complex64::new(re[0], im[0]), Complex64::new(re[1], im[1]), Complex64::new(re[2], im[2]));
            let t = transverse_project(&k, &j).unwrap();
            let scale = crate::units::cnorm(&j) * k.norm();
            prop_assert!(crate::units::kdot(&k, &t).norm() <= 1e-14 * scale.max(1e-300));
            let tt = transverse_project(&k, &t).unwrap();
            prop_assert!(crate::units::cnorm(&(tt - t)) <= 1e-14 * crate::units::cnorm(&j).max(1e-300));
        }

        #[test]
        fn poisson_mean_and_mass(n in 0.0..50.0f64) {
            let n_max = (n + 10.0 * n.sqrt() + 20.0).ceil() as usize;
            let p = poisson_statistics(n, n_max).unwrap();
            prop_assert_eq!(p.probabilities[0], (-n).exp());
            prop_assert!(p.total() >= 1.0 - 1e-12);
            prop_assert!((p.mean() - n).abs() <= 1e-10 * n.max(1.0));
        }
    }

    #[test]
    fn poisson_examples() {
        let p = poisson_statistics(0.0, 5).unwrap();
        assert_eq!(p.probabilities, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let p = poisson_statistics(2.0, 10).unwrap();
        assert!((p.probabilities[2] - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((p.probabilities[2] - 0.270671).abs() < 1e-6);
        assert!(poisson_statistics(-1.0, 3).is_err());
        let big = poisson_statistics(900.0, 1220).unwrap();
        assert!((big.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn imag_action_round_trip() {
        let consts = PhysicalConstants::NATURAL;
        assert_eq!(imag_action(0.0, &consts), 0.0);
        assert_eq!(imag_action(2.0, &consts), 1.0);
        for n in [0.0, 0.3, 2.0, 17.5] {
            let p0 = poisson_statistics(n, 4).unwrap().probabilities[0];
            assert!((vacuum_persistence(imag_action(n, &consts), &consts) - p0).abs() <= 1e-12);
        }
    }

    struct Zero;
    impl Spectrum for Zero {
        fn sample(&self, _k: &Vec3, _omega: f64) -> SpectralSample {
            SpectralSample::zero()
        }
        fn extent(&self) -> SpectralExtent {
            SpectralExtent { k_max: 1.0, omega_max: 1.0, omega_width: 1.0 }
        }
        fn constants(&self) -> PhysicalConstants {
            PhysicalConstants::NATURAL
        }
    }

    #[test]
    fn zero_current_emits_nothing() {
        let r = mean_photon_number_pulsed(&Zero, &QuadratureSpec::default().with_angular(4, 8)).unwrap();
        assert_eq!(r.n_bar, 0.0);
        assert_eq!(r.radiated_energy, 0.0);
        assert!(r.spectrum.iter().all(|b| b.density == 0.0));
    }

    /// `J = x exp(-(|k|^2 + omega^2) / 2)`, for which `N = 1 / (6 pi)`.
    struct GaussianBlob;
    impl Spectrum for GaussianBlob {
        fn sample(&self, k: &Vec3, omega: f64) -> SpectralSample {
            let a = (-0.5 * (k.norm_squared() + omega * omega)).exp();
            SpectralSample { rho: c(0.0), j: CVec3::new(c(a), c(0.0), c(0.0)) }
        }
        fn extent(&self) -> SpectralExtent {
            SpectralExtent { k_max: 6.0, omega_max: 6.0, omega_width: 1.0 }
        }
        fn constants(&self) -> PhysicalConstants {
            PhysicalConstants::NATURAL
        }
    }

    #[test]
    fn shell_reduction_matches_mollified_delta() {
        let exact = 1.0 / (6.0 * PI);
        let reduced = mean_photon_number_pulsed(&GaussianBlob, &QuadratureSpec::default().with_angular(8, 16)).unwrap();
        assert!((reduced.n_bar - exact).abs() < 1e-9 * exact);
        let sphere = SphereRule::new(8, 16);
        let eps = [0.02, 0.01, 0.005];
        let vals: Vec<f64> = eps.iter().map(|e| mean_photon_number_mollified(&GaussianBlob, *e, 6.0, 24, &sphere)).collect();
        assert!((vals[2] - exact).abs() < (vals[0] - exact).abs());
        let limit = crate::quadrature::extrapolate_to_zero(&eps, &vals);
        assert!((limit - exact).abs() < 1e-4 * exact, "{vals:?} -> {limit} vs {exact}");
    }

    #[test]
    fn csv_has_header_and_cumulative() {
        let r = EmissionResult {
            n_bar: 3.0,
            spectrum: vec![
                SpectrumBin { omega_or_n: 1.0, density: 2.0, weight: 1.0 },
                SpectrumBin { omega_or_n: 2.0, density: 1.0, weight: 1.0 },
            ],
            angular: vec![],
            radiated_energy: 4.0,
            quadrature_error_estimate: 0.0,
            period: Some(1.0),
            k_max: 2.0,
            radial_panels: 0,
            evaluations: 2,
        };
        let mut buf = Vec::new();
        r.write_spectrum_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "omega_or_n,dN,cumulative");
        assert_eq!(lines[2], "2.0000000000000000e0,1.0000000000000000e0,3.0000000000000000e0");
    }
}
