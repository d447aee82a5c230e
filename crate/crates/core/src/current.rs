//! Four-current sources: analytic built-ins and grid-sampled carriers.
//!
//! Point-like charges are Gaussians of width `sigma`. Every built-in is
//! constructed so that `d rho/dt + div J = 0` holds analytically;
//! [`check_continuity`] verifies it at quasi-random points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite, halton, pairwise_sum, uniform_edges, SphereRule};
use crate::sampled::SampledCurrent;
use crate::units::{orthonormal_basis, Vec3};

/// Envelope cut for pulsed sources: `exp(-x^2/2) < 1e-12` beyond this many widths.
pub const PULSE_HALF_WIDTHS: f64 = 7.5;

fn zero3() -> [f64; 3] {
    [0.0; 3]
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// A charge of total `charge` smeared as a Gaussian, moving on a circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitingGaussianCharge {
    pub charge: f64,
    pub orbit_radius: f64,
    pub omega0: f64,
    /// Gaussian width; defaults to `orbit_radius / 50`.
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default = "zero3")]
    pub center: [f64; 3],
    #[serde(default = "z_axis")]
    pub axis: [f64; 3],
    #[serde(default)]
    pub phase: f64,
}

/// A rigid uniform spherical surface charge translated on a circle.
/// The shell is convolved with a Gaussian of width `sigma` so that it can
/// be evaluated pointwise; its form factor is `sinc(kR) exp(-k^2 sigma^2/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitingShell {
    pub charge: f64,
    pub diameter: f64,
    pub orbit_radius: f64,
    pub period: f64,
    /// Shell smearing width; defaults to `orbit_radius / 50`.
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default = "zero3")]
    pub center: [f64; 3],
    #[serde(default = "z_axis")]
    pub axis: [f64; 3],
    #[serde(default)]
    pub phase: f64,
}

/// A smeared point dipole `p(t) = p0 n exp(-(t-t0)^2 / 2 tau^2) cos(omega_c (t-t0))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianDipolePulse {
    pub dipole_amplitude: f64,
    pub carrier_omega: f64,
    pub envelope_width: f64,
    #[serde(default = "z_axis")]
    pub orientation: [f64; 3],
    #[serde(default = "default_dipole_sigma")]
    pub sigma: f64,
    #[serde(default = "zero3")]
    pub center: [f64; 3],
    #[serde(default)]
    pub t0: f64,
}

fn default_dipole_sigma() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticGaussianCharge {
    pub charge: f64,
    #[serde(default = "zero3")]
    pub center: [f64; 3],
    pub sigma: f64,
}

/// A circular filament carrying `current`, smeared by a Gaussian of width `sigma`.
/// `current` is positive for circulation right-handed about `axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticCurrentLoop {
    pub current: f64,
    pub radius: f64,
    #[serde(default = "zero3")]
    pub center: [f64; 3],
    #[serde(default = "z_axis")]
    pub axis: [f64; 3],
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuiltinSource {
    OrbitingGaussianCharge(OrbitingGaussianCharge),
    OrbitingShell(OrbitingShell),
    GaussianDipolePulse(GaussianDipolePulse),
    StaticGaussianCharge(StaticGaussianCharge),
    StaticCurrentLoop(StaticCurrentLoop),
}

/// Temporal character of a source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceMode {
    Pulsed { t_min: f64, t_max: f64 },
    Periodic { period: f64 },
    Static,
}

#[derive(Debug, Clone)]
pub enum FourCurrent {
    Builtin(BuiltinSource),
    Sampled(SampledCurrent),
}

impl From<BuiltinSource> for FourCurrent {
    fn from(b: BuiltinSource) -> Self {
        FourCurrent::Builtin(b)
    }
}

impl From<SampledCurrent> for FourCurrent {
    fn from(s: SampledCurrent) -> Self {
        FourCurrent::Sampled(s)
    }
}

/// Normalised 3D Gaussian and its gradient.
pub(crate) fn gaussian3(d: &Vec3, sigma: f64) -> (f64, Vec3) {
    let s2 = sigma * sigma;
    let g = (2.0 * PI * s2).powf(-1.5) * (-0.5 * d.norm_squared() / s2).exp();
    (g, d * (-g / s2))
}

/// Radial profile of a Gaussian-smeared thin shell (unit charge) and its derivative.
fn shell_profile(s: f64, radius: f64, sigma: f64) -> (f64, f64) {
    let s2 = sigma * sigma;
    let a = 1.0 / (4.0 * PI * radius * (2.0 * PI).sqrt() * sigma);
    let x = s * radius / s2;
    if x < 1e-3 {
        // f(s) = exp(-(s^2+R^2)/2s2) * 2 sinh(x), expanded for small x
        let base = (-(s * s + radius * radius) / (2.0 * s2)).exp();
        let f_over_s = base * 2.0 * (radius / s2) * (1.0 + x * x / 6.0);
        let d = a * 2.0 * (radius / s2) * base * (-(s / s2) * (1.0 + x * x / 6.0) + x * radius / (3.0 * s2));
        return (a * f_over_s, d);
    }
    let e1 = (-(s - radius).powi(2) / (2.0 * s2)).exp();
    let e2 = (-(s + radius).powi(2) / (2.0 * s2)).exp();
    let f = e1 - e2;
    let fp = -(s - radius) / s2 * e1 + (s + radius) / s2 * e2;
    (a * f / s, a * (fp / s - f / (s * s)))
}

impl OrbitingGaussianCharge {
    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or(self.orbit_radius / 50.0)
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega0
    }

    pub(crate) fn orbit(&self) -> Orbit {
        Orbit::new(self.center, self.axis, self.orbit_radius, self.omega0, self.phase)
    }
}

impl OrbitingShell {
    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or(self.orbit_radius / 50.0)
    }

    pub fn shell_radius(&self) -> f64 {
        0.5 * self.diameter
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub(crate) fn orbit(&self) -> Orbit {
        Orbit::new(self.center, self.axis, self.orbit_radius, self.omega0(), self.phase)
    }
}

impl GaussianDipolePulse {
    fn unit(&self) -> Vec3 {
        Vec3::from(self.orientation).normalize()
    }

    /// Dipole moment and its first two time derivatives.
    pub fn moment(&self, t: f64) -> (Vec3, Vec3, Vec3) {
        let u = t - self.t0;
        let tau2 = self.envelope_width * self.envelope_width;
        let w = self.carrier_omega;
        let env = (-0.5 * u * u / tau2).exp();
        let (s, c) = (w * u).sin_cos();
        let p = env * c;
        let pd = env * (-u / tau2 * c - w * s);
        let pdd = env * ((u * u / (tau2 * tau2) - 1.0 / tau2) * c + 2.0 * u / tau2 * w * s - w * w * c);
        let n = self.unit() * self.dipole_amplitude;
        (n * p, n * pd, n * pdd)
    }
}

impl StaticCurrentLoop {
    /// Ring nodes fine enough for pointwise evaluation at smearing `sigma`.
    pub fn ring_nodes(&self) -> usize {
        ((12.0 * self.radius / self.sigma).ceil() as usize).max(64)
    }

    /// Positions, unit tangents and arc-length weight of a trapezoidal ring rule.
    pub fn ring(&self, nodes: usize) -> (Vec<Vec3>, Vec<Vec3>, f64) {
        let (e1, e2, _) = orthonormal_basis(&Vec3::from(self.axis));
        let c = Vec3::from(self.center);
        let dphi = 2.0 * PI / nodes as f64;
        let mut pos = Vec::with_capacity(nodes);
        let mut tan = Vec::with_capacity(nodes);
        for j in 0..nodes {
            let (s, co) = (j as f64 * dphi).sin_cos();
            pos.push(c + (e1 * co + e2 * s) * self.radius);
            tan.push(e2 * co - e1 * s);
        }
        (pos, tan, self.radius * dphi)
    }
}

/// Circular trajectory `r0(t) = c + a (cos(w t + phase) e1 + sin(w t + phase) e2)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Orbit {
    pub center: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub radius: f64,
    pub omega: f64,
    pub phase: f64,
}

impl Orbit {
    fn new(center: [f64; 3], axis: [f64; 3], radius: f64, omega: f64, phase: f64) -> Orbit {
        let (e1, e2, _) = orthonormal_basis(&Vec3::from(axis));
        Orbit { center: Vec3::from(center), e1, e2, radius, omega, phase }
    }

    pub fn position_velocity(&self, t: f64) -> (Vec3, Vec3) {
        let (s, c) = (self.omega * t + self.phase).sin_cos();
        let r = self.center + (self.e1 * c + self.e2 * s) * self.radius;
        let v = (self.e2 * c - self.e1 * s) * (self.radius * self.omega);
        (r, v)
    }
}

/// The two terms of the continuity equation at one point, plus a magnitude
/// scale used to normalise their sum.
#[derive(Debug, Clone, Copy)]
pub struct ContinuityTerms {
    pub drho_dt: f64,
    pub div_j: f64,
    pub scale: f64,
}

impl BuiltinSource {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let finite3 = |v: &[f64; 3]| v.iter().all(|x| x.is_finite());
        match self {
            BuiltinSource::OrbitingGaussianCharge(s) => {
                if !(s.orbit_radius > 0.0 && s.omega0 > 0.0 && s.sigma() > 0.0) {
                    return bad("orbiting charge needs orbit_radius, omega0, sigma > 0".into());
                }
                if Vec3::from(s.axis).norm() == 0.0 || !finite3(&s.center) {
                    return bad("orbiting charge axis must be non-zero".into());
                }
            }
            BuiltinSource::OrbitingShell(s) => {
                if !(s.diameter > 0.0 && s.orbit_radius > 0.0 && s.period > 0.0 && s.sigma() > 0.0) {
                    return bad("orbiting shell needs diameter, orbit_radius, period, sigma > 0".into());
                }
                if 2.0 * s.orbit_radius >= s.diameter {
                    return bad(format!(
                        "orbiting shell requires orbit diameter {} < shell diameter {}",
                        2.0 * s.orbit_radius,
                        s.diameter
                    ));
                }
                if Vec3::from(s.axis).norm() == 0.0 {
                    return bad("orbiting shell axis must be non-zero".into());
                }
            }
            BuiltinSource::GaussianDipolePulse(s) => {
                if !(s.envelope_width > 0.0 && s.sigma > 0.0 && s.carrier_omega >= 0.0) {
                    return bad("dipole pulse needs envelope_width, sigma > 0 and carrier_omega >= 0".into());
                }
                if Vec3::from(s.orientation).norm() == 0.0 {
                    return bad("dipole orientation must be non-zero".into());
                }
            }
            BuiltinSource::StaticGaussianCharge(s) => {
                if !(s.sigma > 0.0) {
                    return bad("static charge needs sigma > 0".into());
                }
            }
            BuiltinSource::StaticCurrentLoop(s) => {
                if !(s.radius > 0.0 && s.sigma > 0.0) {
                    return bad("current loop needs radius, sigma > 0".into());
                }
                if Vec3::from(s.axis).norm() == 0.0 {
                    return bad("current loop axis must be non-zero".into());
                }
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> SourceMode {
        match self {
            BuiltinSource::OrbitingGaussianCharge(s) => SourceMode::Periodic { period: s.period() },
            BuiltinSource::OrbitingShell(s) => SourceMode::Periodic { period: s.period },
            BuiltinSource::GaussianDipolePulse(s) => {
                let half = PULSE_HALF_WIDTHS * s.envelope_width;
                SourceMode::Pulsed { t_min: s.t0 - half, t_max: s.t0 + half }
            }
            BuiltinSource::StaticGaussianCharge(_) | BuiltinSource::StaticCurrentLoop(_) => SourceMode::Static,
        }
    }

    /// Smallest smearing width of the source.
    pub fn smearing(&self) -> f64 {
        match self {
            BuiltinSource::OrbitingGaussianCharge(s) => s.sigma(),
            BuiltinSource::OrbitingShell(s) => s.sigma(),
            BuiltinSource::GaussianDipolePulse(s) => s.sigma,
            BuiltinSource::StaticGaussianCharge(s) => s.sigma,
            BuiltinSource::StaticCurrentLoop(s) => s.sigma,
        }
    }

    /// Centre of the charge distribution at time `t`.
    pub fn center(&self, t: f64) -> Vec3 {
        match self {
            BuiltinSource::OrbitingGaussianCharge(s) => s.orbit().position_velocity(t).0,
            BuiltinSource::OrbitingShell(s) => s.orbit().position_velocity(t).0,
            BuiltinSource::GaussianDipolePulse(s) => Vec3::from(s.center),
            BuiltinSource::StaticGaussianCharge(s) => Vec3::from(s.center),
            BuiltinSource::StaticCurrentLoop(s) => Vec3::from(s.center),
        }
    }

    /// Radius about the (moving) centre containing all but ~1e-20 of the density.
    pub fn radius_hint(&self) -> f64 {
        match self {
            BuiltinSource::OrbitingShell(s) => s.shell_radius() + 10.0 * s.sigma(),
            BuiltinSource::StaticCurrentLoop(s) => s.radius + 10.0 * s.sigma,
            other => 10.0 * other.smearing(),
        }
    }

    /// Bounding box of the space-time support used for sampling.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let (c, reach) = match self {
            BuiltinSource::OrbitingGaussianCharge(s) => (Vec3::from(s.center), s.orbit_radius + 6.0 * s.sigma()),
            BuiltinSource::OrbitingShell(s) => (Vec3::from(s.center), s.orbit_radius + s.shell_radius() + 6.0 * s.sigma()),
            BuiltinSource::GaussianDipolePulse(s) => (Vec3::from(s.center), 6.0 * s.sigma),
            BuiltinSource::StaticGaussianCharge(s) => (Vec3::from(s.center), 6.0 * s.sigma),
            BuiltinSource::StaticCurrentLoop(s) => (Vec3::from(s.center), s.radius + 6.0 * s.sigma),
        };
        let r = Vec3::repeat(reach);
        (c - r, c + r)
    }

    /// Charge density and current density at `(r, t)`.
    pub fn evaluate(&self, r: &Vec3, t: f64) -> (f64, Vec3) {
        match self {
            BuiltinSource::OrbitingGaussianCharge(s) => {
                let (r0, v) = s.orbit().position_velocity(t);
                let rho = s.charge * gaussian3(&(r - r0), s.sigma()).0;
                (rho, v * rho)
            }
            BuiltinSource::OrbitingShell(s) => {
                let (r0, v) = s.orbit().position_velocity(t);
                let rho = s.charge * shell_profile((r - r0).norm(), s.shell_radius(), s.sigma()).0;
                (rho, v * rho)
            }
            BuiltinSource::GaussianDipolePulse(s) => {
                if let SourceMode::Pulsed { t_min, t_max } = self.mode() {
                    if t < t_min || t > t_max {
                        return (0.0, Vec3::zeros());
                    }
                }
                let (p, pd, _) = s.moment(t);
                let (g, grad) = gaussian3(&(r - Vec3::from(s.center)), s.sigma);
                (-p.dot(&grad), pd * g)
            }
            BuiltinSource::StaticGaussianCharge(s) => {
                (s.charge * gaussian3(&(r - Vec3::from(s.center)), s.sigma).0, Vec3::zeros())
            }
            BuiltinSource::StaticCurrentLoop(s) => {
                let (pos, tan, dl) = s.ring(s.ring_nodes());
                let mut j = Vec3::zeros();
                for (p, tv) in pos.iter().zip(&tan) {
                    j += tv * gaussian3(&(r - p), s.sigma).0;
                }
                (0.0, j * (s.current * dl))
            }
        }
    }

    /// Analytic `d rho/dt` and `div J`.
    pub fn continuity_terms(&self, r: &Vec3, t: f64) -> ContinuityTerms {
        match self {
            BuiltinSource::OrbitingGaussianCharge(s) => {
                let (r0, v) = s.orbit().position_velocity(t);
                let (_, grad) = gaussian3(&(r - r0), s.sigma());
                let vg = s.charge * v.dot(&grad);
                ContinuityTerms { drho_dt: -vg, div_j: vg, scale: 2.0 * vg.abs() }
            }
            BuiltinSource::OrbitingShell(s) => {
                let (r0, v) = s.orbit().position_velocity(t);
                let d = r - r0;
                let dist = d.norm();
                let (_, dprof) = shell_profile(dist, s.shell_radius(), s.sigma());
                let grad = if dist > 0.0 { d * (s.charge * dprof / dist) } else { Vec3::zeros() };
                let vg = v.dot(&grad);
                ContinuityTerms { drho_dt: -vg, div_j: vg, scale: 2.0 * vg.abs() }
            }
            BuiltinSource::GaussianDipolePulse(s) => {
                let (_, pd, _) = s.moment(t);
                let (_, grad) = gaussian3(&(r - Vec3::from(s.center)), s.sigma);
                let x = pd.dot(&grad);
                ContinuityTerms { drho_dt: -x, div_j: x, scale: 2.0 * x.abs() }
            }
            BuiltinSource::StaticGaussianCharge(_) => ContinuityTerms { drho_dt: 0.0, div_j: 0.0, scale: 0.0 },
            BuiltinSource::StaticCurrentLoop(s) => {
                let (pos, tan, dl) = s.ring(s.ring_nodes());
                let terms: Vec<f64> = pos
                    .iter()
                    .zip(&tan)
                    .map(|(p, tv)| tv.dot(&gaussian3(&(r - p), s.sigma).1) * s.current * dl)
                    .collect();
                ContinuityTerms {
                    drho_dt: 0.0,
                    div_j: pairwise_sum(&terms),
                    scale: terms.iter().map(|x| x.abs()).sum(),
                }
            }
        }
    }
}

impl FourCurrent {
    pub fn validate(&self) -> Result<()> {
        match self {
            FourCurrent::Builtin(b) => b.validate(),
            FourCurrent::Sampled(s) => s.validate(),
        }
    }

    pub fn mode(&self) -> SourceMode {
        match self {
            FourCurrent::Builtin(b) => b.mode(),
            FourCurrent::Sampled(s) => {
                let (t0, t1) = s.time_range();
                SourceMode::Pulsed { t_min: t0, t_max: t1 }
            }
        }
    }

    pub fn evaluate(&self, r: &Vec3, t: f64) -> (f64, Vec3) {
        match self {
            FourCurrent::Builtin(b) => b.evaluate(r, t),
            FourCurrent::Sampled(s) => s.evaluate(r, t),
        }
    }
}

/// Continuity residual statistics. Residuals are normalised pointwise by
/// `|d rho/dt| + sum_i |d_i J_i|` so that they are dimensionless.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub samples: usize,
    pub max_residual: f64,
    pub rms_residual: f64,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn time_window(mode: SourceMode) -> (f64, f64) {
    match mode {
        SourceMode::Pulsed { t_min, t_max } => (t_min, t_max),
        SourceMode::Periodic { period } => (0.0, period),
        SourceMode::Static => (0.0, 1.0),
    }
}

/// Residual of `d rho/dt + div J` at quasi-random points of the support.
pub fn check_continuity(source: &FourCurrent, samples: usize, tolerance: f64) -> Result<ContinuityReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("continuity check needs samples > 0".into()));
    }
    let residuals: Vec<(f64, f64)> = match source {
        FourCurrent::Builtin(b) => {
            let (lo, hi) = b.bounding_box();
            let (t0, t1) = time_window(b.mode());
            (0..samples)
                .map(|i| {
                    let r = Vec3::new(
                        lo.x + (hi.x - lo.x) * halton(i, 0),
                        lo.y + (hi.y - lo.y) * halton(i, 1),
                        lo.z + (hi.z - lo.z) * halton(i, 2),
                    );
                    let t = t0 + (t1 - t0) * halton(i, 3);
                    let ct = b.continuity_terms(&r, t);
                    let abs = (ct.drho_dt + ct.div_j).abs();
                    (if ct.scale > 0.0 { abs / ct.scale } else { 0.0 }, abs)
                })
                .collect()
        }
        FourCurrent::Sampled(s) => s.continuity_residuals(samples),
    };
    let n = residuals.len().max(1);
    let max_residual = residuals.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_abs_residual = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    let sq: Vec<f64> = residuals.iter().map(|r| r.0 * r.0).collect();
    let rms_residual = (pairwise_sum(&sq) / n as f64).sqrt();
    Ok(ContinuityReport {
        samples: residuals.len(),
        max_residual,
        rms_residual,
        max_abs_residual,
        tolerance,
        passed: max_residual <= tolerance,
    })
}

/// `int rho(r, t) d^3 r`.
pub fn total_charge(source: &FourCurrent, t: f64) -> f64 {
    match source {
        FourCurrent::Builtin(b) => {
            if matches!(b, BuiltinSource::StaticCurrentLoop(_)) {
                return 0.0;
            }
            let center = b.center(t);
            let r_max = b.radius_hint();
            let panels = ((r_max / (0.5 * b.smearing())).ceil() as usize).max(8);
            let radial = composite(&uniform_edges(0.0, r_max, panels), 8);
            let sphere = SphereRule::new(8, 16);
            let shells: Vec<f64> = radial
                .nodes
                .iter()
                .zip(&radial.weights)
                .map(|(&r, &wr)| {
                    let ang: Vec<f64> = sphere
                        .directions
                        .iter()
                        .zip(&sphere.weights)
                        .map(|(d, w)| w * b.evaluate(&(center + d * r), t).0)
                        .collect();
                    wr * r * r * pairwise_sum(&ang)
                })
                .collect();
            pairwise_sum(&shells)
        }
        FourCurrent::Sampled(s) => s.total_charge(t),
    }
}
