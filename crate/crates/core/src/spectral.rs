//! Four-dimensional Fourier transforms of sources.
//!
//! Convention: `J^mu_Q = int exp(-i Q.x) J^mu(x) d^4x` with
//! `Q.x = k.r - omega t` and `d^4x = c dt d^3r`. A sample stores the charge
//! transform `rho_Q`; the temporal component is `J^0_Q = c rho_Q`, so
//! continuity reads `k.J_Q - omega rho_Q = 0`.
//!
//! Periodic sources are described by spatial harmonics
//! `(rho_n, J_n)(k) = (1/T) int_0^T exp(i n w0 t) [spatial transform](k, t) dt`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::current::{BuiltinSource, FourCurrent, Orbit, SourceMode};
use crate::error::{Error, Result};
use crate::sampled::SampledCurrent;
use crate::units::{complexify, czero, kdot, CVec3, PhysicalConstants, Vec3};

/// Flat fraction of the Tukey window applied to sampled sources in time.
pub const TUKEY_FLAT_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub rho: Complex64,
    pub j: CVec3,
}

impl SpectralSample {
    pub fn zero() -> Self {
        SpectralSample { rho: Complex64::new(0.0, 0.0), j: czero() }
    }

    pub fn conj(&self) -> Self {
        SpectralSample { rho: self.rho.conj(), j: self.j.map(|z| z.conj()) }
    }

    /// Largest absolute difference over the four components.
    pub fn max_abs_diff(&self, other: &SpectralSample) -> f64 {
        let mut m = (self.rho - other.rho).norm();
        for i in 0..3 {
            m = m.max((self.j[i] - other.j[i]).norm());
        }
        m
    }

    pub fn magnitude(&self, consts: &PhysicalConstants) -> f64 {
        (consts.c * consts.c * self.rho.norm_sqr() + crate::units::cnorm_sqr(&self.j)).sqrt()
    }
}

impl Add for SpectralSample {
    type Output = SpectralSample;
    fn add(self, o: SpectralSample) -> SpectralSample {
        SpectralSample { rho: self.rho + o.rho, j: self.j + o.j }
    }
}

impl Sub for SpectralSample {
    type Output = SpectralSample;
    fn sub(self, o: SpectralSample) -> SpectralSample {
        SpectralSample { rho: self.rho - o.rho, j: self.j - o.j }
    }
}

impl Mul<Complex64> for SpectralSample {
    type Output = SpectralSample;
    fn mul(self, s: Complex64) -> SpectralSample {
        SpectralSample { rho: self.rho * s, j: self.j * s }
    }
}

impl Mul<f64> for SpectralSample {
    type Output = SpectralSample;
    fn mul(self, s: f64) -> SpectralSample {
        self * Complex64::new(s, 0.0)
    }
}

/// Where a spectrum lives: negligible beyond `k_max` and `omega_max`;
/// `omega_width` is the narrowest frequency feature to resolve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralExtent {
    pub k_max: f64,
    pub omega_max: f64,
    pub omega_width: f64,
}

/// A pulsed (finite-duration) spectrum `J^mu_Q` at arbitrary `(k, omega)`.
pub trait Spectrum: Sync {
    fn sample(&self, k: &Vec3, omega: f64) -> SpectralSample;
    fn extent(&self) -> SpectralExtent;
    fn constants(&self) -> PhysicalConstants;

    /// True when the transform is periodic beyond `k_max` (sampled grids),
    /// so nothing past it is physical.
    fn band_limited(&self) -> bool {
        false
    }
}

/// Spatial harmonics of a periodic source.
pub trait HarmonicSpectrum: Sync {
    fn omega0(&self) -> f64;
    fn harmonic(&self, n: i32, k: &Vec3) -> SpectralSample;
    /// Harmonics `lo..=hi` at one `k`.
    fn harmonics(&self, lo: i32, hi: i32, k: &Vec3) -> Vec<SpectralSample> {
        (lo..=hi).map(|n| self.harmonic(n, k)).collect()
    }
    fn constants(&self) -> PhysicalConstants;

    fn period(&self) -> f64 {
        2.0 * PI / self.omega0()
    }
}

/// `sin(x)/x`, with its series below `x = 1e-4`.
pub fn shell_form_factor(kr: f64) -> f64 {
    if kr.abs() < 1e-4 {
        let x2 = kr * kr;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        kr.sin() / kr
    }
}

/// Spatial form factor of a rigid, spherically symmetric unit charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FormFactor {
    Shell { radius: f64 },
    Gaussian { sigma: f64 },
    SmearedShell { radius: f64, sigma: f64 },
}

impl FormFactor {
    pub fn eval(&self, k: f64) -> f64 {
        match *self {
            FormFactor::Shell { radius } => shell_form_factor(k * radius),
            FormFactor::Gaussian { sigma } => (-0.5 * k * k * sigma * sigma).exp(),
            FormFactor::SmearedShell { radius, sigma } => {
                shell_form_factor(k * radius) * (-0.5 * k * k * sigma * sigma).exp()
            }
        }
    }
}

fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// Spatial transform `int exp(-i k.r) (rho, J)(r, t) d^3r` of a built-in.
pub fn spatial_transform(source: &BuiltinSource, k: &Vec3, t: f64) -> SpectralSample {
    let k2 = k.norm_squared();
    match source {
        BuiltinSource::OrbitingGaussianCharge(s) => {
            let (r0, v) = s.orbit().position_velocity(t);
            let f = s.charge * (-0.5 * k2 * s.sigma().powi(2)).exp();
            let rho = cis(-k.dot(&r0)) * f;
            SpectralSample { rho, j: complexify(&v) * rho }
        }
        BuiltinSource::OrbitingShell(s) => {
            let (r0, v) = s.orbit().position_velocity(t);
            let ff = FormFactor::SmearedShell { radius: s.shell_radius(), sigma: s.sigma() }.eval(k2.sqrt());
            let rho = cis(-k.dot(&r0)) * (s.charge * ff);
            SpectralSample { rho, j: complexify(&v) * rho }
        }
        BuiltinSource::GaussianDipolePulse(s) => {
            let (p, pd, _) = s.moment(t);
            let g = cis(-k.dot(&Vec3::from(s.center))) * (-0.5 * k2 * s.sigma * s.sigma).exp();
            SpectralSample { rho: Complex64::new(0.0, -k.dot(&p)) * g, j: complexify(&pd) * g }
        }
        BuiltinSource::StaticGaussianCharge(s) => {
            let rho = cis(-k.dot(&Vec3::from(s.center))) * (s.charge * (-0.5 * k2 * s.sigma * s.sigma).exp());
            SpectralSample { rho, j: czero() }
        }
        BuiltinSource::StaticCurrentLoop(s) => {
            let nodes = 64 + 2 * (k2.sqrt() * s.radius).ceil() as usize;
            let (pos, tan, dl) = s.ring(nodes);
            let mut j = czero();
            for (p, tv) in pos.iter().zip(&tan) {
                j += complexify(tv) * cis(-k.dot(p));
            }
            let f = s.current * dl * (-0.5 * k2 * s.sigma * s.sigma).exp();
            SpectralSample { rho: Complex64::new(0.0, 0.0), j: j * Complex64::new(f, 0.0) }
        }
    }
}

/// Closed-form `int exp(i omega t) p(t) dt` of the dipole moment.
fn dipole_moment_transform(s: &crate::current::GaussianDipolePulse, omega: f64) -> CVec3 {
    let tau = s.envelope_width;
    let wc = s.carrier_omega;
    let env = 0.5
        * (2.0 * PI).sqrt()
        * tau
        * ((-0.5 * (omega - wc).powi(2) * tau * tau).exp() + (-0.5 * (omega + wc).powi(2) * tau * tau).exp());
    let n = Vec3::from(s.orientation).normalize() * s.dipole_amplitude;
    complexify(&n) * (cis(omega * s.t0) * env)
}

/// Four-dimensional transform of a pulsed source at `(k, omega)`.
pub fn transform_pulsed(source: &FourCurrent, k: &Vec3, omega: f64, consts: &PhysicalConstants) -> Result<SpectralSample> {
    match source.mode() {
        SourceMode::Pulsed { .. } => {}
        SourceMode::Periodic { .. } => {
            return Err(Error::WrongMode("periodic source: use transform_periodic".into()));
        }
        SourceMode::Static => {
            return Err(Error::WrongMode("static source has no pulsed transform; wrap it in a WindowedStatic".into()));
        }
    }
    Ok(match source {
        FourCurrent::Builtin(BuiltinSource::GaussianDipolePulse(s)) => {
            let p = dipole_moment_transform(s, omega);
            let g = cis(-k.dot(&Vec3::from(s.center))) * (-0.5 * k.norm_squared() * s.sigma * s.sigma).exp();
            let c = Complex64::new(consts.c, 0.0);
            // rho_Q = c (-i k.P) g ; J_Q = c (-i omega) P g
            SpectralSample {
                rho: c * Complex64::new(0.0, -1.0) * kdot(k, &p) * g,
                j: p * (c * Complex64::new(0.0, -omega) * g),
            }
        }
        FourCurrent::Sampled(s) => sampled_transform(s, k, omega, consts),
        FourCurrent::Builtin(_) => unreachable!("only the dipole pulse is a pulsed built-in"),
    })
}

/// Harmonic `n` of a periodic (or static) source.
pub fn transform_periodic(source: &FourCurrent, n: i32, k: &Vec3) -> Result<SpectralSample> {
    let b = match (source, source.mode()) {
        (FourCurrent::Builtin(b), SourceMode::Periodic { .. } | SourceMode::Static) => b,
        _ => return Err(Error::WrongMode("pulsed source: use transform_pulsed".into())),
    };
    Ok(builtin_harmonics(b, n, n, k).remove(0))
}

/// `J_m(x)` for any integer order.
fn bessel_j(m: i32, x: f64) -> f64 {
    let v = libm::jn(m.abs(), x);
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `(-i)^m`.
fn minus_i_pow(m: i32) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Harmonics `(1/T) int_0^T exp(i n w t) (rho, J)(k, t) dt` of a rigid profile
/// with transform `amp` carried on `orbit`, by the Jacobi-Anger expansion.
fn orbit_harmonics(orbit: &Orbit, amp: f64, lo: i32, hi: i32, k: &Vec3) -> Vec<SpectralSample> {
    let (k1, k2) = (k.dot(&orbit.e1), k.dot(&orbit.e2));
    let x = orbit.radius * k1.hypot(k2);
    let beta = k2.atan2(k1);
    let base = cis(-k.dot(&orbit.center)) * amp;
    // rho(k, t) = sum_m a(m) exp(i m w t)
    let a = |m: i32| base * minus_i_pow(m) * bessel_j(m, x) * cis(m as f64 * (orbit.phase - beta));
    let up = complexify(&orbit.e2) + complexify(&orbit.e1) * Complex64::new(0.0, 1.0);
    let down = complexify(&orbit.e2) - complexify(&orbit.e1) * Complex64::new(0.0, 1.0);
    let half_v = 0.5 * orbit.radius * orbit.omega;
    (lo..=hi)
        .map(|n| {
            let plus = a(-n - 1) * cis(orbit.phase) * half_v;
            let minus = a(-n + 1) * cis(-orbit.phase) * half_v;
            SpectralSample { rho: a(-n), j: up * plus + down * minus }
        })
        .collect()
}

fn builtin_harmonics(b: &BuiltinSource, lo: i32, hi: i32, k: &Vec3) -> Vec<SpectralSample> {
    let k_abs = k.norm();
    match b {
        BuiltinSource::OrbitingGaussianCharge(s) => {
            orbit_harmonics(&s.orbit(), s.charge * FormFactor::Gaussian { sigma: s.sigma() }.eval(k_abs), lo, hi, k)
        }
        BuiltinSource::OrbitingShell(s) => {
            let ff = FormFactor::SmearedShell { radius: s.shell_radius(), sigma: s.sigma() }.eval(k_abs);
            orbit_harmonics(&s.orbit(), s.charge * ff, lo, hi, k)
        }
        _ => {
            let s = spatial_transform(b, k, 0.0);
            (lo..=hi).map(|n| if n == 0 { s } else { SpectralSample::zero() }).collect()
        }
    }
}

/// A pulsed source viewed as a [`Spectrum`].
pub struct PulsedSpectrum<'a> {
    source: &'a FourCurrent,
    consts: PhysicalConstants,
    extent: SpectralExtent,
}

impl<'a> PulsedSpectrum<'a> {
    pub fn new(source: &'a FourCurrent, consts: PhysicalConstants) -> Result<Self> {
        if !matches!(source.mode(), SourceMode::Pulsed { .. }) {
            return Err(Error::WrongMode("source is not pulsed".into()));
        }
        let extent = match source {
            FourCurrent::Builtin(BuiltinSource::GaussianDipolePulse(s)) => {
                let omega_max = s.carrier_omega + 9.0 / s.envelope_width;
                SpectralExtent {
                    k_max: (omega_max / consts.c).min(9.0 / s.sigma),
                    omega_max,
                    omega_width: 1.0 / s.envelope_width,
                }
            }
            FourCurrent::Sampled(s) => SpectralExtent {
                k_max: PI / s.dx,
                omega_max: PI / s.dt,
                omega_width: 2.0 * PI / (s.dims[3] as f64 * s.dt),
            },
            FourCurrent::Builtin(_) => unreachable!(),
        };
        Ok(PulsedSpectrum { source, consts, extent })
    }
}

impl Spectrum for PulsedSpectrum<'_> {
    fn sample(&self, k: &Vec3, omega: f64) -> SpectralSample {
        transform_pulsed(self.source, k, omega, &self.consts).expect("mode checked at construction")
    }

    fn extent(&self) -> SpectralExtent {
        self.extent
    }

    fn constants(&self) -> PhysicalConstants {
        self.consts
    }

    fn band_limited(&self) -> bool {
        matches!(self.source, FourCurrent::Sampled(_))
    }
}

/// A periodic built-in viewed as a [`HarmonicSpectrum`]. Static built-ins
/// are accepted with a nominal unit period and have no harmonics.
pub struct PeriodicSpectrum<'a> {
    source: &'a BuiltinSource,
    period: f64,
    consts: PhysicalConstants,
}

impl<'a> PeriodicSpectrum<'a> {
    pub fn new(source: &'a FourCurrent, consts: PhysicalConstants) -> Result<Self> {
        match (source, source.mode()) {
            (FourCurrent::Builtin(b), SourceMode::Periodic { period }) => Ok(PeriodicSpectrum { source: b, period, consts }),
            (FourCurrent::Builtin(b), SourceMode::Static) => Ok(PeriodicSpectrum { source: b, period: 1.0, consts }),
            _ => Err(Error::WrongMode("source is neither periodic nor static".into())),
        }
    }
}

impl HarmonicSpectrum for PeriodicSpectrum<'_> {
    fn omega0(&self) -> f64 {
        2.0 * PI / self.period
    }

    fn harmonic(&self, n: i32, k: &Vec3) -> SpectralSample {
        builtin_harmonics(self.source, n, n, k).remove(0)
    }

    fn harmonics(&self, lo: i32, hi: i32, k: &Vec3) -> Vec<SpectralSample> {
        builtin_harmonics(self.source, lo, hi, k)
    }

    fn constants(&self) -> PhysicalConstants {
        self.consts
    }
}

/// Static sources switched on and off by a Gaussian window
/// `w(t) = exp(-t^2 / 2 tau^2)`; effective duration `int w^2 dt = tau sqrt(pi)`.
pub struct WindowedStatic {
    pub sources: Vec<BuiltinSource>,
    pub tau: f64,
    pub consts: PhysicalConstants,
}

impl WindowedStatic {
    pub fn new(sources: Vec<BuiltinSource>, tau: f64, consts: PhysicalConstants) -> Result<Self> {
        if sources.iter().any(|s| s.mode() != SourceMode::Static) {
            return Err(Error::WrongMode("windowed sources must be static".into()));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter("window width must be positive".into()));
        }
        Ok(WindowedStatic { sources, tau, consts })
    }

    pub fn effective_duration(&self) -> f64 {
        self.tau * PI.sqrt()
    }

    fn window_transform(&self, omega: f64) -> f64 {
        (2.0 * PI).sqrt() * self.tau * (-0.5 * omega * omega * self.tau * self.tau).exp()
    }
}

impl Spectrum for WindowedStatic {
    fn sample(&self, k: &Vec3, omega: f64) -> SpectralSample {
        let w = self.consts.c * self.window_transform(omega);
        self.sources.iter().fold(SpectralSample::zero(), |acc, s| acc + spatial_transform(s, k, 0.0) * w)
    }

    fn extent(&self) -> SpectralExtent {
        let sigma = self.sources.iter().map(|s| s.smearing()).fold(f64::INFINITY, f64::min);
        SpectralExtent { k_max: 7.0 / sigma, omega_max: 9.0 / self.tau, omega_width: 1.0 / self.tau }
    }

    fn constants(&self) -> PhysicalConstants {
        self.consts
    }
}

/// A periodic source gated by a flat-top envelope of length `periods * T`
/// with Gaussian edges of width `edge`. Only the current is gated, so the
/// charge density is not conserved at the edges; the transverse current,
/// which is all that radiates, is well defined.
pub struct WaveTrain<'a, H: HarmonicSpectrum> {
    pub periodic: &'a H,
    pub periods: f64,
    pub edge: f64,
    pub n_max: i32,
    pub k_max: f64,
}

impl<H: HarmonicSpectrum> WaveTrain<'_, H> {
    pub fn envelope_transform(&self, omega: f64) -> f64 {
        let len = self.periods * self.periodic.period();
        let rect = if omega.abs() < 1e-12 { len } else { 2.0 * (0.5 * omega * len).sin() / omega };
        rect * (-0.5 * omega * omega * self.edge * self.edge).exp()
    }
}

impl<H: HarmonicSpectrum> Spectrum for WaveTrain<'_, H> {
    fn sample(&self, k: &Vec3, omega: f64) -> SpectralSample {
        let w0 = self.periodic.omega0();
        let c = self.periodic.constants().c;
        let hs = self.periodic.harmonics(-self.n_max, self.n_max, k);
        hs.iter().zip(-self.n_max..=self.n_max).fold(SpectralSample::zero(), |acc, (h, n)| {
            acc + *h * (c * self.envelope_transform(omega - n as f64 * w0))
        })
    }

    fn extent(&self) -> SpectralExtent {
        let w0 = self.periodic.omega0();
        SpectralExtent {
            k_max: self.k_max,
            omega_max: (self.n_max as f64 + 0.5) * w0,
            omega_width: 2.0 * PI / (self.periods * self.periodic.period()),
        }
    }

    fn constants(&self) -> PhysicalConstants {
        self.periodic.constants()
    }
}

/// Tukey window value at fractional position `x` in `[0, 1]`.
pub fn tukey(x: f64, flat_fraction: f64) -> f64 {
    let alpha = 1.0 - flat_fraction;
    if alpha <= 0.0 {
        return 1.0;
    }
    if x < 0.5 * alpha {
        0.5 * (1.0 - (2.0 * PI * x / alpha).cos())
    } else if x > 1.0 - 0.5 * alpha {
        0.5 * (1.0 - (2.0 * PI * (1.0 - x) / alpha).cos())
    } else {
        1.0
    }
}

fn time_window(s: &SampledCurrent) -> Vec<f64> {
    let nt = s.dims[3];
    (0..nt)
        .map(|it| if nt > 1 { tukey(it as f64 / (nt - 1) as f64, TUKEY_FLAT_FRACTION) } else { 1.0 })
        .collect()
}

/// Windowed direct Fourier sum, evaluated at arbitrary `(k, omega)`.
fn sampled_transform(s: &SampledCurrent, k: &Vec3, omega: f64, consts: &PhysicalConstants) -> SpectralSample {
    let [nx, ny, nz, nt] = s.dims;
    let axis = |n: usize, x0: f64, h: f64, kk: f64| -> Vec<Complex64> { (0..n).map(|i| cis(-kk * (x0 + i as f64 * h))).collect() };
    let px = axis(nx, s.origin[0], s.dx, k.x);
    let py = axis(ny, s.origin[1], s.dx, k.y);
    let pz = axis(nz, s.origin[2], s.dx, k.z);
    let win = time_window(s);
    let pt: Vec<Complex64> = (0..nt).map(|it| cis(omega * s.time(it)) * win[it]).collect();
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for ix in 0..nx {
        let mut ay = [Complex64::new(0.0, 0.0); 4];
        for iy in 0..ny {
            let mut az = [Complex64::new(0.0, 0.0); 4];
            for iz in 0..nz {
                let mut at = [Complex64::new(0.0, 0.0); 4];
                let base = s.index(ix, iy, iz, 0);
                for it in 0..nt {
                    let p = pt[it];
                    at[0] += p * s.rho[base + it];
                    for c in 0..3 {
                        at[c + 1] += p * s.j[c][base + it];
                    }
                }
                for c in 0..4 {
                    az[c] += pz[iz] * at[c];
                }
            }
            for c in 0..4 {
                ay[c] += py[iy] * az[c];
            }
        }
        for c in 0..4 {
            acc[c] += px[ix] * ay[c];
        }
    }
    let scale = consts.c * s.dx.powi(3) * s.dt;
    SpectralSample { rho: acc[0] * scale, j: CVec3::new(acc[1], acc[2], acc[3]) * Complex64::new(scale, 0.0) }
}

fn fft_along(data: &mut [Complex64], dims: [usize; 4], axis: usize, planner: &mut FftPlanner<f64>) {
    let n = dims[axis];
    if n == 1 {
        return;
    }
    let fft = planner.plan_fft_forward(n);
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * n * stride + inner;
            for (i, v) in line.iter_mut().enumerate() {
                *v = data[base + i * stride];
            }
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
}

/// Grid-domain and DFT-domain L2 norms of the windowed four-current
/// (`c rho` and `J`). Parseval's theorem makes them equal.
pub fn windowed_norms(s: &SampledCurrent, consts: &PhysicalConstants) -> (f64, f64) {
    let win = time_window(s);
    let nt = s.dims[3];
    let n = s.len();
    let mut planner = FftPlanner::new();
    let mut grid = 0.0;
    let mut spectral = 0.0;
    let comps: [(&Vec<f64>, f64); 4] = [(&s.rho, consts.c), (&s.j[0], 1.0), (&s.j[1], 1.0), (&s.j[2], 1.0)];
    for (values, scale) in comps {
        let mut data: Vec<Complex64> = values.iter().enumerate().map(|(i, v)| Complex64::new(scale * v * win[i % nt], 0.0)).collect();
        grid += data.iter().map(|z| z.norm_sqr()).sum::<f64>();
        for axis in 0..4 {
            fft_along(&mut data, s.dims, axis, &mut planner);
        }
        spectral += data.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
    }
    (grid.sqrt(), spectral.sqrt())
}
