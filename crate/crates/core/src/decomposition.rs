//! Radiating / non-radiating split of a current.
//!
//! The radiating part keeps the transverse current near the light shell,
//! `J_rad(k, omega) = w_eps(Q^2) (1 - k k/|k|^2) J(k, omega)` with
//! `w_eps(x) = exp(-x^2 / 2 eps^2)`, and carries no charge density. The
//! non-radiating part is the remainder. Since `w_eps(0) = 1`, the remainder
//! has no transverse current on the shell and emits no photons for any `eps`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite, pairwise_sum, uniform_edges, QuadratureSpec, Rule, SphereRule};
use crate::radiation::{mean_photon_number_fixed, mean_photon_number_pulsed, photon_rate_periodic, transverse_project, EmissionResult};
use crate::sampled::SampledCurrent;
use crate::spectral::{HarmonicSpectrum, SpectralExtent, SpectralSample, Spectrum};
use crate::units::{cnorm, kdot, wave_square, PhysicalConstants, Vec3};

/// Unit-height Gaussian shell weight.
pub fn shell_weight(q2: f64, epsilon: f64) -> f64 {
    (-0.5 * (q2 / epsilon).powi(2)).exp()
}

/// Default mollifier width for a spectrum peaked at wave number `peak_k`.
pub fn default_epsilon(peak_k: f64) -> f64 {
    1e-2 * peak_k * peak_k
}

fn rad_sample(s: &SpectralSample, k: &Vec3, q2: f64, epsilon: f64) -> SpectralSample {
    let w = shell_weight(q2, epsilon);
    if w == 0.0 || k.norm_squared() == 0.0 {
        return SpectralSample::zero();
    }
    let jt = transverse_project(k, &s.j).expect("nonzero k");
    SpectralSample { rho: Complex64::new(0.0, 0.0), j: jt * Complex64::new(w, 0.0) }
}

/// Split of a pulsed spectrum at mollifier width `epsilon` (units of `Q^2`).
pub struct CurrentSplit<'a, S: Spectrum + ?Sized> {
    pub original: &'a S,
    pub epsilon: f64,
}

impl<'a, S: Spectrum + ?Sized> CurrentSplit<'a, S> {
    pub fn new(original: &'a S, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(CurrentSplit { original, epsilon })
    }

    pub fn rad(&self, k: &Vec3, omega: f64) -> SpectralSample {
        let consts = self.original.constants();
        rad_sample(&self.original.sample(k, omega), k, wave_square(k, omega, &consts), self.epsilon)
    }

    pub fn nonrad(&self, k: &Vec3, omega: f64) -> SpectralSample {
        self.parts(k, omega).2
    }

    /// (original, rad, nonrad) at one point.
    pub fn parts(&self, k: &Vec3, omega: f64) -> (SpectralSample, SpectralSample, SpectralSample) {
        let consts = self.original.constants();
        let s = self.original.sample(k, omega);
        let r = rad_sample(&s, k, wave_square(k, omega, &consts), self.epsilon);
        (s, r, s - r)
    }

    pub fn radiating(&self) -> Part<'_, 'a, S> {
        Part { split: self, rad: true }
    }

    pub fn nonradiating(&self) -> Part<'_, 'a, S> {
        Part { split: self, rad: false }
    }
}

/// One side of a [`CurrentSplit`], usable wherever a spectrum is.
pub struct Part<'s, 'a, S: Spectrum + ?Sized> {
    split: &'s CurrentSplit<'a, S>,
    rad: bool,
}

impl<S: Spectrum + ?Sized> Spectrum for Part<'_, '_, S> {
    fn sample(&self, k: &Vec3, omega: f64) -> SpectralSample {
        if self.rad {
            self.split.rad(k, omega)
        } else {
            self.split.nonrad(k, omega)
        }
    }

    fn extent(&self) -> SpectralExtent {
        self.split.original.extent()
    }

    fn constants(&self) -> PhysicalConstants {
        self.split.original.constants()
    }

    fn band_limited(&self) -> bool {
        self.split.original.band_limited()
    }
}

/// The same split applied harmonic by harmonic, with `Q^2 = |k|^2 - k_n^2`.
pub struct HarmonicSplit<'a, H: HarmonicSpectrum + ?Sized> {
    pub original: &'a H,
    pub epsilon: f64,
}

impl<'a, H: HarmonicSpectrum + ?Sized> HarmonicSplit<'a, H> {
    pub fn new(original: &'a H, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(HarmonicSplit { original, epsilon })
    }

    fn shell(&self, n: i32) -> f64 {
        n as f64 * self.original.omega0() / self.original.constants().c
    }

    pub fn rad(&self, n: i32, k: &Vec3) -> SpectralSample {
        let kn = self.shell(n);
        rad_sample(&self.original.harmonic(n, k), k, k.norm_squared() - kn * kn, self.epsilon)
    }

    pub fn nonrad(&self, n: i32, k: &Vec3) -> SpectralSample {
        let kn = self.shell(n);
        let s = self.original.harmonic(n, k);
        s - rad_sample(&s, k, k.norm_squared() - kn * kn, self.epsilon)
    }

    pub fn radiating(&self) -> HarmonicPart<'_, 'a, H> {
        HarmonicPart { split: self, rad: true }
    }

    pub fn nonradiating(&self) -> HarmonicPart<'_, 'a, H> {
        HarmonicPart { split: self, rad: false }
    }
}

pub struct HarmonicPart<'s, 'a, H: HarmonicSpectrum + ?Sized> {
    split: &'s HarmonicSplit<'a, H>,
    rad: bool,
}

impl<H: HarmonicSpectrum + ?Sized> HarmonicSpectrum for HarmonicPart<'_, '_, H> {
    fn omega0(&self) -> f64 {
        self.split.original.omega0()
    }

    fn harmonic(&self, n: i32, k: &Vec3) -> SpectralSample {
        if self.rad {
            self.split.rad(n, k)
        } else {
            self.split.nonrad(n, k)
        }
    }

    fn constants(&self) -> PhysicalConstants {
        self.split.original.constants()
    }
}

/// Pointwise checks of a split at random sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDiagnostics {
    pub epsilon: f64,
    pub samples: usize,
    /// Largest `|rad + nonrad - original|` relative to the largest `|original|`.
    pub reconstruction_residual: f64,
    /// Largest `|k.J_rad| / (|k| |J_rad|)`.
    pub transversality_residual: f64,
    /// Largest `|J_rad|` relative to the largest `|J|` over the samples.
    pub rad_fraction_max: f64,
}

/// Random sample points `(k, omega)`: half near the light shell, half
/// anywhere inside the spectral extent.
pub fn sample_points(ext: &SpectralExtent, c: f64, count: usize, seed: u64) -> Vec<(Vec3, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_top = ext.k_max.min(ext.omega_max / c);
    (0..count)
        .map(|i| {
            let z: f64 = rng.random_range(-1.0..1.0);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let s = (1.0 - z * z).sqrt();
            let u = Vec3::new(s * phi.cos(), s * phi.sin(), z);
            let k = rng.random_range(1e-3..1.0) * k_top;
            let omega = if i % 2 == 0 {
                c * k * (1.0 + rng.random_range(-0.05..0.05))
            } else {
                rng.random_range(-1.0..1.0) * ext.omega_max
            };
            (u * k, omega)
        })
        .collect()
}

pub fn diagnose_split<S: Spectrum + ?Sized>(split: &CurrentSplit<'_, S>, samples: usize, seed: u64) -> SplitDiagnostics {
    let consts = split.original.constants();
    let pts = sample_points(&split.original.extent(), consts.c, samples, seed);
    let rows: Vec<(f64, f64, f64, f64, f64)> = pts
        .par_iter()
        .map(|(k, w)| {
            let (o, r, n) = split.parts(k, *w);
            let recon = (r + n).max_abs_diff(&o);
            let jr = cnorm(&r.j);
            let trans = if jr > 0.0 { kdot(k, &r.j).norm() / (k.norm() * jr) } else { 0.0 };
            (recon, o.magnitude(&consts), trans, jr, cnorm(&o.j))
        })
        .collect();
    let max = |f: &dyn Fn(&(f64, f64, f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let scale = max(&|r| r.1);
    let jscale = max(&|r| r.4);
    SplitDiagnostics {
        epsilon: split.epsilon,
        samples,
        reconstruction_residual: if scale > 0.0 { max(&|r| r.0) / scale } else { 0.0 },
        transversality_residual: max(&|r| r.2),
        rad_fraction_max: if jscale > 0.0 { max(&|r| r.3) / jscale } else { 0.0 },
    }
}

/// `N(nonrad) / N(original)`, defined as 0 when the original is dark.
pub fn nonrad_photon_fraction<S: Spectrum + ?Sized>(split: &CurrentSplit<'_, S>, quad: &QuadratureSpec) -> Result<f64> {
    let original = mean_photon_number_pulsed(split.original, quad)?;
    nonrad_fraction_given(split, quad, &original)
}

pub(crate) fn nonrad_fraction_given<S: Spectrum + ?Sized>(split: &CurrentSplit<'_, S>, quad: &QuadratureSpec, original: &EmissionResult) -> Result<f64> {
    if original.n_bar < 1e-14 {
        return Ok(0.0);
    }
    // the remainder has no on-shell support: refining a roundoff-level integrand never converges
    let nonrad = mean_photon_number_fixed(&split.nonradiating(), quad, original.k_max, original.radial_panels)?;
    Ok(nonrad / original.n_bar)
}

/// Periodic analogue of [`nonrad_photon_fraction`], per period.
pub fn nonrad_photon_fraction_periodic<H: HarmonicSpectrum + ?Sized>(split: &HarmonicSplit<'_, H>, n_max: u32, quad: &QuadratureSpec) -> Result<f64> {
    let q = QuadratureSpec { tol: 1.0 - 1e-12, ..quad.clone() };
    let original = photon_rate_periodic(split.original, n_max, quad)?;
    if original.n_bar < 1e-14 {
        return Ok(0.0);
    }
    let nonrad = photon_rate_periodic(&split.nonradiating(), n_max, &q)?;
    Ok(nonrad.n_bar / original.n_bar)
}

/// One row of an epsilon sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub n_bar_rad: f64,
    pub nonrad_photon_fraction: f64,
    pub diagnostics: SplitDiagnostics,
}

/// Split diagnostics at `epsilon`, `epsilon/2` and `epsilon/4`.
pub fn epsilon_sweep<S: Spectrum + ?Sized>(spec: &S, epsilon: f64, quad: &QuadratureSpec, samples: usize, seed: u64) -> Result<(EmissionResult, Vec<SweepRow>)> {
    let original = mean_photon_number_pulsed(spec, quad)?;
    let rows = epsilon_sweep_given(spec, &original, epsilon, quad, samples, seed)?;
    Ok((original, rows))
}

/// [`epsilon_sweep`] reusing an emission result already computed for `spec`.
pub fn epsilon_sweep_given<S: Spectrum + ?Sized>(
    spec: &S,
    original: &EmissionResult,
    epsilon: f64,
    quad: &QuadratureSpec,
    samples: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(3);
    for div in [1.0, 2.0, 4.0] {
        let split = CurrentSplit::new(spec, epsilon / div)?;
        let q = QuadratureSpec { k_max: Some(original.k_max), ..quad.clone() };
        let rad = mean_photon_number_pulsed(&split.radiating(), &q)?;
        rows.push(SweepRow {
            epsilon: split.epsilon,
            n_bar_rad: rad.n_bar,
            nonrad_photon_fraction: nonrad_fraction_given(&split, quad, original)?,
            diagnostics: diagnose_split(&split, samples, seed),
        });
    }
    Ok(rows)
}

/// Wave number at the spectral peak.
pub fn peak_wave_number(result: &EmissionResult, c: f64) -> Option<f64> {
    let best = result.spectrum.iter().max_by(|a, b| a.density.total_cmp(&b.density))?;
    if best.density <= 0.0 {
        return None;
    }
    Some(match result.period {
        Some(t) => best.omega_or_n * 2.0 * PI / (t * c),
        None => best.omega_or_n / c,
    })
}

/// Discrete d'Alembertian residual of a gridded four-current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveResidual {
    /// `||box J|| / ||second derivatives||` over interior points.
    pub residual: f64,
    /// The normaliser with stencil spacing `h`.
    pub norm_h: f64,
    /// The normaliser with stencil spacing `2h`.
    pub norm_2h: f64,
    pub interior_points: usize,
}

/// Interior margin of the stencil, in cells.
pub const WAVE_MARGIN: usize = 4;

/// Residual of `laplacian(J^mu) - d_t^2 J^mu / c^2` for `J^mu = (c rho, J)`
/// by second-order central differences.
pub fn wave_residual(grid: &SampledCurrent, consts: &PhysicalConstants) -> Result<WaveResidual> {
    grid.validate()?;
    if grid.dims.iter().any(|&n| n < 2 * WAVE_MARGIN + 1) {
        return Err(Error::InvalidParameter(format!(
            "wave residual needs at least {} points per axis, got {:?}",
            2 * WAVE_MARGIN + 1,
            grid.dims
        )));
    }
    let c = consts.c;
    let comps: [(&Vec<f64>, f64); 4] = [(&grid.rho, c), (&grid.j[0], 1.0), (&grid.j[1], 1.0), (&grid.j[2], 1.0)];
    let [nx, ny, nz, nt] = grid.dims;
    let steps = [grid.dx, grid.dx, grid.dx, grid.dt];
    let strides = [ny * nz * nt, nz * nt, nt, 1];
    let m = WAVE_MARGIN;
    let mut box_sq = Vec::new();
    let mut norm_h = Vec::new();
    let mut norm_2h = Vec::new();
    for ix in m..nx - m {
        for iy in m..ny - m {
            for iz in m..nz - m {
                for it in m..nt - m {
                    let idx = grid.index(ix, iy, iz, it);
                    for (values, scale) in comps.iter() {
                        let d2 = |axis: usize, step: usize| -> f64 {
                            let s = strides[axis] * step;
                            let h = steps[axis] * step as f64;
                            scale * (values[idx + s] - 2.0 * values[idx] + values[idx - s]) / (h * h)
                        };
                        let second: [f64; 4] = [d2(0, 1), d2(1, 1), d2(2, 1), d2(3, 1) / (c * c)];
                        let second2: [f64; 4] = [d2(0, 2), d2(1, 2), d2(2, 2), d2(3, 2) / (c * c)];
                        let b = second[0] + second[1] + second[2] - second[3];
                        box_sq.push(b * b);
                        norm_h.push(second.iter().map(|x| x * x).sum::<f64>());
                        norm_2h.push(second2.iter().map(|x| x * x).sum::<f64>());
                    }
                }
            }
        }
    }
    let n_h = pairwise_sum(&norm_h).sqrt();
    let n_2h = pairwise_sum(&norm_2h).sqrt();
    if n_h == 0.0 {
        return Ok(WaveResidual { residual: 0.0, norm_h: 0.0, norm_2h: n_2h, interior_points: norm_h.len() / 4 });
    }
    let disagreement = (n_h - n_2h).abs() / n_h;
    if disagreement > 0.5 {
        return Err(Error::GridTooCoarse { disagreement });
    }
    Ok(WaveResidual {
        residual: pairwise_sum(&box_sq).sqrt() / n_h,
        norm_h: n_h,
        norm_2h: n_2h,
        interior_points: norm_h.len() / 4,
    })
}

/// Uniform space-time grid for reconstructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: [usize; 4],
    pub dx: f64,
    pub dt: f64,
    pub origin: [f64; 4],
}

impl GridSpec {
    /// Grid of `n` points per axis centred on `(center, t_center)`.
    pub fn centred(n: usize, dx: f64, dt: f64, center: Vec3, t_center: f64) -> GridSpec {
        let half = 0.5 * (n as f64 - 1.0);
        GridSpec {
            dims: [n; 4],
            dx,
            dt,
            origin: [center.x - half * dx, center.y - half * dx, center.z - half * dx, t_center - half * dt],
        }
    }
}

/// Resolution of the inverse transform used by [`reconstruct_rad`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructionSpec {
    pub radial_panels: usize,
    pub radial_order: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Gauss-Legendre nodes across the mollified shell in `q0`.
    pub shell_order: usize,
    /// Shell half-width in units of `epsilon`.
    pub shell_widths: f64,
    pub k_max: Option<f64>,
}

impl Default for ReconstructionSpec {
    fn default() -> Self {
        ReconstructionSpec { radial_panels: 8, radial_order: 16, n_theta: 12, n_phi: 24, shell_order: 16, shell_widths: 7.0, k_max: None }
    }
}

/// Radiating part of a pulsed spectrum in space-time,
/// `J(x) = 2 Re int_{q0 > 0} d^3k dq0 / (2 pi)^4 exp(i (k.r - c q0 t)) J_rad(k, c q0)`,
/// with the `q0` integral restricted to the mollified shell.
pub fn reconstruct_rad<S: Spectrum + ?Sized>(split: &CurrentSplit<'_, S>, grid: &GridSpec, rs: &ReconstructionSpec) -> Result<SampledCurrent> {
    let consts = split.original.constants();
    let c = consts.c;
    let ext = split.original.extent();
    let k_max = rs.k_max.unwrap_or(ext.k_max.min(ext.omega_max / c));
    let radial = composite(&uniform_edges(0.0, k_max, rs.radial_panels), rs.radial_order);
    let sphere = SphereRule::new(rs.n_theta, rs.n_phi);
    let q_rule = Rule::gauss_legendre(rs.shell_order);
    let [nx, ny, nz, nt] = grid.dims;
    let axis = |n: usize, x0: f64, h: f64| -> Vec<f64> { (0..n).map(|i| x0 + i as f64 * h).collect() };
    let xs = axis(nx, grid.origin[0], grid.dx);
    let ys = axis(ny, grid.origin[1], grid.dx);
    let zs = axis(nz, grid.origin[2], grid.dx);
    let ts = axis(nt, grid.origin[3], grid.dt);
    let npts = nx * ny * nz * nt;
    let eps = split.epsilon;
    let partials: Vec<[Vec<f64>; 3]> = radial
        .nodes
        .par_iter()
        .zip(&radial.weights)
        .map(|(&k, &wk)| {
            let mut acc = [vec![0.0; npts], vec![0.0; npts], vec![0.0; npts]];
            let lo = (k * k - rs.shell_widths * eps).max(0.0).sqrt();
            let hi = (k * k + rs.shell_widths * eps).sqrt();
            let q = q_rule.on_interval(lo, hi);
            for (u, wu) in sphere.directions.iter().zip(&sphere.weights) {
                let kv = u * k;
                // per-time amplitudes sum_q w e^{-i c q0 t} J_rad(k, c q0)
                let mut at = vec![[Complex64::new(0.0, 0.0); 3]; nt];
                for (q0, wq) in q.nodes.iter().zip(&q.weights) {
                    let r = split.rad(&kv, c * q0);
                    if r.j.iter().all(|z| z.norm_sqr() == 0.0) {
                        continue;
                    }
                    for (it, t) in ts.iter().enumerate() {
                        let ph = Complex64::from_polar(*wq, -c * q0 * t);
                        for d in 0..3 {
                            at[it][d] += ph * r.j[d];
                        }
                    }
                }
                let w = wk * wu * k * k;
                let px: Vec<Complex64> = xs.iter().map(|x| Complex64::from_polar(w, kv.x * x)).collect();
                let py: Vec<Complex64> = ys.iter().map(|y| Complex64::from_polar(1.0, kv.y * y)).collect();
                let pz: Vec<Complex64> = zs.iter().map(|z| Complex64::from_polar(1.0, kv.z * z)).collect();
                let mut idx = 0;
                for pxv in &px {
                    for pyv in &py {
                        let pxy = pxv * pyv;
                        for pzv in &pz {
                            let p = pxy * pzv;
                            for a in &at {
                                for d in 0..3 {
                                    acc[d][idx] += (p * a[d]).re;
                                }
                                idx += 1;
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let scale = 2.0 / (2.0 * PI).powi(4);
    let mut out = SampledCurrent::zeros(grid.dims, grid.dx, grid.dt, grid.origin);
    out.validate()?;
    for d in 0..3 {
        for i in 0..npts {
            let terms: Vec<f64> = partials.iter().map(|p| p[d][i]).collect();
            out.j[d][i] = scale * pairwise_sum(&terms);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::CVec3;

    #[test]
    fn shell_weight_is_unit_on_shell() {
        assert_eq!(shell_weight(0.0, 0.1), 1.0);
        assert!((shell_weight(0.1, 0.1) - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(default_epsilon(2.0), 0.04);
    }

    fn plane_wave(n: usize, h: f64) -> SampledCurrent {
        let k = Vec3::new(1.0, 2.0, 0.5);
        let e = Vec3::new(2.0, -1.0, 0.0).normalize();
        let c = 1.0;
        let kn = k.norm();
        SampledCurrent::from_fn([n; 4], h, h, [0.0; 4], |r, t| {
            let ph = (k.dot(r) - c * kn * t).cos();
            (0.0, e * ph)
        })
    }

    #[test]
    fn plane_wave_residual_is_second_order() {
        let consts = PhysicalConstants::NATURAL;
        let coarse = wave_residual(&plane_wave(9, 0.1), &consts).unwrap();
        let fine = wave_residual(&plane_wave(17, 0.05), &consts).unwrap();
        assert!(coarse.residual < 1e-2);
        assert!(coarse.residual / fine.residual > 3.5, "{} {}", coarse.residual, fine.residual);
    }

    #[test]
    fn static_current_residual_is_order_one() {
        let g = SampledCurrent::from_fn([9; 4], 0.2, 0.2, [-0.8, -0.8, -0.8, 0.0], |r, _| {
            (0.0, Vec3::x() * (-0.5 * r.norm_squared()).exp())
        });
        let r = wave_residual(&g, &PhysicalConstants::NATURAL).unwrap();
        assert!(r.residual > 0.3, "{}", r.residual);
    }

    #[test]
    fn coarse_grid_detected() {
        let g = plane_wave(9, 1.5);
        assert!(matches!(wave_residual(&g, &PhysicalConstants::NATURAL), Err(Error::GridTooCoarse { .. })));
        assert!(wave_residual(&plane_wave(8, 0.1), &PhysicalConstants::NATURAL).is_err());
    }

    struct OnShell;
    impl Spectrum for OnShell {
        fn sample(&self, k: &Vec3, omega: f64) -> SpectralSample {
            let q2 = wave_square(k, omega, &PhysicalConstants::NATURAL);
            let t = k.cross(&Vec3::z());
            let amp = (-0.5 * (q2 / 1e-4).powi(2)).exp() * (-k.norm_squared()).exp();
            SpectralSample { rho: Complex64::new(0.0, 0.0), j: CVec3::new(t.x.into(), t.y.into(), t.z.into()) * Complex64::new(amp, 0.0) }
        }
        fn extent(&self) -> SpectralExtent {
            SpectralExtent { k_max: 6.0, omega_max: 6.0, omega_width: 0.1 }
        }
        fn constants(&self) -> PhysicalConstants {
            PhysicalConstants::NATURAL
        }
    }

    #[test]
    fn transverse_on_shell_spectrum_is_all_radiating() {
        let split = CurrentSplit::new(&OnShell, 1.0).unwrap();
        let d = diagnose_split(&split, 200, 7);
        assert!(d.reconstruction_residual <= 1e-12);
        assert!(d.transversality_residual <= 1e-12);
        for (k, w) in sample_points(&OnShell.extent(), 1.0, 50, 3) {
            let (o, _, n) = split.parts(&k, w);
            assert!(n.magnitude(&PhysicalConstants::NATURAL) <= 2e-6 * o.magnitude(&PhysicalConstants::NATURAL).max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn split_rejects_bad_epsilon() {
        assert!(CurrentSplit::new(&OnShell, 0.0).is_err());
        assert!(CurrentSplit::new(&OnShell, f64::NAN).is_err());
    }
}
