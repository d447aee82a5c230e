//! Virtual-photon exchange: static Coulomb plus Ampere energy, the real
//! part of the vacuum action by principal-value quadrature, and the
//! light-cone interaction kernel.
//!
//! Sign convention: like static charges give `U > 0`; the action of a
//! static configuration held for an effective duration `T` is `W = -U T`.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::current::{BuiltinSource, FourCurrent, SourceMode};
use crate::error::{Error, Result};
use crate::quadrature::{composite, extrapolate_to_zero, graded_edges, pairwise_sum, uniform_edges, Rule, SphereRule};
use crate::spectral::{spatial_transform, SpectralExtent, SpectralSample, Spectrum};
use crate::units::{cross_contraction, current_contraction, PhysicalConstants, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeResult {
    /// Real part of the action, when computed.
    pub w_action: Option<f64>,
    pub static_energy_total: f64,
    pub coulomb_part: f64,
    pub ampere_part: f64,
    /// Spread of the principal-value extrapolation, when computed.
    pub principal_value_diagnostic: Option<f64>,
    pub include_self: bool,
    /// Smearing widths entering the self terms (empty without them).
    pub self_smearing: Vec<f64>,
    pub self_energy: Option<f64>,
    /// Estimated error of the self terms.
    pub self_energy_error: Option<f64>,
    pub min_node_distance: f64,
}

/// Resolution of the static-energy quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StaticsSpec {
    /// Gauss-Hermite nodes per axis for Gaussian charges.
    pub gauss_order: usize,
    /// Trapezoid nodes around a current loop.
    pub ring_nodes: usize,
    /// Gauss-Hermite nodes per axis smearing each ring node.
    pub smear_order: usize,
    /// Floor on node separation, relative to the overall extent.
    pub overlap_floor: f64,
    /// Radial panels for the self terms.
    pub self_panels: usize,
    pub self_n_theta: usize,
    pub self_n_phi: usize,
}

impl Default for StaticsSpec {
    fn default() -> Self {
        StaticsSpec {
            gauss_order: 12,
            ring_nodes: 256,
            smear_order: 3,
            overlap_floor: 1e-6,
            self_panels: 24,
            self_n_theta: 16,
            self_n_phi: 32,
        }
    }
}

/// Weighted charge and current carried by one quadrature node.
#[derive(Debug, Clone, Copy)]
struct Node {
    pos: Vec3,
    charge: f64,
    current: Vec3,
}

fn point_cloud(source: &BuiltinSource, spec: &StaticsSpec) -> Result<Vec<Node>> {
    match source {
        BuiltinSource::StaticGaussianCharge(s) => {
            let r = Rule::normal(spec.gauss_order, s.sigma);
            let c = Vec3::from(s.center);
            let mut nodes = Vec::with_capacity(r.len().pow(3));
            for (x, wx) in r.nodes.iter().zip(&r.weights) {
                for (y, wy) in r.nodes.iter().zip(&r.weights) {
                    for (z, wz) in r.nodes.iter().zip(&r.weights) {
                        nodes.push(Node { pos: c + Vec3::new(*x, *y, *z), charge: s.charge * wx * wy * wz, current: Vec3::zeros() });
                    }
                }
            }
            Ok(nodes)
        }
        BuiltinSource::StaticCurrentLoop(s) => {
            let (pos, tan, dl) = s.ring(spec.ring_nodes);
            let r = Rule::normal(spec.smear_order, s.sigma);
            let mut nodes = Vec::with_capacity(pos.len() * r.len().pow(3));
            for (p, t) in pos.iter().zip(&tan) {
                for (x, wx) in r.nodes.iter().zip(&r.weights) {
                    for (y, wy) in r.nodes.iter().zip(&r.weights) {
                        for (z, wz) in r.nodes.iter().zip(&r.weights) {
                            let w = s.current * dl * wx * wy * wz;
                            nodes.push(Node { pos: p + Vec3::new(*x, *y, *z), charge: 0.0, current: t * w });
                        }
                    }
                }
            }
            Ok(nodes)
        }
        _ => Err(Error::WrongMode("static energy needs static sources".into())),
    }
}

/// Cross interaction `int int (rho_a rho_b - J_a.J_b/c^2)/|r_a - r_b|` as
/// (coulomb, ampere, closest node distance).
fn cross_term(a: &[Node], b: &[Node], consts: &PhysicalConstants, floor: f64) -> Result<(f64, f64, f64)> {
    let c2 = consts.c * consts.c;
    let rows: Vec<(f64, f64, f64)> = a
        .par_iter()
        .map(|na| {
            let mut coul = Vec::with_capacity(b.len());
            let mut amp = Vec::with_capacity(b.len());
            let mut dmin = f64::INFINITY;
            for nb in b {
                let d = (na.pos - nb.pos).norm();
                dmin = dmin.min(d);
                coul.push(na.charge * nb.charge / d);
                amp.push(-na.current.dot(&nb.current) / (c2 * d));
            }
            (pairwise_sum(&coul), pairwise_sum(&amp), dmin)
        })
        .collect();
    let dmin = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    if dmin < floor {
        return Err(Error::SingularOverlap(format!(
            "node separation {dmin:e} below floor {floor:e}; increase the smearing"
        )));
    }
    let coul: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let amp: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok((pairwise_sum(&coul), pairwise_sum(&amp), dmin))
}

/// `(1/2 pi^2) int dk dOmega Re(rho_a rho_b* - J_a.J_b*/c^2)` split into
/// (coulomb, ampere), with an error estimate from halving the panels. With
/// `b` absent this is the self energy of `a`, at half the prefactor.
fn spectral_pair(a: &BuiltinSource, b: Option<&BuiltinSource>, spec: &StaticsSpec, consts: &PhysicalConstants) -> (f64, f64, f64) {
    let sigma = b.map_or(a.smearing(), |b| a.smearing().min(b.smearing()));
    let k_max = 8.0 / sigma;
    // the cross phase k.(c_a - c_b) must be resolved over the sphere
    let ring = |s: &BuiltinSource| match s {
        BuiltinSource::StaticCurrentLoop(l) => l.radius,
        _ => 0.0,
    };
    let reach = b.map_or(0.0, |b| (a.center(0.0) - b.center(0.0)).norm() + ring(a) + ring(b));
    let n_theta = spec.self_n_theta.max((0.5 * k_max * reach).ceil() as usize + 8);
    let sphere = SphereRule::new(n_theta, spec.self_n_phi.max(2 * n_theta * usize::from(b.is_some())));
    let c2 = consts.c * consts.c;
    let panels_for = |p: usize| p.max(((k_max * reach / PI).ceil() as usize).max(1));
    let eval = |panels: usize| -> (f64, f64) {
        let rule = composite(&uniform_edges(0.0, k_max, panels), 16);
        let rows: Vec<(f64, f64)> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(&k, &wk)| {
                let mut rr = Vec::with_capacity(sphere.len());
                let mut jj = Vec::with_capacity(sphere.len());
                for (u, w) in sphere.directions.iter().zip(&sphere.weights) {
                    let sa = spatial_transform(a, &(u * k), 0.0);
                    let sb = b.map_or(sa, |b| spatial_transform(b, &(u * k), 0.0));
                    rr.push(w * (sa.rho * sb.rho.conj()).re);
                    jj.push(-w * (0..3).map(|i| (sa.j[i] * sb.j[i].conj()).re).sum::<f64>() / c2);
                }
                (wk * pairwise_sum(&rr), wk * pairwise_sum(&jj))
            })
            .collect();
        let pref = if b.is_some() { 1.0 / (2.0 * PI * PI) } else { 1.0 / (4.0 * PI * PI) };
        let x: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
        (pref * pairwise_sum(&x), pref * pairwise_sum(&y))
    };
    let fine = eval(panels_for(spec.self_panels.max(2)));
    let coarse = eval(panels_for(spec.self_panels.max(2)) / 2);
    let err = (fine.0 + fine.1 - coarse.0 - coarse.1).abs();
    (fine.0, fine.1, err)
}

/// Static interaction energy of a set of static sources: every cross pair,
/// plus the self terms when `include_self` is set.
pub fn static_energy(sources: &[BuiltinSource], spec: &StaticsSpec, include_self: bool, consts: &PhysicalConstants) -> Result<ExchangeResult> {
    consts.validate()?;
    for s in sources {
        s.validate()?;
        if s.mode() != SourceMode::Static {
            return Err(Error::WrongMode("static energy needs static sources".into()));
        }
    }
    let clouds: Vec<Vec<Node>> = sources.iter().map(|s| point_cloud(s, spec)).collect::<Result<_>>()?;
    let (mut lo, mut hi) = (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY));
    for s in sources {
        let (a, b) = s.bounding_box();
        lo = lo.inf(&a);
        hi = hi.sup(&b);
    }
    let extent = if sources.is_empty() { 1.0 } else { (hi - lo).norm() };
    let floor = spec.overlap_floor * extent;
    let (mut coulomb, mut ampere) = (0.0, 0.0);
    let mut dmin = f64::INFINITY;
    for i in 0..clouds.len() {
        for j in i + 1..clouds.len() {
            let (mut c, mut a, d) = cross_term(&clouds[i], &clouds[j], consts, floor)?;
            // interleaved clouds: node sums lose accuracy, the Fourier form does not
            if d < 0.5 * (sources[i].smearing() + sources[j].smearing()) {
                (c, a, _) = spectral_pair(&sources[i], Some(&sources[j]), spec, consts);
            }
            coulomb += c;
            ampere += a;
            dmin = dmin.min(d);
        }
    }
    let (mut self_energy, mut self_error, mut self_smearing) = (None, None, Vec::new());
    if include_self {
        let (mut total, mut err) = (0.0, 0.0);
        for s in sources {
            let (c, a, e) = spectral_pair(s, None, spec, consts);
            coulomb += c;
            ampere += a;
            total += c + a;
            err += e;
            self_smearing.push(s.smearing());
        }
        self_energy = Some(total);
        self_error = Some(err);
    }
    Ok(ExchangeResult {
        w_action: None,
        static_energy_total: coulomb + ampere,
        coulomb_part: coulomb,
        ampere_part: ampere,
        principal_value_diagnostic: None,
        include_self,
        self_smearing,
        self_energy,
        self_energy_error: self_error,
        min_node_distance: dmin,
    })
}

/// Mutual inductance `M = oint oint dl_a . dl_b / |r_a - r_b|` of two thin
/// circular filaments, by a product trapezoid rule.
pub fn neumann_mutual_inductance(a: &crate::current::StaticCurrentLoop, b: &crate::current::StaticCurrentLoop, nodes: usize) -> f64 {
    let (pa, ta, dla) = a.ring(nodes);
    let (pb, tb, dlb) = b.ring(nodes);
    let rows: Vec<f64> = pa
        .iter()
        .zip(&ta)
        .map(|(p, t)| pairwise_sum(&pb.iter().zip(&tb).map(|(q, u)| t.dot(u) / (p - q).norm()).collect::<Vec<_>>()))
        .collect();
    pairwise_sum(&rows) * dla * dlb
}

/// Coulomb energy of two Gaussian charges at separation `a`.
pub fn gaussian_pair_energy(q1: f64, s1: f64, q2: f64, s2: f64, a: f64) -> f64 {
    q1 * q2 * libm::erf(a / (2.0f64.sqrt() * (s1 * s1 + s2 * s2).sqrt())) / a
}

/// Principal-value settings for [`action_spectral`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PvSpec {
    /// Exclusion windows `|q0^2 - k^2| < alpha max(k, dq) dq`, with `dq`
    /// the spectral frequency width over `c`.
    pub alphas: [f64; 3],
    pub radial_panels: usize,
    pub n_theta: usize,
    /// Set to 1 for sources symmetric about the z axis.
    pub n_phi: usize,
    pub order: usize,
    /// Largest accepted extrapolation spread, relative to `|W|`.
    pub max_spread: f64,
    pub k_max: Option<f64>,
}

impl Default for PvSpec {
    fn default() -> Self {
        PvSpec {
            alphas: [0.1, 0.2, 0.4],
            radial_panels: 64,
            n_theta: 64,
            n_phi: 32,
            order: 16,
            max_spread: 0.05,
            k_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionResult {
    /// Extrapolated real part of the action.
    pub w: f64,
    /// |three-window minus two-window extrapolation|.
    pub spread: f64,
    /// Action at each exclusion window, in the order of `alphas`.
    pub windowed: Vec<f64>,
}

/// `q0` rule over `[-q_hi, q_hi]` with the windows `|q0^2 - k^2| < delta`
/// removed, graded towards the window edges.
fn pv_line(k: f64, q_hi: f64, delta: f64, dq: f64, order: usize) -> Rule {
    let k2 = k * k;
    let inner = (k2 - delta).max(0.0).sqrt();
    let outer = (k2 + delta).sqrt();
    let mut allowed: Vec<(f64, f64, bool, bool)> = Vec::new();
    if inner == 0.0 {
        allowed.push((-q_hi, -outer, false, true));
        allowed.push((outer, q_hi, true, false));
    } else {
        allowed.push((-q_hi, -outer, false, true));
        allowed.push((-inner, inner, true, true));
        allowed.push((outer, q_hi, true, false));
    }
    let first = 0.5 * (outer - inner);
    let cap = dq;
    let mut edges_all: Vec<Vec<f64>> = Vec::new();
    for (a, b, grade_a, grade_b) in allowed {
        if b <= a {
            continue;
        }
        match (grade_a, grade_b) {
            (true, true) => {
                let m = 0.5 * (a + b);
                edges_all.push(graded_edges(a, m, first, 2.0, cap));
                let mut right = graded_edges(b, m, first, 2.0, cap);
                right.reverse();
                edges_all.push(right);
            }
            (true, false) => edges_all.push(graded_edges(a, b, first, 2.0, cap)),
            (false, true) => {
                let mut e = graded_edges(b, a, first, 2.0, cap);
                e.reverse();
                edges_all.push(e);
            }
            (false, false) => edges_all.push(uniform_edges(a, b, ((b - a) / cap).ceil().max(1.0) as usize)),
        }
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for e in edges_all {
        let r = composite(&e, order);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    Rule { nodes, weights }
}

fn action_core<F>(contraction: F, ext: SpectralExtent, c: f64, pv: &PvSpec) -> Result<ActionResult>
where
    F: Fn(&Vec3, f64) -> f64 + Sync,
{
    if pv.alphas.iter().any(|a| !(*a > 0.0)) || pv.radial_panels == 0 || pv.n_theta == 0 || pv.n_phi == 0 {
        return Err(Error::InvalidParameter("principal-value settings must be positive".into()));
    }
    let dq = ext.omega_width / c;
    let q_max = ext.omega_max / c;
    let k_max = pv.k_max.unwrap_or(ext.k_max);
    let sphere = SphereRule::new(pv.n_theta, pv.n_phi);
    // radial panels: fine below the frequency support, coarser beyond it
    let k_split = (q_max + 4.0 * dq).min(k_max);
    let low_panels = ((k_split / dq).ceil() as usize).max(1);
    let mut edges = uniform_edges(0.0, k_split, low_panels);
    if k_max > k_split {
        edges.extend(uniform_edges(k_split, k_max, pv.radial_panels).into_iter().skip(1));
    }
    let radial = composite(&edges, pv.order);
    let regular_margin = 2.0 * dq;
    let per_k: Vec<[f64; 3]> = radial
        .nodes
        .par_iter()
        .zip(&radial.weights)
        .map(|(&k, &wk)| {
            let k2 = k * k;
            let line = |rule: &Rule, kv: &Vec3| -> f64 {
                let terms: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(q, wq)| wq * contraction(kv, *q) / (k2 - q * q)).collect();
                pairwise_sum(&terms)
            };
            let mut out = [0.0; 3];
            if k > q_max + regular_margin {
                let width = dq.max(0.25 * (k - q_max)).min(q_max / 4.0);
                let panels = ((2.0 * q_max / width).ceil() as usize).max(8);
                let rule = composite(&uniform_edges(-q_max, q_max, panels), pv.order);
                let v = pairwise_sum(&sphere.directions.iter().zip(&sphere.weights).map(|(u, wu)| wu * line(&rule, &(u * k))).collect::<Vec<_>>());
                out = [wk * k2 * v; 3];
            } else {
                for (i, alpha) in pv.alphas.iter().enumerate() {
                    let delta = alpha * k.max(dq) * dq;
                    let q_hi = q_max.max((k2 + delta).sqrt() + 2.0 * dq);
                    let rule = pv_line(k, q_hi, delta, dq, pv.order);
                    let v = pairwise_sum(&sphere.directions.iter().zip(&sphere.weights).map(|(u, wu)| wu * line(&rule, &(u * k))).collect::<Vec<_>>());
                    out[i] = wk * k2 * v;
                }
            }
            out
        })
        .collect();
    let pref = (2.0 * PI * c).powi(-3);
    let windowed: Vec<f64> = (0..3).map(|i| pref * pairwise_sum(&per_k.iter().map(|r| r[i]).collect::<Vec<_>>())).collect();
    let w3 = extrapolate_to_zero(&pv.alphas, &windowed);
    let w2 = extrapolate_to_zero(&pv.alphas[..2], &windowed[..2]);
    let spread = (w3 - w2).abs();
    if spread > pv.max_spread * w3.abs() && spread > 0.0 {
        return Err(Error::PvUnstable { spread, value: w3 });
    }
    Ok(ActionResult { w: w3, spread, windowed })
}

/// Real part of the action,
/// `W = (2 pi c)^-3 int d^3k PV int dq0 (|J_Q|^2 - c^2 |rho_Q|^2) / (|k|^2 - q0^2)`
/// with `omega = c q0`.
pub fn action_spectral<S: Spectrum + ?Sized>(spec: &S, pv: &PvSpec) -> Result<ActionResult> {
    let consts = spec.constants();
    let c = consts.c;
    action_core(
        |k, q0| {
            let s = spec.sample(k, c * q0);
            current_contraction(s.rho, &s.j, &consts)
        },
        spec.extent(),
        c,
        pv,
    )
}

/// Interaction part of the action between two spectra (the cross terms of
/// `|J_a + J_b|^2`).
pub fn action_spectral_cross<A: Spectrum + ?Sized, B: Spectrum + ?Sized>(a: &A, b: &B, pv: &PvSpec) -> Result<ActionResult> {
    let consts = a.constants();
    let c = consts.c;
    let (ea, eb) = (a.extent(), b.extent());
    let ext = SpectralExtent {
        k_max: ea.k_max.min(eb.k_max),
        omega_max: ea.omega_max.min(eb.omega_max),
        omega_width: ea.omega_width.min(eb.omega_width),
    };
    action_core(
        |k, q0| {
            let sa = a.sample(k, c * q0);
            let sb = b.sample(k, c * q0);
            2.0 * cross_contraction(sa.rho, &sa.j, sb.rho, &sb.j, &consts)
        },
        ext,
        c,
        pv,
    )
}

/// A point-like static element: total charge and current moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointElement {
    pub charge: f64,
    pub current: [f64; 3],
}

/// The two light-cone roots `T = +-R/c` of `delta(c^2 T^2 - R^2)` and
/// their weights `1/(2 c R)`.
pub fn lightcone_roots(r: f64, consts: &PhysicalConstants) -> [(f64, f64); 2] {
    let w = 1.0 / (2.0 * consts.c * r);
    [(r / consts.c, w), (-r / consts.c, w)]
}

/// Ordered interaction density between element `a` at one end and `b` at
/// the other: `c int dT delta(c^2 T^2 - R^2) (rho_a rho_b - J_a.J_b/c^2) / 2`.
pub fn ordered_density(a: &PointElement, b: &PointElement, r: f64, consts: &PhysicalConstants) -> (f64, f64) {
    let measure: f64 = lightcone_roots(r, consts).iter().map(|(_, w)| consts.c * w).sum();
    let jj = Vec3::from(a.current).dot(&Vec3::from(b.current)) / (consts.c * consts.c);
    (0.5 * measure * a.charge * b.charge, -0.5 * measure * jj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub r: f64,
    pub kernel_coulomb: f64,
    pub kernel_ampere: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightConePotential {
    pub samples: Vec<KernelSample>,
}

impl LightConePotential {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "R,kernel_coulomb,kernel_ampere")?;
        for s in &self.samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", s.r, s.kernel_coulomb, s.kernel_ampere)?;
        }
        Ok(())
    }
}

/// Static light-cone kernel of a pair summed over both orderings; reduces
/// to `(q_a q_b - J_a.J_b/c^2)/R`.
pub fn lightcone_potential(a: &PointElement, b: &PointElement, r_grid: &[f64], consts: &PhysicalConstants) -> Result<LightConePotential> {
    let mut samples = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("separation must be positive, got {r}")));
        }
        let (c1, a1) = ordered_density(a, b, r, consts);
        let (c2, a2) = ordered_density(b, a, r, consts);
        samples.push(KernelSample { r, kernel_coulomb: c1 + c2, kernel_ampere: a1 + a2 });
    }
    Ok(LightConePotential { samples })
}

/// Ordered light-cone density between `(r1, t)` in source `a` and points of
/// source `b` at `r2` on the light cone, for sources given pointwise.
pub fn lightcone_density_dynamic(a: &FourCurrent, r1: &Vec3, b: &FourCurrent, r2: &Vec3, t: f64, consts: &PhysicalConstants) -> Result<(f64, f64)> {
    if matches!(a, FourCurrent::Sampled(_)) || matches!(b, FourCurrent::Sampled(_)) {
        return Err(Error::WrongMode("dynamic light-cone density is available for built-in sources only".into()));
    }
    let r = (r1 - r2).norm();
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("coincident points".into()));
    }
    let (rho_a, j_a) = a.evaluate(r1, t);
    let (mut coul, mut amp) = (0.0, 0.0);
    for (dt, w) in lightcone_roots(r, consts) {
        let (rho_b, j_b) = b.evaluate(r2, t + dt);
        coul += 0.5 * consts.c * w * rho_a * rho_b;
        amp -= 0.5 * consts.c * w * j_a.dot(&j_b) / (consts.c * consts.c);
    }
    Ok((coul, amp))
}

/// Contraction helper exposed for diagnostics.
pub fn sample_contraction(s: &SpectralSample, consts: &PhysicalConstants) -> f64 {
    current_contraction(s.rho, &s.j, consts)
}
