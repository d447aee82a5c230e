//! Fixed quadrature rules, deterministic summation and extrapolation helpers.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::units::Vec3;

/// Resolution and tolerance settings shared by the spectral integrators.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Relative convergence target for adaptive refinement.
    pub tol: f64,
    /// Gauss-Legendre nodes in cos(theta).
    pub n_theta: usize,
    /// Uniform nodes in phi.
    pub n_phi: usize,
    /// Gauss-Legendre order per radial panel.
    pub radial_order: usize,
    /// Radial panels before the first doubling.
    pub initial_panels: usize,
    /// Cap on radial integrand evaluations (each one a full angular sweep).
    pub max_evals: usize,
    /// Radial cutoff in |k|; derived from the source when absent.
    pub k_max: Option<f64>,
    /// Skip the doubled angular rule used for the error estimate.
    pub skip_angular_check: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            n_theta: 32,
            n_phi: 64,
            radial_order: 16,
            initial_panels: 8,
            max_evals: 1 << 20,
            k_max: None,
            skip_angular_check: false,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_angular(mut self, n_theta: usize, n_phi: usize) -> Self {
        self.n_theta = n_theta;
        self.n_phi = n_phi;
        self
    }

    pub fn with_k_max(mut self, k_max: f64) -> Self {
        self.k_max = Some(k_max);
        self
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        let bad = |m: &str| Err(crate::error::Error::InvalidParameter(m.into()));
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad("quadrature tol must lie in (0, 1)");
        }
        if self.n_theta == 0 || self.n_phi == 0 || self.radial_order == 0 || self.initial_panels == 0 {
            return bad("quadrature resolutions must be positive");
        }
        if let Some(k) = self.k_max {
            if !(k > 0.0 && k.is_finite()) {
                return bad("k_max must be positive and finite");
            }
        }
        Ok(())
    }
}

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss-Legendre on [-1, 1] via Newton iteration on `P_n`.
    pub fn gauss_legendre(n: usize) -> Rule {
        assert!(n > 0, "rule order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Rule { nodes, weights }
    }

    /// Gauss-Hermite for the weight `exp(-x^2)`, by Golub-Welsch.
    pub fn gauss_hermite(n: usize) -> Rule {
        assert!(n > 0, "rule order must be positive");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            let b = (i as f64 / 2.0).sqrt();
            jacobi[(i, i - 1)] = b;
            jacobi[(i - 1, i)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
    }

    /// Rule for a standard normal density of width `sigma` centred on 0,
    /// weights summing to one.
    pub fn normal(n: usize, sigma: f64) -> Rule {
        let gh = Rule::gauss_hermite(n);
        let s = std::f64::consts::SQRT_2 * sigma;
        Rule {
            nodes: gh.nodes.iter().map(|x| x * s).collect(),
            weights: gh.weights.iter().map(|w| w / PI.sqrt()).collect(),
        }
    }

    /// Map a rule on [-1, 1] onto [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> Rule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss-Legendre over consecutive panels with the given edges.
pub fn composite(edges: &[f64], order: usize) -> Rule {
    let base = Rule::gauss_legendre(order);
    let mut nodes = Vec::with_capacity(order * edges.len());
    let mut weights = Vec::with_capacity(order * edges.len());
    for w in edges.windows(2) {
        let r = base.on_interval(w[0], w[1]);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    Rule { nodes, weights }
}

/// Panels of geometrically growing width leaving `x0` towards `x1`,
/// starting at distance `first` from `x0` and never wider than `max_width`.
/// Resolves `1/(x - x0)`-like ends.
pub fn graded_edges(x0: f64, x1: f64, first: f64, ratio: f64, max_width: f64) -> Vec<f64> {
    let len = (x1 - x0).abs();
    let dir = (x1 - x0).signum();
    let mut edges = vec![x0];
    let mut width = first.min(max_width);
    let mut d = width.min(len);
    while d < len {
        edges.push(x0 + dir * d);
        width = (width * ratio).min(max_width);
        d += width;
    }
    edges.push(x1);
    edges
}

/// Uniform panel edges.
pub fn uniform_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect()
}

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta), uniform in phi.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n_theta: usize, n_phi: usize) -> SphereRule {
        let gl = Rule::gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut directions = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (&ct, &wt) in gl.nodes.iter().zip(&gl.weights) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * dphi;
                directions.push(Vec3::new(st * phi.cos(), st * phi.sin(), ct));
                weights.push(wt * dphi);
            }
        }
        SphereRule { directions, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Pairwise summation; the result depends only on the order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Polynomial extrapolation to `x = 0` through `(x_i, f_i)` (Neville).
pub fn extrapolate_to_zero(xs: &[f64], fs: &[f64]) -> f64 {
    assert_eq!(xs.len(), fs.len());
    let mut p = fs.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

/// Halton point in the unit cube, bases 2, 3, 5, 7.
pub fn halton(index: usize, dim: usize) -> f64 {
    const BASES: [usize; 6] = [2, 3, 5, 7, 11, 13];
    let b = BASES[dim];
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index + 1;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = Rule::gauss_legendre(8);
        for p in 0..16 {
            let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "p = {p}: {q} vs {exact}");
        }
    }

    #[test]
    fn large_legendre_rule_is_accurate() {
        let r = Rule::gauss_legendre(64).on_interval(0.0, PI);
        let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.sin()).sum();
        assert!((q - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_moments() {
        let r = Rule::normal(6, 0.7);
        let m0: f64 = r.weights.iter().sum();
        let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        let m4: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m0 - 1.0).abs() < 1e-14);
        assert!((m2 - 0.49).abs() < 1e-14);
        assert!((m4 - 3.0 * 0.49 * 0.49).abs() < 1e-13);
    }

    #[test]
    fn sphere_rule_area_and_second_moment() {
        let s = SphereRule::new(8, 16);
        let area: f64 = s.weights.iter().sum();
        assert!((area - 4.0 * PI).abs() < 1e-13);
        let zz: f64 = s.directions.iter().zip(&s.weights).map(|(d, w)| w * d.z * d.z).sum();
        assert!((zz - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        let xs = [0.1, 0.2, 0.4];
        let fs: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x - 5.0 * x * x).collect();
        assert!((extrapolate_to_zero(&xs, &fs) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn graded_edges_cover_interval() {
        let e = graded_edges(1.0, 0.0, 1e-6, 2.0, f64::INFINITY);
        assert_eq!(*e.first().unwrap(), 1.0);
        assert_eq!(*e.last().unwrap(), 0.0);
        assert!(e.windows(2).all(|w| w[1] < w[0]));
        let capped = graded_edges(0.0, 1.0, 1e-3, 2.0, 0.1);
        assert!(capped.windows(2).all(|w| w[1] - w[0] <= 0.1 + 1e-15));
        assert!(capped.len() > 10);
    }

    #[test]
    fn pairwise_matches_naive_sum() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&v), 249750.0);
    }
}
