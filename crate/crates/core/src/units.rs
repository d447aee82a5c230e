//! Metric conventions, unit system and four-vector arithmetic.
//!
//! The Minkowski metric uses the signature `(+,+,+,-)`: a wave vector
//! `Q = (k, omega/c)` has square `Q^2 = |k|^2 - (omega/c)^2`, so on-shell
//! (real photon) vectors have `Q^2 = 0`, space-like vectors are positive and
//! time-like vectors are negative. Most field-theory code uses `(+,-,-,-)`;
//! every sign in this crate follows the mostly-plus convention instead.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type CVec3 = Vector3<Complex64>;

/// Speed of light and action quantum. Defaults to natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hbar: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::NATURAL
    }
}

impl PhysicalConstants {
    pub const NATURAL: PhysicalConstants = PhysicalConstants { c: 1.0, hbar: 1.0 };

    pub fn new(c: f64, hbar: f64) -> Result<Self> {
        let consts = Self { c, hbar };
        consts.validate()?;
        Ok(consts)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("speed of light must be positive, got {}", self.c)));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {}", self.hbar)));
        }
        Ok(())
    }
}

/// A real four-vector: spatial part plus the temporal component
/// (`omega/c` for wave vectors, `c*rho` for currents).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub spatial: Vec3,
    pub temporal: f64,
}

impl FourVector {
    pub fn new(spatial: Vec3, temporal: f64) -> Self {
        Self { spatial, temporal }
    }

    /// Wave vector `(k, omega/c)`.
    pub fn wave(k: Vec3, omega: f64, consts: &PhysicalConstants) -> Self {
        Self { spatial: k, temporal: omega / consts.c }
    }
}

impl std::ops::Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector { spatial: self.spatial + rhs.spatial, temporal: self.temporal + rhs.temporal }
    }
}

impl std::ops::Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, rhs: f64) -> FourVector {
        FourVector { spatial: self.spatial * rhs, temporal: self.temporal * rhs }
    }
}

/// `|spatial|^2 - temporal^2`.
pub fn minkowski_square(v: &FourVector) -> f64 {
    v.spatial.norm_squared() - v.temporal * v.temporal
}

pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.spatial.dot(&b.spatial) - a.temporal * b.temporal
}

/// `Q^2 = |k|^2 - (omega/c)^2`.
pub fn wave_square(k: &Vec3, omega: f64, consts: &PhysicalConstants) -> f64 {
    let q0 = omega / consts.c;
    k.norm_squared() - q0 * q0
}

/// Hermitian contraction `eta_{mu nu} J^mu_{-Q} J^nu_Q` of a Fourier-space
/// current, using the reality symmetry `J_{-Q} = (J_Q)^*`:
/// `J_Q^* . J_Q - c^2 |rho_Q|^2`.
pub fn current_contraction(rho: Complex64, j: &CVec3, consts: &PhysicalConstants) -> f64 {
    let c = consts.c;
    cnorm_sqr(j) - c * c * rho.norm_sqr()
}

/// Real part of `eta_{mu nu} J^mu_{a,-Q} J^nu_{b,Q}` for two currents.
pub fn cross_contraction(rho_a: Complex64, j_a: &CVec3, rho_b: Complex64, j_b: &CVec3, consts: &PhysicalConstants) -> f64 {
    let c = consts.c;
    let jj: Complex64 = j_a.iter().zip(j_b.iter()).map(|(a, b)| a.conj() * b).sum();
    (jj - c * c * rho_a.conj() * rho_b).re
}

pub fn cnorm_sqr(v: &CVec3) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn cnorm(v: &CVec3) -> f64 {
    cnorm_sqr(v).sqrt()
}

/// `k . v` without conjugation.
pub fn kdot(k: &Vec3, v: &CVec3) -> Complex64 {
    v[0] * k[0] + v[1] * k[1] + v[2] * k[2]
}

pub fn czero() -> CVec3 {
    CVec3::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
}

pub fn complexify(v: &Vec3) -> CVec3 {
    CVec3::new(v[0].into(), v[1].into(), v[2].into())
}

/// Right-handed orthonormal pair spanning the plane normal to `axis`.
pub fn orthonormal_basis(axis: &Vec3) -> (Vec3, Vec3, Vec3) {
    let n = axis.normalize();
    let helper = if n[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (helper - n * n.dot(&helper)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares() {
        assert_eq!(minkowski_square(&FourVector::new(Vec3::new(1.0, 0.0, 0.0), 1.0)), 0.0);
        assert_eq!(minkowski_square(&FourVector::new(Vec3::zeros(), 2.0)), -4.0);
        assert_eq!(minkowski_square(&FourVector::new(Vec3::new(3.0, 4.0, 0.0), 0.0)), 25.0);
    }

    #[test]
    fn dots() {
        let null = FourVector::new(Vec3::new(1.0, 0.0, 0.0), 1.0);
        assert_eq!(minkowski_dot(&null, &null), 0.0);
        let a = FourVector::new(Vec3::new(1.0, 0.0, 0.0), 0.0);
        let b = FourVector::new(Vec3::new(0.0, 1.0, 0.0), 0.0);
        assert_eq!(minkowski_dot(&a, &b), 0.0);
        let a = FourVector::new(Vec3::new(2.0, 0.0, 0.0), 1.0);
        let b = FourVector::new(Vec3::new(1.0, 0.0, 0.0), 3.0);
        assert_eq!(minkowski_dot(&a, &b), -1.0);
    }

    #[test]
    fn rejects_nonpositive_constants() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert!(PhysicalConstants::new(3.0, 2.0).is_ok());
    }

    #[test]
    fn basis_is_orthonormal() {
        for axis in [Vec3::z(), Vec3::x(), Vec3::new(1.0, -2.0, 0.5)] {
            let (e1, e2, n) = orthonormal_basis(&axis);
            assert!(e1.dot(&e2).abs() < 1e-15);
            assert!(e1.dot(&n).abs() < 1e-15);
            assert!((e1.cross(&e2) - n).norm() < 1e-15);
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn fv() -> impl Strategy<Value = FourVector> {
            (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
                .prop_map(|(x, y, z, t)| FourVector::new(Vec3::new(x, y, z), t))
        }

        proptest! {
            #[test]
            fn square_is_self_dot(v in fv()) {
                prop_assert_eq!(minkowski_square(&v), minkowski_dot(&v, &v));
            }

            #[test]
            fn dot_is_bilinear(a in fv(), b in fv(), c in fv()) {
                let lhs = minkowski_dot(&(a + b), &c);
                let rhs = minkowski_dot(&a, &c) + minkowski_dot(&b, &c);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }
}
