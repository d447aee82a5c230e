//! Grid-sampled four-currents and their little-endian binary layout.
//!
//! File layout (all values little-endian IEEE-754 `f64`):
//!
//! | offset (values) | content                                   |
//! |-----------------|-------------------------------------------|
//! | 0..4            | `nx, ny, nz, nt` (integral values)        |
//! | 4..6            | `dx, dt`                                  |
//! | 6..10           | `x0, y0, z0, t0` (coordinates of index 0) |
//! | 10..            | `rho`, then `Jx`, `Jy`, `Jz`              |
//!
//! Each array holds `nx*ny*nz*nt` values in row-major order over
//! `(ix, iy, iz, it)`, i.e. `it` varies fastest.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::{halton, pairwise_sum};
use crate::units::Vec3;

const HEADER_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurrent {
    pub dims: [usize; 4],
    pub dx: f64,
    pub dt: f64,
    /// Spatial origin and start time.
    pub origin: [f64; 4],
    pub rho: Vec<f64>,
    pub j: [Vec<f64>; 3],
}

impl SampledCurrent {
    pub fn zeros(dims: [usize; 4], dx: f64, dt: f64, origin: [f64; 4]) -> SampledCurrent {
        let n = dims.iter().product();
        SampledCurrent { dims, dx, dt, origin, rho: vec![0.0; n], j: [vec![0.0; n], vec![0.0; n], vec![0.0; n]] }
    }

    /// Sample `f(r, t) -> (rho, J)` on the grid.
    pub fn from_fn<F>(dims: [usize; 4], dx: f64, dt: f64, origin: [f64; 4], f: F) -> SampledCurrent
    where
        F: Fn(&Vec3, f64) -> (f64, Vec3),
    {
        let mut out = Self::zeros(dims, dx, dt, origin);
        for ix in 0..dims[0] {
            for iy in 0..dims[1] {
                for iz in 0..dims[2] {
                    let r = out.position(ix, iy, iz);
                    for it in 0..dims[3] {
                        let (rho, j) = f(&r, out.time(it));
                        let idx = out.index(ix, iy, iz, it);
                        out.rho[idx] = rho;
                        for c in 0..3 {
                            out.j[c][idx] = j[c];
                        }
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize, it: usize) -> usize {
        ((ix * self.dims[1] + iy) * self.dims[2] + iz) * self.dims[3] + it
    }

    pub fn position(&self, ix: usize, iy: usize, iz: usize) -> Vec3 {
        Vec3::new(
            self.origin[0] + ix as f64 * self.dx,
            self.origin[1] + iy as f64 * self.dx,
            self.origin[2] + iz as f64 * self.dx,
        )
    }

    pub fn time(&self, it: usize) -> f64 {
        self.origin[3] + it as f64 * self.dt
    }

    pub fn time_range(&self) -> (f64, f64) {
        (self.origin[3], self.time(self.dims[3].saturating_sub(1)))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dx > 0.0 && self.dt > 0.0 && self.dx.is_finite() && self.dt.is_finite()) {
            return Err(Error::InvalidParameter("grid spacings must be positive".into()));
        }
        if self.dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter("grid dimensions must be positive".into()));
        }
        let n = self.len();
        if self.rho.len() != n || self.j.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidParameter("array lengths do not match grid dimensions".into()));
        }
        if self.rho.iter().chain(self.j.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("sampled current contains non-finite values".into()));
        }
        Ok(())
    }

    /// Quadrilinear interpolation; zero outside the grid.
    pub fn evaluate(&self, r: &Vec3, t: f64) -> (f64, Vec3) {
        let coords = [
            (r.x - self.origin[0]) / self.dx,
            (r.y - self.origin[1]) / self.dx,
            (r.z - self.origin[2]) / self.dx,
            (t - self.origin[3]) / self.dt,
        ];
        let mut base = [0usize; 4];
        let mut frac = [0.0; 4];
        for a in 0..4 {
            let u = coords[a];
            let n = self.dims[a];
            if !(u >= 0.0 && u <= (n - 1) as f64) {
                return (0.0, Vec3::zeros());
            }
            let i = (u.floor() as usize).min(n.saturating_sub(2));
            base[a] = i;
            frac[a] = if n > 1 { u - i as f64 } else { 0.0 };
        }
        let mut rho = 0.0;
        let mut j = Vec3::zeros();
        for corner in 0..16usize {
            let mut w = 1.0;
            let mut idx = [0usize; 4];
            for a in 0..4 {
                let bit = (corner >> a) & 1;
                if bit == 1 && self.dims[a] == 1 {
                    w = 0.0;
                }
                idx[a] = base[a] + bit;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if w == 0.0 {
                continue;
            }
            let k = self.index(idx[0], idx[1], idx[2], idx[3]);
            rho += w * self.rho[k];
            for c in 0..3 {
                j[c] += w * self.j[c][k];
            }
        }
        (rho, j)
    }

    /// Normalised and absolute central-difference continuity residuals at
    /// interior points (one boundary cell excluded), at most `samples` of them.
    pub fn continuity_residuals(&self, samples: usize) -> Vec<(f64, f64)> {
        let [nx, ny, nz, nt] = self.dims;
        if nx < 3 || ny < 3 || nz < 3 || nt < 3 {
            return Vec::new();
        }
        let interior = [nx - 2, ny - 2, nz - 2, nt - 2];
        let count: usize = interior.iter().product();
        let pick = |i: usize| -> [usize; 4] {
            if samples >= count {
                let mut rem = i;
                let mut out = [0; 4];
                for a in (0..4).rev() {
                    out[a] = 1 + rem % interior[a];
                    rem /= interior[a];
                }
                out
            } else {
                let mut out = [0; 4];
                for (a, o) in out.iter_mut().enumerate() {
                    *o = 1 + ((halton(i, a) * interior[a] as f64) as usize).min(interior[a] - 1);
                }
                out
            }
        };
        let n = samples.min(count);
        let h2 = 2.0 * self.dx;
        (0..n)
            .map(|i| {
                let [ix, iy, iz, it] = pick(i);
                let drho = (self.rho[self.index(ix, iy, iz, it + 1)] - self.rho[self.index(ix, iy, iz, it - 1)]) / (2.0 * self.dt);
                let dxj = (self.j[0][self.index(ix + 1, iy, iz, it)] - self.j[0][self.index(ix - 1, iy, iz, it)]) / h2;
                let dyj = (self.j[1][self.index(ix, iy + 1, iz, it)] - self.j[1][self.index(ix, iy - 1, iz, it)]) / h2;
                let dzj = (self.j[2][self.index(ix, iy, iz + 1, it)] - self.j[2][self.index(ix, iy, iz - 1, it)]) / h2;
                let abs = (drho + dxj + dyj + dzj).abs();
                let scale = drho.abs() + dxj.abs() + dyj.abs() + dzj.abs();
                (if scale > 0.0 { abs / scale } else { 0.0 }, abs)
            })
            .collect()
    }

    /// Charge on the time slice nearest to `t` (linear interpolation between slices).
    pub fn total_charge(&self, t: f64) -> f64 {
        let nt = self.dims[3];
        let u = ((t - self.origin[3]) / self.dt).clamp(0.0, (nt - 1) as f64);
        let i0 = (u.floor() as usize).min(nt.saturating_sub(2));
        let f = if nt > 1 { u - i0 as f64 } else { 0.0 };
        let vol = self.dx.powi(3);
        let slice = |it: usize| -> f64 {
            let vals: Vec<f64> = (0..self.dims[0])
                .flat_map(|ix| (0..self.dims[1]).flat_map(move |iy| (0..self.dims[2]).map(move |iz| (ix, iy, iz))))
                .map(|(ix, iy, iz)| self.rho[self.index(ix, iy, iz, it)])
                .collect();
            pairwise_sum(&vals) * vol
        };
        if nt == 1 {
            slice(0)
        } else {
            (1.0 - f) * slice(i0) + f * slice(i0 + 1)
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = [
            self.dims[0] as f64,
            self.dims[1] as f64,
            self.dims[2] as f64,
            self.dims[3] as f64,
            self.dx,
            self.dt,
            self.origin[0],
            self.origin[1],
            self.origin[2],
            self.origin[3],
        ];
        let mut buf = Vec::with_capacity(8 * (HEADER_LEN + 4 * self.len()));
        for v in header.iter().chain(&self.rho).chain(self.j.iter().flatten()) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<SampledCurrent> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() % 8 != 0 || bytes.len() < 8 * HEADER_LEN {
            return Err(Error::Format(format!("file length {} is not a valid layout", bytes.len())));
        }
        let vals: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        let mut dims = [0usize; 4];
        for a in 0..4 {
            let d = vals[a];
            if !(d >= 1.0 && d.fract() == 0.0 && d < 1e9) {
                return Err(Error::Format(format!("dimension {a} is not a positive integer: {d}")));
            }
            dims[a] = d as usize;
        }
        let n: usize = dims.iter().product();
        if vals.len() != HEADER_LEN + 4 * n {
            return Err(Error::Format(format!("expected {} values, found {}", HEADER_LEN + 4 * n, vals.len())));
        }
        let body = &vals[HEADER_LEN..];
        let out = SampledCurrent {
            dims,
            dx: vals[4],
            dt: vals[5],
            origin: [vals[6], vals[7], vals[8], vals[9]],
            rho: body[..n].to_vec(),
            j: [body[n..2 * n].to_vec(), body[2 * n..3 * n].to_vec(), body[3 * n..].to_vec()],
        };
        out.validate()?;
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<SampledCurrent> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> SampledCurrent {
        SampledCurrent::from_fn([3, 4, 5, 6], 0.5, 0.25, [-1.0, 0.0, 1.0, 2.0], |r, t| {
            (r.x + 2.0 * r.y - r.z + t, Vec3::new(t, r.x, 1.0))
        })
    }

    #[test]
    fn header_is_bit_exact() {
        let s = ramp();
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 * (10 + 4 * 360));
        assert_eq!(&buf[0..8], &3.0f64.to_le_bytes());
        assert_eq!(&buf[32..40], &0.5f64.to_le_bytes());
        assert_eq!(&buf[72..80], &2.0f64.to_le_bytes());
        // first rho sample: (-1 + 0 - 1 + 2) = 0; second (it = 1): 0.25
        assert_eq!(&buf[88..96], &0.25f64.to_le_bytes());
        assert_eq!(SampledCurrent::read_from(&buf[..]).unwrap(), s);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let mut buf = Vec::new();
        ramp().write_to(&mut buf).unwrap();
        assert!(SampledCurrent::read_from(&buf[..buf.len() - 8]).is_err());
        assert!(SampledCurrent::read_from(&buf[..40]).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_multilinear_fields() {
        let s = ramp();
        let (rho, j) = s.evaluate(&Vec3::new(-0.3, 0.7, 2.2), 2.6);
        assert!((rho - (-0.3 + 1.4 - 2.2 + 2.6)).abs() < 1e-12);
        assert!((j - Vec3::new(2.6, -0.3, 1.0)).norm() < 1e-12);
        assert_eq!(s.evaluate(&Vec3::new(5.0, 0.0, 1.0), 2.0).0, 0.0);
    }

    #[test]
    fn corrupted_grid_fails_continuity() {
        // rho = -t * x, J = (x^2/2 ... ) chosen so d rho/dt + div J = 0: J_x = x^2/2
        let good = SampledCurrent::from_fn([6, 6, 6, 6], 0.2, 0.2, [0.0; 4], |r, t| {
            (-t * r.x, Vec3::new(0.5 * r.x * r.x, 0.0, 0.0))
        });
        let res = good.continuity_residuals(10_000);
        assert!(res.iter().all(|r| r.0 < 1e-12));
        let mut bad = good.clone();
        bad.rho.iter_mut().for_each(|v| *v = 0.0);
        let res = bad.continuity_residuals(10_000);
        assert!(res.iter().any(|r| r.0 > 0.5));
    }
}
