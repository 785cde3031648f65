//! Legendre polynomials and real spherical harmonics.
//!
//! The harmonics are orthonormal with respect to the raw surface measure
//! (total mass 4π) and carry no Condon–Shortley phase. Inside degree `l` the
//! order index `k = 1..=2l+1` is laid out as
//!
//! * `k = 1..=l`: `sin(mφ)` components, `m = l, l-1, ..., 1`
//! * `k = l+1`: the zonal function (`m = 0`)
//! * `k = l+2..=2l+1`: `cos(mφ)` components, `m = 1, ..., l`
//!
//! and the flat basis ordering is `(0,1), (1,1), (1,2), (1,3), (2,1), ...`,
//! i.e. flat index `l^2 + k - 1`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sphere::SpherePoint;

/// Legendre polynomial `P_l(t)` by the three-term recurrence.
pub fn legendre_p(degree: usize, t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("Legendre argument {t} outside [-1, 1]")));
    }
    Ok(legendre_p_unchecked(degree, t))
}

#[inline]
pub(crate) fn legendre_p_unchecked(degree: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    if degree == 0 {
        return prev;
    }
    for l in 1..degree {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * t * cur - lf * prev) / (lf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[l] = P_l(t)` for `l = 0..out.len()`.
#[inline]
pub fn legendre_sequence(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = t;
    }
    for l in 1..out.len().saturating_sub(1) {
        let lf = l as f64;
        out[l + 1] = ((2.0 * lf + 1.0) * t * out[l] - lf * out[l - 1]) / (lf + 1.0);
    }
}

/// `sum_k Y_{l,k}(x) Y_{l,k}(y) = (2l+1)/(4π) P_l(x.y)`.
pub fn addition_kernel(degree: usize, x: &SpherePoint, y: &SpherePoint) -> f64 {
    (2 * degree + 1) as f64 / (4.0 * PI) * legendre_p_unchecked(degree, x.cos_angle(y))
}

/// Degree and order of one real spherical harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    degree: usize,
    order: usize,
}

/// The trigonometric factor selected by a [`HarmonicIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Azimuthal {
    Sin(usize),
    Zonal,
    Cos(usize),
}

impl HarmonicIndex {
    pub fn new(degree: usize, order: usize) -> Result<Self> {
        if order == 0 || order > 2 * degree + 1 {
            return Err(Error::Validation(format!(
                "order {order} outside 1..={} for degree {degree}",
                2 * degree + 1
            )));
        }
        Ok(HarmonicIndex { degree, order })
    }

    pub fn from_flat(flat: usize) -> Self {
        let degree = (flat as f64).sqrt() as usize;
        // guard against sqrt rounding at perfect squares
        let degree = if (degree + 1) * (degree + 1) <= flat {
            degree + 1
        } else if degree * degree > flat {
            degree - 1
        } else {
            degree
        };
        HarmonicIndex {
            degree,
            order: flat - degree * degree + 1,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn flat(&self) -> usize {
        self.degree * self.degree + self.order - 1
    }

    pub fn azimuthal(&self) -> Azimuthal {
        let l = self.degree;
        match self.order {
            k if k <= l => Azimuthal::Sin(l + 1 - k),
            k if k == l + 1 => Azimuthal::Zonal,
            k => Azimuthal::Cos(k - l - 1),
        }
    }
}

/// Real orthonormal harmonics of degree at most `max_degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicBasis {
    max_degree: usize,
}

impl HarmonicBasis {
    pub fn new(max_degree: usize) -> Self {
        HarmonicBasis { max_degree }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `(n+1)^2`
    pub fn len(&self) -> usize {
        (self.max_degree + 1) * (self.max_degree + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> impl Iterator<Item = HarmonicIndex> {
        (0..self.len()).map(HarmonicIndex::from_flat)
    }

    /// Writes every basis function at `x` into `out` in flat order.
    pub fn eval_into(&self, x: &SpherePoint, out: &mut [f64]) {
        assert_eq!(out.len(), self.len(), "output buffer has the wrong length");
        let n = self.max_degree;
        let mut assoc = vec![0.0; (n + 1) * (n + 2) / 2];
        normalized_associated_legendre(n, x, &mut assoc);
        let rho = x.x().hypot(x.y());
        let (c1, s1) = if rho > 0.0 {
            (x.x() / rho, x.y() / rho)
        } else {
            (1.0, 0.0)
        };
        let mut cos_m = vec![1.0; n + 1];
        let mut sin_m = vec![0.0; n + 1];
        for m in 1..=n {
            cos_m[m] = cos_m[m - 1] * c1 - sin_m[m - 1] * s1;
            sin_m[m] = sin_m[m - 1] * c1 + cos_m[m - 1] * s1;
        }
        for l in 0..=n {
            let base = l * l;
            let tri = l * (l + 1) / 2;
            out[base + l] = assoc[tri];
            for m in 1..=l {
                let q = std::f64::consts::SQRT_2 * assoc[tri + m];
                out[base + l - m] = q * sin_m[m];
                out[base + l + m] = q * cos_m[m];
            }
        }
    }

    pub fn eval(&self, x: &SpherePoint) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(x, &mut out);
        out
    }

    /// Matrix with entry `(i, j) = Y_i(x_j)`.
    pub fn eval_matrix(&self, points: &[SpherePoint]) -> DMatrix<f64> {
        let rows = self.len();
        let mut data = vec![0.0; rows * points.len()];
        if rows > 0 {
            // nalgebra storage is column-major, so each column is one point
            data.par_chunks_mut(rows)
                .zip(points.par_iter())
                .for_each(|(col, x)| self.eval_into(x, col));
        }
        DMatrix::from_vec(rows, points.len(), data)
    }
}

/// Fully normalized associated Legendre functions
/// `sqrt((2l+1)/(4π) (l-m)!/(l+m)!) P_l^m(z)` without the Condon–Shortley
/// phase, stored at `l(l+1)/2 + m`.
fn normalized_associated_legendre(n: usize, x: &SpherePoint, out: &mut [f64]) {
    let z = x.z().clamp(-1.0, 1.0);
    let s = x.x().hypot(x.y());
    out[0] = 0.5 / PI.sqrt();
    let tri = |l: usize| l * (l + 1) / 2;
    for m in 1..=n {
        let mf = m as f64;
        out[tri(m) + m] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * out[tri(m - 1) + m - 1];
    }
    for m in 0..n {
        out[tri(m + 1) + m] = (2.0 * m as f64 + 3.0).sqrt() * z * out[tri(m) + m];
    }
    for m in 0..=n {
        let mf = m as f64;
        for l in (m + 2)..=n {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            out[tri(l) + m] = a * (z * out[tri(l - 1) + m] - b * out[tri(l - 2) + m]);
        }
    }
}

/// Value of a single harmonic.
pub fn eval_harmonic(idx: HarmonicIndex, x: &SpherePoint) -> f64 {
    HarmonicBasis::new(idx.degree()).eval(x)[idx.flat()]
}

/// Batch evaluation; see [`HarmonicBasis::eval_matrix`].
pub fn eval_basis_matrix(basis: &HarmonicBasis, points: &[SpherePoint]) -> DMatrix<f64> {
    basis.eval_matrix(points)
}
