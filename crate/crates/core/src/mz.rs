//! Marcinkiewicz–Zygmund analysis of a quadrature rule.
//!
//! For `χ = Σ c_i Y_i` in the degree-`n` harmonic space, the discrete form
//! `Σ_j w_j χ(x_j)^2` equals `cᵀ G c` with the Gram matrix
//! `G_{ii'} = Σ_j w_j Y_i(x_j) Y_{i'}(x_j)`, while `∫ χ^2 dω = cᵀ c`. The
//! smallest η with `(1-η)|c|^2 <= cᵀGc <= (1+η)|c|^2` is therefore
//! `max(λ_max - 1, 1 - λ_min)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::HarmonicBasis;
use crate::pointsets::QuadratureRule;
use crate::sphere::{mesh_norm, uniform_random_points};

/// Default tolerance for "integrates every harmonic of degree d exactly".
pub const DEFAULT_EXACTNESS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzOptions {
    pub exactness_tolerance: f64,
    /// Probe count for the mesh-norm estimate; `None` uses
    /// `max(100 m, 10_000)`.
    pub probe_points: Option<usize>,
    pub probe_seed: u64,
}

impl Default for MzOptions {
    fn default() -> Self {
        MzOptions {
            exactness_tolerance: DEFAULT_EXACTNESS_TOLERANCE,
            probe_points: None,
            probe_seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MzReport {
    pub n: usize,
    pub eta: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Largest `d <= 2n+1` with every harmonic of degree `<= d` integrated
    /// within tolerance; `None` if even the constant fails.
    pub exact_to: Option<usize>,
    pub mesh_norm: f64,
    /// `η / (2 h_X)`, reported without a claim of admissibility.
    pub degree_bound: f64,
}

impl MzReport {
    /// Whether the rule has the MZ property at this degree (`η < 1`).
    pub fn holds(&self) -> bool {
        self.eta < 1.0
    }

    pub fn status(&self) -> &'static str {
        if self.holds() {
            "MZ property holds (eta < 1)"
        } else {
            "MZ property fails (eta >= 1)"
        }
    }
}

/// `G_{ii'} = Σ_j w_j Y_i(x_j) Y_{i'}(x_j)` over the degree-`n` basis.
pub fn gram_matrix(rule: &QuadratureRule, n: usize) -> DMatrix<f64> {
    let mut b = HarmonicBasis::new(n).eval_matrix(rule.points());
    for (mut col, w) in b.column_iter_mut().zip(rule.weights()) {
        col *= w.sqrt();
    }
    let g = &b * b.transpose();
    // symmetrize away the last-bit asymmetry of the product
    (&g + g.transpose()) * 0.5
}

/// Extreme eigenvalues of a symmetric matrix.
pub fn extreme_eigenvalues(g: &DMatrix<f64>) -> Result<(f64, f64)> {
    let eig = SymmetricEigen::try_new(g.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Numerical("non-finite Gram eigenvalues".into()));
    }
    Ok((lo, hi))
}

/// η alone, without exactness or mesh-norm diagnostics.
pub fn mz_eta(rule: &QuadratureRule, n: usize) -> Result<(f64, f64, f64)> {
    let (lo, hi) = extreme_eigenvalues(&gram_matrix(rule, n))?;
    Ok(((hi - 1.0).max(1.0 - lo).max(0.0), lo, hi))
}

/// Per-degree worst residual `max_k |Σ_j w_j Y_{l,k}(x_j) - sqrt(4π) [l=0]|`
/// for `l = 0..=d`.
pub fn harmonic_residuals(rule: &QuadratureRule, d: usize) -> Vec<f64> {
    let basis = HarmonicBasis::new(d);
    let mut sums = vec![0.0; basis.len()];
    let mut buf = vec![0.0; basis.len()];
    for (x, w) in rule.points().iter().zip(rule.weights()) {
        basis.eval_into(x, &mut buf);
        for (s, y) in sums.iter_mut().zip(&buf) {
            *s += w * y;
        }
    }
    sums[0] -= (4.0 * PI).sqrt();
    (0..=d)
        .map(|l| sums[l * l..(l + 1) * (l + 1)].iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .collect()
}

/// Largest absolute error of the rule on the harmonics of degree `<= d`.
pub fn quadrature_error_on_harmonics(rule: &QuadratureRule, d: usize) -> f64 {
    harmonic_residuals(rule, d).into_iter().fold(0.0, f64::max)
}

/// Full MZ report at degree `n`.
pub fn mz_constant(rule: &QuadratureRule, n: usize, opts: &MzOptions) -> Result<MzReport> {
    let (eta, lambda_min, lambda_max) = mz_eta(rule, n)?;
    let residuals = harmonic_residuals(rule, 2 * n + 1);
    let exact_to = residuals
        .iter()
        .position(|r| !(*r <= opts.exactness_tolerance))
        .map(|first_bad| first_bad.checked_sub(1))
        .unwrap_or(Some(2 * n + 1));
    let probes = opts.probe_points.unwrap_or((100 * rule.len()).max(10_000));
    let probe = uniform_random_points(probes, opts.probe_seed)?;
    let h = mesh_norm(rule.points(), &probe)?;
    Ok(MzReport {
        n,
        eta,
        lambda_min,
        lambda_max,
        exact_to,
        mesh_norm: h,
        degree_bound: if h > 0.0 { eta / (2.0 * h) } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::{equal_area_points, QuadratureRule};
    use crate::sphere::SpherePoint;
    use approx::assert_abs_diff_eq;

    #[test]
    fn degree_zero_gram() {
        let rule = equal_area_points(17).unwrap();
        let g = gram_matrix(&rule, 0);
        assert_eq!(g.shape(), (1, 1));
        assert_abs_diff_eq!(g[(0, 0)], rule.total_weight() / (4.0 * PI), epsilon = 1e-15);
    }

    #[test]
    fn single_point_fails_mz() {
        let rule = QuadratureRule::new(vec![SpherePoint::NORTH], vec![4.0 * PI], "one").unwrap();
        let g = gram_matrix(&rule, 1);
        let (lo, hi) = extreme_eigenvalues(&g).unwrap();
        // G = 4π v vᵀ with |v|^2 = 1/π
        assert_abs_diff_eq!(hi, 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-13);
        let rep = mz_constant(&rule, 1, &MzOptions { probe_points: Some(100), ..Default::default() }).unwrap();
        assert_abs_diff_eq!(rep.eta, 3.0, epsilon = 1e-13);
        assert!(!rep.holds());
        assert_eq!(rep.status(), "MZ property fails (eta >= 1)");
        assert_eq!(rep.exact_to, Some(0));
    }

    #[test]
    fn undersampled_gram_is_rank_deficient() {
        let rule = equal_area_points(10).unwrap();
        let g = gram_matrix(&rule, 3);
        let eig = SymmetricEigen::new(g);
        let rank = eig.eigenvalues.iter().filter(|v| v.abs() > 1e-10).count();
        assert!(rank <= 10);
    }

    #[test]
    fn equal_area_integrates_constants() {
        let rule = equal_area_points(400).unwrap();
        assert!(quadrature_error_on_harmonics(&rule, 0) < 1e-13);
        let unit = QuadratureRule::new(vec![SpherePoint::NORTH], vec![1.0], "light").unwrap();
        let rep = mz_constant(&unit, 0, &MzOptions { probe_points: Some(10), ..Default::default() }).unwrap();
        assert_eq!(rep.exact_to, None);
    }
}
