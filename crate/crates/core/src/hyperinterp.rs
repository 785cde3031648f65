//! Hyperinterpolation: the discrete L2 projection onto degree-`n` harmonics
//! whose inner products are evaluated by a quadrature rule.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::harmonics::HarmonicBasis;
use crate::pointsets::QuadratureRule;
use crate::sphere::SpherePoint;

/// Coefficients `<g, Y_i>_m` in flat basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCoefficients {
    n: usize,
    coeffs: Vec<f64>,
    rule_label: String,
}

impl HyperCoefficients {
    pub fn new(n: usize, coeffs: Vec<f64>, rule_label: impl Into<String>) -> Result<Self> {
        let basis = HarmonicBasis::new(n);
        if coeffs.len() != basis.len() {
            return Err(Error::Validation(format!(
                "degree {n} needs {} coefficients, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        Ok(HyperCoefficients {
            n,
            coeffs,
            rule_label: rule_label.into(),
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn rule_label(&self) -> &str {
        &self.rule_label
    }
}

/// A rule together with its cached degree-`n` basis matrix.
#[derive(Debug, Clone)]
pub struct Hyperinterpolator<'a> {
    rule: &'a QuadratureRule,
    basis: HarmonicBasis,
    matrix: DMatrix<f64>,
}

impl<'a> Hyperinterpolator<'a> {
    pub fn new(rule: &'a QuadratureRule, n: usize) -> Self {
        let basis = HarmonicBasis::new(n);
        let matrix = basis.eval_matrix(rule.points());
        Hyperinterpolator { rule, basis, matrix }
    }

    /// `coeffs[i] = Σ_j w_j g(x_j) Y_i(x_j)`
    pub fn coefficients(&self, samples: &[f64]) -> Result<HyperCoefficients> {
        if samples.len() != self.rule.len() {
            return Err(Error::Validation(format!(
                "{} samples for a rule with {} points",
                samples.len(),
                self.rule.len()
            )));
        }
        let weighted = DVector::from_iterator(
            samples.len(),
            samples.iter().zip(self.rule.weights()).map(|(g, w)| g * w),
        );
        let c = &self.matrix * weighted;
        HyperCoefficients::new(self.basis.max_degree(), c.as_slice().to_vec(), self.rule.label())
    }

    /// Samples `g` at the rule's nodes and projects.
    pub fn project(&self, g: impl Fn(&SpherePoint) -> f64) -> Result<HyperCoefficients> {
        let samples: Vec<f64> = self.rule.points().iter().map(g).collect();
        self.coefficients(&samples)
    }

    /// Matrix of the discrete inner product on the basis; identical to the
    /// MZ Gram matrix.
    pub fn inner_product_matrix(&self) -> DMatrix<f64> {
        let mut weighted = self.matrix.clone();
        for (mut col, w) in weighted.column_iter_mut().zip(self.rule.weights()) {
            col *= *w;
        }
        &weighted * self.matrix.transpose()
    }
}

pub fn hyper_coefficients(rule: &QuadratureRule, n: usize, samples: &[f64]) -> Result<HyperCoefficients> {
    Hyperinterpolator::new(rule, n).coefficients(samples)
}

/// `Σ_i coeffs[i] Y_i(t)`
pub fn hyper_evaluate(c: &HyperCoefficients, t: &SpherePoint) -> f64 {
    let y = HarmonicBasis::new(c.degree()).eval(t);
    y.iter().zip(c.coeffs()).map(|(a, b)| a * b).sum()
}

/// L2 norm of the hyperinterpolant (Parseval).
pub fn hyper_l2_norm(c: &HyperCoefficients) -> f64 {
    c.coeffs().iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::equal_area_points;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn constant_coefficients() {
        let c = HyperCoefficients::new(2, {
            let mut v = vec![0.0; 9];
            v[0] = (4.0 * PI).sqrt();
            v
        }, "manual")
        .unwrap();
        for t in [SpherePoint::NORTH, SpherePoint::new(0.3, 0.4, -0.2).unwrap()] {
            assert_abs_diff_eq!(hyper_evaluate(&c, &t), 1.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(hyper_l2_norm(&c), 3.544_907_7, epsilon = 1e-7);
        let zero = HyperCoefficients::new(1, vec![0.0; 4], "z").unwrap();
        assert_eq!(hyper_l2_norm(&zero), 0.0);
        assert!(HyperCoefficients::new(1, vec![0.0; 3], "z").is_err());
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let rule = equal_area_points(20).unwrap();
        assert!(hyper_coefficients(&rule, 2, &[1.0; 19]).is_err());
    }

    #[test]
    fn linearity() {
        let rule = equal_area_points(60).unwrap();
        let h = Hyperinterpolator::new(&rule, 3);
        let g: Vec<f64> = rule.points().iter().map(|p| p.x() * p.z() + 0.5).collect();
        let f: Vec<f64> = rule.points().iter().map(|p| (p.y()).exp()).collect();
        let mix: Vec<f64> = g.iter().zip(&f).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
        let (cg, cf, cm) = (
            h.coefficients(&g).unwrap(),
            h.coefficients(&f).unwrap(),
            h.coefficients(&mix).unwrap(),
        );
        for i in 0..16 {
            assert_abs_diff_eq!(cm.coeffs()[i], 2.0 * cg.coeffs()[i] - 3.0 * cf.coeffs()[i], epsilon = 1e-13);
        }
    }
}
