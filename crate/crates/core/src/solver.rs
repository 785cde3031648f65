//! Two-stage product-integration solver for
//!
//! ```text
//! φ(x) - ∫ h(|x-y|) K(x,y) φ(y) dω(y) = f(x),   x on the unit sphere.
//! ```
//!
//! `K(x,·)φ` is replaced by its hyperinterpolant of degree `n`; integrating
//! the singular factor against each harmonic analytically (Funk–Hecke) gives
//! the weights
//!
//! ```text
//! W_j(x) = w_j Σ_{l<=n} μ_l (2l+1)/(4π) P_l(x · x_j)
//! ```
//!
//! (the inner sum over orders collapses by the addition theorem). Stage 1
//! solves the collocation system at the nodes; stage 2 evaluates the
//! Nyström interpolant anywhere.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LuFactors};
use crate::moments::{ModifiedMoments, SingularKernel};
use crate::mz::mz_eta;
use crate::pointsets::QuadratureRule;
use crate::sphere::{euclidean_distance, EvaluationGrid, SpherePoint};

/// Stage-1 systems with a larger 1-norm condition estimate get a warning;
/// beyond `1/ε` they are rejected as singular.
pub const CONDITION_WARNING_THRESHOLD: f64 = 1e12;

type KernelFn = dyn Fn(&SpherePoint, &SpherePoint) -> f64 + Send + Sync;
type PointFn = dyn Fn(&SpherePoint) -> f64 + Send + Sync;

/// The continuous factor `K(x, y)`.
#[derive(Clone)]
pub enum ContinuousKernel {
    Constant(f64),
    /// `sin(c |x - y|)`
    SinScaled(f64),
    /// `cos(c |x - y|)`
    CosScaled(f64),
    Custom(Arc<KernelFn>),
}

impl ContinuousKernel {
    pub fn custom(f: impl Fn(&SpherePoint, &SpherePoint) -> f64 + Send + Sync + 'static) -> Self {
        ContinuousKernel::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: &SpherePoint, y: &SpherePoint) -> f64 {
        match self {
            ContinuousKernel::Constant(c) => *c,
            ContinuousKernel::SinScaled(c) => (c * euclidean_distance(x, y)).sin(),
            ContinuousKernel::CosScaled(c) => (c * euclidean_distance(x, y)).cos(),
            ContinuousKernel::Custom(f) => f(x, y),
        }
    }

    /// `K` as a function of the chordal distance, if it depends on nothing
    /// else.
    pub fn radial(&self, r: f64) -> Option<f64> {
        match self {
            ContinuousKernel::Constant(c) => Some(*c),
            ContinuousKernel::SinScaled(c) => Some((c * r).sin()),
            ContinuousKernel::CosScaled(c) => Some((c * r).cos()),
            ContinuousKernel::Custom(_) => None,
        }
    }
}

impl fmt::Debug for ContinuousKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuousKernel::Custom(_) => f.write_str("Custom(..)"),
            other => write!(f, "{other}"),
        }
    }
}

impl fmt::Display for ContinuousKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuousKernel::Constant(c) => write!(f, "const:{c}"),
            ContinuousKernel::SinScaled(c) => write!(f, "sin:{c}"),
            ContinuousKernel::CosScaled(c) => write!(f, "cos:{c}"),
            ContinuousKernel::Custom(_) => f.write_str("custom"),
        }
    }
}

impl FromStr for ContinuousKernel {
    type Err = Error;

    /// `const:<c>`, `sin:<c>`, `cos:<c>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, value) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Validation(format!("cannot parse kernel K `{s}`")))?;
        let c: f64 = value
            .trim()
            .parse()
            .ok()
            .filter(|c: &f64| c.is_finite())
            .ok_or_else(|| Error::Validation(format!("bad parameter in kernel K `{s}`")))?;
        match name.trim() {
            "const" => Ok(ContinuousKernel::Constant(c)),
            "sin" => Ok(ContinuousKernel::SinScaled(c)),
            "cos" => Ok(ContinuousKernel::CosScaled(c)),
            other => Err(Error::Validation(format!(
                "unknown kernel K `{other}` (expected const | sin | cos)"
            ))),
        }
    }
}

/// The right-hand side `f`.
#[derive(Clone)]
pub enum RightHandSide {
    Constant(f64),
    Custom(Arc<PointFn>),
}

impl RightHandSide {
    pub fn custom(f: impl Fn(&SpherePoint) -> f64 + Send + Sync + 'static) -> Self {
        RightHandSide::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: &SpherePoint) -> f64 {
        match self {
            RightHandSide::Constant(c) => *c,
            RightHandSide::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for RightHandSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RightHandSide::Constant(c) => write!(f, "Constant({c})"),
            RightHandSide::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A complete discretized problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub kernel: SingularKernel,
    pub k: ContinuousKernel,
    pub f: RightHandSide,
    pub n: usize,
    pub rule: QuadratureRule,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if self.rule.is_empty() {
            return Err(Error::Validation("quadrature rule is empty".into()));
        }
        if let RightHandSide::Constant(c) = self.f {
            if !c.is_finite() {
                return Err(Error::Validation(format!("right-hand side {c} is not finite")));
            }
        }
        Ok(())
    }
}

/// `γ = (m, n, η)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gamma {
    pub m: usize,
    pub n: usize,
    pub eta: f64,
}

/// Stage-1 nodal values plus everything stage 2 needs.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub nodal_values: Vec<f64>,
    pub spec: ProblemSpec,
    pub moments: ModifiedMoments,
    pub gamma: Gamma,
    /// `||M φ - b||_∞` of the stage-1 system.
    pub residual: f64,
    pub condition_estimate: f64,
    pub warnings: Vec<String>,
    zonal: Vec<f64>,
}

/// `Σ_l a_l P_l(t)` by forward recurrence.
#[inline]
fn legendre_series(coeffs: &[f64], t: f64) -> f64 {
    let mut sum = coeffs[0];
    if coeffs.len() == 1 {
        return sum;
    }
    let (mut prev, mut cur) = (1.0, t);
    sum += coeffs[1] * t;
    for (l, a) in coeffs.iter().enumerate().skip(2) {
        let k = (l - 1) as f64;
        let next = ((2.0 * k + 1.0) * t * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        sum += a * cur;
    }
    sum
}

fn weight_row_with(rule: &QuadratureRule, zonal: &[f64], x: &SpherePoint, out: &mut [f64]) {
    for ((o, xj), w) in out.iter_mut().zip(rule.points()).zip(rule.weights()) {
        *o = w * legendre_series(zonal, x.cos_angle(xj));
    }
}

/// Product-integration weights `W_j(x)`, `j = 1..m`.
pub fn weight_row(rule: &QuadratureRule, moments: &ModifiedMoments, x: &SpherePoint) -> Vec<f64> {
    let mut out = vec![0.0; rule.len()];
    weight_row_with(rule, &moments.zonal_coefficients(), x, &mut out);
    out
}

/// `M_ij = δ_ij - W_j(x_i) K(x_i, x_j)` and `b_i = f(x_i)`.
pub fn assemble_system(spec: &ProblemSpec, moments: &ModifiedMoments) -> Result<(DenseMatrix, Vec<f64>)> {
    if moments.degree() != spec.n {
        return Err(Error::Validation(format!(
            "moments computed to degree {} for a degree-{} problem",
            moments.degree(),
            spec.n
        )));
    }
    let zonal = moments.zonal_coefficients();
    let rule = &spec.rule;
    let m = rule.len();
    let mut mat = DenseMatrix::zeros(m);
    let rows: Vec<&mut [f64]> = mat.rows_mut().collect();
    rows.into_par_iter().enumerate().for_each(|(i, row)| {
        let xi = &rule.points()[i];
        weight_row_with(rule, &zonal, xi, row);
        for (v, xj) in row.iter_mut().zip(rule.points()) {
            *v = -*v * spec.k.eval(xi, xj);
        }
        row[i] += 1.0;
    });
    let b = rule.points().iter().map(|x| spec.f.eval(x)).collect();
    Ok((mat, b))
}

/// Stage 1 with moments computed from the problem's kernel.
pub fn solve_stage1(spec: ProblemSpec) -> Result<DiscreteSolution> {
    spec.validate()?;
    let moments = ModifiedMoments::compute(spec.kernel, spec.n)?;
    solve_stage1_with(spec, moments)
}

/// Stage 1 with precomputed moments.
pub fn solve_stage1_with(spec: ProblemSpec, moments: ModifiedMoments) -> Result<DiscreteSolution> {
    spec.validate()?;
    if moments.kernel() != spec.kernel {
        return Err(Error::Validation("moments belong to a different kernel".into()));
    }
    let (mat, b) = assemble_system(&spec, &moments)?;
    let lu = LuFactors::factor(mat.clone())?;
    let nodal_values = lu.solve(&b);
    if nodal_values.iter().any(|v| !v.is_finite()) {
        let (pivot, column) = lu.min_pivot();
        return Err(Error::Singular { pivot, column });
    }
    let residual = mat
        .mul_vec(&nodal_values)
        .iter()
        .zip(&b)
        .map(|(r, bi)| (r - bi).abs())
        .fold(0.0, f64::max);
    let f_scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let condition_estimate = lu.condition_estimate();
    if condition_estimate * f64::EPSILON >= 1.0 {
        // no significant digits survive
        let (pivot, column) = lu.min_pivot();
        return Err(Error::Singular { pivot, column });
    }
    let mut warnings = Vec::new();
    if condition_estimate > CONDITION_WARNING_THRESHOLD {
        let (pivot, column) = lu.min_pivot();
        warnings.push(format!(
            "stage-1 matrix is ill-conditioned (1-norm estimate {condition_estimate:e}; smallest pivot {pivot:e} in column {column})"
        ));
    }
    if residual > 1e-10 * (1.0 + f_scale) {
        warnings.push(format!("stage-1 residual {residual:e} exceeds 1e-10 (1 + |f|)"));
    }
    let (eta, _, _) = mz_eta(&spec.rule, spec.n)?;
    let gamma = Gamma {
        m: spec.rule.len(),
        n: spec.n,
        eta,
    };
    let zonal = moments.zonal_coefficients();
    Ok(DiscreteSolution {
        nodal_values,
        spec,
        moments,
        gamma,
        residual,
        condition_estimate,
        warnings,
        zonal,
    })
}

impl DiscreteSolution {
    /// `φ_γ(t) = f(t) + Σ_j W_j(t) K(t, x_j) φ_j`
    pub fn evaluate(&self, t: &SpherePoint) -> f64 {
        let rule = &self.spec.rule;
        let mut acc = 0.0;
        for ((xj, w), phi) in rule.points().iter().zip(rule.weights()).zip(&self.nodal_values) {
            acc += w * legendre_series(&self.zonal, t.cos_angle(xj)) * self.spec.k.eval(t, xj) * phi;
        }
        self.spec.f.eval(t) + acc
    }

    pub fn evaluate_many(&self, points: &[SpherePoint]) -> Vec<f64> {
        points.par_iter().map(|t| self.evaluate(t)).collect()
    }
}

pub fn evaluate_stage2(sol: &DiscreteSolution, t: &SpherePoint) -> f64 {
    sol.evaluate(t)
}

/// `max_grid |φ_γ - exact|`
pub fn uniform_error(
    sol: &DiscreteSolution,
    exact: impl Fn(&SpherePoint) -> f64 + Sync,
    grid: &EvaluationGrid,
) -> f64 {
    grid.points()
        .par_iter()
        .map(|t| (sol.evaluate(t) - exact(t)).abs())
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moments_one;
    use crate::pointsets::equal_area_points;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn legendre_series_matches_direct_sum() {
        let coeffs = [0.3, -1.0, 0.25, 2.0, -0.5];
        let t = 0.37;
        let direct: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(l, a)| a * crate::harmonics::legendre_p(l, t).unwrap())
            .sum();
        assert_abs_diff_eq!(legendre_series(&coeffs, t), direct, epsilon = 1e-15);
        assert_eq!(legendre_series(&[2.5], 0.1), 2.5);
    }

    #[test]
    fn constant_weight_rows() {
        let rule = equal_area_points(50).unwrap();
        let mu = moments_one(6);
        let x = SpherePoint::new(0.2, -0.7, 0.1).unwrap();
        for (w, expected) in weight_row(&rule, &mu, &x).iter().zip(rule.weights()) {
            assert_abs_diff_eq!(*w, *expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn assembled_matrix_for_constant_kernels() {
        let rule = equal_area_points(12).unwrap();
        let spec = ProblemSpec {
            kernel: SingularKernel::One,
            k: ContinuousKernel::Constant(1.0),
            f: RightHandSide::Constant(1.0),
            n: 2,
            rule,
        };
        let (mat, b) = assemble_system(&spec, &moments_one(2)).unwrap();
        assert_eq!(mat.dim(), 12);
        let w = 4.0 * PI / 12.0;
        for i in 0..12 {
            for j in 0..12 {
                let expected = if i == j { 1.0 } else { 0.0 } - w;
                assert_abs_diff_eq!(mat.get(i, j), expected, epsilon = 1e-13);
            }
        }
        assert!(b.iter().all(|v| *v == 1.0));
        assert!(assemble_system(&spec, &moments_one(3)).is_err());
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let spec = ProblemSpec {
            kernel: SingularKernel::Log,
            k: ContinuousKernel::CosScaled(3.0),
            f: RightHandSide::Constant(0.0),
            n: 4,
            rule: equal_area_points(100).unwrap(),
        };
        let sol = solve_stage1(spec).unwrap();
        assert!(sol.nodal_values.iter().all(|v| *v == 0.0));
        assert_eq!(sol.evaluate(&SpherePoint::NORTH), 0.0);
    }

    #[test]
    fn kernel_selectors_parse() {
        assert!(matches!("const:1".parse::<ContinuousKernel>().unwrap(), ContinuousKernel::Constant(c) if c == 1.0));
        assert!(matches!("sin:10".parse::<ContinuousKernel>().unwrap(), ContinuousKernel::SinScaled(c) if c == 10.0));
        assert!(matches!("cos:10".parse::<ContinuousKernel>().unwrap(), ContinuousKernel::CosScaled(c) if c == 10.0));
        assert!("tan:1".parse::<ContinuousKernel>().is_err());
        assert!("sin".parse::<ContinuousKernel>().is_err());
        assert!("sin:x".parse::<ContinuousKernel>().is_err());
        assert_eq!("cos:2.5".parse::<ContinuousKernel>().unwrap().to_string(), "cos:2.5");
    }
}
