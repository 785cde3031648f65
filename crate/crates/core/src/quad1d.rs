//! One-dimensional quadrature on [-1, 1].
//!
//! Gauss–Legendre and Gauss–Jacobi rules, plus a composite Gauss–Legendre
//! integrator whose mesh is refined geometrically toward both endpoints. The
//! latter is the reference ("oracle") for every integral with an endpoint
//! singularity of power or logarithmic type.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        // Tricomi's initial guess
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
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
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi rule for the weight `(1 - t)^alpha (1 + t)^beta`.
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
    beta: f64,
}

impl GaussJacobi {
    /// Golub–Welsch: nodes are the eigenvalues of the symmetric Jacobi
    /// matrix, weights the squared first eigenvector components times the
    /// total mass of the weight.
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("Gauss-Jacobi rule needs at least one node".into()));
        }
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Validation(format!(
                "Jacobi exponents must exceed -1 (alpha = {alpha}, beta = {beta})"
            )));
        }
        let ab = alpha + beta;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            jac[(k, k)] = if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / (s * (s + 2.0))
            };
            if k + 1 < n {
                let k1 = kf + 1.0;
                let s1 = 2.0 * k1 + ab;
                let off = 2.0 / s1
                    * (k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab) / ((s1 + 1.0) * (s1 - 1.0))).sqrt();
                jac[(k, k + 1)] = off;
                jac[(k + 1, k)] = off;
            }
        }
        // alpha + beta = -1 makes the first off-diagonal formula 0/0 at k = 0
        if n > 1 && (ab + 1.0).abs() < 1e-300 {
            let off = (4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0).powi(2) * (ab + 3.0))).sqrt();
            jac[(0, 1)] = off;
            jac[(1, 0)] = off;
        }
        let mass = ((ab + 1.0) * 2f64.ln() + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
            - ln_gamma(ab + 2.0))
        .exp();
        let eig = SymmetricEigen::try_new(jac, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numerical("Jacobi matrix eigensolver did not converge".into()))?;
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| (eig.eigenvalues[i], mass * eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(GaussJacobi {
            nodes,
            weights,
            alpha,
            beta,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `∫ (1-t)^alpha (1+t)^beta f(t) dt`
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// A quadrature abscissa together with its exact distances to both
/// endpoints, so that integrands singular at `t = ±1` can be evaluated
/// without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub t: f64,
    /// `1 - t`
    pub to_upper: f64,
    /// `1 + t`
    pub to_lower: f64,
}

impl Abscissa {
    pub fn new(t: f64) -> Self {
        Abscissa {
            t,
            to_upper: 1.0 - t,
            to_lower: 1.0 + t,
        }
    }
}

/// Tuning knobs of [`graded_integral`].
#[derive(Debug, Clone, Copy)]
pub struct GradedOptions {
    /// Gauss–Legendre nodes per subinterval.
    pub nodes: usize,
    /// Minimum number of geometric levels toward each endpoint.
    pub min_levels: usize,
    pub max_levels: usize,
    /// Relative accuracy target: `|err| <= tolerance * (1 + |value|)`.
    pub tolerance: f64,
}

impl Default for GradedOptions {
    fn default() -> Self {
        GradedOptions {
            nodes: 32,
            min_levels: 60,
            max_levels: 1000,
            tolerance: 1e-12,
        }
    }
}

/// Result of a reference integration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error_estimate: f64,
    /// Set when the accuracy target was not met.
    pub warning: Option<String>,
}

/// Vector-valued graded integration of `f` over [-1, 1]; `f` writes its
/// `dim` components into the output slice.
///
/// The interval is cut into 16 equal pieces; the two end pieces are split
/// geometrically (ratio 1/2) toward the endpoint until the extrapolated tail
/// is negligible. Each subinterval gets a `nodes`-point Gauss–Legendre rule,
/// and the difference to a coarser embedded rule gives the error estimate.
pub fn graded_integral_vec<F>(dim: usize, opts: &GradedOptions, f: F) -> Vec<OracleEstimate>
where
    F: Fn(Abscissa, &mut [f64]),
{
    let (fine_x, fine_w) = gauss_legendre(opts.nodes);
    let (coarse_x, coarse_w) = gauss_legendre((opts.nodes * 5 / 8).max(2));
    let mut fine = vec![0.0; dim];
    let mut coarse = vec![0.0; dim];
    let mut buf = vec![0.0; dim];

    let mut panel = |map: &dyn Fn(f64) -> Abscissa, half: f64, acc_f: &mut [f64], acc_c: &mut [f64]| {
        for (x, w) in fine_x.iter().zip(&fine_w) {
            f(map(*x), &mut buf);
            for (a, v) in acc_f.iter_mut().zip(&buf) {
                *a += half * w * v;
            }
        }
        for (x, w) in coarse_x.iter().zip(&coarse_w) {
            f(map(*x), &mut buf);
            for (a, v) in acc_c.iter_mut().zip(&buf) {
                *a += half * w * v;
            }
        }
    };

    const PIECES: usize = 16;
    let width = 2.0 / PIECES as f64;
    for p in 1..PIECES - 1 {
        let a = -1.0 + p as f64 * width;
        let mid = a + 0.5 * width;
        let half = 0.5 * width;
        panel(&|x| Abscissa::new(mid + half * x), half, &mut fine, &mut coarse);
    }

    let mut tail = vec![0.0; dim];
    let mut exhausted = false;
    for upper in [true, false] {
        // distance d to the endpoint ranges over [width 2^-(k+1), width 2^-k]
        let mut prev = vec![f64::NAN; dim];
        let mut level_f = vec![0.0; dim];
        let mut level_c = vec![0.0; dim];
        let mut k = 0;
        loop {
            let hi = width * 0.5f64.powi(k as i32);
            let (mid, half) = (0.75 * hi, 0.25 * hi);
            level_f.iter_mut().for_each(|v| *v = 0.0);
            level_c.iter_mut().for_each(|v| *v = 0.0);
            let map = |x: f64| {
                let d = mid + half * x;
                if upper {
                    Abscissa { t: 1.0 - d, to_upper: d, to_lower: 2.0 - d }
                } else {
                    Abscissa { t: d - 1.0, to_upper: 2.0 - d, to_lower: d }
                }
            };
            panel(&map, half, &mut level_f, &mut level_c);
            let mut tail_ok = true;
            let mut side_tail = vec![0.0; dim];
            for i in 0..dim {
                fine[i] += level_f[i];
                coarse[i] += level_c[i];
                let c = level_f[i].abs();
                let r = c / prev[i].abs();
                side_tail[i] = if c == 0.0 {
                    0.0
                } else if r.is_finite() && r < 0.95 {
                    c * r / (1.0 - r)
                } else {
                    f64::INFINITY
                };
                if side_tail[i] > 1e-3 * opts.tolerance * (1.0 + fine[i].abs()) {
                    tail_ok = false;
                }
                prev[i] = level_f[i];
            }
            k += 1;
            if k >= opts.min_levels && tail_ok {
                for (t, s) in tail.iter_mut().zip(&side_tail) {
                    *t += s;
                }
                break;
            }
            if k >= opts.max_levels || hi < 1e-300 {
                for (t, s) in tail.iter_mut().zip(&side_tail) {
                    *t += s;
                }
                exhausted = true;
                break;
            }
        }
    }

    (0..dim)
        .map(|i| {
            let err = (fine[i] - coarse[i]).abs() + tail[i];
            let target = opts.tolerance * (1.0 + fine[i].abs());
            let warning = if exhausted || !(err <= target) {
                Some(format!(
                    "reference integral did not reach the accuracy target (estimate {err:e}, target {target:e})"
                ))
            } else {
                None
            };
            OracleEstimate {
                value: fine[i],
                error_estimate: err,
                warning,
            }
        })
        .collect()
}

/// Scalar form of [`graded_integral_vec`].
pub fn graded_integral(opts: &GradedOptions, f: impl Fn(Abscissa) -> f64) -> OracleEstimate {
    graded_integral_vec(1, opts, |a, out| out[0] = f(a))
        .pop()
        .expect("one component")
}
