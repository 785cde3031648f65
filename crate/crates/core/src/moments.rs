//! Modified moments `μ_l = 2π ∫ h(sqrt(2(1-t))) P_l(t) dt` of the singular
//! kernel families.
//!
//! By the Funk–Hecke formula, `∫ h(|x-y|) Y_{l,k}(y) dω(y) = μ_l Y_{l,k}(x)`,
//! so these scalars are all the product-integration weights need to know
//! about the singular factor `h`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::harmonics::{legendre_p_unchecked, legendre_sequence};
use crate::quad1d::{graded_integral, graded_integral_vec, Abscissa, GaussJacobi, GradedOptions, OracleEstimate};

/// Agreement required before the candidate log-kernel closed form is used.
const LOG_CLOSED_FORM_TOLERANCE: f64 = 1e-10;

/// The weight `h(|x - y|)` of the integral operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SingularKernel {
    /// `h ≡ 1`
    One,
    /// `|x - y|^nu`
    Algebraic { nu: f64 },
    /// `log |x - y|`
    Log,
    /// `|x - y|^nu1 |x + y|^nu2`
    Mixed { nu1: f64, nu2: f64 },
}

impl SingularKernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SingularKernel::One | SingularKernel::Log => Ok(()),
            SingularKernel::Algebraic { nu } => {
                if nu.is_finite() && nu > -1.0 {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "algebraic kernel exponent must exceed -1 (got {nu})"
                    )))
                }
            }
            SingularKernel::Mixed { nu1, nu2 } => {
                for (name, v) in [("nu1", nu1), ("nu2", nu2)] {
                    if !(v.is_finite() && (-1.0..0.0).contains(&v)) {
                        return Err(Error::Validation(format!(
                            "mixed kernel exponent {name} must lie in [-1, 0) (got {v})"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// `h(sqrt(2(1-t)))`, evaluated from the endpoint distances of `a`.
    pub fn profile(&self, a: Abscissa) -> f64 {
        match *self {
            SingularKernel::One => 1.0,
            SingularKernel::Algebraic { nu } => (2.0 * a.to_upper).powf(0.5 * nu),
            SingularKernel::Log => 0.5 * (2.0 * a.to_upper).ln(),
            SingularKernel::Mixed { nu1, nu2 } => {
                (2.0 * a.to_upper).powf(0.5 * nu1) * (2.0 * a.to_lower).powf(0.5 * nu2)
            }
        }
    }

    /// `h(r)` for a chordal distance `r`; `chord_plus` is `|x + y|`.
    pub fn eval_distance(&self, r: f64, chord_plus: f64) -> f64 {
        match *self {
            SingularKernel::One => 1.0,
            SingularKernel::Algebraic { nu } => r.powf(nu),
            SingularKernel::Log => r.ln(),
            SingularKernel::Mixed { nu1, nu2 } => r.powf(nu1) * chord_plus.powf(nu2),
        }
    }
}

impl fmt::Display for SingularKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularKernel::One => write!(f, "one"),
            SingularKernel::Algebraic { nu } => write!(f, "algebraic:{nu}"),
            SingularKernel::Log => write!(f, "log"),
            SingularKernel::Mixed { nu1, nu2 } => write!(f, "mixed:{nu1}:{nu2}"),
        }
    }
}

impl FromStr for SingularKernel {
    type Err = Error;

    /// `one`, `algebraic:<nu>`, `log`, `mixed:<nu1>:<nu2>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("bad kernel parameter `{v}` in `{s}`")))
        };
        let kernel = match parts.as_slice() {
            ["one"] => SingularKernel::One,
            ["log"] => SingularKernel::Log,
            ["algebraic", nu] => SingularKernel::Algebraic { nu: num(nu)? },
            ["mixed", a, b] => SingularKernel::Mixed {
                nu1: num(a)?,
                nu2: num(b)?,
            },
            _ => {
                return Err(Error::Validation(format!(
                    "unknown kernel `{s}` (expected one | algebraic:<nu> | log | mixed:<nu1>:<nu2>)"
                )))
            }
        };
        kernel.validate()?;
        Ok(kernel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ClosedForm,
    Oracle,
    GaussJacobi,
}

impl fmt::Display for MomentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MomentMethod::ClosedForm => "closed_form",
            MomentMethod::Oracle => "oracle",
            MomentMethod::GaussJacobi => "gauss_jacobi",
        })
    }
}

/// `(μ_0, ..., μ_n)` for one kernel, with the method used for each entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifiedMoments {
    kernel: SingularKernel,
    values: Vec<f64>,
    methods: Vec<MomentMethod>,
}

impl ModifiedMoments {
    /// Dispatches on the kernel family.
    pub fn compute(kernel: SingularKernel, n: usize) -> Result<Self> {
        match kernel {
            SingularKernel::One => Ok(moments_one(n)),
            SingularKernel::Algebraic { nu } => moments_algebraic(nu, n),
            SingularKernel::Log => moments_log(n),
            SingularKernel::Mixed { nu1, nu2 } => moments_mixed(nu1, nu2, n),
        }
    }

    pub fn kernel(&self) -> SingularKernel {
        self.kernel
    }

    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn methods(&self) -> &[MomentMethod] {
        &self.methods
    }

    /// Coefficients `μ_l (2l+1)/(4π)` of the zonal expansion used by the
    /// product-integration weights.
    pub fn zonal_coefficients(&self) -> Vec<f64> {
        self.values
            .iter()
            .enumerate()
            .map(|(l, mu)| mu * (2 * l + 1) as f64 / (4.0 * PI))
            .collect()
    }
}

pub fn moments_one(n: usize) -> ModifiedMoments {
    let mut values = vec![0.0; n + 1];
    values[0] = 4.0 * PI;
    ModifiedMoments {
        kernel: SingularKernel::One,
        values,
        methods: vec![MomentMethod::ClosedForm; n + 1],
    }
}

/// `μ_l = 2^(ν+2) π (-ν/2)_l Γ((ν+2)/2) / Γ(l + ν/2 + 2)`.
pub fn moments_algebraic(nu: f64, n: usize) -> Result<ModifiedMoments> {
    let kernel = SingularKernel::Algebraic { nu };
    kernel.validate()?;
    let a = -0.5 * nu;
    let values = (0..=n)
        .map(|l| {
            let lf = l as f64;
            let ratio = if a > 0.0 {
                (ln_gamma(a + lf) - ln_gamma(a) + ln_gamma(0.5 * nu + 1.0) - ln_gamma(lf + 0.5 * nu + 2.0)).exp()
            } else {
                // (a)_l with a <= 0 is a finite product that may vanish
                let poch: f64 = (0..l).map(|i| a + i as f64).product();
                poch * (ln_gamma(0.5 * nu + 1.0) - ln_gamma(lf + 0.5 * nu + 2.0)).exp()
            };
            2f64.powf(nu + 2.0) * PI * ratio
        })
        .collect();
    Ok(ModifiedMoments {
        kernel,
        values,
        methods: vec![MomentMethod::ClosedForm; n + 1],
    })
}

/// Log kernel: `μ_0 = π(4 ln 2 - 2)`; higher moments come from the oracle,
/// replaced by `-2π / (l(l+1))` when the oracle confirms that form for every
/// degree up to `n`.
pub fn moments_log(n: usize) -> Result<ModifiedMoments> {
    let kernel = SingularKernel::Log;
    let mut values = vec![PI * (4.0 * LN_2 - 2.0)];
    if n == 0 {
        return Ok(ModifiedMoments {
            kernel,
            values,
            methods: vec![MomentMethod::ClosedForm],
        });
    }
    let oracle = oracle_moments(|a| kernel.profile(a), n);
    let candidate = |l: usize| -2.0 * PI / (l * (l + 1)) as f64;
    let confirmed = (1..=n).all(|l| {
        (oracle[l].value - candidate(l)).abs() <= LOG_CLOSED_FORM_TOLERANCE * candidate(l).abs()
    });
    let mut methods = vec![MomentMethod::ClosedForm];
    for (l, est) in oracle.iter().enumerate().skip(1) {
        if confirmed {
            values.push(candidate(l));
            methods.push(MomentMethod::ClosedForm);
        } else {
            values.push(est.value);
            methods.push(MomentMethod::Oracle);
        }
    }
    Ok(ModifiedMoments {
        kernel,
        values,
        methods,
    })
}

/// `μ_l = 2^((ν1+ν2)/2) 2π ∫ (1-t)^(ν1/2) (1+t)^(ν2/2) P_l(t) dt` by
/// Gauss–Jacobi quadrature with `n + 20` nodes.
pub fn moments_mixed(nu1: f64, nu2: f64, n: usize) -> Result<ModifiedMoments> {
    let kernel = SingularKernel::Mixed { nu1, nu2 };
    kernel.validate()?;
    let rule = GaussJacobi::new(n + 20, 0.5 * nu1, 0.5 * nu2)?;
    let scale = 2f64.powf(0.5 * (nu1 + nu2)) * 2.0 * PI;
    let mut values = vec![0.0; n + 1];
    let mut p = vec![0.0; n + 1];
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        legendre_sequence(t, &mut p);
        for (v, pl) in values.iter_mut().zip(&p) {
            *v += w * pl;
        }
    }
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(ModifiedMoments {
        kernel,
        values,
        methods: vec![MomentMethod::GaussJacobi; n + 1],
    })
}

/// Reference value of `2π ∫ h1d(t) P_l(t) dt`.
pub fn oracle_moment(h1d: impl Fn(Abscissa) -> f64, degree: usize, tolerance: f64) -> OracleEstimate {
    let opts = GradedOptions {
        tolerance,
        ..Default::default()
    };
    let mut est = graded_integral(&opts, |a| legendre_p_unchecked(degree, a.t) * h1d(a));
    est.value *= 2.0 * PI;
    est.error_estimate *= 2.0 * PI;
    est
}

/// Oracle moments for all degrees `0..=n` in one sweep.
pub fn oracle_moments(h1d: impl Fn(Abscissa) -> f64, n: usize) -> Vec<OracleEstimate> {
    let opts = GradedOptions::default();
    graded_integral_vec(n + 1, &opts, |a, out| {
        legendre_sequence(a.t, out);
        let h = h1d(a);
        out.iter_mut().for_each(|v| *v *= h);
    })
    .into_iter()
    .map(|mut e| {
        e.value *= 2.0 * PI;
        e.error_estimate *= 2.0 * PI;
        e
    })
    .collect()
}
