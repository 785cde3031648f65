//! The solve pipeline and the four reference experiments (exact solution
//! `φ ≡ 1` in each).

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{Command, ExactSolution, FSelector, KSelector, RunConfig};
use crate::error::{Error, Result};
use crate::moments::{ModifiedMoments, SingularKernel};
use crate::pointsets::{design_file_name, PointSource, QuadratureRule, WeightMode};
use crate::quad1d::{graded_integral, GradedOptions, OracleEstimate};
use crate::solver::{solve_stage1, uniform_error, DiscreteSolution, ProblemSpec, RightHandSide};
use crate::sphere::{uniform_random_points, EvaluationGrid};

/// `1 - ∫ sin(10|x-y|) dω(y)`
pub const EXPERIMENT1_RHS: f64 = 1.455449001125579;
/// `1 - ∫ |x-y|^{-1/2} cos(10|x-y|) dω(y)`
pub const EXPERIMENT2_RHS: f64 = 0.303738699125466;

/// `1 - ∫ log|x-y| dω(y) = 1 - π(4 ln 2 - 2)`
pub fn experiment3_rhs() -> f64 {
    1.0 - PI * (4.0 * LN_2 - 2.0)
}

/// `1 - ∫ h(|x-y|) K(x,y) dω(y)` for a zonal `K`, which does not depend on
/// `x`: the right-hand side whose exact solution is `φ ≡ 1`.
pub fn unit_solution_rhs(kernel: SingularKernel, k: KSelector) -> Result<OracleEstimate> {
    kernel.validate()?;
    let radial = k.kernel();
    let opts = GradedOptions::default();
    let est = graded_integral(&opts, |a| {
        let r = (2.0 * a.to_upper).sqrt();
        kernel.profile(a) * radial.radial(r).expect("built-in kernels are zonal")
    });
    if !est.value.is_finite() {
        return Err(Error::Numerical(format!("right-hand side integral for {kernel} is not finite")));
    }
    Ok(OracleEstimate {
        value: 1.0 - 2.0 * PI * est.value,
        error_estimate: 2.0 * PI * est.error_estimate,
        warning: est.warning,
    })
}

/// `h`, `K` and the constant `f` of one of the reference experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSetup {
    pub kernel: SingularKernel,
    pub k: KSelector,
    pub f: f64,
}

pub fn experiment_setup(id: u8) -> Result<ExperimentSetup> {
    Ok(match id {
        1 => ExperimentSetup {
            kernel: SingularKernel::One,
            k: KSelector::Sin(10.0),
            f: EXPERIMENT1_RHS,
        },
        2 => ExperimentSetup {
            kernel: SingularKernel::Algebraic { nu: -0.5 },
            k: KSelector::Cos(10.0),
            f: EXPERIMENT2_RHS,
        },
        3 => ExperimentSetup {
            kernel: SingularKernel::Log,
            k: KSelector::Const(1.0),
            f: experiment3_rhs(),
        },
        4 => {
            let kernel = SingularKernel::Mixed { nu1: -0.5, nu2: -0.5 };
            let k = KSelector::Sin(10.0);
            let rhs = unit_solution_rhs(kernel, k)?;
            if let Some(w) = rhs.warning {
                return Err(Error::Numerical(format!("experiment 4 right-hand side: {w}")));
            }
            ExperimentSetup { kernel, k, f: rhs.value }
        }
        other => return Err(Error::Validation(format!("unknown experiment {other} (expected 1-4)"))),
    })
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub n: usize,
    pub m: usize,
    pub eta: f64,
    /// `max |φ_γ - φ|` over the grid; absent without a reference solution.
    pub uniform_error: Option<f64>,
    pub residual: f64,
    pub seconds: f64,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub record: ResultRecord,
    pub solution: DiscreteSolution,
}

/// Solves one configured problem and measures it on `grid`.
pub fn solve_once(
    label: &str,
    kernel: SingularKernel,
    k: KSelector,
    f: f64,
    n: usize,
    rule: QuadratureRule,
    grid: &EvaluationGrid,
    exact: ExactSolution,
) -> Result<RunOutcome> {
    let start = Instant::now();
    let spec = ProblemSpec {
        kernel,
        k: k.kernel(),
        f: RightHandSide::Constant(f),
        n,
        rule,
    };
    let solution = solve_stage1(spec)?;
    let uniform_error = match exact {
        ExactSolution::One => Some(uniform_error(&solution, |_| 1.0, grid)),
        ExactSolution::None => None,
    };
    let record = ResultRecord {
        experiment: label.to_string(),
        n,
        m: solution.gamma.m,
        eta: solution.gamma.eta,
        uniform_error,
        residual: solution.residual,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutcome { record, solution })
}

/// Runs reference experiment `id` at degree `n` on the rule from `points`
/// (design strength `2n` where a strength is needed).
pub fn run_experiment(
    id: u8,
    n: usize,
    points: &PointSource,
    weights: WeightMode,
    grid_size: usize,
    seed: u64,
) -> Result<RunOutcome> {
    let setup = experiment_setup(id)?;
    let rule = points.resolve(2 * n, weights)?;
    let grid = uniform_random_points(grid_size, seed)?;
    solve_once(
        &format!("exp{id}"),
        setup.kernel,
        setup.k,
        setup.f,
        n,
        rule,
        &grid,
        ExactSolution::One,
    )
}

/// Replaces experiment placeholders and `const:auto` with the concrete
/// kernel and right-hand side that will be used.
pub fn resolve_config(cfg: &RunConfig) -> Result<RunConfig> {
    let mut cfg = cfg.clone();
    if cfg.command == Command::Experiment {
        let id = cfg
            .experiment
            .ok_or_else(|| Error::Validation("experiment id required (--id 1..4)".into()))?;
        let setup = experiment_setup(id)?;
        cfg.kernel = setup.kernel;
        cfg.k = setup.k;
        cfg.f = FSelector::Const(setup.f);
    } else if cfg.command == Command::Solve && cfg.f == FSelector::Auto {
        let KSelector::Const(c) = cfg.k else {
            return Err(Error::Validation(format!(
                "const:auto needs a constant K; give an explicit --f for K = {}",
                cfg.k
            )));
        };
        let mu0 = ModifiedMoments::compute(cfg.kernel, 0)?.values()[0];
        if cfg.exact.is_none() {
            cfg.exact = Some(ExactSolution::One);
        }
        cfg.f = FSelector::Const(1.0 - c * mu0);
    }
    Ok(cfg)
}

/// Records plus non-fatal diagnostics of a solve or experiment run.
#[derive(Debug, Default)]
pub struct RunReport {
    pub records: Vec<ResultRecord>,
    pub warnings: Vec<String>,
}

/// Runs every degree of a resolved solve/experiment configuration. Within
/// a sweep, degrees whose design file is missing are skipped with a warning.
pub fn run_solves(cfg: &RunConfig) -> Result<RunReport> {
    let FSelector::Const(f) = cfg.f else {
        return Err(Error::Validation("right-hand side must be resolved before solving".into()));
    };
    let label = match (cfg.command, cfg.experiment) {
        (Command::Experiment, Some(id)) => format!("exp{id}"),
        _ => "solve".to_string(),
    };
    let grid = uniform_random_points(cfg.grid, cfg.seed)?;
    let exact = cfg.exact_solution();
    let mut report = RunReport::default();
    for n in cfg.degrees() {
        let t = cfg.strength_for(n);
        if let (Some(_), PointSource::Designs(dir)) = (cfg.sweep, &cfg.points) {
            let path = dir.join(design_file_name(t));
            if !path.is_file() {
                report
                    .warnings
                    .push(format!("n = {n}: skipped, no {t}-design at {}", path.display()));
                continue;
            }
        }
        let rule = cfg.points.resolve(t, cfg.weights)?;
        let outcome = solve_once(&label, cfg.kernel, cfg.k, f, n, rule, &grid, exact)?;
        report
            .warnings
            .extend(outcome.solution.warnings.iter().map(|w| format!("n = {n}: {w}")));
        report.records.push(outcome.record);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_kernel_rhs_matches_closed_form() {
        let est = unit_solution_rhs(SingularKernel::One, KSelector::Const(1.0)).unwrap();
        assert_abs_diff_eq!(est.value, 1.0 - 4.0 * PI, epsilon = 1e-13);
        let log = unit_solution_rhs(SingularKernel::Log, KSelector::Const(1.0)).unwrap();
        assert_abs_diff_eq!(log.value, experiment3_rhs(), epsilon = 1e-12);
    }

    #[test]
    fn unknown_experiment() {
        assert!(matches!(experiment_setup(5), Err(Error::Validation(_))));
        assert!(matches!(experiment_setup(0), Err(Error::Validation(_))));
    }

    #[test]
    fn auto_rhs_resolution() {
        let mut cfg = RunConfig::new(Command::Solve);
        cfg.kernel = SingularKernel::Log;
        cfg.k = KSelector::Const(2.0);
        let resolved = resolve_config(&cfg).unwrap();
        assert_eq!(resolved.f, FSelector::Const(1.0 - 2.0 * PI * (4.0 * LN_2 - 2.0)));
        assert_eq!(resolved.exact_solution(), ExactSolution::One);
        cfg.k = KSelector::Sin(1.0);
        assert!(resolve_config(&cfg).is_err());
    }
}
