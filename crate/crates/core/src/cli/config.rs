//! Run configuration: typed, validated, serializable; assembled from a
//! key-value file and command-line flags (flags win).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::SingularKernel;
use crate::pointsets::{PointSource, WeightMode};
use crate::solver::ContinuousKernel;
use crate::sphere::DEFAULT_GRID_SEED;

pub const DEFAULT_POINTS: &str = "designs:data/pointsets";
pub const DEFAULT_GRID: usize = 5000;
/// Largest degree accepted; the Gram and stage-1 matrices grow as n^4.
pub const MAX_DEGREE: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Moments,
    Solve,
    Experiment,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analyze" => Ok(Command::Analyze),
            "moments" => Ok(Command::Moments),
            "solve" => Ok(Command::Solve),
            "experiment" => Ok(Command::Experiment),
            other => Err(Error::Validation(format!("unknown command `{other}`"))),
        }
    }
}

/// Built-in continuous kernels selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum KSelector {
    Const(f64),
    Sin(f64),
    Cos(f64),
}

impl KSelector {
    pub fn kernel(self) -> ContinuousKernel {
        match self {
            KSelector::Const(c) => ContinuousKernel::Constant(c),
            KSelector::Sin(c) => ContinuousKernel::SinScaled(c),
            KSelector::Cos(c) => ContinuousKernel::CosScaled(c),
        }
    }
}

impl FromStr for KSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.parse::<ContinuousKernel>()? {
            ContinuousKernel::Constant(c) => KSelector::Const(c),
            ContinuousKernel::SinScaled(c) => KSelector::Sin(c),
            ContinuousKernel::CosScaled(c) => KSelector::Cos(c),
            ContinuousKernel::Custom(_) => unreachable!("custom kernels have no textual form"),
        })
    }
}

impl fmt::Display for KSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kernel().fmt(f)
    }
}

impl TryFrom<String> for KSelector {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<KSelector> for String {
    fn from(k: KSelector) -> String {
        k.to_string()
    }
}

/// Right-hand side selector. `Auto` is the constant that makes `φ ≡ 1` the
/// exact solution, `1 - c μ_0`, and is only available for `K ≡ c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FSelector {
    Const(f64),
    Auto,
}

impl FromStr for FSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let value = s
            .trim()
            .strip_prefix("const:")
            .ok_or_else(|| Error::Validation(format!("cannot parse right-hand side `{s}` (expected const:<c> | const:auto)")))?;
        if value.trim() == "auto" {
            return Ok(FSelector::Auto);
        }
        match value.trim().parse::<f64>() {
            Ok(c) if c.is_finite() => Ok(FSelector::Const(c)),
            _ => Err(Error::Validation(format!("bad right-hand side constant in `{s}`"))),
        }
    }
}

impl fmt::Display for FSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FSelector::Const(c) => write!(f, "const:{c}"),
            FSelector::Auto => f.write_str("const:auto"),
        }
    }
}

impl TryFrom<String> for FSelector {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FSelector> for String {
    fn from(f: FSelector) -> String {
        f.to_string()
    }
}

/// Reference solution used for the uniform error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactSolution {
    /// `φ ≡ 1`
    One,
    None,
}

impl FromStr for ExactSolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "one" | "1" => Ok(ExactSolution::One),
            "none" => Ok(ExactSolution::None),
            other => Err(Error::Validation(format!("unknown exact solution `{other}` (expected one | none)"))),
        }
    }
}

/// `n = start:step:end`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sweep {
    pub start: usize,
    pub step: usize,
    pub end: usize,
}

impl Sweep {
    pub fn degrees(&self) -> impl Iterator<Item = usize> {
        (self.start..=self.end).step_by(self.step)
    }

    /// Design strength used for degree `n` in a sweep.
    pub fn design_strength(n: usize) -> usize {
        n * 6 / 5
    }
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Validation(format!("cannot parse sweep `{s}` (expected n=<start>:<step>:<end>)"));
        let range = s.trim().strip_prefix("n=").ok_or_else(bad)?;
        let parts: Vec<usize> = range
            .split(':')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, step, end] = parts[..] else {
            return Err(bad());
        };
        if step == 0 || start > end {
            return Err(Error::Validation(format!("empty or non-advancing sweep `{s}`")));
        }
        Ok(Sweep { start, step, end })
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}:{}:{}", self.start, self.step, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Experiment id (1-4) for the `experiment` command.
    pub experiment: Option<u8>,
    pub points: PointSource,
    pub weights: WeightMode,
    pub kernel: SingularKernel,
    #[serde(rename = "K")]
    pub k: KSelector,
    pub f: FSelector,
    /// `None`: `one` when `f` is automatic or fixed by an experiment,
    /// otherwise no reference.
    pub exact: Option<ExactSolution>,
    pub n: usize,
    pub grid: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub sweep: Option<Sweep>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            experiment: None,
            points: DEFAULT_POINTS.parse().expect("default point source parses"),
            weights: WeightMode::Equal,
            kernel: SingularKernel::One,
            k: KSelector::Const(1.0),
            f: FSelector::Auto,
            exact: None,
            n: 5,
            grid: DEFAULT_GRID,
            seed: DEFAULT_GRID_SEED,
            out: None,
            sweep: None,
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let number = |what: &str| -> Result<u64> {
            value
                .parse()
                .map_err(|_| Error::Validation(format!("`{what}` must be a non-negative integer (got `{value}`)")))
        };
        match key.trim() {
            "command" => self.command = value.parse()?,
            "experiment" | "id" => self.experiment = Some(number("experiment")? as u8),
            "points" => self.points = value.parse()?,
            "weights" => self.weights = value.parse()?,
            "kernel" => self.kernel = value.parse()?,
            "K" | "k" => self.k = value.parse()?,
            "f" => self.f = value.parse()?,
            "exact" => self.exact = Some(value.parse()?),
            "n" => self.n = number("n")? as usize,
            "grid" => self.grid = number("grid")? as usize,
            "seed" => self.seed = number("seed")?,
            "out" => self.out = Some(PathBuf::from(value)),
            "sweep" => self.sweep = Some(value.parse()?),
            other => return Err(Error::Validation(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            self.set(key, value).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(())
    }

    /// Reference solution in effect.
    pub fn exact_solution(&self) -> ExactSolution {
        match self.exact {
            Some(e) => e,
            None if self.command == Command::Experiment || self.f == FSelector::Auto => ExactSolution::One,
            None => ExactSolution::None,
        }
    }

    /// Parameter checks that must pass before any heavy computation.
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if self.command != Command::Moments {
            self.points.check_exists()?;
        }
        let degrees: Vec<usize> = match self.sweep {
            Some(s) => s.degrees().collect(),
            None => vec![self.n],
        };
        if let Some(&n) = degrees.iter().find(|&&n| n > MAX_DEGREE) {
            return Err(Error::Validation(format!("degree {n} exceeds the maximum {MAX_DEGREE}")));
        }
        if matches!(self.command, Command::Solve | Command::Experiment) && self.grid == 0 {
            return Err(Error::Validation("evaluation grid must have at least one point".into()));
        }
        if self.command == Command::Experiment {
            match self.experiment {
                Some(1..=4) => {}
                Some(id) => return Err(Error::Validation(format!("unknown experiment {id} (expected 1-4)"))),
                None => return Err(Error::Validation("experiment id required (--id 1..4)".into())),
            }
        }
        if self.command == Command::Solve && self.f == FSelector::Auto && !matches!(self.k, KSelector::Const(_)) {
            return Err(Error::Validation(format!(
                "const:auto needs a constant K; give an explicit --f for K = {}",
                self.k
            )));
        }
        Ok(())
    }

    /// Design strength used at degree `n`: `2n` for a single run,
    /// `floor(1.2 n)` within a sweep.
    pub fn strength_for(&self, n: usize) -> usize {
        if self.sweep.is_some() {
            Sweep::design_strength(n)
        } else {
            2 * n
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        match self.sweep {
            Some(s) => s.degrees().collect(),
            None => vec![self.n],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors_round_trip() {
        for s in ["const:1", "sin:10", "cos:2.5"] {
            assert_eq!(s.parse::<KSelector>().unwrap().to_string(), s);
        }
        for s in ["const:auto", "const:0.25"] {
            assert_eq!(s.parse::<FSelector>().unwrap().to_string(), s);
        }
        assert!("0.25".parse::<FSelector>().is_err());
        assert!("const:nan".parse::<FSelector>().is_err());
    }

    #[test]
    fn sweep_parsing() {
        let s: Sweep = "n=10:5:35".parse().unwrap();
        assert_eq!(s.degrees().collect::<Vec<_>>(), vec![10, 15, 20, 25, 30, 35]);
        assert_eq!(s.to_string(), "n=10:5:35");
        assert!("n=10:0:35".parse::<Sweep>().is_err());
        assert!("n=30:5:10".parse::<Sweep>().is_err());
        assert!("m=1:1:2".parse::<Sweep>().is_err());
        assert_eq!(Sweep::design_strength(10), 12);
        assert_eq!(Sweep::design_strength(25), 30);
        assert_eq!(Sweep::design_strength(35), 42);
    }

    #[test]
    fn set_rejects_unknown_keys() {
        let mut cfg = RunConfig::new(Command::Solve);
        assert!(cfg.set("colour", "red").is_err());
        assert!(cfg.set("n", "-3").is_err());
        cfg.set("K", "cos:10").unwrap();
        assert_eq!(cfg.k, KSelector::Cos(10.0));
    }

    #[test]
    fn auto_rhs_needs_constant_k() {
        let mut cfg = RunConfig::new(Command::Solve);
        cfg.points = "equal_area:10".parse().unwrap();
        cfg.k = KSelector::Sin(10.0);
        assert!(matches!(cfg.validate(), Err(Error::Validation(_))));
        cfg.f = FSelector::Const(1.0);
        cfg.validate().unwrap();
        assert_eq!(cfg.exact_solution(), ExactSolution::None);
    }
}
