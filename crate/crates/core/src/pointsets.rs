//! Quadrature rules on the sphere: file ingestion and built-in generators.
//!
//! Point files are plain text, one point per row, `x y z [w]` separated by
//! whitespace; everything after a `#` is a comment. Values are written with
//! 17 significant digits so that a load/write/load cycle is bit-exact.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{uniform_random_points, SpherePoint};

/// Default upper bound on the total weight of a rule.
pub const DEFAULT_WEIGHT_BOUND: f64 = 8.0 * PI;

/// Rows whose norm is further than this from one are rejected on load.
const ROW_NORM_TOLERANCE: f64 = 1e-6;

/// Points with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    label: String,
}

impl QuadratureRule {
    pub fn new(points: Vec<SpherePoint>, weights: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::with_weight_bound(points, weights, label, DEFAULT_WEIGHT_BOUND)
    }

    /// Like [`QuadratureRule::new`] with a custom bound on `sum w_j`.
    pub fn with_weight_bound(
        points: Vec<SpherePoint>,
        weights: Vec<f64>,
        label: impl Into<String>,
        bound: f64,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("quadrature rule has no points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::Validation(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some((j, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::Validation(format!("weight {j} is not positive ({w})")));
        }
        let total: f64 = weights.iter().sum();
        if total > bound {
            return Err(Error::Validation(format!(
                "total weight {total} exceeds the bound {bound}"
            )));
        }
        Ok(QuadratureRule {
            points,
            weights,
            label: label.into(),
        })
    }

    /// Equal weights `4π/m`.
    pub fn equal_weights(points: Vec<SpherePoint>, label: impl Into<String>) -> Result<Self> {
        let w = 4.0 * PI / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        Self::new(points, weights, label)
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same weights, every point mapped through `rot` (row-major 3x3).
    pub fn rotated(&self, rot: &[[f64; 3]; 3]) -> Self {
        QuadratureRule {
            points: self.points.iter().map(|p| p.rotate(rot)).collect(),
            weights: self.weights.clone(),
            label: format!("{} (rotated)", self.label),
        }
    }

    /// Every weight multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::with_weight_bound(
            self.points.clone(),
            self.weights.iter().map(|w| w * s).collect(),
            format!("{} (x{s})", self.label),
            f64::INFINITY,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// `w_j = 4π/m`
    #[default]
    Equal,
    /// Fourth column of the point file.
    FromFile,
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "equal" => Ok(WeightMode::Equal),
            "file" | "from_file" => Ok(WeightMode::FromFile),
            other => Err(Error::Validation(format!(
                "unknown weight mode `{other}` (expected equal | file)"
            ))),
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Equal => "equal",
            WeightMode::FromFile => "file",
        })
    }
}

/// Reads a point file.
pub fn load_pointset(path: impl AsRef<Path>, mode: WeightMode) -> Result<QuadratureRule> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_pointset(&text, path, mode, label)
}

/// Parses point-file text; `origin` is only used in error messages.
pub fn parse_pointset(text: &str, origin: &Path, mode: WeightMode, label: String) -> Result<QuadratureRule> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut points = Vec::new();
    let mut file_weights = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let values = body
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("cannot parse `{tok}` as a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != 3 && values.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected `x y z [w]`, found {} columns", values.len()),
            ));
        }
        let norm = (values[0] * values[0] + values[1] * values[1] + values[2] * values[2]).sqrt();
        if !((norm - 1.0).abs() <= ROW_NORM_TOLERANCE) {
            return Err(parse_err(line_no, format!("point norm {norm} is not 1")));
        }
        points.push(SpherePoint::new(values[0], values[1], values[2]).map_err(|e| parse_err(line_no, e.to_string()))?);
        match (mode, values.get(3)) {
            (WeightMode::FromFile, Some(&w)) => {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::Validation(format!(
                        "{}:{line_no}: weight {w} is not positive",
                        origin.display()
                    )));
                }
                file_weights.push(w);
            }
            (WeightMode::FromFile, None) => {
                return Err(parse_err(line_no, "weight column missing (weights=file)".into()));
            }
            (WeightMode::Equal, _) => {}
        }
    }
    if points.is_empty() {
        return Err(parse_err(0, "file contains no points".into()));
    }
    match mode {
        WeightMode::Equal => QuadratureRule::equal_weights(points, label),
        WeightMode::FromFile => QuadratureRule::new(points, file_weights, label),
    }
}

/// Writes `rule` in the point-file format, with the weight column if
/// `with_weights` is set.
pub fn write_pointset(rule: &QuadratureRule, path: impl AsRef<Path>, with_weights: bool) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(&format!("# {}\n", rule.label().replace('\n', " ")));
    for (p, w) in rule.points().iter().zip(rule.weights()) {
        let [x, y, z] = p.coords();
        if with_weights {
            out.push_str(&format!("{x:.16e} {y:.16e} {z:.16e} {w:.16e}\n"));
        } else {
            out.push_str(&format!("{x:.16e} {y:.16e} {z:.16e}\n"));
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Zone structure of the recursive zonal equal-area partition: a north cap,
/// collars of equal-area regions and a south cap.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualAreaPartition {
    /// Colatitudes of the zone boundaries; the last entry is π.
    pub cap_colatitudes: Vec<f64>,
    /// Number of regions per zone, caps included.
    pub zone_counts: Vec<usize>,
}

fn cap_area(colatitude: f64) -> f64 {
    let s = (0.5 * colatitude).sin();
    4.0 * PI * s * s
}

fn cap_colatitude(area: f64) -> f64 {
    2.0 * ((area / PI).sqrt() / 2.0).min(1.0).asin()
}

impl EqualAreaPartition {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Validation("equal-area partition needs m >= 1".into()));
        }
        if m == 1 {
            return Ok(EqualAreaPartition {
                cap_colatitudes: vec![PI],
                zone_counts: vec![1],
            });
        }
        let region_area = 4.0 * PI / m as f64;
        let polar = cap_colatitude(region_area);
        let collar_angle = region_area.sqrt();
        let n_collars = if m > 2 {
            (((PI - 2.0 * polar) / collar_angle).round() as usize).max(1)
        } else {
            0
        };
        let mut ideal = vec![1.0];
        if n_collars > 0 {
            let fitting = (PI - 2.0 * polar) / n_collars as f64;
            for c in 0..n_collars {
                let top = polar + c as f64 * fitting;
                let bot = polar + (c + 1) as f64 * fitting;
                ideal.push((cap_area(bot) - cap_area(top)) / region_area);
            }
        }
        ideal.push(1.0);
        let mut counts = Vec::with_capacity(ideal.len());
        let mut discrepancy = 0.0;
        for r in &ideal {
            let c = (r + discrepancy).round();
            discrepancy += r - c;
            counts.push(c as usize);
        }
        let mut caps = vec![polar];
        let mut subtotal = 1usize;
        for c in &counts[1..counts.len() - 1] {
            subtotal += c;
            caps.push(cap_colatitude(subtotal as f64 * region_area));
        }
        caps.push(PI);
        Ok(EqualAreaPartition {
            cap_colatitudes: caps,
            zone_counts: counts,
        })
    }

    /// Area of each zone divided by its region count.
    pub fn region_areas(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cap_colatitudes
            .iter()
            .zip(&self.zone_counts)
            .map(|(&c, &n)| {
                let a = (cap_area(c) - cap_area(prev)) / n as f64;
                prev = c;
                a
            })
            .collect()
    }

    /// Region centers: the poles, and on each collar `n` equally spaced
    /// longitudes at the mid colatitude, twisted between collars.
    pub fn centers(&self) -> Vec<SpherePoint> {
        let total: usize = self.zone_counts.iter().sum();
        if total == 1 {
            return vec![SpherePoint::NORTH];
        }
        let mut pts = vec![SpherePoint::NORTH];
        let zones = self.zone_counts.len();
        let mut offset = 0.0f64;
        for c in 1..zones - 1 {
            let top = self.cap_colatitudes[c - 1];
            let bot = self.cap_colatitudes[c];
            let colat = 0.5 * (top + bot);
            let n = self.zone_counts[c];
            for k in 0..n {
                let phi = ((k as f64 + 0.5) * 2.0 * PI / n as f64 + 2.0 * PI * offset).rem_euclid(2.0 * PI);
                pts.push(SpherePoint::from_angles(colat, phi));
            }
            offset += circle_offset(n, self.zone_counts[c + 1]);
            offset -= offset.floor();
        }
        pts.push(SpherePoint::SOUTH);
        pts
    }
}

fn circle_offset(n_top: usize, n_bot: usize) -> f64 {
    let g = gcd(n_top, n_bot) as f64;
    let (t, b) = (n_top as f64, n_bot as f64);
    (1.0 / b - 1.0 / t) / 2.0 + g / (2.0 * t * b)
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Centers of the recursive zonal equal-area partition into `m` regions,
/// with weights `4π/m`.
pub fn equal_area_points(m: usize) -> Result<QuadratureRule> {
    let part = EqualAreaPartition::new(m)?;
    QuadratureRule::equal_weights(part.centers(), format!("equal_area:{m}"))
}

/// `m` uniform random points with weights `4π/m`.
pub fn random_rule(m: usize, seed: u64) -> Result<QuadratureRule> {
    let grid = uniform_random_points(m, seed)?;
    QuadratureRule::equal_weights(grid.points().to_vec(), format!("random:{m}:{seed}"))
}

/// File name of the t-design with `(t+1)^2` points inside a designs
/// directory.
pub fn design_file_name(t: usize) -> String {
    format!("sd_t{t:02}_m{}.txt", (t + 1) * (t + 1))
}

/// Point count given explicitly or derived from the strength `t` of the run
/// as `(t+1)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointCount {
    Fixed(usize),
    Auto,
}

impl PointCount {
    fn resolve(self, t: usize) -> usize {
        match self {
            PointCount::Fixed(m) => m,
            PointCount::Auto => (t + 1) * (t + 1),
        }
    }
}

/// Where a run takes its quadrature points from.
///
/// Textual forms: `file:<path>` (or a bare path), `equal_area:<m|auto>`,
/// `random:<m|auto>:<seed>`, `designs:<dir>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSource {
    File(PathBuf),
    EqualArea(PointCount),
    Random(PointCount, u64),
    /// Directory of t-design files named by [`design_file_name`].
    Designs(PathBuf),
}

impl PointSource {
    /// Builds the rule. `t` selects the design strength (and the `auto`
    /// point count `(t+1)^2`) for the sources that need one.
    pub fn resolve(&self, t: usize, mode: WeightMode) -> Result<QuadratureRule> {
        match self {
            PointSource::File(path) => load_pointset(path, mode),
            PointSource::EqualArea(m) => equal_area_points(m.resolve(t)),
            PointSource::Random(m, seed) => random_rule(m.resolve(t), *seed),
            PointSource::Designs(dir) => {
                let path = dir.join(design_file_name(t));
                if !path.is_file() {
                    return Err(Error::Validation(format!(
                        "no spherical {t}-design available at {}",
                        path.display()
                    )));
                }
                load_pointset(path, mode)
            }
        }
    }

    /// Checks that referenced files or directories exist.
    pub fn check_exists(&self) -> Result<()> {
        match self {
            PointSource::File(p) if !p.is_file() => {
                Err(Error::Validation(format!("point file {} does not exist", p.display())))
            }
            PointSource::Designs(d) if !d.is_dir() => {
                Err(Error::Validation(format!("designs directory {} does not exist", d.display())))
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for PointSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Validation(format!("cannot parse point source `{s}`"));
        let count = |v: &str| -> Result<PointCount> {
            if v == "auto" {
                return Ok(PointCount::Auto);
            }
            match v.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(PointCount::Fixed(m)),
                _ => Err(bad()),
            }
        };
        if let Some(rest) = s.strip_prefix("file:") {
            return Ok(PointSource::File(PathBuf::from(rest)));
        }
        if let Some(rest) = s.strip_prefix("designs:") {
            return Ok(PointSource::Designs(PathBuf::from(rest)));
        }
        if let Some(rest) = s.strip_prefix("equal_area:") {
            return Ok(PointSource::EqualArea(count(rest)?));
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let (m, seed) = rest.split_once(':').ok_or_else(bad)?;
            return Ok(PointSource::Random(count(m)?, seed.parse().map_err(|_| bad())?));
        }
        if s.is_empty() {
            return Err(bad());
        }
        Ok(PointSource::File(PathBuf::from(s)))
    }
}

impl fmt::Display for PointSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let count = |c: &PointCount| match c {
            PointCount::Fixed(m) => m.to_string(),
            PointCount::Auto => "auto".into(),
        };
        match self {
            PointSource::File(p) => write!(f, "file:{}", p.display()),
            PointSource::EqualArea(m) => write!(f, "equal_area:{}", count(m)),
            PointSource::Random(m, seed) => write!(f, "random:{}:{seed}", count(m)),
            PointSource::Designs(d) => write!(f, "designs:{}", d.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const OCTAHEDRON: &str = "# octahedron\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1  # north\n0 0 -1\n";

    fn parse(text: &str, mode: WeightMode) -> Result<QuadratureRule> {
        parse_pointset(text, Path::new("mem"), mode, "mem".into())
    }

    #[test]
    fn octahedron_equal_weights() {
        let rule = parse(OCTAHEDRON, WeightMode::Equal).unwrap();
        assert_eq!(rule.len(), 6);
        for w in rule.weights() {
            assert_abs_diff_eq!(*w, 2.094_395_1, epsilon = 1e-7);
        }
    }

    #[test]
    fn weights_from_file() {
        let w = 4.0 * PI / 2.0;
        let text = format!("0 0 1 {w}\n0 0 -1 {w}\n");
        let rule = parse(&text, WeightMode::FromFile).unwrap();
        assert_eq!(rule.weights(), &[w, w]);
        assert!(matches!(parse("0 0 1\n", WeightMode::FromFile), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("0 0 1 -2\n", WeightMode::FromFile), Err(Error::Validation(_))));
        assert!(matches!(parse("0 0 1 0\n", WeightMode::FromFile), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        assert!(matches!(
            parse("0 0 1\n# c\n0 zero 1\n", WeightMode::Equal),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(parse("0 0 1\n0 1\n", WeightMode::Equal), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("0 0 1.01\n", WeightMode::Equal), Err(Error::Parse { line: 1, .. })));
        assert!(parse("# nothing\n", WeightMode::Equal).is_err());
        // within tolerance rows are normalized
        let rule = parse("0 0 1.0000001\n", WeightMode::Equal).unwrap();
        assert_eq!(rule.points()[0].z(), 1.0);
    }

    #[test]
    fn rule_invariants() {
        let pts = vec![SpherePoint::NORTH, SpherePoint::SOUTH];
        assert!(QuadratureRule::new(pts.clone(), vec![1.0, 0.0], "x").is_err());
        assert!(QuadratureRule::new(pts.clone(), vec![1.0], "x").is_err());
        assert!(QuadratureRule::new(pts.clone(), vec![20.0, 20.0], "x").is_err());
        assert!(QuadratureRule::with_weight_bound(pts, vec![20.0, 20.0], "x", 100.0).is_ok());
        assert!(QuadratureRule::new(vec![], vec![], "x").is_err());
    }

    #[test]
    fn equal_area_small_cases() {
        let one = equal_area_points(1).unwrap();
        assert_eq!(one.points(), &[SpherePoint::NORTH]);
        assert_abs_diff_eq!(one.weights()[0], 4.0 * PI, epsilon = 1e-15);
        let two = equal_area_points(2).unwrap();
        assert_eq!(two.points(), &[SpherePoint::NORTH, SpherePoint::SOUTH]);
        assert_abs_diff_eq!(two.weights()[0], 2.0 * PI, epsilon = 1e-15);
        assert!(equal_area_points(0).is_err());
    }

    #[test]
    fn equal_area_regions_have_equal_area() {
        for m in [3, 7, 10, 33, 100, 441, 1000, 1681] {
            let part = EqualAreaPartition::new(m).unwrap();
            assert_eq!(part.zone_counts.iter().sum::<usize>(), m);
            let target = 4.0 * PI / m as f64;
            let mut total = 0.0;
            for (a, n) in part.region_areas().iter().zip(&part.zone_counts) {
                assert_abs_diff_eq!(*a, target, epsilon = 1e-12);
                total += a * *n as f64;
            }
            assert_abs_diff_eq!(total, 4.0 * PI, epsilon = 1e-10);
            let rule = equal_area_points(m).unwrap();
            assert_eq!(rule.len(), m);
            assert_abs_diff_eq!(rule.total_weight(), 4.0 * PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn random_rules() {
        let a = random_rule(50, 9).unwrap();
        let b = random_rule(50, 9).unwrap();
        assert_eq!(a, b);
        assert_abs_diff_eq!(a.total_weight(), 4.0 * PI, epsilon = 1e-13);
    }

    #[test]
    fn point_source_descriptors() {
        let cases = [
            ("file:a/b.txt", PointSource::File("a/b.txt".into())),
            ("a/b.txt", PointSource::File("a/b.txt".into())),
            ("equal_area:400", PointSource::EqualArea(PointCount::Fixed(400))),
            ("equal_area:auto", PointSource::EqualArea(PointCount::Auto)),
            ("random:4000:1", PointSource::Random(PointCount::Fixed(4000), 1)),
            ("designs:data/pointsets", PointSource::Designs("data/pointsets".into())),
        ];
        for (text, expected) in cases {
            let parsed: PointSource = text.parse().unwrap();
            assert_eq!(parsed, expected);
            if text.contains(':') {
                assert_eq!(parsed.to_string(), text);
            }
        }
        assert!("random:10".parse::<PointSource>().is_err());
        assert!("equal_area:0".parse::<PointSource>().is_err());
        assert_eq!(PointSource::EqualArea(PointCount::Auto).resolve(4, WeightMode::Equal).unwrap().len(), 25);
    }
}
