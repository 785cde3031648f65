//! Points on the unit sphere, distances, uniform sampling and mesh norms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default seed of the stage-2 evaluation grid.
pub const DEFAULT_GRID_SEED: u64 = 2024;

/// A unit vector in R^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpherePoint([f64; 3]);

impl SpherePoint {
    pub const NORTH: SpherePoint = SpherePoint([0.0, 0.0, 1.0]);
    pub const SOUTH: SpherePoint = SpherePoint([0.0, 0.0, -1.0]);

    /// Normalizes `(x, y, z)` onto the sphere. Vectors whose squared norm is
    /// already within a few ulps of one are kept bit-for-bit, so normalizing
    /// twice never changes a point.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let sq = x * x + y * y + z * z;
        if !sq.is_finite() || sq == 0.0 {
            return Err(Error::Domain(format!(
                "cannot project ({x}, {y}, {z}) onto the unit sphere"
            )));
        }
        if (sq - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(SpherePoint([x, y, z]));
        }
        let r = sq.sqrt();
        Ok(SpherePoint([x / r, y / r, z / r]))
    }

    /// Builds a point from polar angle `theta` (from +z) and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        SpherePoint([st * cp, st * sp, ct])
    }

    #[inline]
    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.0[1]
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.0[2]
    }

    #[inline]
    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Dot product clamped to [-1, 1].
    #[inline]
    pub fn cos_angle(&self, other: &SpherePoint) -> f64 {
        self.dot(other).clamp(-1.0, 1.0)
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// Applies a 3x3 orthogonal matrix given in row-major order.
    pub fn rotate(&self, rot: &[[f64; 3]; 3]) -> SpherePoint {
        let c = self.0;
        let r = |row: &[f64; 3]| row[0] * c[0] + row[1] * c[1] + row[2] * c[2];
        SpherePoint([r(&rot[0]), r(&rot[1]), r(&rot[2])])
    }

    /// Two unit vectors completing `self` to a right-handed orthonormal frame.
    pub fn tangent_frame(&self) -> ([f64; 3], [f64; 3]) {
        let [x, y, z] = self.0;
        let a = if z.abs() < 0.9 {
            [0.0, 0.0, 1.0]
        } else {
            [1.0, 0.0, 0.0]
        };
        let mut u = cross([x, y, z], a);
        let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        u.iter_mut().for_each(|c| *c /= nu);
        let v = cross([x, y, z], u);
        (u, v)
    }
}

impl TryFrom<[f64; 3]> for SpherePoint {
    type Error = Error;

    fn try_from(c: [f64; 3]) -> Result<Self> {
        SpherePoint::new(c[0], c[1], c[2])
    }
}

impl From<SpherePoint> for [f64; 3] {
    fn from(p: SpherePoint) -> Self {
        p.0
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Chordal distance `sqrt(2 (1 - x.y))`.
#[inline]
pub fn euclidean_distance(x: &SpherePoint, y: &SpherePoint) -> f64 {
    (2.0 * (1.0 - x.cos_angle(y))).max(0.0).sqrt()
}

/// Great-circle distance in radians, in [0, pi].
#[inline]
pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> f64 {
    x.cos_angle(y).acos()
}

/// A seeded set of evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    points: Vec<SpherePoint>,
    seed: u64,
}

impl EvaluationGrid {
    pub fn new(points: Vec<SpherePoint>, seed: u64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("evaluation grid must not be empty".into()));
        }
        Ok(EvaluationGrid { points, seed })
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `m` independent uniform draws on the sphere from normalized standard
/// normal triples. Identical seeds give bit-identical grids.
pub fn uniform_random_points(m: usize, seed: u64) -> Result<EvaluationGrid> {
    if m == 0 {
        return Err(Error::Validation("need at least one sample point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(m);
    while points.len() < m {
        let x: f64 = StandardNormal.sample(&mut rng);
        let y: f64 = StandardNormal.sample(&mut rng);
        let z: f64 = StandardNormal.sample(&mut rng);
        // a zero draw has probability zero but would not normalize
        if let Ok(p) = SpherePoint::new(x, y, z) {
            points.push(p);
        }
    }
    EvaluationGrid::new(points, seed)
}

/// Probe-based estimate of the mesh norm `sup_x min_j dist(x, x_j)`.
///
/// The result is a lower bound of the true covering radius that tightens as
/// the probe grid is refined.
pub fn mesh_norm(points: &[SpherePoint], probe: &EvaluationGrid) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Validation("mesh norm of an empty point set".into()));
    }
    // maximizing min distance == minimizing max cosine
    let worst_cos = probe
        .points()
        .par_iter()
        .map(|p| {
            points
                .iter()
                .map(|x| p.dot(x))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(worst_cos.clamp(-1.0, 1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn p(x: f64, y: f64, z: f64) -> SpherePoint {
        SpherePoint::new(x, y, z).unwrap()
    }

    #[test]
    fn distances_on_canonical_pairs() {
        let n = SpherePoint::NORTH;
        assert_eq!(euclidean_distance(&n, &n), 0.0);
        assert_abs_diff_eq!(euclidean_distance(&n, &SpherePoint::SOUTH), 2.0, epsilon = 1e-15);
        let (ex, ey) = (p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0));
        assert_abs_diff_eq!(euclidean_distance(&ex, &ey), SQRT_2, epsilon = 1e-15);

        assert_eq!(geodesic_distance(&n, &n), 0.0);
        assert_abs_diff_eq!(geodesic_distance(&n, &SpherePoint::SOUTH), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(geodesic_distance(&ex, &ey), FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn construction_normalizes_and_rejects() {
        let q = p(3.0, 0.0, 4.0);
        assert_abs_diff_eq!(q.x(), 0.6, epsilon = 1e-16);
        assert!(SpherePoint::new(0.0, 0.0, 0.0).is_err());
        assert!(SpherePoint::new(f64::NAN, 0.0, 1.0).is_err());
        let again = SpherePoint::new(q.x(), q.y(), q.z()).unwrap();
        assert_eq!(q, again);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = uniform_random_points(1, 7).unwrap();
        let b = uniform_random_points(1, 7).unwrap();
        assert_eq!(a.points()[0].coords(), b.points()[0].coords());
        assert!(uniform_random_points(0, 7).is_err());
    }

    #[test]
    fn sampling_moments() {
        let g = uniform_random_points(100_000, 1).unwrap();
        let m = g.len() as f64;
        let mut mean = [0.0; 3];
        let mut zz = 0.0;
        for q in g.points() {
            for (acc, c) in mean.iter_mut().zip(q.coords()) {
                *acc += c / m;
            }
            zz += q.z() * q.z() / m;
        }
        let norm = (mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]).sqrt();
        assert!(norm <= 0.02, "mean norm {norm}");
        assert!((0.32..=0.35).contains(&zz), "E[z^2] = {zz}");
    }

    #[test]
    fn mesh_norm_cases() {
        let probe = EvaluationGrid::new(vec![SpherePoint::SOUTH, p(1.0, 0.0, 0.0)], 0).unwrap();
        assert_abs_diff_eq!(mesh_norm(&[SpherePoint::NORTH], &probe).unwrap(), PI, epsilon = 1e-15);
        assert_eq!(mesh_norm(probe.points(), &probe).unwrap(), 0.0);
        assert!(mesh_norm(&[], &probe).is_err());
    }

    #[test]
    fn octahedron_hole_is_a_face_center() {
        let verts = [
            p(1.0, 0.0, 0.0),
            p(-1.0, 0.0, 0.0),
            p(0.0, 1.0, 0.0),
            p(0.0, -1.0, 0.0),
            p(0.0, 0.0, 1.0),
            p(0.0, 0.0, -1.0),
        ];
        // brute force over a dense latitude-longitude grid
        let mut probe = Vec::new();
        for i in 0..=400 {
            for j in 0..800 {
                let theta = PI * i as f64 / 400.0;
                let phi = 2.0 * PI * j as f64 / 800.0;
                probe.push(SpherePoint::from_angles(theta, phi));
            }
        }
        let probe = EvaluationGrid::new(probe, 0).unwrap();
        let h = mesh_norm(&verts, &probe).unwrap();
        let expected = (1.0 / 3f64.sqrt()).acos();
        assert!(h <= expected + 1e-12);
        assert!((h - expected).abs() < 5e-3, "h = {h}");
    }

    #[test]
    fn mesh_norm_monotone_under_insertion() {
        let probe = uniform_random_points(20_000, 3).unwrap();
        let pts = uniform_random_points(200, 4).unwrap();
        let mut prev = f64::INFINITY;
        for k in [10, 50, 100, 200] {
            let h = mesh_norm(&pts.points()[..k], &probe).unwrap();
            assert!(h <= prev);
            prev = h;
        }
    }
}
