//! Product-integration Nyström solvers for weakly singular integral
//! equations of the second kind on the unit sphere, with the supporting
//! point-set, harmonic and quadrature machinery.

pub mod cli;
pub mod error;
pub mod harmonics;
pub mod hyperinterp;
pub mod linalg;
pub mod moments;
pub mod mz;
pub mod pointsets;
pub mod quad1d;
pub mod solver;
pub mod sphere;

pub use error::{Error, Result};
pub use harmonics::{legendre_p, HarmonicBasis, HarmonicIndex};
pub use hyperinterp::{hyper_coefficients, hyper_evaluate, HyperCoefficients, Hyperinterpolator};
pub use moments::{ModifiedMoments, MomentMethod, SingularKernel};
pub use mz::{mz_constant, MzOptions, MzReport};
pub use pointsets::{equal_area_points, load_pointset, PointSource, QuadratureRule, WeightMode};
pub use solver::{
    solve_stage1, uniform_error, ContinuousKernel, DiscreteSolution, ProblemSpec, RightHandSide,
};
pub use sphere::{euclidean_distance, geodesic_distance, EvaluationGrid, SpherePoint};
