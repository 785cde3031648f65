#![allow(dead_code)]

use std::path::PathBuf;

use sphint::pointsets::{load_pointset, WeightMode};
use sphint::quad1d::{graded_integral_vec, Abscissa, GradedOptions};
use sphint::{HarmonicBasis, QuadratureRule, SingularKernel, SpherePoint};

pub fn pointset_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/pointsets")
}

pub fn pointset(name: &str) -> QuadratureRule {
    load_pointset(pointset_dir().join(name), WeightMode::Equal).expect("point-set fixture")
}

/// Strengths of the shipped t-design files.
pub fn design_strengths() -> Vec<usize> {
    let mut out: Vec<usize> = std::fs::read_dir(pointset_dir())
        .expect("fixture directory")
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            let t = name.strip_prefix("sd_t")?.split('_').next()?;
            t.parse().ok()
        })
        .collect();
    out.sort_unstable();
    out
}

/// `∫ h(|x-y|) Y_i(y) dω(y)` for every harmonic of degree `<= max_degree`,
/// by direct surface integration in a frame with `x` as pole: an
/// `azimuth`-point trapezoid rule in longitude (exact for the trigonometric
/// polynomials that harmonics restrict to) and graded Gauss–Legendre in
/// `t = x·y`.
pub fn surface_integrals(kernel: SingularKernel, x: &SpherePoint, max_degree: usize, azimuth: usize) -> Vec<f64> {
    let basis = HarmonicBasis::new(max_degree);
    let (e1, e2) = x.tangent_frame();
    let xc = x.coords();
    let opts = GradedOptions::default();
    let est = graded_integral_vec(basis.len(), &opts, |a: Abscissa, out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        let s = (a.to_upper * a.to_lower).sqrt();
        let h = kernel.profile(a);
        let dphi = 2.0 * std::f64::consts::PI / azimuth as f64;
        let mut local = vec![0.0; basis.len()];
        for k in 0..azimuth {
            let phi = (k as f64 + 0.5) * dphi;
            let (sp, cp) = phi.sin_cos();
            let y: [f64; 3] = std::array::from_fn(|i| a.t * xc[i] + s * (cp * e1[i] + sp * e2[i]));
            let y = SpherePoint::new(y[0], y[1], y[2]).expect("unit vector");
            basis.eval_into(&y, &mut local);
            for (o, v) in out.iter_mut().zip(&local) {
                *o += h * v * dphi;
            }
        }
    });
    est.into_iter().map(|e| e.value).collect()
}

pub fn rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = axis.map(|v| v / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}
