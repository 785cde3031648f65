mod common;

use std::f64::consts::PI;

use sphint::moments::{oracle_moment, ModifiedMoments};
use sphint::quad1d::Abscissa;
use sphint::sphere::uniform_random_points;
use sphint::{HarmonicBasis, SingularKernel};

const FAMILIES: [SingularKernel; 5] = [
    SingularKernel::One,
    SingularKernel::Algebraic { nu: -0.5 },
    SingularKernel::Algebraic { nu: -0.9 },
    SingularKernel::Log,
    SingularKernel::Mixed { nu1: -0.5, nu2: -0.5 },
];

#[test]
fn surface_integrals_are_moment_multiples() {
    let xs = uniform_random_points(2, 99).unwrap();
    let basis = HarmonicBasis::new(6);
    for kernel in FAMILIES {
        let mu = ModifiedMoments::compute(kernel, 6).unwrap();
        for x in xs.points() {
            let brute = common::surface_integrals(kernel, x, 6, 24);
            let y = basis.eval(x);
            for idx in basis.indices() {
                let i = idx.flat();
                let expected = mu.values()[idx.degree()] * y[i];
                assert!((brute[i] - expected).abs() < 1e-8, "{kernel} {idx:?}: {} vs {expected}", brute[i]);
            }
        }
    }
}

#[test]
fn oracle_agrees_with_every_method() {
    for kernel in FAMILIES {
        let mu = ModifiedMoments::compute(kernel, 12).unwrap();
        for (l, v) in mu.values().iter().enumerate() {
            let est = oracle_moment(|a: Abscissa| kernel.profile(a), l, 1e-13);
            assert!(est.warning.is_none(), "{kernel} l = {l}: {:?}", est.warning);
            assert!((est.value - v).abs() <= 1e-10 * v.abs().max(1e-3), "{kernel} l = {l}: {} vs {v}", est.value);
        }
    }
}

#[test]
fn mixed_kernel_symmetry() {
    // swapping the exponents reflects t -> -t, flipping the odd moments
    let a = ModifiedMoments::compute(SingularKernel::Mixed { nu1: -0.3, nu2: -0.7 }, 9).unwrap();
    let b = ModifiedMoments::compute(SingularKernel::Mixed { nu1: -0.7, nu2: -0.3 }, 9).unwrap();
    for (l, (x, y)) in a.values().iter().zip(b.values()).enumerate() {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        assert!((x - sign * y).abs() < 1e-12 * x.abs().max(1.0));
    }
    let even = ModifiedMoments::compute(SingularKernel::Mixed { nu1: -1.0, nu2: -1.0 }, 5).unwrap();
    assert!((even.values()[0] - PI * PI).abs() < 1e-10);
}
