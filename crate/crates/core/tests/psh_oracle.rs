use std::f64::consts::FRAC_PI_2;

use grauert::catalog::{lookup, restricted_datum, RestrictedRootDatum};
use grauert::exact::{qf, to_f64, Rational};
use grauert::linalg::pd_certificate;
use grauert::matrix_oracle::realize;
use grauert::psh::{
    corollary_u, exhaustion_trace, hessian_u, levi_matrix, levi_matrix_chart, levi_matrix_closed_form,
    metric_basis, project_to_wall, psh_check, sample_interior, InvariantFunction, ROUTE_TOL,
};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Big = Ratio<BigInt>;

const CONVEXITY_SPACES: [&str; 5] = ["AI:n=2", "AI:n=3", "CI:n=2", "AIII:p=2,q=1", "BDI:p=3,q=2"];

fn datum(l: &str) -> RestrictedRootDatum {
    restricted_datum(&lookup(l).unwrap())
}

fn big(x: &Rational) -> Big {
    Big::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

fn big_to_f64(x: &Big) -> f64 {
    // Exact enough: both parts fit comfortably after reduction for these tests.
    let (n, d) = (x.numer().to_string().parse::<f64>().unwrap(), x.denom().to_string().parse::<f64>().unwrap());
    n / d
}

/// `sum m / (1 - alpha(y)^2)` in exact arithmetic, `y` in units of `pi/2`.
fn scaled_u(d: &RestrictedRootDatum, y: &[Big]) -> Big {
    let one = Big::from_integer(BigInt::from(1));
    let mut s = Big::from_integer(BigInt::from(0));
    for r in &d.root_system.roots {
        let a: Big = r.vector.coords().iter().zip(y).map(|(c, v)| big(c) * v).sum();
        s += Big::from_integer(BigInt::from(r.mult)) / (&one - &a * &a);
    }
    s
}

/// Exact central second differences of the scaled function, ambient coordinates.
fn exact_fd_hessian(d: &RestrictedRootDatum, y0: &[Big], h: &Big) -> DMatrix<f64> {
    let n = y0.len();
    let shifted = |i: usize, si: i32, j: usize, sj: i32| {
        let mut y = y0.to_vec();
        y[i] += h * Big::from_integer(BigInt::from(si));
        y[j] += h * Big::from_integer(BigInt::from(sj));
        scaled_u(d, &y)
    };
    DMatrix::from_fn(n, n, |i, j| {
        let v = (shifted(i, 1, j, 1) - shifted(i, 1, j, -1) - shifted(i, -1, j, 1) + shifted(i, -1, j, -1))
            / (Big::from_integer(BigInt::from(4)) * h * h);
        big_to_f64(&v)
    })
}

#[test]
fn hessian_matches_exact_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // Step 1/157080 in units of pi/2 is a step of 1.0000e-5 in xi.
    let h = Big::new(BigInt::from(1), BigInt::from(157_080));
    for label in ["AI:n=3", "BDI:p=3,q=2", "CI:n=2"] {
        let d = datum(label);
        for _ in 0..5 {
            let xi = sample_interior(&d, &mut rng, 0.9).unwrap();
            let y0: Vec<Rational> = xi.iter().map(|x| qf((x / FRAC_PI_2 * 1000.0).round() as i64, 1000)).collect();
            let xi: Vec<f64> = y0.iter().map(|y| to_f64(y) * FRAC_PI_2).collect();
            let yb: Vec<Big> = y0.iter().map(big).collect();
            let amb = exact_fd_hessian(&d, &yb, &h) / FRAC_PI_2.powi(4);
            let b = metric_basis(&d);
            let fd = b.transpose() * amb * &b;
            let closed = hessian_u(&d, &xi).unwrap();
            let rel = (&fd - &closed).amax() / closed.amax();
            assert!(rel < 1e-6, "{label} at {xi:?}: {rel:e}");
        }
    }
}

#[test]
fn a2_direct_and_folded_sums_agree() {
    let d = datum("AI:n=3");
    let xi = [0.1, 0.0, -0.1];
    let direct = corollary_u(&d, &xi).unwrap();
    let folded: f64 = d
        .root_system
        .positive_roots()
        .iter()
        .map(|r| {
            let a = r.vector.eval_f64(&xi);
            2.0 * f64::from(r.mult) / (FRAC_PI_2 * FRAC_PI_2 - a * a)
        })
        .sum();
    assert!((direct - folded).abs() < 1e-14);
}

#[test]
fn sl3_levi_examples() {
    let d = datum("AI:n=3");
    for xi in [[0.3, 0.0, -0.3], [0.3, -0.15, -0.15]] {
        let l = levi_matrix(&d, &InvariantFunction::CorollaryU, &xi).unwrap();
        assert_eq!(l.dim(), 5);
        assert!(l.cross_block().iter().all(|x| *x == 0.0));
        let ev = nalgebra::SymmetricEigen::new(l.matrix.clone()).eigenvalues;
        assert!(ev.iter().all(|v| *v > 0.0), "{ev}");
        let closed = levi_matrix_closed_form(&d, &xi).unwrap();
        assert!((&l.matrix - &closed.matrix).amax() / closed.matrix.amax() < ROUTE_TOL);
    }
}

#[test]
fn custom_function_goes_through_the_chart() {
    let d = datum("AIII:p=2,q=1");
    let alg = realize(&d.space).unwrap();
    // Strictly convex and W-invariant: even in each coordinate of BC1.
    let u = InvariantFunction::Custom(std::sync::Arc::new(|x: &[f64]| (x[0] * x[0]).exp()));
    let l = levi_matrix_chart(&alg, &d, &u, &[0.2]).unwrap();
    assert!(l.certificate().is_pd());
    assert!(l.cross_residual < 1e-4);
}

#[test]
fn strict_convexity_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for label in CONVEXITY_SPACES {
        let d = datum(label);
        for _ in 0..100 {
            let xi = sample_interior(&d, &mut rng, 0.99).unwrap();
            let c = pd_certificate(&hessian_u(&d, &xi).unwrap());
            assert!(c.is_pd(), "{label} {xi:?} {c:?}");
        }
    }
}

#[test]
fn levi_positivity_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for label in CONVEXITY_SPACES {
        let r = psh_check(&datum(label), 100, 10, &mut rng).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert!(r.max_route_discrepancy < ROUTE_TOL);
    }
}

#[test]
fn exhaustion_on_sampled_rays() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for label in ["AI:n=3", "BDI:p=3,q=2", "CII:p=1,q=2", "FII", "G"] {
        let d = datum(label);
        for _ in 0..10 {
            let h = sample_interior(&d, &mut rng, 1.0).unwrap();
            let t = exhaustion_trace(&d, &h).unwrap();
            assert!(t.monotone && t.diverged, "{label} {h:?}");
        }
    }
}

#[test]
fn wall_projection_is_non_regular() {
    let d = datum("BDI:p=3,q=2");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xi = sample_interior(&d, &mut rng, 0.9).unwrap();
    let k = rng.gen_range(0..4);
    let w = project_to_wall(&d, &xi, k);
    let alpha = &d.root_system.positive_roots()[k].vector;
    assert!(alpha.eval_f64(&w).abs() < 1e-12);
    assert!(corollary_u(&d, &w).is_ok());
}

proptest! {
    #[test]
    fn corollary_u_is_exactly_weyl_invariant(a in -300i64..300, b in -300i64..300, c in -300i64..300, pick in 0usize..4) {
        let label = ["AI:n=3", "BDI:p=3,q=2", "CI:n=3", "G"][pick];
        let d = datum(label);
        let amb = d.root_system.ambient_dim;
        let raw = [qf(a, 1000), qf(b, 1000), qf(c, 1000)];
        let mut y: Vec<Rational> = (0..amb).map(|i| raw[i % 3]).collect();
        if label == "AI:n=3" || label == "G" {
            let mean = (y[0] + y[1] + y[2]) / Rational::from_integer(3);
            for v in &mut y { *v -= mean; }
        }
        prop_assume!(d.root_system.roots.iter().all(|r| r.vector.eval(&y).abs() < Rational::from_integer(1)));
        let to_big = |v: &[Rational]| v.iter().map(big).collect::<Vec<_>>();
        let base = scaled_u(&d, &to_big(&y));
        for w in d.root_system.weyl_generators() {
            prop_assert_eq!(scaled_u(&d, &to_big(&w.apply(&y))), base.clone());
        }
    }
}
