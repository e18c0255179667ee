use std::f64::consts::PI;

use grauert::adapted::{adapted_block, jacobi_spectrum};
use grauert::catalog::{lookup, restricted_datum};
use grauert::exact::to_f64;
use grauert::matrix_oracle::realize;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn spectrum_matches_oracle_for_rank_at_most_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for l in ["AI:n=3", "AI:n=4", "AII:n=3", "AIII:p=3,q=2", "BDI:p=4,q=3", "CI:n=3", "CII:p=2,q=1", "DIII:n=4", "cB:n=5"] {
        let s = lookup(l).unwrap();
        let d = restricted_datum(&s);
        let alg = realize(&s).unwrap();
        for _ in 0..20 {
            let mut h = vec![0.0; d.root_system.ambient_dim];
            for b in d.root_system.span_basis() {
                let c: f64 = rng.gen_range(-1.0..1.0);
                for (x, y) in h.iter_mut().zip(&b) {
                    *x += c * to_f64(y);
                }
            }
            let ours = jacobi_spectrum(&d, &h);
            assert_eq!(ours.total_multiplicity(), s.dim);
            let theirs = alg.jacobi_eigenvalues(&h);
            for (a, b) in ours.expanded().iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-9, "{l}: {a} vs {b}");
            }
            assert!(ours.eigenvalues.iter().all(|(v, _)| *v <= 0.0));
        }
    }
}

#[test]
fn continuity_at_zero_eigenvalue() {
    for &(t, s) in &[(0.0, 1.0), (0.5, 0.3), (-1.0, 2.0), (2.0, 0.7)] {
        let z = Complex64::new(t, s);
        let a = adapted_block(1e-4, z).unwrap().matrix;
        let b = adapted_block(0.0, z).unwrap().matrix;
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).abs() < 1e-6, "{z}: {a:?} vs {b:?}");
            }
        }
    }
}

proptest! {
    #[test]
    fn blocks_square_to_minus_identity(lambda in -3.0f64..3.0, t in -2.0f64..2.0, s in 0.001f64..4.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let k = (2.0 * lambda * s / PI).round();
        prop_assume!((s - k * PI / (2.0 * lambda)).abs() >= 1e-3);
        let j = adapted_block(lambda, Complex64::new(t, s)).unwrap();
        let sq = j.squared();
        let scale = j.matrix.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs())).powi(2);
        prop_assert!((sq[0][0] + 1.0).abs() <= 1e-10 * scale);
        prop_assert!((sq[1][1] + 1.0).abs() <= 1e-10 * scale);
        prop_assert!(sq[0][1].abs() <= 1e-10 * scale && sq[1][0].abs() <= 1e-10 * scale);
        prop_assert!(j.trace().abs() <= 1e-12 * scale.sqrt());
        prop_assert!((j.det() - 1.0).abs() <= 1e-10 * scale);
    }
}
