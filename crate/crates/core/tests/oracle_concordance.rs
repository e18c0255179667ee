use grauert::adapted::jacobi_spectrum;
use grauert::catalog::{lookup, restricted_datum, Catalog};
use grauert::exact::{to_f64, Rational};
use grauert::hermitian::{embedding_data, embedding_pairs};
use grauert::matrix_oracle::{self, inclusion_for, random_k, realizable_labels, realize, MatrixAlgebra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_direction(rs: &grauert::rootkit::RootSystem, rng: &mut impl Rng) -> Vec<f64> {
    let mut h = vec![0.0; rs.ambient_dim];
    for b in rs.span_basis() {
        let c: f64 = rng.gen_range(-1.0..1.0);
        for (x, y) in h.iter_mut().zip(&b) {
            *x += c * to_f64(y);
        }
    }
    h
}

#[test]
fn numeric_roots_match_catalog() {
    let labels = realizable_labels();
    assert!(labels.len() > 60, "{}", labels.len());
    for d in labels {
        let alg = realize(&d).unwrap();
        assert!(alg.bracket_residual() < 1e-10, "{d}");
        assert!(alg.cartan_residual() < 1e-10, "{d}");
        let num = matrix_oracle::numeric_restricted_datum(&alg, 7).unwrap();
        assert_eq!(num.zero_weight_dim + num.roots.iter().map(|r| r.1).sum::<usize>(), alg.dim(), "{d}");
        let got = num.rationalize().unwrap();
        let datum = restricted_datum(&d);
        let mut want: Vec<(Vec<Rational>, u32)> =
            datum.root_system.roots.iter().map(|r| (r.vector.coords().to_vec(), r.mult)).collect();
        want.sort();
        assert_eq!(got, want, "{d}");
    }
}

#[test]
fn jacobi_spectra_match_on_random_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for d in realizable_labels() {
        let alg = realize(&d).unwrap();
        let datum = restricted_datum(&d);
        for _ in 0..50 {
            let h = random_direction(&datum.root_system, &mut rng);
            let ours = jacobi_spectrum(&datum, &h).expanded();
            let theirs = alg.jacobi_eigenvalues(&h);
            assert_eq!(ours.len(), theirs.len());
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-9, "{d}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn chart_is_idempotent_and_k_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for l in ["AI:n=3", "BDI:p=3,q=2", "AIII:p=2,q=1", "CI:n=2", "CII:p=2,q=1", "DIII:n=4", "AII:n=3"] {
        let d = lookup(l).unwrap();
        let alg = realize(&d).unwrap();
        let datum = restricted_datum(&d);
        for _ in 0..10 {
            let h = random_direction(&datum.root_system, &mut rng);
            let x = alg.a_element(&h);
            let rep = alg.invariant_chart(&x).unwrap();
            let again = alg.invariant_chart(&alg.a_element(&rep)).unwrap();
            let moved = alg.invariant_chart(&MatrixAlgebra::conjugate(&random_k(&alg, &mut rng), &x)).unwrap();
            for ((a, b), c) in rep.iter().zip(&again).zip(&moved) {
                assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10, "{l}: {rep:?} {again:?} {moved:?}");
            }
            // Same Weyl orbit: equal sup-norms.
            let s1 = grauert::domain::sup_norm_f64(&datum, &h);
            let s2 = grauert::domain::sup_norm_f64(&datum, &rep);
            assert!((s1 - s2).abs() < 1e-10);
        }
    }
}

#[test]
fn embeddings_preserve_root_maxima() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cat = Catalog::builtin();
    for (pair, m, n) in embedding_pairs(cat, 6, 4) {
        let emb = embedding_data(&pair, &m, &n).unwrap();
        let (ma, na) = (realize(&m).unwrap(), realize(&n).unwrap());
        let inc = inclusion_for(&m, &n).unwrap();
        let dn = restricted_datum(&n);
        let dm = restricted_datum(&m);
        for _ in 0..100 {
            let h = random_direction(&dm.root_system, &mut rng);
            let from_roots = grauert::domain::sup_norm_f64(&dn, &emb.apply_f64(&h));
            let from_matrices = na.spectral_sup(&inc.apply(&ma.a_element(&h)));
            assert!((from_roots - from_matrices).abs() < 1e-9, "{m} -> {n}: {from_roots} vs {from_matrices}");
        }
    }
}
