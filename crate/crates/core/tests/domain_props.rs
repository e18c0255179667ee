use grauert::adapted::singular_parameters;
use grauert::catalog::{lookup, restricted_datum, Catalog, RestrictedRootDatum};
use grauert::domain::{
    boundary_parameter, omega_from_gamma, omega_polytope, strongly_orthogonal_roots, sup_norm, OmegaPolytope,
};
use grauert::exact::{q, qf, Rational};
use grauert::hermitian::hermitian_entries;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SPACES: [&str; 10] = [
    "AI:n=3", "AI:n=5", "BDI:p=3,q=2", "AIII:p=3,q=1", "CI:n=3", "CII:p=1,q=3", "DIII:n=5", "FII", "G", "EIII",
];

fn datum(l: &str) -> RestrictedRootDatum {
    restricted_datum(&lookup(l).unwrap())
}

fn vertices(om: &OmegaPolytope) -> &Vec<Vec<Rational>> {
    om.vertices.as_ref().expect("rank <= 4")
}

#[test]
fn vertex_sets_are_weyl_stable_and_symmetric() {
    for l in SPACES {
        let d = datum(l);
        let om = omega_polytope(&d);
        let vs = vertices(&om);
        for v in vs {
            assert!(om.contains(v), "{l}: vertex outside");
            assert!(d.root_system.roots.iter().all(|r| r.vector.eval(v).abs() <= qf(1, 2)));
            let neg: Vec<Rational> = v.iter().map(|x| -x).collect();
            assert!(vs.contains(&neg), "{l}: -v missing");
            for w in d.root_system.weyl_generators() {
                assert!(vs.contains(&w.apply(v)), "{l}: w(v) missing");
            }
        }
    }
}

#[test]
fn hermitian_polytopes_are_gamma_cubes() {
    let entries = hermitian_entries(Catalog::builtin());
    assert!(entries.len() >= 25, "{}", entries.len());
    for s in entries {
        let d = restricted_datum(&s);
        let set = strongly_orthogonal_roots(&d).unwrap();
        assert_eq!(set.gammas.len(), d.rank());
        assert_eq!(omega_from_gamma(&set).vertices, omega_polytope(&d).vertices, "{s}");
    }
}

#[test]
fn sup_norm_on_gamma_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for s in hermitian_entries(Catalog::builtin()) {
        let d = restricted_datum(&s);
        let set = strongly_orthogonal_roots(&d).unwrap();
        for _ in 0..1000 {
            let t: Vec<Rational> = (0..d.rank()).map(|_| qf(rng.gen_range(-500..=500), rng.gen_range(1..=60))).collect();
            let max = t.iter().map(|x| x.abs()).max().unwrap();
            assert_eq!(sup_norm(&d, &set.point(&t)), q(2) * max, "{s} {t:?}");
        }
    }
}

fn rational_vec(amb: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-40i64..=40, 1i64..=12), amb).prop_map(|v| v.into_iter().map(|(n, d)| qf(n, d)).collect())
}

proptest! {
    #[test]
    fn boundary_times_sup_is_half_pi(pick in 0usize..SPACES.len(), seed in rational_vec(8)) {
        let d = datum(SPACES[pick]);
        let h: Vec<Rational> = seed[..d.root_system.ambient_dim].to_vec();
        let sup = sup_norm(&d, &h);
        prop_assume!(sup != q(0));
        let b = boundary_parameter(&d, &h).unwrap();
        prop_assert_eq!(b.0 * sup, qf(1, 2));
    }

    #[test]
    fn boundary_is_first_pole(pick in 0usize..SPACES.len(), seed in rational_vec(8)) {
        let d = datum(SPACES[pick]);
        let h: Vec<Rational> = seed[..d.root_system.ambient_dim].to_vec();
        prop_assume!(sup_norm(&d, &h) != q(0));
        let b = boundary_parameter(&d, &h).unwrap();
        let poles = singular_parameters(&d, &h, b.to_f64() * 1.5).unwrap();
        prop_assert_eq!(poles[0].s, b);
    }
}
