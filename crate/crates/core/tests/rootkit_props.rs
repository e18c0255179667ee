use std::collections::BTreeMap;

use grauert::exact::{qf, Rational};
use grauert::rootkit::{build_root_system, reflect, weyl_orbit, Family, RootSystem};
use proptest::prelude::*;

fn systems() -> Vec<RootSystem> {
    let mut out = Vec::new();
    for f in Family::ALL {
        for r in 1..=8 {
            if let Ok(rs) = build_root_system(f, r) {
                out.push(rs);
            }
        }
    }
    out
}

fn multiset(rs: &RootSystem, img: impl Fn(&[Rational]) -> Vec<Rational>) -> BTreeMap<Vec<Rational>, u32> {
    let mut m = BTreeMap::new();
    for r in &rs.roots {
        *m.entry(img(r.vector.coords())).or_insert(0) += r.mult;
    }
    m
}

#[test]
fn reflections_preserve_the_root_multiset() {
    let all = systems();
    assert!(all.len() > 40);
    for rs in all {
        let base = multiset(&rs, |v| v.to_vec());
        for beta in &rs.roots {
            let b = beta.vector.coords();
            assert_eq!(multiset(&rs, |v| reflect(v, b)), base, "{}{}", rs.family, rs.rank);
        }
    }
}

#[test]
fn orbit_sizes_divide_weyl_order() {
    for rs in systems().into_iter().filter(|rs| rs.rank <= 3) {
        let order = rs.weyl_group(100_000).expect("small group").len();
        for r in &rs.roots {
            let n = weyl_orbit(&rs, r.vector.coords()).len();
            assert_eq!(order % n, 0, "{}{}: orbit {n}, |W| {order}", rs.family, rs.rank);
        }
    }
}

#[test]
fn construction_is_deterministic() {
    for (a, b) in systems().into_iter().zip(systems()) {
        assert_eq!(a, b);
    }
}

proptest! {
    #[test]
    fn generic_orbits_divide_weyl_order(pick in 0usize..6, coords in prop::collection::vec(-9i64..=9, 4)) {
        let (f, r) = [(Family::A, 2), (Family::B, 2), (Family::C, 3), (Family::BC, 2), (Family::G2, 2), (Family::D, 3)][pick];
        let rs = build_root_system(f, r).unwrap();
        let amb = rs.ambient_dim;
        let mut v: Vec<Rational> = coords[..amb].iter().map(|&c| qf(c, 3)).collect();
        if matches!(f, Family::A | Family::G2) {
            let mean = v.iter().sum::<Rational>() / Rational::from_integer(amb as i64);
            for x in &mut v { *x -= mean; }
        }
        let order = rs.weyl_group(100_000).unwrap().len();
        prop_assert_eq!(order % weyl_orbit(&rs, &v).len(), 0);
    }
}
