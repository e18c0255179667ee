//! The polytope `omega = {H in a : |alpha(H)| < pi/2 for all roots}`, tube
//! radii and boundary parameters, and the strongly orthogonal description
//! of `omega` for Hermitian spaces.
//!
//! Points of `omega` are stored in units of `pi`: the coordinate vector `x`
//! stands for `H = pi * x`, and every constraint reads `|<alpha, x>| <= 1/2`.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde_json::json;

use crate::catalog::RestrictedRootDatum;
use crate::error::{Error, Result};
use crate::exact::{self, dot, lex_cmp, q, qf, PiMultiple, PiSqrt, Rational};
use crate::rootkit::RootVector;

/// Highest rank for which vertices are enumerated.
pub const MAX_VERTEX_RANK: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaPolytope {
    pub rank: usize,
    pub ambient_dim: usize,
    /// Irredundant constraints `|<a, H>| <= pi/2`, one lex-positive vector per facet pair.
    pub halfspaces: Vec<Vec<Rational>>,
    /// Vertices in units of `pi`, lexicographically sorted; `None` above [`MAX_VERTEX_RANK`].
    pub vertices: Option<Vec<Vec<Rational>>>,
    /// Basis of the subspace `a` of the ambient coordinates.
    pub span_basis: Vec<Vec<Rational>>,
}

impl OmegaPolytope {
    /// Builds `{x in span : |f(x)| <= 1/2 for every functional f}`.
    ///
    /// Functionals are given as ambient vectors; only their restriction to
    /// the span matters. Dominated constraints are removed exactly.
    pub fn from_functionals(span_basis: &[Vec<Rational>], functionals: &[Vec<Rational>]) -> OmegaPolytope {
        let rank = span_basis.len();
        let ambient_dim = span_basis.first().map_or(0, Vec::len);
        let restrict = |f: &[Rational]| -> Vec<Rational> { span_basis.iter().map(|b| dot(f, b)).collect() };

        // One representative per direction, scaled to the tightest bound.
        let mut lines: Vec<(Vec<Rational>, Vec<Rational>)> = Vec::new();
        for f in functionals {
            let w = restrict(f);
            if exact::is_zero(&w) {
                continue;
            }
            let (f, w) = if exact::lex_positive(&w) {
                (f.clone(), w)
            } else {
                (exact::neg(f), exact::neg(&w))
            };
            match lines.iter_mut().find(|(_, lw)| exact::proportion(lw, &w).is_some()) {
                Some(entry) => {
                    // The longer functional gives the tighter constraint.
                    let c = exact::proportion(&entry.1, &w).expect("proportional");
                    if c > Rational::from_integer(1) {
                        *entry = (f, w);
                    }
                }
                None => lines.push((f, w)),
            }
        }

        let signed: Vec<Vec<Rational>> = lines
            .iter()
            .flat_map(|(_, w)| [w.clone(), exact::neg(w)])
            .collect();
        let mut facets: Vec<(Vec<Rational>, Vec<Rational>)> = Vec::new();
        for (i, (f, w)) in lines.iter().enumerate() {
            let others: Vec<Vec<Rational>> = signed
                .iter()
                .enumerate()
                .filter(|(k, _)| k / 2 != i)
                .map(|(_, v)| v.clone())
                .collect();
            // w is implied iff w = sum l_k v_k with l >= 0 and sum l <= 1.
            let implied = exact::min_l1_combination(&others, w).is_some_and(|cost| cost <= q(1));
            if !implied {
                facets.push((f.clone(), w.clone()));
            }
        }
        facets.sort_by(|a, b| lex_cmp(&a.0, &b.0));

        let vertices = (rank <= MAX_VERTEX_RANK).then(|| enumerate_vertices(span_basis, &facets));
        OmegaPolytope {
            rank,
            ambient_dim,
            halfspaces: facets.into_iter().map(|(f, _)| f).collect(),
            vertices,
            span_basis: span_basis.to_vec(),
        }
    }

    /// Membership of `x` (units of `pi`) in the closed polytope.
    pub fn contains(&self, x: &[Rational]) -> bool {
        let half = qf(1, 2);
        self.halfspaces.iter().all(|a| dot(a, x).abs() <= half)
    }

    /// Halfspaces tight at `x`.
    pub fn saturated_at(&self, x: &[Rational]) -> Vec<Vec<Rational>> {
        let half = qf(1, 2);
        self.halfspaces
            .iter()
            .filter(|a| dot(a, x).abs() == half)
            .cloned()
            .collect()
    }

    pub fn same_vertices(&self, other: &OmegaPolytope) -> Option<bool> {
        Some(self.vertices.as_ref()? == other.vertices.as_ref()?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let rat = |c: &Rational| PiMultiple(*c).to_string();
        json!({
            "rank": self.rank,
            "halfspaces": self.halfspaces.iter().map(|a| json!({
                "alpha": a.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "bound": "pi/2",
            })).collect::<Vec<_>>(),
            "vertices": self.vertices.as_ref().map(|vs| vs.iter()
                .map(|v| v.iter().map(rat).collect::<Vec<_>>())
                .collect::<Vec<_>>()),
            "vertices_available": self.vertices.is_some(),
        })
    }
}

fn enumerate_vertices(
    span_basis: &[Vec<Rational>],
    facets: &[(Vec<Rational>, Vec<Rational>)],
) -> Vec<Vec<Rational>> {
    let r = span_basis.len();
    let half = qf(1, 2);
    let ws: Vec<&Vec<Rational>> = facets.iter().map(|(_, w)| w).collect();
    let mut found: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for subset in combinations(ws.len(), r) {
        let m: Vec<Vec<Rational>> = subset.iter().map(|&i| ws[i].clone()).collect();
        if exact::rank(&m) < r {
            continue;
        }
        for signs in 0..(1u32 << r) {
            let rhs: Vec<Rational> = (0..r)
                .map(|k| if signs >> k & 1 == 1 { -half } else { half })
                .collect();
            let Some(c) = exact::solve(&m, &rhs) else {
                continue;
            };
            if ws.iter().all(|w| dot(w, &c).abs() <= half) {
                let mut x = vec![Rational::zero(); span_basis[0].len()];
                for (ck, b) in c.iter().zip(span_basis) {
                    x = exact::add(&x, &exact::scale(b, *ck));
                }
                found.insert(x);
            }
        }
    }
    found.into_iter().collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn omega_polytope(datum: &RestrictedRootDatum) -> OmegaPolytope {
    let rs = &datum.root_system;
    let functionals: Vec<Vec<Rational>> = rs.roots.iter().map(|r| r.vector.coords().to_vec()).collect();
    OmegaPolytope::from_functionals(&rs.span_basis(), &functionals)
}

/// `max_alpha |alpha(H)|`, exact.
pub fn sup_norm(datum: &RestrictedRootDatum, h: &[Rational]) -> Rational {
    datum
        .root_system
        .roots
        .iter()
        .map(|r| r.vector.eval(h).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn sup_norm_f64(datum: &RestrictedRootDatum, h: &[f64]) -> f64 {
    datum
        .root_system
        .roots
        .iter()
        .map(|r| r.vector.eval_f64(h).abs())
        .fold(0.0, f64::max)
}

/// `s* = sup{s > 0 : sH in omega} = (pi/2) / sup_norm(H)`.
pub fn boundary_parameter(datum: &RestrictedRootDatum, h: &[Rational]) -> Result<PiMultiple> {
    let m = sup_norm(datum, h);
    if m.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(PiMultiple(qf(1, 2) / m))
}

pub fn boundary_parameter_f64(datum: &RestrictedRootDatum, h: &[f64]) -> Result<f64> {
    let m = sup_norm_f64(datum, h);
    if m == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(std::f64::consts::FRAC_PI_2 / m)
}

/// Largest radius `r` with the whole `r`-ball of `a` (in the metric fixed by
/// `metric_scale`) inside `omega`: `pi * sqrt(c / (4 max |alpha|^2))`.
pub fn max_tube_radius(datum: &RestrictedRootDatum) -> PiSqrt {
    let longest = datum
        .root_system
        .roots
        .iter()
        .map(|r| r.vector.norm2())
        .max()
        .expect("nonempty root system");
    PiSqrt(datum.metric_scale / (q(4) * longest))
}

/// Metric norm of `H` (ambient coordinates) under `metric_scale`.
pub fn metric_norm_f64(datum: &RestrictedRootDatum, h: &[f64]) -> f64 {
    (exact::to_f64(&datum.metric_scale) * h.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StronglyOrthogonalSet {
    pub gammas: Vec<RootVector>,
}

impl StronglyOrthogonalSet {
    /// `H(t) = sum_j 2 t_j gamma_j / |gamma_j|^2`, so that `gamma_j(H(t)) = 2 t_j`.
    pub fn point(&self, t: &[Rational]) -> Vec<Rational> {
        let n = self.gammas[0].coords().len();
        let mut h = vec![Rational::zero(); n];
        for (g, tj) in self.gammas.iter().zip(t) {
            h = exact::add(&h, &exact::scale(g.coords(), q(2) * tj / g.norm2()));
        }
        h
    }
}

pub fn strongly_orthogonal_roots(datum: &RestrictedRootDatum) -> Result<StronglyOrthogonalSet> {
    if !datum.space.hermitian {
        return Err(Error::NotHermitian(datum.space.canonical_label()));
    }
    let rs = &datum.root_system;
    let all: Vec<&[Rational]> = rs.roots.iter().map(|r| r.vector.coords()).collect();
    let is_root = |v: &[Rational]| all.contains(&v);
    let mut remaining: Vec<&[Rational]> = all.clone();
    let mut gammas = Vec::new();
    while let Some(&top) = remaining.iter().max_by(|a, b| lex_cmp(a, b)) {
        gammas.push(RootVector::new(top.to_vec())?);
        remaining.retain(|b| {
            dot(b, top).is_zero() && !is_root(&exact::add(b, top)) && !is_root(&exact::sub(b, top))
        });
    }
    if gammas.len() != rs.rank {
        return Err(Error::Oracle(format!(
            "cascade for {} produced {} roots, rank is {}",
            datum.space,
            gammas.len(),
            rs.rank
        )));
    }
    Ok(StronglyOrthogonalSet { gammas })
}

/// The cube `{H : |gamma(H)| <= pi/2, gamma in Gamma}`.
pub fn omega_from_gamma(set: &StronglyOrthogonalSet) -> OmegaPolytope {
    let basis: Vec<Vec<Rational>> = set.gammas.iter().map(|g| g.coords().to_vec()).collect();
    OmegaPolytope::from_functionals(&basis, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, restricted_datum};

    fn datum(l: &str) -> RestrictedRootDatum {
        restricted_datum(&lookup(l).unwrap())
    }

    fn v(c: &[(i64, i64)]) -> Vec<Rational> {
        c.iter().map(|&(n, d)| qf(n, d)).collect()
    }

    #[test]
    fn hyperbolic_plane_interval() {
        let om = omega_polytope(&datum("BDI:p=2,q=1"));
        assert_eq!(om.vertices.unwrap(), vec![v(&[(-1, 2)]), v(&[(1, 2)])]);
    }

    #[test]
    fn a2_hexagon() {
        let om = omega_polytope(&datum("AI:n=3"));
        let vs = om.vertices.clone().unwrap();
        assert_eq!(vs.len(), 6);
        assert!(vs.contains(&v(&[(1, 3), (-1, 6), (-1, 6)])));
        assert!(vs.contains(&v(&[(-1, 3), (1, 6), (1, 6)])));
        // (pi/4, 0, -pi/4) lies on the boundary, in the middle of an edge.
        let mid = v(&[(1, 4), (0, 1), (-1, 4)]);
        assert!(!vs.contains(&mid));
        assert!(om.contains(&mid));
        assert_eq!(om.saturated_at(&mid).len(), 1);
    }

    #[test]
    fn c2_square() {
        let om = omega_polytope(&datum("CI:n=2"));
        assert_eq!(om.halfspaces.len(), 2);
        assert_eq!(
            om.vertices.unwrap(),
            vec![
                v(&[(-1, 4), (-1, 4)]),
                v(&[(-1, 4), (1, 4)]),
                v(&[(1, 4), (-1, 4)]),
                v(&[(1, 4), (1, 4)])
            ]
        );
    }

    #[test]
    fn sup_norm_examples() {
        let a2 = datum("AI:n=3");
        assert_eq!(sup_norm(&a2, &v(&[(1, 4), (0, 1), (-1, 4)])), qf(1, 2));
        assert_eq!(sup_norm(&a2, &v(&[(0, 1), (0, 1), (0, 1)])), q(0));
        let c2 = datum("CI:n=2");
        let g = strongly_orthogonal_roots(&c2).unwrap();
        assert_eq!(sup_norm(&c2, &g.point(&v(&[(3, 10), (1, 10)]))), qf(3, 5));
    }

    #[test]
    fn boundary_parameters() {
        let a2 = datum("AI:n=3");
        let h = v(&[(1, 1), (0, 1), (-1, 1)]);
        assert_eq!(boundary_parameter(&a2, &h).unwrap(), PiMultiple(qf(1, 4)));
        let h2 = exact::scale(&h, q(2));
        assert_eq!(boundary_parameter(&a2, &h2).unwrap(), PiMultiple(qf(1, 8)));
        assert!(boundary_parameter(&a2, &v(&[(0, 1), (0, 1), (0, 1)])).is_err());
    }

    #[test]
    fn radii() {
        assert_eq!(max_tube_radius(&datum("BDI:p=2,q=1")).to_string(), "pi/2");
        assert_eq!(max_tube_radius(&datum("BDI:p=3,q=1")).to_string(), "pi/2");
        assert_eq!(max_tube_radius(&datum("AIII:p=2,q=1")).to_string(), "pi/2");
        // Killing metric on A2: c = 6, longest |alpha|^2 = 2.
        assert_eq!(max_tube_radius(&datum("AI:n=3")).0, qf(3, 4));
    }

    #[test]
    fn cascades() {
        let g = strongly_orthogonal_roots(&datum("CI:n=2")).unwrap();
        let got: Vec<_> = g.gammas.iter().map(|r| r.coords().to_vec()).collect();
        assert_eq!(got, vec![v(&[(2, 1), (0, 1)]), v(&[(0, 1), (2, 1)])]);
        let g = strongly_orthogonal_roots(&datum("AIII:p=2,q=1")).unwrap();
        assert_eq!(g.gammas[0].coords(), &[q(2)][..]);
        let g = strongly_orthogonal_roots(&datum("CI:n=1")).unwrap();
        assert_eq!(g.gammas[0].coords(), &[q(2)][..]);
        assert!(strongly_orthogonal_roots(&datum("AI:n=3")).is_err());
    }

    #[test]
    fn gamma_cube_matches_omega() {
        for l in ["CI:n=2", "AIII:p=3,q=2", "BDI:p=4,q=2", "DIII:n=5", "EIII", "EVII", "CI:n=1"] {
            let d = datum(l);
            let g = strongly_orthogonal_roots(&d).unwrap();
            assert_eq!(omega_from_gamma(&g).vertices, omega_polytope(&d).vertices, "{l}");
        }
        let g = strongly_orthogonal_roots(&datum("CI:n=1")).unwrap();
        assert_eq!(omega_from_gamma(&g).vertices.unwrap(), vec![v(&[(-1, 4)]), v(&[(1, 4)])]);
    }

    #[test]
    fn vertices_skipped_above_rank_four() {
        let om = omega_polytope(&datum("EI"));
        assert!(om.vertices.is_none());
        assert!(!om.halfspaces.is_empty());
    }
}
