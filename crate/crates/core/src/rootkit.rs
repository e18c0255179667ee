//! Exact finite root systems (reduced or of type BC) with multiplicities,
//! and their Weyl groups.
//!
//! Coordinates follow fixed frames: `A_r` lives in the sum-zero hyperplane of
//! `Q^{r+1}`; `B`, `C`, `D`, `BC` and `F4` use `Q^r` with the usual `e_i`;
//! `G2` lives in the sum-zero hyperplane of `Q^3`; `E6`, `E7` and `E8` are
//! cut out of the even `E8` lattice in `Q^8`. The inner product is always the
//! standard one on the ambient coordinates, and a root acts on `H` by
//! `alpha(H) = <alpha, H>`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, dot, lex_cmp, q, qf, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::BC,
        Family::E6,
        Family::E7,
        Family::E8,
        Family::F4,
        Family::G2,
    ];

    pub fn is_reduced(self) -> bool {
        self != Family::BC
    }

    pub fn ambient_dim(self, rank: usize) -> usize {
        match self {
            Family::A => rank + 1,
            Family::G2 => 3,
            Family::E6 | Family::E7 | Family::E8 => 8,
            _ => rank,
        }
    }

    pub fn frame(self) -> &'static str {
        match self {
            Family::A => "e_i - e_j in the sum-zero hyperplane of Q^(r+1)",
            Family::B => "+-e_i, +-e_i +- e_j in Q^r",
            Family::C => "+-2e_i, +-e_i +- e_j in Q^r",
            Family::D => "+-e_i +- e_j in Q^r",
            Family::BC => "+-e_i, +-2e_i, +-e_i +- e_j in Q^r",
            Family::G2 => "e_i - e_j and +-(2e_i - e_j - e_k) in the sum-zero hyperplane of Q^3",
            Family::F4 => "+-e_i, +-e_i +- e_j, (+-1/2, +-1/2, +-1/2, +-1/2) in Q^4",
            Family::E6 => "E8 roots with coordinate sum 0 and x7 + x8 = 0, in Q^8",
            Family::E7 => "E8 roots with coordinate sum 0, in Q^8",
            Family::E8 => "+-e_i +- e_j and (+-1/2)^8 with an even number of minus signs, in Q^8",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::MalformedLabel(s.to_string()))
    }
}

/// A nonzero vector of exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootVector(Vec<Rational>);

impl RootVector {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if exact::is_zero(&coords) {
            return Err(Error::ZeroVector);
        }
        Ok(RootVector(coords))
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| q(c)).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn norm2(&self) -> Rational {
        dot(&self.0, &self.0)
    }

    pub fn neg(&self) -> RootVector {
        RootVector(exact::neg(&self.0))
    }

    /// `alpha(H)` for an exact `H`.
    pub fn eval(&self, h: &[Rational]) -> Rational {
        dot(&self.0, h)
    }

    pub fn eval_f64(&self, h: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(h)
            .map(|(a, x)| exact::to_f64(a) * x)
            .sum()
    }

    /// Image under the reflection in the hyperplane orthogonal to `beta`.
    pub fn reflect_in(&self, beta: &RootVector) -> RootVector {
        RootVector(reflect(&self.0, beta.coords()))
    }

    pub fn is_positive(&self) -> bool {
        exact::lex_positive(&self.0)
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `v - 2 (v, beta)/(beta, beta) beta`
pub fn reflect(v: &[Rational], beta: &[Rational]) -> Vec<Rational> {
    let c = q(2) * dot(v, beta) / dot(beta, beta);
    v.iter().zip(beta).map(|(x, b)| x - c * b).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub vector: RootVector,
    pub mult: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub ambient_dim: usize,
    /// Number of orthogonal copies of the family (2 for `S + S`).
    pub summands: usize,
    pub roots: Vec<Root>,
}

pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem> {
    let bad = |reason: &str| Error::InvalidRootSystem {
        family: family.to_string(),
        rank,
        reason: reason.to_string(),
    };
    let min_rank = match family {
        Family::D => 2,
        _ => 1,
    };
    if rank < min_rank {
        return Err(bad(&format!("rank must be at least {min_rank}")));
    }
    let fixed = match family {
        Family::E6 => Some(6),
        Family::E7 => Some(7),
        Family::E8 => Some(8),
        Family::F4 => Some(4),
        Family::G2 => Some(2),
        _ => None,
    };
    if let Some(r) = fixed {
        if rank != r {
            return Err(bad(&format!("exceptional family has rank {r}")));
        }
    }
    let n = family.ambient_dim(rank);
    let unit = |i: usize, c: i64| {
        let mut v = vec![Rational::zero(); n];
        v[i] = q(c);
        v
    };
    let pair = |i: usize, si: i64, j: usize, sj: i64| {
        let mut v = vec![Rational::zero(); n];
        v[i] = q(si);
        v[j] = q(sj);
        v
    };
    let mut vecs: Vec<Vec<Rational>> = Vec::new();
    let signed_pairs = |vecs: &mut Vec<Vec<Rational>>| {
        for i in 0..n {
            for j in (i + 1)..n {
                for si in [1, -1] {
                    for sj in [1, -1] {
                        vecs.push(pair(i, si, j, sj));
                    }
                }
            }
        }
    };
    match family {
        Family::A => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        vecs.push(pair(i, 1, j, -1));
                    }
                }
            }
        }
        Family::B | Family::C | Family::D | Family::BC => {
            signed_pairs(&mut vecs);
            for i in 0..n {
                for s in [1, -1] {
                    if matches!(family, Family::B | Family::BC) {
                        vecs.push(unit(i, s));
                    }
                    if matches!(family, Family::C | Family::BC) {
                        vecs.push(unit(i, 2 * s));
                    }
                }
            }
        }
        Family::G2 => {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        vecs.push(pair(i, 1, j, -1));
                    }
                }
                for s in [1, -1] {
                    let mut v = vec![q(-s); 3];
                    v[i] = q(2 * s);
                    vecs.push(v);
                }
            }
        }
        Family::F4 => {
            signed_pairs(&mut vecs);
            for i in 0..4 {
                vecs.push(unit(i, 1));
                vecs.push(unit(i, -1));
            }
            for mask in 0..16u32 {
                vecs.push(
                    (0..4)
                        .map(|i| if mask >> i & 1 == 1 { qf(-1, 2) } else { qf(1, 2) })
                        .collect(),
                );
            }
        }
        Family::E6 | Family::E7 | Family::E8 => {
            let mut e8 = Vec::new();
            signed_pairs(&mut e8);
            for mask in 0..256u32 {
                if mask.count_ones() % 2 == 0 {
                    e8.push(
                        (0..8)
                            .map(|i| if mask >> i & 1 == 1 { qf(-1, 2) } else { qf(1, 2) })
                            .collect(),
                    );
                }
            }
            vecs = e8
                .into_iter()
                .filter(|v: &Vec<Rational>| match family {
                    Family::E8 => true,
                    Family::E7 => v.iter().sum::<Rational>().is_zero(),
                    _ => v.iter().sum::<Rational>().is_zero() && (v[6] + v[7]).is_zero(),
                })
                .collect();
        }
    }
    vecs.sort_by(|a, b| lex_cmp(a, b));
    vecs.dedup();
    let roots = vecs
        .into_iter()
        .map(|v| Root {
            vector: RootVector(v),
            mult: 1,
        })
        .collect();
    Ok(RootSystem {
        family,
        rank,
        ambient_dim: n,
        summands: 1,
        roots,
    })
}

impl RootSystem {
    /// Assembles a system without validation (see [`verify_axioms`]).
    pub fn from_parts(family: Family, rank: usize, ambient_dim: usize, roots: Vec<Root>) -> Self {
        RootSystem {
            family,
            rank,
            ambient_dim,
            summands: 1,
            roots,
        }
    }

    /// Sets multiplicities from the squared length of each root.
    pub fn with_multiplicities(mut self, mult_of_norm2: impl Fn(Rational) -> u32) -> Self {
        for r in &mut self.roots {
            r.mult = mult_of_norm2(r.vector.norm2());
        }
        self.roots.retain(|r| r.mult > 0);
        self
    }

    /// `S + S` on the doubled ambient space.
    pub fn direct_sum_with_self(&self) -> RootSystem {
        let n = self.ambient_dim;
        let mut roots = Vec::with_capacity(2 * self.roots.len());
        for (first, r) in [true, false].into_iter().flat_map(|f| self.roots.iter().map(move |r| (f, r))) {
            let mut v = vec![Rational::zero(); 2 * n];
            let off = if first { 0 } else { n };
            v[off..off + n].clone_from_slice(r.vector.coords());
            roots.push(Root {
                vector: RootVector(v),
                mult: r.mult,
            });
        }
        roots.sort_by(|a, b| a.vector.cmp(&b.vector));
        RootSystem {
            family: self.family,
            rank: 2 * self.rank,
            ambient_dim: 2 * n,
            summands: 2 * self.summands,
            roots,
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn mult_of(&self, v: &[Rational]) -> Option<u32> {
        self.roots
            .iter()
            .find(|r| r.vector.coords() == v)
            .map(|r| r.mult)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.mult_of(v).is_some()
    }

    pub fn positive_roots(&self) -> Vec<&Root> {
        self.roots.iter().filter(|r| r.vector.is_positive()).collect()
    }

    /// Sum of multiplicities over positive roots.
    pub fn positive_mult_total(&self) -> u32 {
        self.positive_roots().iter().map(|r| r.mult).sum()
    }

    /// Positive roots that are not a sum of two positive roots.
    pub fn simple_roots(&self) -> Vec<RootVector> {
        let pos: Vec<&RootVector> = self.positive_roots().into_iter().map(|r| &r.vector).collect();
        let sums: BTreeSet<Vec<Rational>> = pos
            .iter()
            .flat_map(|a| pos.iter().map(move |b| exact::add(a.coords(), b.coords())))
            .collect();
        pos.into_iter()
            .filter(|a| !sums.contains(a.coords()))
            .cloned()
            .collect()
    }

    /// One positive representative per root line (drops `2a` when `a` is present and vice versa).
    pub fn reflection_roots(&self) -> Vec<RootVector> {
        let mut out: Vec<RootVector> = Vec::new();
        for r in self.positive_roots() {
            if !out
                .iter()
                .any(|o| exact::proportion(o.coords(), r.vector.coords()).is_some())
            {
                out.push(r.vector.clone());
            }
        }
        out
    }

    pub fn weyl_generators(&self) -> Vec<WeylElement> {
        self.simple_roots()
            .iter()
            .map(WeylElement::reflection)
            .collect()
    }

    /// Enumerates the Weyl group; `None` if it exceeds `limit` elements.
    pub fn weyl_group(&self, limit: usize) -> Option<Vec<WeylElement>> {
        let gens = self.weyl_generators();
        let id = WeylElement::identity(self.ambient_dim);
        let mut seen: BTreeSet<Vec<Vec<Rational>>> = BTreeSet::new();
        seen.insert(id.matrix.clone());
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let next = g.compose(&w);
                if seen.insert(next.matrix.clone()) {
                    if out.len() >= limit {
                        return None;
                    }
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Some(out)
    }

    /// Basis of the span of the roots (the simple roots), as ambient vectors.
    pub fn span_basis(&self) -> Vec<Vec<Rational>> {
        self.simple_roots().into_iter().map(|r| r.0).collect()
    }

    /// Multiset of roots keyed by coordinates.
    fn multiset(&self) -> BTreeMap<Vec<Rational>, u32> {
        self.roots
            .iter()
            .map(|r| (r.vector.coords().to_vec(), r.mult))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    Nonzero,
    NegationClosed,
    ReflectionClosed,
    Integrality,
    Reducedness,
    Spanning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Offending root(s) when the axiom fails.
    pub witness: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("every axiom is checked")
    }
}

pub fn verify_axioms(rs: &RootSystem) -> AxiomReport {
    let set = rs.multiset();
    let vecs: Vec<&[Rational]> = rs.roots.iter().map(|r| r.vector.coords()).collect();
    let mut checks = Vec::new();

    let mut push = |axiom, witness: Option<Vec<Vec<Rational>>>| {
        checks.push(AxiomCheck {
            axiom,
            passed: witness.is_none(),
            witness: witness.unwrap_or_default(),
        })
    };

    push(
        Axiom::Nonzero,
        vecs.iter().find(|v| exact::is_zero(v)).map(|v| vec![v.to_vec()]),
    );

    push(
        Axiom::NegationClosed,
        rs.roots
            .iter()
            .find(|r| set.get(&exact::neg(r.vector.coords())) != Some(&r.mult))
            .map(|r| vec![r.vector.coords().to_vec()]),
    );

    let mut refl_witness = None;
    'outer: for beta in &rs.roots {
        if exact::is_zero(beta.vector.coords()) {
            continue;
        }
        for a in &rs.roots {
            let img = reflect(a.vector.coords(), beta.vector.coords());
            if set.get(&img) != Some(&a.mult) {
                refl_witness = Some(vec![a.vector.coords().to_vec(), beta.vector.coords().to_vec()]);
                break 'outer;
            }
        }
    }
    push(Axiom::ReflectionClosed, refl_witness);

    let mut int_witness = None;
    'outer2: for a in &vecs {
        for b in &vecs {
            let nb = dot(b, b);
            if nb.is_zero() {
                continue;
            }
            if !(q(2) * dot(a, b) / nb).is_integer() {
                int_witness = Some(vec![a.to_vec(), b.to_vec()]);
                break 'outer2;
            }
        }
    }
    push(Axiom::Integrality, int_witness);

    let red_witness = if rs.family.is_reduced() {
        let mut w = None;
        'outer3: for a in &vecs {
            for b in &vecs {
                if let Some(c) = exact::proportion(a, b) {
                    if c > Rational::zero() && c != Rational::one() {
                        w = Some(vec![a.to_vec(), b.to_vec()]);
                        break 'outer3;
                    }
                }
            }
        }
        w
    } else {
        let min = vecs.iter().map(|v| dot(v, v)).min();
        vecs.iter()
            .find(|v| Some(dot(v, v)) == min && !set.contains_key(&exact::scale(v, q(2))))
            .map(|v| vec![v.to_vec()])
    };
    push(Axiom::Reducedness, red_witness);

    let owned: Vec<Vec<Rational>> = vecs.iter().map(|v| v.to_vec()).collect();
    push(
        Axiom::Spanning,
        if exact::rank(&owned) == rs.rank {
            None
        } else {
            Some(Vec::new())
        },
    );

    AxiomReport { checks }
}

/// The orbit of `v` under the group generated by all root reflections,
/// in lexicographic order.
pub fn weyl_orbit(rs: &RootSystem, v: &[Rational]) -> Vec<Vec<Rational>> {
    let mirrors = rs.reflection_roots();
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
    seen.insert(v.to_vec());
    let mut frontier = vec![v.to_vec()];
    // Fixed-point iteration: stop once a sweep adds nothing new.
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for m in &mirrors {
                let y = reflect(x, m.coords());
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    seen.into_iter().collect()
}

/// An element of the Weyl group, kept both as an exact matrix and as the
/// word of reflections that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    /// Row-major square matrix acting on ambient coordinates.
    pub matrix: Vec<Vec<Rational>>,
    /// Reflection roots, rightmost applied first.
    pub word: Vec<RootVector>,
}

impl WeylElement {
    pub fn identity(dim: usize) -> Self {
        let matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        WeylElement {
            matrix,
            word: Vec::new(),
        }
    }

    pub fn reflection(beta: &RootVector) -> Self {
        let n = beta.coords().len();
        let b = beta.coords();
        let nb = beta.norm2();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let id = if i == j { Rational::one() } else { Rational::zero() };
                        id - q(2) * b[i] * b[j] / nb
                    })
                    .collect()
            })
            .collect();
        WeylElement {
            matrix,
            word: vec![beta.clone()],
        }
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let n = self.matrix.len();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum())
                    .collect()
            })
            .collect();
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        WeylElement { matrix, word }
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix.iter().map(|row| dot(row, v)).collect()
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, x)| exact::to_f64(a) * x).sum())
            .collect()
    }

    pub fn is_orthogonal(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let col_dot: Rational = (0..n).map(|k| self.matrix[k][i] * self.matrix[k][j]).sum();
                col_dot == if i == j { Rational::one() } else { Rational::zero() }
            })
        })
    }

    /// True when the element maps the root multiset onto itself.
    pub fn permutes_roots(&self, rs: &RootSystem) -> bool {
        let set = rs.multiset();
        rs.roots
            .iter()
            .all(|r| set.get(&self.apply(r.vector.coords())) == Some(&r.mult))
    }
}

#[derive(Serialize, Deserialize)]
struct RootJson {
    coords: Vec<(i64, i64)>,
    mult: u32,
}

#[derive(Serialize, Deserialize)]
struct RootSystemJson {
    family: Family,
    rank: usize,
    ambient_dim: usize,
    #[serde(default = "one")]
    summands: usize,
    frame: String,
    roots: Vec<RootJson>,
}

fn one() -> usize {
    1
}

impl RootSystem {
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = RootSystemJson {
            family: self.family,
            rank: self.rank,
            ambient_dim: self.ambient_dim,
            summands: self.summands,
            frame: self.family.frame().to_string(),
            roots: self
                .roots
                .iter()
                .map(|r| RootJson {
                    coords: r.vector.coords().iter().map(|c| (*c.numer(), *c.denom())).collect(),
                    mult: r.mult,
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("root system serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("root system serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: RootSystemJson = serde_json::from_str(s)?;
        let mut roots = Vec::with_capacity(doc.roots.len());
        for r in doc.roots {
            if r.coords.len() != doc.ambient_dim || r.coords.iter().any(|&(_, d)| d == 0) {
                return Err(Error::Data {
                    file: "root system".into(),
                    reason: "bad coordinate".into(),
                });
            }
            roots.push(Root {
                vector: RootVector::new(r.coords.iter().map(|&(n, d)| Rational::new(n, d)).collect())?,
                mult: r.mult,
            });
        }
        Ok(RootSystem {
            family: doc.family,
            rank: doc.rank,
            ambient_dim: doc.ambient_dim,
            summands: doc.summands,
            roots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> Vec<Rational> {
        c.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn a1_has_two_roots() {
        let rs = build_root_system(Family::A, 1).unwrap();
        let got: Vec<_> = rs.roots.iter().map(|r| r.vector.coords().to_vec()).collect();
        assert_eq!(got, vec![v(&[-1, 1]), v(&[1, -1])]);
    }

    #[test]
    fn c2_roots() {
        let rs = build_root_system(Family::C, 2).unwrap();
        assert_eq!(rs.len(), 8);
        for c in [[2, 0], [-2, 0], [0, 2], [0, -2], [1, 1], [1, -1], [-1, 1], [-1, -1]] {
            assert!(rs.contains(&v(&c)), "{c:?}");
        }
    }

    #[test]
    fn root_counts() {
        let expect = [
            (Family::A, 3, 12),
            (Family::B, 3, 18),
            (Family::C, 3, 18),
            (Family::D, 4, 24),
            (Family::BC, 2, 12),
            (Family::G2, 2, 12),
            (Family::F4, 4, 48),
            (Family::E6, 6, 72),
            (Family::E7, 7, 126),
            (Family::E8, 8, 240),
        ];
        for (f, r, n) in expect {
            assert_eq!(build_root_system(f, r).unwrap().len(), n, "{f}{r}");
        }
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        assert!(build_root_system(Family::D, 1).is_err());
        assert!(build_root_system(Family::BC, 0).is_err());
        assert!(build_root_system(Family::E6, 5).is_err());
        assert!(build_root_system(Family::G2, 3).is_err());
    }

    #[test]
    fn negation_counterexample() {
        let rs = RootSystem::from_parts(
            Family::A,
            2,
            2,
            vec![
                Root { vector: RootVector::from_ints(&[1, 0]).unwrap(), mult: 1 },
                Root { vector: RootVector::from_ints(&[0, 1]).unwrap(), mult: 1 },
            ],
        );
        let rep = verify_axioms(&rs);
        let neg = rep.get(Axiom::NegationClosed);
        assert!(!neg.passed);
        assert_eq!(neg.witness, vec![v(&[1, 0])]);
    }

    #[test]
    fn orbit_examples() {
        let a2 = build_root_system(Family::A, 2).unwrap();
        let orbit = weyl_orbit(&a2, &v(&[1, -1, 0]));
        let roots: Vec<_> = a2.roots.iter().map(|r| r.vector.coords().to_vec()).collect();
        assert_eq!(orbit, roots);

        let c2 = build_root_system(Family::C, 2).unwrap();
        assert_eq!(
            weyl_orbit(&c2, &v(&[1, 0])),
            vec![v(&[-1, 0]), v(&[0, -1]), v(&[0, 1]), v(&[1, 0])]
        );

        let a1 = build_root_system(Family::A, 1).unwrap();
        assert_eq!(weyl_orbit(&a1, &v(&[0, 0])), vec![v(&[0, 0])]);
    }

    #[test]
    fn weyl_orders() {
        for (f, r, order) in [
            (Family::A, 1, 2),
            (Family::A, 2, 6),
            (Family::B, 2, 8),
            (Family::BC, 2, 8),
            (Family::G2, 2, 12),
            (Family::A, 3, 24),
            (Family::C, 3, 48),
            (Family::D, 3, 24),
        ] {
            let rs = build_root_system(f, r).unwrap();
            let w = rs.weyl_group(10_000).unwrap();
            assert_eq!(w.len(), order, "{f}{r}");
            assert!(w.iter().all(|g| g.is_orthogonal() && g.permutes_roots(&rs)));
        }
    }

    #[test]
    fn simple_roots_have_rank_size() {
        for f in Family::ALL {
            let r = match f {
                Family::E6 => 6,
                Family::E7 => 7,
                Family::E8 => 8,
                Family::F4 => 4,
                Family::G2 => 2,
                _ => 3,
            };
            let rs = build_root_system(f, r).unwrap();
            assert_eq!(rs.simple_roots().len(), r, "{f}");
        }
    }

    #[test]
    fn json_round_trip() {
        let rs = build_root_system(Family::F4, 4)
            .unwrap()
            .with_multiplicities(|n2| if n2 == q(2) { 1 } else { 8 });
        let s = rs.to_json();
        let back = RootSystem::from_json(&s).unwrap();
        assert_eq!(back, rs);
        assert_eq!(back.to_json(), s);
    }
}
