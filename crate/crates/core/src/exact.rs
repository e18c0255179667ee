//! Exact rational helpers: vectors, elimination, symbolic multiples of pi
//! and a small rational simplex used for redundancy tests.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rational = Ratio<i64>;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn scale(a: &[Rational], s: Rational) -> Vec<Rational> {
    a.iter().map(|x| x * s).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[Rational]) -> Vec<Rational> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn to_f64(x: &Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn vec_to_f64(a: &[Rational]) -> Vec<f64> {
    a.iter().map(to_f64).collect()
}

/// Lexicographic comparison of coordinate vectors.
pub fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// First nonzero coordinate is positive.
pub fn lex_positive(a: &[Rational]) -> bool {
    a.iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_positive())
        .unwrap_or(false)
}

/// If `b = c * a` for some rational `c`, return `c`.
pub fn proportion(a: &[Rational], b: &[Rational]) -> Option<Rational> {
    let i = a.iter().position(|x| !x.is_zero())?;
    let c = b[i] / a[i];
    if a.iter().zip(b).all(|(x, y)| *x * c == *y) {
        Some(c)
    } else {
        None
    }
}

/// Row-reduces `rows` in place; returns the pivot columns.
pub fn row_reduce(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c];
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let mut rows = vectors.to_vec();
    row_reduce(&mut rows).len()
}

/// Solves the square system `m x = b`; `None` when singular.
pub fn solve(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(*bi);
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.iter().map(|r| r[n]).collect())
}

/// Picks a maximal linearly independent subset (in order) of `vectors`.
pub fn independent_subset(vectors: &[Vec<Rational>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut acc: Vec<Vec<Rational>> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        acc.push(v.clone());
        if rank(&acc) == acc.len() {
            chosen.push(i);
        } else {
            acc.pop();
        }
    }
    chosen
}

/// Closest rational with denominator at most `max_den`, if within `tol`.
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    let mut best: Option<(f64, Rational)> = None;
    for d in 1..=max_den {
        let n = (x * d as f64).round();
        let err = (x - n / d as f64).abs();
        if err <= tol && best.as_ref().is_none_or(|(e, _)| err < *e - 1e-15) {
            best = Some((err, Rational::new(n as i64, d)));
        }
    }
    best.map(|(_, r)| r)
}

/// Exact rational number of half-turns: the value `coeff * pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PiMultiple(pub Rational);

impl PiMultiple {
    pub fn half() -> Self {
        PiMultiple(qf(1, 2))
    }

    pub fn to_f64(self) -> f64 {
        to_f64(&self.0) * std::f64::consts::PI
    }
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.0;
        if c.is_zero() {
            return write!(f, "0");
        }
        let sign = if c.is_negative() { "-" } else { "" };
        let n = c.numer().abs();
        let d = *c.denom();
        match (n, d) {
            (1, 1) => write!(f, "{sign}pi"),
            (1, d) => write!(f, "{sign}pi/{d}"),
            (n, 1) => write!(f, "{sign}{n}*pi"),
            (n, d) => write!(f, "{sign}{n}*pi/{d}"),
        }
    }
}

/// The value `pi * sqrt(radicand)` for a nonnegative rational radicand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PiSqrt(pub Rational);

impl PiSqrt {
    pub fn to_f64(self) -> f64 {
        to_f64(&self.0).sqrt() * std::f64::consts::PI
    }

    /// The exact multiple of pi when the radicand is a rational square.
    pub fn as_pi_multiple(self) -> Option<PiMultiple> {
        let n = exact_isqrt(*self.0.numer())?;
        let d = exact_isqrt(*self.0.denom())?;
        Some(PiMultiple(Rational::new(n, d)))
    }
}

impl fmt::Display for PiSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_pi_multiple() {
            Some(m) => write!(f, "{m}"),
            None => write!(f, "pi*sqrt({})", self.0),
        }
    }
}

fn exact_isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt().round() as i64;
    (r - 1..=r + 1).find(|&c| c >= 0 && c * c == n)
}

/// Minimizes `sum(x)` subject to `a x = b`, `x >= 0` (columns of `a` given
/// as `cols`). Returns `None` when infeasible. Bland's rule, exact arithmetic.
pub fn min_l1_combination(cols: &[Vec<Rational>], b: &[Rational]) -> Option<Rational> {
    // Drop dependent equality rows first so artificials can always leave.
    let m_full = b.len();
    let mut rows: Vec<Vec<Rational>> = (0..m_full)
        .map(|i| {
            let mut r: Vec<Rational> = cols.iter().map(|c| c[i]).collect();
            r.push(b[i]);
            r
        })
        .collect();
    row_reduce(&mut rows);
    rows.retain(|r| !is_zero(r));
    let n = cols.len();
    if rows.iter().any(|r| r[..n].iter().all(Zero::is_zero)) {
        return None;
    }
    let m = rows.len();
    for r in rows.iter_mut() {
        if r[n].is_negative() {
            for x in r.iter_mut() {
                *x = -*x;
            }
        }
    }
    // Tableau columns: n structural, m artificial, rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![Rational::zero(); width];
            row[..n].copy_from_slice(&r[..n]);
            row[n + i] = Rational::one();
            row[width - 1] = r[n];
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    let phase1_cost: Vec<Rational> = (0..n + m)
        .map(|j| if j >= n { Rational::one() } else { Rational::zero() })
        .collect();
    simplex(&mut t, &mut basis, &phase1_cost, n + m);
    let infeas: Rational = basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n)
        .map(|(i, _)| t[i][width - 1])
        .sum();
    if !infeas.is_zero() {
        return None;
    }
    // Drive zero-level artificials out of the basis.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }
    let phase2_cost: Vec<Rational> = (0..n + m)
        .map(|j| if j < n { Rational::one() } else { Rational::zero() })
        .collect();
    simplex(&mut t, &mut basis, &phase2_cost, n);
    Some(
        basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| j < n)
            .map(|(i, _)| t[i][width - 1])
            .sum(),
    )
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for x in t[r].iter_mut() {
        *x *= inv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c];
            for (x, y) in row.iter_mut().zip(&prow) {
                *x -= f * y;
            }
        }
    }
    basis[r] = c;
}

/// Minimizes `cost . x` over columns `< allowed`; Bland's rule.
fn simplex(t: &mut [Vec<Rational>], basis: &mut [usize], cost: &[Rational], allowed: usize) {
    let width = t.first().map_or(0, Vec::len);
    let rhs = width - 1;
    loop {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let reduced = cost[j]
                - basis
                    .iter()
                    .enumerate()
                    .map(|(i, &bj)| cost[bj] * t[i][j])
                    .sum::<Rational>();
            reduced.is_negative()
        });
        let Some(c) = entering else { return };
        let mut leave: Option<(Rational, usize, usize)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[c].is_positive() {
                let ratio = row[rhs] / row[c];
                let better = match &leave {
                    None => true,
                    Some((best, _, bj)) => ratio < *best || (ratio == *best && basis[i] < *bj),
                };
                if better {
                    leave = Some((ratio, i, basis[i]));
                }
            }
        }
        // Objective is bounded below by zero in both phases.
        let Some((_, r, _)) = leave else { return };
        pivot(t, basis, r, c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_display() {
        assert_eq!(PiMultiple(qf(1, 2)).to_string(), "pi/2");
        assert_eq!(PiMultiple(qf(-1, 4)).to_string(), "-pi/4");
        assert_eq!(PiMultiple(qf(3, 2)).to_string(), "3*pi/2");
        assert_eq!(PiMultiple(q(2)).to_string(), "2*pi");
        assert_eq!(PiMultiple(q(0)).to_string(), "0");
        assert_eq!(PiSqrt(qf(1, 4)).to_string(), "pi/2");
        assert_eq!(PiSqrt(qf(3, 4)).to_string(), "pi*sqrt(3/4)");
    }

    #[test]
    fn solve_and_rank() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve(&m, &[q(3), q(4)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        assert!(solve(&[vec![q(1), q(2)], vec![q(2), q(4)]], &[q(1), q(2)]).is_none());
        assert_eq!(rank(&[vec![q(1), q(-1), q(0)], vec![q(0), q(1), q(-1)], vec![q(1), q(0), q(-1)]]), 2);
    }

    #[test]
    fn rationalize_small_denominators() {
        assert_eq!(rationalize(0.5000000001, 16, 1e-8), Some(qf(1, 2)));
        assert_eq!(rationalize(-1.0 / 3.0, 16, 1e-8), Some(qf(-1, 3)));
        assert_eq!(rationalize(0.123456, 16, 1e-8), None);
    }

    #[test]
    fn l1_combination() {
        // e1 = 1/2 (e1+e2) + 1/2 (e1-e2): cost 1.
        let cols = vec![
            vec![q(1), q(1)],
            vec![q(-1), q(-1)],
            vec![q(1), q(-1)],
            vec![q(-1), q(1)],
        ];
        assert_eq!(min_l1_combination(&cols, &[q(1), q(0)]), Some(q(1)));
        // e1 - e3 from A2 neighbours needs cost 2.
        let cols = vec![
            vec![q(1), q(-1), q(0)],
            vec![q(-1), q(1), q(0)],
            vec![q(0), q(1), q(-1)],
            vec![q(0), q(-1), q(1)],
        ];
        assert_eq!(min_l1_combination(&cols, &[q(1), q(0), q(-1)]), Some(q(2)));
        assert_eq!(min_l1_combination(&[vec![q(1), q(0)]], &[q(0), q(1)]), None);
    }
}
