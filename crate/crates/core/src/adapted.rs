//! Adapted complex structure along a complexified geodesic `z -> exp(zH)`.
//!
//! On the eigenvector `v_j` of the Jacobi operator `Y -> -ad(H)^2 Y` with
//! eigenvalue `-lambda^2`, `lambda = alpha_j(H)`, the structure acts on the
//! pair `(xi_j, eta_j)` by the block
//!
//! ```text
//! J = [[-Re g / Im g, -Im g - (Re g)^2 / Im g],
//!      [ 1 / Im g,     Re g / Im g          ]],   g(z) = tanh(lambda z) / lambda
//! ```
//!
//! with `g(z) = z` for `lambda = 0`. Poles sit at `lambda * s in (pi/2) Z`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::catalog::RestrictedRootDatum;
use crate::error::{Error, Result};
use crate::exact::{q, PiMultiple, Rational};

/// Distance to a pole below which a block counts as singular.
pub const POLE_TOL: f64 = 1e-12;

/// Eigenvalues `-alpha(H)^2` of the Jacobi operator on `p`, with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiSpectrum {
    pub direction: Vec<f64>,
    /// Descending: `0` first.
    pub eigenvalues: Vec<(f64, usize)>,
}

impl JacobiSpectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|(_, m)| m).sum()
    }

    /// Eigenvalues listed with repetition, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .eigenvalues
            .iter()
            .flat_map(|&(x, m)| std::iter::repeat_n(x, m))
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

pub fn jacobi_spectrum(datum: &RestrictedRootDatum, h: &[f64]) -> JacobiSpectrum {
    let mut values: Vec<(f64, usize)> = vec![(0.0, datum.rank())];
    for r in datum.root_system.positive_roots() {
        let a = r.vector.eval_f64(h);
        values.push((-(a * a), r.mult as usize));
    }
    values.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for (v, m) in values {
        match merged.last_mut() {
            Some((w, k)) if (*w - v).abs() <= 1e-12 * v.abs().max(1.0) => *k += m,
            _ => merged.push((v, m)),
        }
    }
    JacobiSpectrum {
        direction: h.to_vec(),
        eigenvalues: merged,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptedBlock {
    pub lambda: f64,
    pub z: Complex64,
    pub matrix: [[f64; 2]; 2],
}

impl AdaptedBlock {
    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn det(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn squared(&self) -> [[f64; 2]; 2] {
        let m = &self.matrix;
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = m[i][0] * m[0][j] + m[i][1] * m[1][j];
            }
        }
        out
    }
}

/// `g(z) = tanh(lambda z) / lambda`, or `z` at `lambda = 0`.
///
/// Uses `tanh(x + iy) = (sinh 2x + i sin 2y) / (cosh 2x + cos 2y)`,
/// divided through by `cosh 2x` so large `|t|` cannot overflow.
pub fn g(lambda: f64, z: Complex64) -> Complex64 {
    if lambda == 0.0 {
        return z;
    }
    let (x, y) = (2.0 * lambda * z.re, 2.0 * lambda * z.im);
    let sech = 1.0 / x.cosh();
    let den = lambda * (1.0 + y.cos() * sech);
    Complex64::new(x.tanh() / den, y.sin() * sech / den)
}

fn singular(lambda: f64, z: Complex64) -> Error {
    Error::SingularPoint {
        lambda,
        re: z.re,
        im: z.im,
    }
}

pub fn adapted_block(lambda: f64, z: Complex64) -> Result<AdaptedBlock> {
    let near_pole = if lambda == 0.0 {
        z.im.abs() < POLE_TOL
    } else {
        let k = (2.0 * lambda * z.im / PI).round();
        (lambda * z.im - k * PI / 2.0).abs() < POLE_TOL
    };
    if near_pole {
        return Err(singular(lambda, z));
    }
    let gz = g(lambda, z);
    let (re, im) = (gz.re, gz.im);
    if !re.is_finite() || !im.is_finite() || im == 0.0 {
        return Err(singular(lambda, z));
    }
    Ok(AdaptedBlock {
        lambda,
        z,
        matrix: [[-re / im, -im - re * re / im], [1.0 / im, re / im]],
    })
}

/// A pole parameter `s` on the ray `sH` and the positive roots reaching `(pi/2) Z` there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularParameter {
    pub s: PiMultiple,
    pub roots: Vec<Vec<Rational>>,
}

/// All `s in (0, s_max]` with `alpha(sH) in (pi/2) Z` for a root with `alpha(H) != 0`.
pub fn singular_parameters(datum: &RestrictedRootDatum, h: &[Rational], s_max: f64) -> Result<Vec<SingularParameter>> {
    if h.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let mut found: BTreeMap<Rational, Vec<Vec<Rational>>> = BTreeMap::new();
    for r in datum.root_system.positive_roots() {
        let a = r.vector.eval(h).abs();
        if a.is_zero() {
            continue;
        }
        let step = q(1) / (q(2) * a);
        let mut s = step;
        while PiMultiple(s).to_f64() <= s_max * (1.0 + 1e-15) {
            found.entry(s).or_default().push(r.vector.coords().to_vec());
            s += step;
        }
    }
    Ok(found
        .into_iter()
        .map(|(s, roots)| SingularParameter {
            s: PiMultiple(s),
            roots,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, restricted_datum};
    use crate::domain::boundary_parameter;
    use crate::exact::qf;

    fn datum(l: &str) -> RestrictedRootDatum {
        restricted_datum(&lookup(l).unwrap())
    }

    #[test]
    fn hyperbolic_plane_spectrum() {
        let sp = jacobi_spectrum(&datum("BDI:p=2,q=1"), &[1.0]);
        assert_eq!(sp.eigenvalues, vec![(0.0, 1), (-1.0, 1)]);
    }

    #[test]
    fn sl3_spectrum() {
        let sp = jacobi_spectrum(&datum("AI:n=3"), &[1.0, 0.0, -1.0]);
        assert_eq!(sp.eigenvalues, vec![(0.0, 2), (-1.0, 2), (-4.0, 1)]);
        let zero = jacobi_spectrum(&datum("AI:n=3"), &[0.0; 3]);
        assert_eq!(zero.eigenvalues, vec![(0.0, 5)]);
    }

    #[test]
    fn block_examples() {
        let j = adapted_block(0.0, Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(j.matrix, [[0.0, -1.0], [1.0, 0.0]]);
        let j = adapted_block(1.0, Complex64::new(0.0, PI / 4.0)).unwrap();
        let want = [0.0, -1.0, 1.0, 0.0];
        for (a, b) in j.matrix.iter().flatten().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(matches!(
            adapted_block(1.0, Complex64::new(0.0, PI / 2.0)),
            Err(Error::SingularPoint { .. })
        ));
        assert!(adapted_block(1.0, Complex64::new(0.3, PI)).is_err());
    }

    #[test]
    fn g_matches_complex_tanh() {
        for &(l, t, s) in &[(1.0, 0.3, 0.2), (-2.0, -0.7, 0.4), (0.5, 3.0, 1.0)] {
            let z = Complex64::new(t, s);
            let want = (z * l).tanh() / l;
            assert!((g(l, z) - want).norm() < 1e-13);
        }
        assert!(g(1.0, Complex64::new(800.0, 0.3)).is_finite());
    }

    #[test]
    fn hyperbolic_plane_poles() {
        let d = datum("BDI:p=2,q=1");
        let ps = singular_parameters(&d, &[q(1)], 2.0 * PI).unwrap();
        let s: Vec<String> = ps.iter().map(|p| p.s.to_string()).collect();
        assert_eq!(s, ["pi/2", "pi", "3*pi/2", "2*pi"]);
    }

    #[test]
    fn first_pole_is_boundary() {
        let d = datum("AI:n=3");
        let h = vec![q(1), q(0), q(-1)];
        let ps = singular_parameters(&d, &h, 1.0).unwrap();
        assert_eq!(ps[0].s, PiMultiple(qf(1, 4)));
        assert_eq!(ps[0].roots, vec![vec![q(1), q(0), q(-1)]]);
        assert_eq!(ps[0].s, boundary_parameter(&d, &h).unwrap());
        assert!(singular_parameters(&d, &h, 0.7).unwrap().is_empty());
        assert!(singular_parameters(&d, &[q(0); 3], 1.0).is_err());
    }
}
