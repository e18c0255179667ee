//! Dense symmetric helpers shared by the numeric checks.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

/// Pivot floor for the scaled factorization.
pub const PIVOT_TOL: f64 = 1e-9;

/// Two independent positive-definiteness certificates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdCertificate {
    /// Cholesky of `m / max diag` succeeded with every pivot `>= PIVOT_TOL`.
    pub factorization_ok: bool,
    pub min_pivot: f64,
    pub min_eigenvalue: f64,
}

impl PdCertificate {
    pub fn is_pd(&self) -> bool {
        self.factorization_ok && self.min_eigenvalue > 0.0
    }
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn pd_certificate(m: &DMatrix<f64>) -> PdCertificate {
    let m = symmetrize(m);
    let min_eigenvalue = min_eigenvalue(&m);
    let scale = m.diagonal().iter().copied().fold(0.0, f64::max);
    let (factorization_ok, min_pivot) = if scale > 0.0 && scale.is_finite() {
        match Cholesky::new(&m / scale) {
            Some(ch) => {
                let l = ch.l();
                let p = (0..l.nrows()).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
                (p >= PIVOT_TOL, p)
            }
            None => (false, f64::NEG_INFINITY),
        }
    } else {
        (false, f64::NEG_INFINITY)
    };
    PdCertificate {
        factorization_ok,
        min_pivot,
        min_eigenvalue,
    }
}

/// Orthonormal basis (columns) of the span of `cols`, via QR.
pub fn orthonormal_columns(cols: &DMatrix<f64>) -> DMatrix<f64> {
    cols.clone().qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificates() {
        let pd = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let c = pd_certificate(&pd);
        assert!(c.is_pd());
        assert!((c.min_eigenvalue - 1.0).abs() < 1e-14);
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(!pd_certificate(&indefinite).is_pd());
        let nearly = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-12]);
        let c = pd_certificate(&nearly);
        assert!(!c.factorization_ok && c.min_eigenvalue > 0.0);
    }
}
