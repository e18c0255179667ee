//! Maximal Grauert domains of Riemannian symmetric spaces of noncompact type.
//!
//! The crate builds exact restricted root data for the irreducible spaces,
//! constructs the Weyl-invariant polytope `omega = {H : |alpha(H)| < pi/2}`
//! whose orbit under the isometry group is the maximal Grauert domain,
//! decides when that domain is Hermitian symmetric, evaluates the adapted
//! complex structure along complexified geodesics, and checks the
//! plurisubharmonic exhaustion behind the Stein property.
//!
//! An independent matrix realization of the classical algebras
//! ([`matrix_oracle`]) recomputes root data, Jacobi spectra and embeddings
//! numerically.

pub mod adapted;
pub mod catalog;
pub mod domain;
pub mod error;
pub mod exact;
pub mod hermitian;
pub mod linalg;
pub mod matrix_oracle;
pub mod psh;
pub mod rootkit;

pub use error::{Error, Result};
