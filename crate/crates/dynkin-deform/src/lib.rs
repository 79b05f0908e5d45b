//! Bases, admissible deformations and isomorphism equations for the
//! preprojective algebras `P(E_n)` and their deformations `P^f(E_n)`,
//! `n = 6, 7, 8`.

pub mod deform;
pub mod forest;
pub mod localbasis;
pub mod pathbasis;
pub mod poly;
pub mod quiver;
pub mod verify;
pub mod word;

pub use localbasis::LocalBasis;
pub use pathbasis::PathBasis;
pub use poly::{Poly, Scalar, SubstitutionSet, Var};
pub use quiver::{ChooseStrategy, DynkinType};

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no value for variable {0}")]
    MissingVariable(String),
    #[error("substitution for {0} would break triangularity")]
    NotTriangular(String),
    #[error("E8 forest requires large-memory mode")]
    LargeMemoryRequired,
    #[error("no pivot with coefficient ±1 or ±2 in equation for {0}")]
    NoPivot(String),
    #[error("{0}")]
    Invalid(String),
}
