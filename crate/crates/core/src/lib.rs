//! Numerical toolkit for finite-dimensional linear relations and the
//! holomorphic operator families they generate.
//!
//! The library models linear relations as graph subspaces of M ⊕ M, builds
//! selfadjoint contraction block systems and their transfer functions, and
//! turns the identities, sector inequalities, kernel positivity statements,
//! and integral representations satisfied by Stieltjes and inverse Stieltjes
//! families into executable checks.
//!
//! Layering (each module only depends on the ones above it):
//! - [`numerics`]: dense complex matrices, subspaces, rank/tolerance policy
//! - [`linrel`]: linear relations, adjoints, resolvents, Cayley transform
//! - [`contractions`]: defect operators, block contraction parametrization
//! - [`rs`]: passive selfadjoint systems and the combined Nevanlinna-Schur class
//! - [`families`]: Stieltjes / inverse Stieltjes families and their checks
//! - [`integral`]: integral representations from spectral data
//!
//! All values are immutable and all operations pure; evaluating a family over
//! a grid of points is safe to parallelize without coordination.

pub mod contractions;
pub mod error;
pub mod families;
pub mod grid;
pub mod integral;
pub mod json;
pub mod linrel;
pub mod numerics;
pub mod rs;
pub mod seeded;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
