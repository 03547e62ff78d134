//! Structure-preserving discretization of distributed-parameter
//! port-Hamiltonian systems on simplicial complexes.
//!
//! The crate builds oriented manifold-like simplicial complexes with
//! circumcentric duals, assembles the discrete exterior calculus operators
//! (boundary, coboundary, trace, dual derivatives, diagonal Hodge stars),
//! forms simplicial Dirac structures and the explicit input-output
//! port-Hamiltonian systems they induce, and integrates those systems in
//! time while tracking energy, conservation laws and Casimirs.
//!
//! Module map:
//! - [`complex`]: meshes, circumcentric dual geometry, generators, mesh JSON.
//! - [`cochain`]: typed coefficient vectors and primal-dual wedge pairings.
//! - [`operators`]: the sparse linear operators and their exact identities.
//! - [`dirac`]: simplicial Dirac structures and their verification.
//! - [`phs`]: port-Hamiltonian assembly, conservation laws, feedback, control.
//! - [`integrate`]: implicit midpoint / leapfrog integration with diagnostics.
//! - [`models`]: the 2D wave equation and 1D telegraph models, LC ladders,
//!   analytic and discrete spectra.

pub mod cochain;
pub mod complex;
pub mod dirac;
pub mod integrate;
pub mod linalg;
pub mod models;
pub mod operators;
pub mod phs;
pub mod rng;
pub mod sparse;
#[cfg(test)]
pub(crate) mod test_fixtures;

pub use cochain::{Carrier, Cochain};
pub use complex::{DualGeometry, Point, Simplex, SimplicialComplex};
pub use dirac::{DiracVariant, SimplicialDirac};
pub use phs::{MaterialField, PortHamiltonianSystem, QuadraticHamiltonian};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-manifold complex: {0}")]
    NonManifold(String),
    #[error("complex is disconnected")]
    Disconnected,
    #[error("inconsistent orientation: {0}")]
    InconsistentOrientation(String),
    #[error("degenerate simplex: {0}")]
    DegenerateSimplex(String),
    #[error("mesh is not well-centered: {0}")]
    NotWellCentered(String),
    #[error("mesh parameters cannot produce a well-centered mesh: {0}")]
    NotWellCenterable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),
    #[error("carrier mismatch: expected {expected}, got {got}")]
    CarrierMismatch { expected: String, got: String },
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid degrees: {0}")]
    InvalidDegrees(String),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("system lacks the block structure required by the integrator: {0}")]
    BlockStructureMissing(String),
    #[error("mesh file error: {0}")]
    MeshFormat(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
