//! Interaction complexes, localization maps and bounded-depth ground-state
//! circuits for locally commuting projector Hamiltonians.
//!
//! The crate is organised bottom-up:
//!
//! - [`gf2`] and [`pauli`]: binary linear algebra and the Pauli group in
//!   symplectic form.
//! - [`graph`]: bounded-degree graphs, powers, girth, the random ensemble,
//!   coarse-graining and edge colouring.
//! - [`complex`]: simplicial 2-complexes, shields and truncated covers.
//! - [`localize`]: combinatorial maps from a 2-complex onto a 1-complex.
//! - [`hamiltonian`]: commuting Hamiltonians in dense or Pauli form.
//! - [`algebra`]: interaction algebras, centres and block decompositions.
//! - [`synth`]: circuit synthesis.
//! - [`verify`]: exact diagonalization, state vectors and stabilizer tableaux.
//! - [`instances`]: generators for the standard model families.
//! - [`io`]: text formats.

pub mod algebra;
pub mod complex;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod hamiltonian;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod localize;
pub mod pauli;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};

/// Numerical tolerances shared by every module.
pub mod tol {
    /// Hermiticity of term matrices.
    pub const HERMITIAN: f64 = 1e-12;
    /// Commutators and idempotency residuals.
    pub const COMMUTE: f64 = 1e-10;
    /// Eigenvalue matching.
    pub const EIGEN: f64 = 1e-9;
    /// Degenerate eigenvalue clustering for generic central elements.
    pub const CLUSTER: f64 = 1e-7;
    /// Largest dense term matrix accepted.
    pub const MAX_TERM_DIM: usize = 4096;
    /// Largest carrier dimension for algebra computations.
    pub const MAX_ALGEBRA_DIM: usize = 64;
    /// Largest total Hilbert space dimension handled by state-vector oracles.
    pub const MAX_STATE_DIM: usize = 1 << 14;
    /// Largest dimension diagonalized densely; above this Lanczos is used.
    pub const MAX_DENSE_DIM: usize = 1 << 10;
}
