//! Circuit synthesis for commuting projector Hamiltonians.

pub mod circuit;
pub mod cut;
pub mod frame;
pub mod stab_solve;
pub mod tree_reduce;
pub mod two_body;

pub use circuit::{Circuit, Gate, GateOp, Register};




