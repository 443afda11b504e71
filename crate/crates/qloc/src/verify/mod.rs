//! Independent oracles: exact diagonalization, state vectors and stabilizer
//! tableaux.

pub mod exact;
pub mod state;
pub mod tableau;

pub use exact::exact_ground_energy;
pub use state::{apply_circuit, energy, energy_density, StateVector};
pub use tableau::{tableau_energy, Tableau};
