//! State-vector and density-matrix evolution under piecewise-constant
//! Hamiltonians with optional Lindblad dissipation (dimension ≤ 16).

mod basis;
mod evolve;
mod expm;
mod operators;
mod state;

pub use basis::{LevelBasis, MAX_DIMENSION};
pub use evolve::{
    apply_superoperator, evolve_density, evolve_state, lindblad_propagator, liouvillian, sequence_unitary, unitary,
};
pub use expm::expm;
pub use operators::{kron, CMatrix, CollapseOperator, HamiltonianSegment, C64};
pub use state::{overlap_fidelity, populations, CVector, DensityMatrix, Populations, QuantumState};
