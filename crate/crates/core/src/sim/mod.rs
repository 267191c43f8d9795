//! Dense statevector primitives over named registers.

mod function;
mod layout;
mod state;

pub use function::ClassicalFunctionTable;
pub use layout::{Register, RegisterLayout};
pub use state::StateVector;

/// Tolerance on the L2 norm of a state.
pub const NORM_TOL: f64 = 1e-9;

/// Tolerance for amplitudes that must be exactly zero after basis relabelings.
pub const BASIS_TOL: f64 = 1e-12;

/// Largest qubit count a dense state may use.
pub const MAX_QUBITS: usize = 24;
