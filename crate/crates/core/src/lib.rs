//! Quadratic quantum Wasserstein distances on multi-qubit state spaces.
//!
//! The crate builds transport cost operators from observable lists (with
//! closed forms for Pauli-string costs), solves the coupling semidefinite
//! program that defines the distance, and provides Wigner symmetries and
//! channels for checking isometry properties numerically.

pub mod channel;
pub mod cost;
pub mod coupling;
pub mod error;
pub mod io;
pub mod linalg;
pub mod pauli;
pub mod random;
pub mod solver;
pub mod state;
pub mod symmetries;
pub mod verify;

pub use channel::{channel_adjoint, QuantumChannel};
pub use cost::{
    cost_from_observables, pauli_subset_cost, symmetric_cost, symmetric_cost_closed_form, two_level_cost_closed_form,
    verify_spectrum, CostOperator, CostProvenance, ObservableSet,
};
pub use coupling::{channel_cost, channel_coupling, coupling_cost, product_coupling, Coupling, CouplingSource};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use pauli::PauliString;
pub use solver::{
    diameter_value, pure_endpoint_distance, solve_distance, SolveReport, SolverMethod, SolverOptions, TransportProblem,
};
pub use state::{canonical_purification, DensityOperator, PureState};
pub use symmetries::{apply_symmetry, conjugate_coupling, depolarizing_channel, WignerSymmetry};
pub use verify::{run_verification, VerificationReport, VerifyOptions};
