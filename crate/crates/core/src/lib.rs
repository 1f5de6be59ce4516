//! Photon-blockade simulator for two Kerr cavity modes coupled to one
//! mechanical mode through `g(a1†a2b + h.c.)`.
//!
//! Bottom to top: [`fock`] builds operators on the truncated three-mode
//! space, [`model`] assembles the Hamiltonian and jump operators,
//! [`liouville`] solves for the steady state, [`dynamics`] propagates in
//! time and computes g²(τ), and [`analytics`] holds the closed-form optimum
//! and the amplitude model used as an independent check.

pub mod analytics;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod liouville;
pub mod model;
pub mod ode;
pub mod sparse;
pub mod states;
pub mod sweep;

pub use analytics::{
    amplitude_rhs, amplitude_steady_state, determinant_condition, determinant_condition_normalized,
    g2_from_amplitudes, numerical_optimum, optimal_conditions, AmplitudeState, Branch, OptimalPoint,
};
pub use dynamics::{default_tau_grid, evolve, g2_tau, uniform_grid, CorrelationSeries};
pub use error::{Error, NoRealOptimum, Result};
pub use fock::{Mode, ModeDims, ModeOperators, QOperator};
pub use liouville::{build_liouvillian, expectation, g2_zero, steady_state, DensityMatrix, Liouvillian};
pub use model::{
    build_collapse_ops, build_effective_hamiltonian, build_hamiltonian, CollapseOp, MechanicalBath,
    SystemParams,
};
pub use num_complex::Complex64 as C64;
pub use sweep::{solve_point, PointSummary};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
