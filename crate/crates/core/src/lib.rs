//! Classification and verification of linear-fractional difference equations
//!
//! ```text
//! x_n = (alpha + sum_i beta_i x_{n-i}) / (A + sum_j B_j x_{n-j})
//! ```
//!
//! with nonnegative parameters, by the periodic trichotomy they satisfy:
//! convergence to equilibrium, convergence to a periodic solution, or
//! existence of unbounded solutions. Arithmetic is exact throughout unless a
//! simulation is configured otherwise.

pub mod classifier;
pub mod dynamics;
pub mod equation;
pub mod ics;
pub mod number_theory;
pub mod ratio;
pub mod reductions;
pub mod scalar;
pub mod surd;
pub mod verify;

pub use classifier::{classify, Classification, Family, OddLagShape, Regime, T4Case, Verdict};
pub use equation::{
    equilibria, index_profile, step, Equation, EquationError, IndexProfile, StepError,
};
pub use ics::InitialConditions;
pub use ratio::{format_ratio, parse_ratio, Ratio};
pub use scalar::Scalar;
pub use surd::QuadSurd;
