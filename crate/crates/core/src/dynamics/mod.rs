//! Simulation and finite-horizon diagnostics.

pub mod cycle;
pub mod envelope;
mod kernel;
pub mod monitor;
pub mod positivity;
pub mod random;
pub mod simulate;
pub mod witness;

pub use cycle::{
    certify_prime_period, default_window, detect_cycle, divisors, CycleCertificate, CycleError,
    PeriodReport, DEFAULT_TOLERANCE,
};
pub use envelope::{all_phases, envelope, Envelope, EnvelopeError, EnvelopeVariant};
pub use monitor::{
    a_priori_bound, bound_report, clamp_monitor, rounding_slack, run_monitor, BoundKind,
    BoundReport, Monitor, MonitorError, MonitorOutcome, MonitorResult,
};
pub use positivity::{positivity_classes, ClassStatus, PositivityError, PositivityReport};
pub use random::{random_ratio, random_shape, IcSampler};
pub use simulate::{
    simulate, simulate_in_field, write_csv, Arithmetic, Orbit, SimulationConfig, SimulationError,
    Trajectory, DEFAULT_BIT_BUDGET, DEFAULT_PRECISION_BITS, DEFAULT_STEPS,
};
pub use witness::{default_witness_grid, unbounded_witness_search, Witness};
