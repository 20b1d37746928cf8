//! Command implementations behind the `trichotomy` binary.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec;

pub use commands::{
    cmd_classify, cmd_construct, cmd_simulate, cmd_sweep, cmd_verify, write_sweep_csv, ModeArg,
    RunOptions, SweepGrid, SweepParam, SweepRow,
};
pub use error::{CliError, ExitStatus};
pub use report::{PeriodSummary, RunReport};
pub use spec::{Constructor, EquationSpec};
