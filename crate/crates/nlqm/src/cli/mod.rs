//! Config-driven command-line front end.

pub mod config;
pub mod output;
pub mod runner;
pub mod verify;

pub use config::RunConfig;
pub use runner::{compare_runs, run, sweep, CheckOutcome, RunReport};
pub use verify::{verify_suite, Suite};

/// Process exit codes used by the `nlqm` binary.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const CHECK_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
    pub const NUMERICAL_FAILURE: i32 = 3;
}
