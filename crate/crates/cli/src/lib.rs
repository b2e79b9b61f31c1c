//! Config-driven front end for `greenbc`: problem files, CSV sampling and the
//! verification suites.

pub mod config;
pub mod run;

pub use config::{ConfigError, Problem, ProblemConfig};
pub use run::{cmd_green, cmd_solve, cmd_verify, CliError, Outcome, RunOptions, RunReport};
