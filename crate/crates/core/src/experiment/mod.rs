//! Configuration, sweeps, the built-in toy model and transition finding.

pub mod check;
pub mod config;
pub mod sweep;
pub mod toy;
pub mod transitions;

pub use config::Config;
pub use sweep::{grid, sweep, SweepFailure, SweepRecord};
pub use toy::{toy_config, toy_pipeline_ps, toy_ps_closed_form, ToyReport};
pub use transitions::{find_transitions, sign_runs, Direction, SignRun, Transition};
