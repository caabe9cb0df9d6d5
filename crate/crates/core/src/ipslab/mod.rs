//! Continuous-time Monte Carlo for the contact process (standard and
//! threshold births) and the voter model with its coalescing walk dual.
//!
//! Trial `k` of a run with master seed `s` draws from its own ChaCha stream
//! `(s, k)`, and results are collected in trial order, so a fixed seed gives
//! bit-identical output whatever the thread count.

mod config;
mod contact;
mod rng;
mod stats;
mod voter;

use thiserror::Error;

pub use config::{write_csv, ExperimentConfig};
pub use contact::{
    estimate_survival, right_edge_speed, simulate_contact, simulate_contact_fixed_step, simulate_contact_with,
    simulate_right_edge, ContactConfig, ContactMode, ContactTrajectory, EdgeSpeed, SurvivalEstimate,
    EDGE_FIT_POINTS,
};
pub use rng::{exp_time, trial_rng};
pub use stats::{ls_slope, mean_var, wilson_interval, TrialStats, Z95};
pub use voter::{
    coalescing_walkers, duality_check, simulate_voter, simulate_voter_with, DualityCheck, SimpleGraph, VoterConfig,
    VoterOutcome,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{0}")]
    Argument(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}
