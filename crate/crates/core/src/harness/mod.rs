//! Experiment runner: capacity curves, weight equilibration, the inequality
//! checks and the random self-test suite.

pub mod checks;
pub mod config;
pub mod curve;
pub mod suite;

pub use checks::{check_copolar_add, check_volume_reverse_bm, run_checks, CheckOutcome};
pub use config::{ExperimentConfig, SetFile, Tolerances, Weights};
pub use curve::{
    check_concavity, check_logconvexity, check_weighted_bm, equilibrate_weights,
    run_capacity_curve, CapacityReport, CapacityRow,
};
