//! Experiment runner for delayed-observation learners: configuration,
//! seeded episode loops through the delay channel, moving-average
//! summaries, CSV and SVG output, and the randomized verification suites.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod stats;
pub mod verify;

pub use config::{EnvKind, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use experiment::{
    compare, run_episode, run_experiment, run_iteration, EpisodeLog, ExperimentResult,
};
