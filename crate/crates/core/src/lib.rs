//! Q-learning for Markov decision processes whose state observations arrive
//! late. The learner keeps a tabular model, propagates a belief over the
//! current state through the actions taken since the last observation, and
//! acts on the belief-weighted action values.
//!
//! The numeric core ([`mdp`], [`belief`], [`analysis`]) is generic over
//! [`Scalar`]; agents and environments run in `f64`.

pub mod agents;
pub mod analysis;
pub mod belief;
pub mod channel;
pub mod env;
mod error;
pub mod mdp;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type TabularModel64 = mdp::TabularModel<f64>;
pub type TabularModel32 = mdp::TabularModel<f32>;
pub type Belief64 = belief::Belief<f64>;
pub type Belief32 = belief::Belief<f32>;
pub type TrueMdp64 = mdp::TrueMdp<f64>;
pub type AugmentedMdp64 = analysis::AugmentedMdp<f64>;
