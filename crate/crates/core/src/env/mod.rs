//! Benchmark tasks behind one contract: the Frozen Lake grid and a
//! discretized Cart Pole.

mod cart_pole;
mod discretize;
mod frozen_lake;

pub use cart_pole::{CartPole, CartPoleParams, PhysicalState, PUSH_LEFT, PUSH_RIGHT};
pub use discretize::Discretizer;
pub use frozen_lake::{Cell, FrozenLake, DOWN, LEFT, RIGHT, STANDARD_8X8, UP};

use rand::RngCore;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvStep {
    pub next_state: usize,
    pub reward: f64,
    pub done: bool,
}

pub trait Environment: Send {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    fn r_max(&self) -> f64;
    /// Starts a new episode and returns the initial state id.
    fn reset(&mut self, rng: &mut dyn RngCore) -> usize;
    /// Fails when called after the episode ended.
    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<EnvStep>;
}
