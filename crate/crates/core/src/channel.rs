//! Observation pipe between an environment and an agent: each observation is
//! delayed independently, may overtake earlier ones, and everything still in
//! flight is delivered when an episode ends.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};

/// `(state, reward, done)` generated at step `timestamp`, deliverable from
/// step `arrival` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayedObservation {
    pub timestamp: u64,
    pub state: usize,
    /// Reward of the transition that produced `state`.
    pub reward: f64,
    pub done: bool,
    pub arrival: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayModel {
    Constant(u32),
    /// `P(delay = k) = (1 - p) p^(k-1)` for `k >= 1`; mean `1 / (1 - p)`.
    Geometric(f64),
}

impl DelayModel {
    pub fn geometric(p: f64) -> Result<Self> {
        if (0.0..1.0).contains(&p) {
            Ok(Self::Geometric(p))
        } else {
            Err(Error::InvalidSpec(format!(
                "geometric delay parameter {p} outside [0, 1)"
            )))
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Constant(d) => f64::from(d),
            Self::Geometric(p) => 1.0 / (1.0 - p),
        }
    }
}

impl std::fmt::Display for DelayModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(d) => write!(f, "const({d})"),
            Self::Geometric(p) => write!(f, "geom({p})"),
        }
    }
}

pub fn sample_delay<R: Rng + ?Sized>(model: &DelayModel, rng: &mut R) -> u64 {
    match *model {
        DelayModel::Constant(d) => u64::from(d),
        DelayModel::Geometric(p) => {
            // rand_distr counts failures before the first success.
            let failures = Geometric::new(1.0 - p).expect("validated parameter");
            1 + failures.sample(rng)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Channel<R> {
    pending: Vec<DelayedObservation>,
    delay_model: DelayModel,
    rng: R,
}

impl<R: RngCore> Channel<R> {
    pub fn new(delay_model: DelayModel, rng: R) -> Self {
        Self {
            pending: Vec::new(),
            delay_model,
            rng,
        }
    }

    pub fn delay_model(&self) -> &DelayModel {
        &self.delay_model
    }

    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    /// Enqueues an observation generated at `now`.
    pub fn send(
        &mut self,
        timestamp: u64,
        state: usize,
        reward: f64,
        done: bool,
        now: u64,
    ) -> Result<()> {
        if timestamp != now {
            return Err(Error::TimestampMismatch { timestamp, now });
        }
        if self.pending.iter().any(|o| o.timestamp == timestamp) {
            return Err(Error::DuplicateTimestamp(timestamp));
        }
        let arrival = now + sample_delay(&self.delay_model, &mut self.rng);
        self.pending.push(DelayedObservation {
            timestamp,
            state,
            reward,
            done,
            arrival,
        });
        Ok(())
    }

    /// Removes and returns everything that has arrived by `now`, ordered by
    /// timestamp.
    pub fn poll(&mut self, now: u64) -> Vec<DelayedObservation> {
        let mut out = Vec::new();
        self.pending.retain(|o| {
            if o.arrival <= now {
                out.push(*o);
                false
            } else {
                true
            }
        });
        out.sort_by_key(|o| o.timestamp);
        out
    }

    /// Delivers everything still in flight, ordered by timestamp.
    pub fn flush(&mut self) -> Vec<DelayedObservation> {
        let mut out = std::mem::take(&mut self.pending);
        out.sort_by_key(|o| o.timestamp);
        out
    }
}
