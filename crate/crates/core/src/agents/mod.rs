//! Decision makers behind one contract: the belief-weighted learner (EMQL),
//! the most-likely-state baseline (MBS), the augmented-state learner (EMDP)
//! and the memoryless delayed Q-learner (dQ).

mod augmented;
mod belief_agent;
mod dq;
mod emdp;
mod view;

pub use augmented::{augmented_size, AugmentedCodec, AugmentedState};
pub use belief_agent::{BeliefAgent, BeliefRule};
pub use dq::DelayedQ;
pub use emdp::AugmentedAgent;
pub use view::{AgentView, Known, Transition};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};

use crate::channel::{DelayModel, DelayedObservation};
use crate::error::{Error, Result};
use crate::mdp::{argmax, q_sweep, value_iteration, MdpSpec, TabularModel};

/// Exploration rate from visit counts:
/// `ln(|S| * total + 1) / (state_count + 1)`.
///
/// `total` is the number of recorded transitions and `state_count` the
/// visits of the reference state summed over actions. Callers clamp to 1
/// before sampling.
pub fn epsilon(total_count: u64, state_count: u64, num_states: usize) -> f64 {
    (num_states as f64 * total_count as f64 + 1.0).ln() / (state_count as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    Emql,
    Emdp,
    Mbs,
    Dq,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [
        AgentKind::Emql,
        AgentKind::Mbs,
        AgentKind::Dq,
        AgentKind::Emdp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Emql => "emql",
            AgentKind::Emdp => "emdp",
            AgentKind::Mbs => "mbs",
            AgentKind::Dq => "dq",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "emql" => Ok(AgentKind::Emql),
            "emdp" => Ok(AgentKind::Emdp),
            "mbs" => Ok(AgentKind::Mbs),
            "dq" => Ok(AgentKind::Dq),
            other => Err(Error::Config(format!("unknown agent kind `{other}`"))),
        }
    }
}

/// What the model-based agents do at each episode boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Planner {
    /// Refresh estimates, then one synchronous Q sweep.
    Sweep,
    /// Refresh estimates, then sweep to tolerance 1e-8 (at most 1000 sweeps).
    Converge,
}

impl FromStr for Planner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sweep" => Ok(Planner::Sweep),
            "converge" => Ok(Planner::Converge),
            other => Err(Error::Config(format!("unknown planner `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exploration {
    /// Count-based schedule from [`epsilon`].
    Schedule,
    /// Fixed rate, mostly for tests.
    Fixed(f64),
}

/// How the greedy step resolves equal action values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Lowest action index.
    Lowest,
    /// Uniform among the tied actions, drawn from the agent's stream.
    Random,
}

impl FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lowest" => Ok(TieBreak::Lowest),
            "random" => Ok(TieBreak::Random),
            other => Err(Error::Config(format!("unknown tie rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentParams {
    pub gamma: f64,
    /// Learning rate of the dQ baseline.
    pub alpha: f64,
    pub planner: Planner,
    pub exploration: Exploration,
    pub ties: TieBreak,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            gamma: 0.95,
            alpha: 0.1,
            planner: Planner::Sweep,
            exploration: Exploration::Schedule,
            ties: TieBreak::Random,
        }
    }
}

impl AgentParams {
    /// Draws the exploration coin and, on success, a uniform action. The
    /// coin is always drawn so every agent consumes randomness identically.
    pub(crate) fn explore(
        &self,
        rng: &mut dyn RngCore,
        scheduled: impl FnOnce() -> f64,
        num_actions: usize,
    ) -> Option<usize> {
        let eps = match self.exploration {
            Exploration::Schedule => scheduled(),
            Exploration::Fixed(e) => e,
        }
        .clamp(0.0, 1.0);
        let coin: f64 = rng.random();
        (coin < eps).then(|| rng.random_range(0..num_actions))
    }

    /// Greedy choice over `values` under the configured tie rule. A draw is
    /// made only when several actions share the maximum.
    pub(crate) fn greedy(&self, rng: &mut dyn RngCore, values: &[f64]) -> usize {
        let best = argmax(values);
        if self.ties == TieBreak::Lowest {
            return best;
        }
        let tied = values.iter().filter(|&&v| v == values[best]).count();
        if tied == 1 {
            return best;
        }
        let k = rng.random_range(0..tied);
        values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == values[best])
            .nth(k)
            .map_or(best, |(i, _)| i)
    }
}

/// Contract between the experiment loop and a decision maker.
///
/// Per episode: `begin_episode` with the synchronously observed start
/// state, then alternating `act` / `ingest`, then `end_episode` after the
/// channel flush.
pub trait Agent: Send {
    fn kind(&self) -> AgentKind;
    fn begin_episode(&mut self, initial_state: usize) -> Result<()>;
    /// Picks the action for the current step and appends it to the log.
    fn act(&mut self, rng: &mut dyn RngCore) -> usize;
    fn ingest(&mut self, arrivals: &[DelayedObservation]);
    fn end_episode(&mut self);

    fn view(&self) -> &AgentView;
    /// Transition tuples learned from so far.
    fn transitions_recorded(&self) -> u64;
    /// Number of states indexing the agent's value tables.
    fn table_states(&self) -> usize;
}

/// Builds an agent for an environment with `num_states` x `num_actions`.
pub fn build_agent(
    kind: AgentKind,
    num_states: usize,
    num_actions: usize,
    r_max: f64,
    delay: &DelayModel,
    params: AgentParams,
) -> Result<Box<dyn Agent>> {
    let spec = MdpSpec::new(num_states, num_actions, params.gamma, r_max)?;
    Ok(match kind {
        AgentKind::Emql => Box::new(BeliefAgent::new(BeliefRule::ExpectedQ, spec, params)),
        AgentKind::Mbs => Box::new(BeliefAgent::new(BeliefRule::MostLikely, spec, params)),
        AgentKind::Dq => Box::new(DelayedQ::new(spec, params)),
        AgentKind::Emdp => match *delay {
            DelayModel::Constant(d) => Box::new(AugmentedAgent::new(spec, d as usize, params)?),
            DelayModel::Geometric(_) => {
                return Err(Error::Config(
                    "emdp needs a constant delay; the augmented space is undefined for stochastic delays"
                        .into(),
                ))
            }
        },
    })
}

pub(crate) fn plan(model: &mut TabularModel<f64>, planner: Planner) {
    model.refresh_estimates();
    match planner {
        Planner::Sweep => {
            q_sweep(model);
        }
        Planner::Converge => {
            value_iteration(model, 1e-8, 1000);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_plug_in() {
        assert_eq!(epsilon(0, 0, 64), 0.0);
        let e = epsilon(63, 0, 64);
        assert!((e - 4033f64.ln()).abs() < 1e-12);
        assert!((e - 8.302).abs() < 1e-3);
        assert!(epsilon(63, 1_000_000_000, 64) < 1e-8);
    }

    #[test]
    fn kinds_parse() {
        for k in AgentKind::ALL {
            assert_eq!(k.name().parse::<AgentKind>().unwrap(), k);
        }
        assert!("sarsa".parse::<AgentKind>().is_err());
    }

    #[test]
    fn ties_are_spread_over_maximizers() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let random = AgentParams::default();
        let lowest = AgentParams {
            ties: TieBreak::Lowest,
            ..AgentParams::default()
        };
        let values = [1.0, 3.0, 0.0, 3.0, 3.0];
        let mut hits = [0usize; 5];
        for _ in 0..3000 {
            hits[random.greedy(&mut rng, &values)] += 1;
            assert_eq!(lowest.greedy(&mut rng, &values), 1);
        }
        assert_eq!(hits[0] + hits[2], 0);
        assert!(hits[1].min(hits[3]).min(hits[4]) > 900);
        // a unique maximum consumes no randomness
        let mut a = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let b = a.clone();
        assert_eq!(random.greedy(&mut a, &[0.0, 2.0, 1.0]), 1);
        assert_eq!(a, b);
        assert!("lowest".parse::<TieBreak>().is_ok() && "first".parse::<TieBreak>().is_err());
    }

    #[test]
    fn emdp_refuses_stochastic_delay() {
        let r = build_agent(
            AgentKind::Emdp,
            4,
            2,
            1.0,
            &DelayModel::Geometric(0.5),
            AgentParams::default(),
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
