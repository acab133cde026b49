use rand::RngCore;

use super::{epsilon, Agent, AgentKind, AgentParams, AgentView, Transition};
use crate::channel::DelayedObservation;
use crate::error::Result;
use crate::mdp::{argmax, MdpSpec};

/// Memoryless delayed Q-learning: acts greedily on the stale last known
/// state and learns model-free from tuples as they complete.
///
/// Visit counts are kept only to drive the shared exploration schedule.
#[derive(Debug, Clone)]
pub struct DelayedQ {
    spec: MdpSpec<f64>,
    alpha: f64,
    q: Vec<f64>,
    visits: Vec<u64>,
    total: u64,
    view: AgentView,
    params: AgentParams,
    scratch: Vec<Transition>,
}

impl DelayedQ {
    pub fn new(spec: MdpSpec<f64>, params: AgentParams) -> Self {
        let n = spec.num_states * spec.num_actions;
        Self {
            spec,
            alpha: params.alpha,
            q: vec![0.0; n],
            visits: vec![0; n],
            total: 0,
            view: AgentView::default(),
            params,
            scratch: Vec::new(),
        }
    }

    pub fn q_table(&self) -> &[f64] {
        &self.q
    }

    pub fn q_row(&self, s: usize) -> &[f64] {
        let na = self.spec.num_actions;
        &self.q[s * na..(s + 1) * na]
    }

    /// `q(s,a) <- (1 - alpha) q(s,a) + alpha (r + gamma max_a' q(s',a'))`.
    pub fn update(&mut self, t: &Transition) {
        let target_row = self.q_row(t.next_state);
        let target = t.reward + self.spec.gamma * target_row[argmax(target_row)];
        let i = self.spec.sa(t.state, t.action);
        self.q[i] = (1.0 - self.alpha) * self.q[i] + self.alpha * target;
        self.visits[i] += 1;
        self.total += 1;
    }

    fn state_visits(&self, s: usize) -> u64 {
        let na = self.spec.num_actions;
        self.visits[s * na..(s + 1) * na].iter().sum()
    }
}

impl Agent for DelayedQ {
    fn kind(&self) -> AgentKind {
        AgentKind::Dq
    }

    fn begin_episode(&mut self, initial_state: usize) -> Result<()> {
        crate::error::check_index("state", initial_state, self.spec.num_states)?;
        self.view.begin(initial_state);
        Ok(())
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> usize {
        let s = self.view.last_known_state();
        let scheduled = || epsilon(self.total, self.state_visits(s), self.spec.num_states);
        let a = match self.params.explore(rng, scheduled, self.spec.num_actions) {
            Some(a) => a,
            None => self.params.greedy(rng, self.q_row(s)),
        };
        self.view.push_action(a);
        a
    }

    fn ingest(&mut self, arrivals: &[DelayedObservation]) {
        let mut formed = std::mem::take(&mut self.scratch);
        formed.clear();
        for obs in arrivals {
            self.view.accept(obs, &mut formed);
        }
        for t in &formed {
            self.update(t);
        }
        self.scratch = formed;
    }

    fn end_episode(&mut self) {}

    fn view(&self) -> &AgentView {
        &self.view
    }

    fn transitions_recorded(&self) -> u64 {
        self.total
    }

    fn table_states(&self) -> usize {
        self.spec.num_states
    }
}
