use rand::RngCore;

use super::{epsilon, plan, Agent, AgentKind, AgentParams, AgentView, AugmentedCodec};
use crate::channel::DelayedObservation;
use crate::error::Result;
use crate::mdp::{MdpSpec, TabularModel};

/// Model-based learner on the augmented MDP whose states are
/// `(s_{t-d}, a_{t-d}, ..., a_{t-1})` for a constant delay `d`.
///
/// Before `d` actions exist the tail is left-padded with action 0. When an
/// episode terminates, the final tuple leads to `(s_T, 0, ..., 0)` so that
/// terminal outcomes become zero-value absorbing codes instead of being
/// aliased with ordinary augmented states.
#[derive(Debug, Clone)]
pub struct AugmentedAgent {
    codec: AugmentedCodec,
    model: TabularModel<f64>,
    view: AgentView,
    params: AgentParams,
    next_tuple: usize,
    scratch: Vec<super::Transition>,
}

impl AugmentedAgent {
    pub fn new(base: MdpSpec<f64>, delay: usize, params: AgentParams) -> Result<Self> {
        let codec = AugmentedCodec::new(base.num_states, base.num_actions, delay)?;
        let spec = MdpSpec::new(codec.num_codes(), base.num_actions, base.gamma, base.r_max)?;
        Ok(Self {
            codec,
            model: TabularModel::new(spec),
            view: AgentView::default(),
            params,
            next_tuple: 0,
            scratch: Vec::new(),
        })
    }

    pub fn codec(&self) -> &AugmentedCodec {
        &self.codec
    }

    pub fn model(&self) -> &TabularModel<f64> {
        &self.model
    }

    /// Augmented code in force at step `t`, if its base state is known.
    fn code_at(&self, t: usize) -> Option<usize> {
        let start = t.saturating_sub(self.codec.delay());
        let base = self.view.state_at(start)?;
        Some(
            self.codec
                .encode_padded(base, &self.view.actions()[start..t]),
        )
    }

    fn current_code(&self) -> usize {
        let t = self.view.now();
        self.code_at(t).unwrap_or_else(|| {
            // Only reachable if the delay was not actually constant.
            let start = self.view.last_known_timestamp();
            let end = (start + self.codec.delay()).min(t);
            self.codec.encode_padded(
                self.view.last_known_state(),
                &self.view.actions()[start..end],
            )
        })
    }

    fn drain_tuples(&mut self) {
        while self.next_tuple < self.view.now() {
            let t = self.next_tuple;
            let Some(next) = self.view.known(t + 1).copied() else {
                break;
            };
            let Some(from) = self.code_at(t) else { break };
            let to = if next.done {
                self.codec.encode_padded(next.state, &[])
            } else {
                match self.code_at(t + 1) {
                    Some(c) => c,
                    None => break,
                }
            };
            let a = self.view.actions()[t];
            self.model
                .record_transition(from, a, to, next.reward)
                .expect("augmented codes are in range");
            self.next_tuple += 1;
        }
    }
}

impl Agent for AugmentedAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Emdp
    }

    fn begin_episode(&mut self, initial_state: usize) -> Result<()> {
        crate::error::check_index("state", initial_state, self.codec.num_states())?;
        self.view.begin(initial_state);
        self.next_tuple = 0;
        Ok(())
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> usize {
        let x = self.current_code();
        let model = &self.model;
        let scheduled = || {
            epsilon(
                model.total_visits(),
                model.state_visits(x),
                model.num_states(),
            )
        };
        let a = match self.params.explore(rng, scheduled, model.num_actions()) {
            Some(a) => a,
            None => self.params.greedy(rng, model.q_row(x)),
        };
        self.view.push_action(a);
        a
    }

    fn ingest(&mut self, arrivals: &[DelayedObservation]) {
        self.scratch.clear();
        for obs in arrivals {
            self.view.accept(obs, &mut self.scratch);
        }
        self.drain_tuples();
    }

    fn end_episode(&mut self) {
        plan(&mut self.model, self.params.planner);
    }

    fn view(&self) -> &AgentView {
        &self.view
    }

    fn transitions_recorded(&self) -> u64 {
        self.model.recorded()
    }

    fn table_states(&self) -> usize {
        self.model.num_states()
    }
}
