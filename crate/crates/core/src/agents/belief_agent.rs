use rand::RngCore;

use super::{epsilon, plan, Agent, AgentKind, AgentParams, AgentView, Transition};
use crate::belief::{belief_after, expected_q, repair_degenerate};
use crate::channel::DelayedObservation;
use crate::error::Result;
use crate::mdp::{argmax, MdpSpec, TabularModel};

/// How a belief over the current state becomes an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeliefRule {
    /// Argmax of the belief-weighted Q row (EMQL).
    ExpectedQ,
    /// Greedy action of the single most likely state (MBS).
    MostLikely,
}

/// Model-based learner over the true state space that acts through a belief
/// propagated from the last known state.
#[derive(Debug, Clone)]
pub struct BeliefAgent {
    rule: BeliefRule,
    model: TabularModel<f64>,
    view: AgentView,
    params: AgentParams,
    scratch: Vec<Transition>,
}

impl BeliefAgent {
    pub fn new(rule: BeliefRule, spec: MdpSpec<f64>, params: AgentParams) -> Self {
        Self {
            rule,
            model: TabularModel::new(spec),
            view: AgentView::default(),
            params,
            scratch: Vec::new(),
        }
    }

    pub fn model(&self) -> &TabularModel<f64> {
        &self.model
    }

    pub fn model_mut(&mut self) -> &mut TabularModel<f64> {
        &mut self.model
    }

    /// Action scores the rule maximizes: belief-weighted Q values, or the Q
    /// row of the most likely state.
    pub fn policy_scores(&self) -> Vec<f64> {
        let (b, _) = belief_after(
            self.view.last_known_state(),
            self.view.action_log(),
            &self.model,
        )
        .expect("logged actions are in range");
        let b = repair_degenerate(b);
        match self.rule {
            BeliefRule::ExpectedQ => expected_q(&b, self.model.q_table(), self.model.num_actions()),
            BeliefRule::MostLikely => self.model.q_row(b.most_likely()).to_vec(),
        }
    }

    /// The lowest-index greedy action with exploration switched off.
    pub fn policy_action(&self) -> usize {
        argmax(&self.policy_scores())
    }
}

impl Agent for BeliefAgent {
    fn kind(&self) -> AgentKind {
        match self.rule {
            BeliefRule::ExpectedQ => AgentKind::Emql,
            BeliefRule::MostLikely => AgentKind::Mbs,
        }
    }

    fn begin_episode(&mut self, initial_state: usize) -> Result<()> {
        crate::error::check_index("state", initial_state, self.model.num_states())?;
        self.view.begin(initial_state);
        Ok(())
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> usize {
        let model = &self.model;
        let reference = self.view.last_known_state();
        let scheduled = || {
            epsilon(
                model.total_visits(),
                model.state_visits(reference),
                model.num_states(),
            )
        };
        let a = match self.params.explore(rng, scheduled, model.num_actions()) {
            Some(a) => a,
            None => self.params.greedy(rng, &self.policy_scores()),
        };
        self.view.push_action(a);
        a
    }

    fn ingest(&mut self, arrivals: &[DelayedObservation]) {
        self.scratch.clear();
        for obs in arrivals {
            self.view.accept(obs, &mut self.scratch);
        }
        for t in &self.scratch {
            self.model
                .record_transition(t.state, t.action, t.next_state, t.reward)
                .expect("observed indices are in range");
        }
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
