use crate::channel::DelayedObservation;

/// What an arrived observation told the agent about one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Known {
    pub state: usize,
    /// Reward of the transition into `state`.
    pub reward: f64,
    pub done: bool,
}

/// A completed `(s_k, a_k, r_k, s_{k+1})` tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub timestamp: usize,
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
    pub done: bool,
}

/// The agent's knowledge within one episode: which steps have been
/// observed, every action it took, and the freshest known state.
///
/// Timestamp `t` is the state before the agent's `t`-th action; the start
/// state (timestamp 0) is always known.
#[derive(Debug, Clone, Default)]
pub struct AgentView {
    known: Vec<Option<Known>>,
    actions: Vec<usize>,
    last_known: usize,
    stale: u64,
}

impl AgentView {
    pub fn begin(&mut self, initial_state: usize) {
        self.known.clear();
        self.known.push(Some(Known {
            state: initial_state,
            reward: 0.0,
            done: false,
        }));
        self.actions.clear();
        self.last_known = 0;
    }

    /// Current step: the number of actions taken this episode.
    pub fn now(&self) -> usize {
        self.actions.len()
    }

    pub fn push_action(&mut self, a: usize) {
        self.actions.push(a);
    }

    pub fn last_known_timestamp(&self) -> usize {
        self.last_known
    }

    pub fn last_known_state(&self) -> usize {
        self.known[self.last_known]
            .expect("last known step is observed")
            .state
    }

    /// Actions taken after the last known state, oldest first.
    pub fn action_log(&self) -> &[usize] {
        &self.actions[self.last_known..]
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn known(&self, t: usize) -> Option<&Known> {
        self.known.get(t).and_then(Option::as_ref)
    }

    pub fn state_at(&self, t: usize) -> Option<usize> {
        self.known(t).map(|k| k.state)
    }

    /// Arrivals ignored because their timestamp was already observed.
    pub fn stale_arrivals(&self) -> u64 {
        self.stale
    }

    /// Records an arrival and appends every transition tuple it completes.
    ///
    /// An observation at `k` completes `k-1 -> k` when `k-1` is known and
    /// `k -> k+1` when `k+1` arrived earlier, so each tuple is produced
    /// exactly once whatever the arrival order.
    pub fn accept(&mut self, obs: &DelayedObservation, out: &mut Vec<Transition>) {
        let k = obs.timestamp as usize;
        if self.known(k).is_some() {
            self.stale += 1;
            return;
        }
        if self.known.len() <= k {
            self.known.resize(k + 1, None);
        }
        self.known[k] = Some(Known {
            state: obs.state,
            reward: obs.reward,
            done: obs.done,
        });
        if k > 0 {
            if let Some(t) = self.tuple(k - 1) {
                out.push(t);
            }
        }
        if let Some(t) = self.tuple(k) {
            out.push(t);
        }
        if k > self.last_known {
            self.last_known = k;
        }
    }

    fn tuple(&self, k: usize) -> Option<Transition> {
        let from = self.known(k)?;
        let to = self.known(k + 1)?;
        let action = *self.actions.get(k)?;
        Some(Transition {
            timestamp: k,
            state: from.state,
            action,
            reward: to.reward,
            next_state: to.state,
            done: to.done,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(timestamp: u64, state: usize) -> DelayedObservation {
        DelayedObservation {
            timestamp,
            state,
            reward: timestamp as f64,
            done: false,
            arrival: 0,
        }
    }

    #[test]
    fn in_order_arrivals() {
        let mut v = AgentView::default();
        v.begin(7);
        v.push_action(1);
        v.push_action(0);
        assert_eq!(v.action_log(), &[1, 0]);
        let mut out = Vec::new();
        v.accept(&obs(1, 3), &mut out);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].state, out[0].action, out[0].next_state), (7, 1, 3));
        assert_eq!(v.last_known_state(), 3);
        assert_eq!(v.action_log(), &[0]);
        assert_eq!(v.action_log().len(), v.now() - v.last_known_timestamp());
    }

    #[test]
    fn out_of_order_pair_forms_both_tuples_once() {
        let mut v = AgentView::default();
        v.begin(0);
        v.push_action(0);
        v.push_action(1);
        let mut out = Vec::new();
        v.accept(&obs(2, 5), &mut out);
        assert!(out.is_empty());
        assert_eq!(v.last_known_state(), 5);
        v.accept(&obs(1, 4), &mut out);
        let ts: Vec<usize> = out.iter().map(|t| t.timestamp).collect();
        assert_eq!(ts, [0, 1]);
        assert_eq!(out[1].reward, 2.0);
        assert_eq!(v.last_known_timestamp(), 2);

        v.accept(&obs(1, 4), &mut out);
        assert_eq!(out.len(), 2);
        assert_eq!(v.stale_arrivals(), 1);
    }
}
