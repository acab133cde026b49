use super::{argmax, MdpSpec, TransitionKernel};
use crate::error::{check_index, Result};
use crate::scalar::Scalar;

/// Counted model of a finite MDP together with the estimates and value
/// tables derived from it.
///
/// Transition counts and `p_hat` are stored as sorted sparse rows per
/// `(s, a)`: a learner only ever sees a handful of successors per pair, and
/// large augmented spaces would not fit as dense `(s, a, s')` tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularModel<T> {
    spec: MdpSpec<T>,
    visits: Vec<u64>,
    transitions: Vec<Vec<(usize, u64)>>,
    reward_sums: Vec<T>,
    p_hat: Vec<Vec<(usize, T)>>,
    r_hat: Vec<T>,
    q: Vec<T>,
    v: Vec<T>,
    recorded: u64,
}

impl<T: Scalar> TabularModel<T> {
    /// All counts, estimates and Q values start at zero.
    pub fn new(spec: MdpSpec<T>) -> Self {
        let n_sa = spec.num_states * spec.num_actions;
        Self {
            spec,
            visits: vec![0; n_sa],
            transitions: vec![Vec::new(); n_sa],
            reward_sums: vec![T::zero(); n_sa],
            p_hat: vec![Vec::new(); n_sa],
            r_hat: vec![T::zero(); n_sa],
            q: vec![T::zero(); n_sa],
            v: vec![T::zero(); spec.num_states],
            recorded: 0,
        }
    }

    pub fn spec(&self) -> &MdpSpec<T> {
        &self.spec
    }

    pub fn num_states(&self) -> usize {
        self.spec.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.spec.num_actions
    }

    pub fn record_transition(&mut self, s: usize, a: usize, s_next: usize, r: T) -> Result<()> {
        check_index("state", s, self.spec.num_states)?;
        check_index("action", a, self.spec.num_actions)?;
        check_index("next state", s_next, self.spec.num_states)?;
        let i = self.spec.sa(s, a);
        self.visits[i] += 1;
        self.reward_sums[i] += r;
        let row = &mut self.transitions[i];
        match row.binary_search_by_key(&s_next, |&(k, _)| k) {
            Ok(pos) => row[pos].1 += 1,
            Err(pos) => row.insert(pos, (s_next, 1)),
        }
        self.recorded += 1;
        Ok(())
    }

    /// Recomputes `p_hat = P / max(1, N)` and `r_hat = R / max(1, N)`.
    pub fn refresh_estimates(&mut self) {
        for i in 0..self.visits.len() {
            let denom = T::from_count(self.visits[i].max(1));
            self.r_hat[i] = self.reward_sums[i] / denom;
            let row = &mut self.p_hat[i];
            row.clear();
            row.extend(
                self.transitions[i]
                    .iter()
                    .map(|&(s2, c)| (s2, T::from_count(c) / denom)),
            );
        }
    }

    /// Total number of `record_transition` calls.
    pub fn recorded(&self) -> u64 {
        self.recorded
    }

    pub fn visits(&self, s: usize, a: usize) -> u64 {
        self.visits[self.spec.sa(s, a)]
    }

    pub fn state_visits(&self, s: usize) -> u64 {
        let na = self.spec.num_actions;
        self.visits[s * na..(s + 1) * na].iter().sum()
    }

    pub fn total_visits(&self) -> u64 {
        self.recorded
    }

    pub fn transition_count(&self, s: usize, a: usize, s_next: usize) -> u64 {
        let row = &self.transitions[self.spec.sa(s, a)];
        row.binary_search_by_key(&s_next, |&(k, _)| k)
            .map(|pos| row[pos].1)
            .unwrap_or(0)
    }

    pub fn transition_row(&self, s: usize, a: usize) -> &[(usize, u64)] {
        &self.transitions[self.spec.sa(s, a)]
    }

    pub fn reward_sum(&self, s: usize, a: usize) -> T {
        self.reward_sums[self.spec.sa(s, a)]
    }

    pub fn p_hat(&self, s: usize, a: usize, s_next: usize) -> T {
        let row = &self.p_hat[self.spec.sa(s, a)];
        row.binary_search_by_key(&s_next, |&(k, _)| k)
            .map(|pos| row[pos].1)
            .unwrap_or_else(|_| T::zero())
    }

    /// Non-zero entries of `p_hat(s, a, ·)` in ascending successor order.
    pub fn p_hat_row(&self, s: usize, a: usize) -> &[(usize, T)] {
        &self.p_hat[self.spec.sa(s, a)]
    }

    /// Dense copy of `p_hat`; only sensible for small state spaces.
    pub fn p_hat_dense(&self) -> super::DenseTransitions<T> {
        let (ns, na) = (self.spec.num_states, self.spec.num_actions);
        let mut dense = super::DenseTransitions::zeros(ns, na);
        for s in 0..ns {
            for a in 0..na {
                let row = dense.row_mut(s, a);
                for &(s2, p) in self.p_hat_row(s, a) {
                    row[s2] = p;
                }
            }
        }
        dense
    }

    pub fn r_hat(&self, s: usize, a: usize) -> T {
        self.r_hat[self.spec.sa(s, a)]
    }

    pub fn q(&self, s: usize, a: usize) -> T {
        self.q[self.spec.sa(s, a)]
    }

    /// Row-major `(s, a)` Q table.
    pub fn q_table(&self) -> &[T] {
        &self.q
    }

    pub fn q_row(&self, s: usize) -> &[T] {
        let na = self.spec.num_actions;
        &self.q[s * na..(s + 1) * na]
    }

    pub fn v(&self) -> &[T] {
        &self.v
    }

    /// Replaces the Q table and refreshes `v = max_a q`.
    pub fn set_q(&mut self, q: Vec<T>) {
        assert_eq!(q.len(), self.q.len(), "q table size");
        self.q = q;
        self.refresh_v();
    }

    pub(crate) fn refresh_v(&mut self) {
        let na = self.spec.num_actions;
        for (s, v) in self.v.iter_mut().enumerate() {
            let row = &self.q[s * na..(s + 1) * na];
            *v = row[argmax(row)];
        }
    }

    pub(crate) fn r_hat_table(&self) -> &[T] {
        &self.r_hat
    }

    pub(crate) fn raw_parts(&self) -> RawParts<'_, T> {
        RawParts {
            visits: &self.visits,
            transitions: &self.transitions,
            reward_sums: &self.reward_sums,
            p_hat: &self.p_hat,
            r_hat: &self.r_hat,
            q: &self.q,
            v: &self.v,
        }
    }

    pub(crate) fn from_raw(spec: MdpSpec<T>, parts: OwnedParts<T>) -> Self {
        let recorded = parts.visits.iter().sum();
        Self {
            spec,
            visits: parts.visits,
            transitions: parts.transitions,
            reward_sums: parts.reward_sums,
            p_hat: parts.p_hat,
            r_hat: parts.r_hat,
            q: parts.q,
            v: parts.v,
            recorded,
        }
    }
}

pub(crate) struct RawParts<'a, T> {
    pub visits: &'a [u64],
    pub transitions: &'a [Vec<(usize, u64)>],
    pub reward_sums: &'a [T],
    pub p_hat: &'a [Vec<(usize, T)>],
    pub r_hat: &'a [T],
    pub q: &'a [T],
    pub v: &'a [T],
}

pub(crate) struct OwnedParts<T> {
    pub visits: Vec<u64>,
    pub transitions: Vec<Vec<(usize, u64)>>,
    pub reward_sums: Vec<T>,
    pub p_hat: Vec<Vec<(usize, T)>>,
    pub r_hat: Vec<T>,
    pub q: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> TransitionKernel<T> for TabularModel<T> {
    fn num_states(&self) -> usize {
        self.spec.num_states
    }

    fn num_actions(&self) -> usize {
        self.spec.num_actions
    }

    fn accumulate_row(&self, s: usize, a: usize, weight: T, out: &mut [T]) -> usize {
        let row = self.p_hat_row(s, a);
        for &(s2, p) in row {
            out[s2] += weight * p;
        }
        row.len()
    }

    fn prob(&self, s: usize, a: usize, s_next: usize) -> T {
        self.p_hat(s, a, s_next)
    }
}
