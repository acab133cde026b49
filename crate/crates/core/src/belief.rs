//! Conditional distribution of the unobserved current state given the last
//! known state and the actions taken since, and the action rule built on it.

use crate::error::{check_index, Result};
use crate::mdp::{argmax, TransitionKernel};
use crate::scalar::Scalar;

/// Mass below which a propagated belief is treated as empty.
pub const DEGENERATE_MASS: f64 = 1e-12;

/// Non-negative, possibly sub-stochastic vector over states.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief<T> {
    probs: Vec<T>,
    mass: T,
}

impl<T: Scalar> Belief<T> {
    pub fn one_hot(s: usize, num_states: usize) -> Result<Self> {
        check_index("state", s, num_states)?;
        let mut probs = vec![T::zero(); num_states];
        probs[s] = T::one();
        Ok(Self {
            probs,
            mass: T::one(),
        })
    }

    pub fn uniform(num_states: usize) -> Self {
        let p = T::one() / T::from_usize(num_states).expect("state count");
        Self {
            probs: vec![p; num_states],
            mass: T::one(),
        }
    }

    /// Wraps an arbitrary non-negative vector.
    pub fn from_probs(probs: Vec<T>) -> Self {
        debug_assert!(probs.iter().all(|&p| p >= T::zero()));
        let mass = probs.iter().copied().sum();
        Self { probs, mass }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Most likely state, lowest index on ties.
    pub fn most_likely(&self) -> usize {
        argmax(&self.probs)
    }
}

/// `out[s'] = sum_s b[s] p(s, a, s')`. No renormalization.
pub fn propagate<T: Scalar, K: TransitionKernel<T> + ?Sized>(
    b: &Belief<T>,
    kernel: &K,
    a: usize,
) -> Belief<T> {
    propagate_counted(b, kernel, a).0
}

/// [`propagate`], also returning the number of multiply-adds performed.
pub fn propagate_counted<T: Scalar, K: TransitionKernel<T> + ?Sized>(
    b: &Belief<T>,
    kernel: &K,
    a: usize,
) -> (Belief<T>, usize) {
    let ns = kernel.num_states();
    debug_assert_eq!(b.len(), ns);
    let mut out = vec![T::zero(); ns];
    let mut ops = 0;
    for (s, &w) in b.probs.iter().enumerate() {
        ops += kernel.accumulate_row(s, a, w, &mut out);
    }
    (Belief::from_probs(out), ops)
}

/// `out[a] = sum_s b[s] q(s, a)` for a row-major `(s, a)` table.
pub fn expected_q<T: Scalar>(b: &Belief<T>, q: &[T], num_actions: usize) -> Vec<T> {
    debug_assert_eq!(q.len(), b.len() * num_actions);
    let mut out = vec![T::zero(); num_actions];
    for (s, &w) in b.probs.iter().enumerate() {
        let row = &q[s * num_actions..(s + 1) * num_actions];
        for (o, &qv) in out.iter_mut().zip(row) {
            *o += w * qv;
        }
    }
    out
}

/// Belief over the current state after applying `action_log` in
/// chronological order to `one_hot(s_known)`. Returns the propagated
/// (unrepaired) belief and the multiply-adds spent.
pub fn belief_after<T: Scalar, K: TransitionKernel<T> + ?Sized>(
    s_known: usize,
    action_log: &[usize],
    kernel: &K,
) -> Result<(Belief<T>, usize)> {
    let mut b = Belief::one_hot(s_known, kernel.num_states())?;
    let mut ops = 0;
    for &a in action_log {
        check_index("action", a, kernel.num_actions())?;
        let (next, n) = propagate_counted(&b, kernel, a);
        b = next;
        ops += n;
    }
    Ok((b, ops))
}

/// Replaces a belief whose mass vanished (propagation through unvisited
/// rows) by the uniform distribution.
pub fn repair_degenerate<T: Scalar>(b: Belief<T>) -> Belief<T> {
    if b.mass() < T::lit(DEGENERATE_MASS) {
        Belief::uniform(b.len())
    } else {
        b
    }
}

/// Action maximizing the belief-weighted Q value.
pub fn get_emql_action<T: Scalar, K: TransitionKernel<T> + ?Sized>(
    s_known: usize,
    action_log: &[usize],
    kernel: &K,
    q: &[T],
) -> Result<usize> {
    get_emql_action_counted(s_known, action_log, kernel, q).map(|(a, _)| a)
}

/// [`get_emql_action`], also returning the multiply-adds spent on
/// propagation.
pub fn get_emql_action_counted<T: Scalar, K: TransitionKernel<T> + ?Sized>(
    s_known: usize,
    action_log: &[usize],
    kernel: &K,
    q: &[T],
) -> Result<(usize, usize)> {
    let (b, ops) = belief_after(s_known, action_log, kernel)?;
    let b = repair_degenerate(b);
    let eq = expected_q(&b, q, kernel.num_actions());
    Ok((argmax(&eq), ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::DenseTransitions;

    /// s -> s+1 (mod n) under action 0, stay under action 1.
    fn shift_chain(n: usize) -> DenseTransitions<f64> {
        let mut k = DenseTransitions::zeros(n, 2);
        for s in 0..n {
            k.row_mut(s, 0)[(s + 1) % n] = 1.0;
            k.row_mut(s, 1)[s] = 1.0;
        }
        k
    }

    #[test]
    fn one_hot_basics() {
        let b = Belief::<f64>::one_hot(2, 4).unwrap();
        assert_eq!(b.probs(), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(b.mass(), 1.0);
        assert_eq!(Belief::<f64>::one_hot(0, 1).unwrap().probs(), &[1.0]);
        assert!(Belief::<f64>::one_hot(4, 4).is_err());
    }

    #[test]
    fn deterministic_propagation_moves_mass() {
        let k = shift_chain(4);
        let b = Belief::one_hot(0, 4).unwrap();
        assert_eq!(propagate(&b, &k, 0), Belief::one_hot(1, 4).unwrap());
    }

    #[test]
    fn unvisited_row_drains_mass() {
        let k = DenseTransitions::<f64>::zeros(3, 1);
        let out = propagate(&Belief::one_hot(1, 3).unwrap(), &k, 0);
        assert_eq!(out.mass(), 0.0);
        assert!(out.probs().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn expected_q_of_one_hot_is_row() {
        let q = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = Belief::one_hot(1, 2).unwrap();
        assert_eq!(expected_q(&b, &q, 3), vec![4.0, 5.0, 6.0]);
        let u = Belief::uniform(2);
        assert_eq!(expected_q(&u, &q, 3), vec![2.5, 3.5, 4.5]);
    }

    #[test]
    fn empty_log_is_greedy() {
        let k = shift_chain(3);
        let q = [0.0, 1.0, 5.0, 2.0, 0.0, 0.0];
        assert_eq!(get_emql_action(1, &[], &k, &q).unwrap(), 0);
        assert_eq!(get_emql_action(0, &[], &k, &q).unwrap(), 1);
    }

    #[test]
    fn two_step_log_looks_ahead() {
        let k = shift_chain(3);
        // greedy action at state 2 is 1
        let q = [5.0, 0.0, 5.0, 0.0, 0.0, 1.0];
        assert_eq!(get_emql_action(0, &[0, 0], &k, &q).unwrap(), 1);
    }

    #[test]
    fn degenerate_belief_falls_back_to_uniform() {
        let k = DenseTransitions::<f64>::zeros(2, 2);
        // uniform expectation: a0 -> 1.5, a1 -> 2.0
        let q = [3.0, 0.0, 0.0, 4.0];
        assert_eq!(get_emql_action(0, &[0], &k, &q).unwrap(), 1);
    }

    #[test]
    fn dense_ops_are_d_times_s_squared() {
        let k = shift_chain(5);
        let q = [0.0; 10];
        let (_, ops) = get_emql_action_counted(0, &[0, 1, 0], &k, &q).unwrap();
        assert_eq!(ops, 3 * 25);
    }
}
