//! Finite-MDP representation, counted model estimation and synchronous
//! value-iteration sweeps.

mod checkpoint;
mod model;
mod planner;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use model::TabularModel;
pub use planner::{q_sweep, sweep_values, value_iteration, SweepReport};

use crate::error::{check_index, Error, Result};
use crate::scalar::Scalar;

/// Sizes, discount and reward bound of a finite MDP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpSpec<T> {
    pub num_states: usize,
    pub num_actions: usize,
    pub gamma: T,
    pub r_max: T,
}

impl<T: Scalar> MdpSpec<T> {
    pub fn new(num_states: usize, num_actions: usize, gamma: T, r_max: T) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::InvalidSpec(format!(
                "need at least one state and one action, got |S|={num_states} |A|={num_actions}"
            )));
        }
        if !(gamma >= T::zero() && gamma < T::one()) {
            return Err(Error::InvalidSpec(format!(
                "discount {gamma} outside [0, 1)"
            )));
        }
        Ok(Self {
            num_states,
            num_actions,
            gamma,
            r_max,
        })
    }

    #[inline]
    pub fn sa(&self, s: usize, a: usize) -> usize {
        s * self.num_actions + a
    }

    /// Upper bound on any value function when rewards respect `r_max`.
    pub fn value_bound(&self) -> T {
        self.r_max / (T::one() - self.gamma)
    }
}

/// Read access to a transition kernel p(s, a, ·).
///
/// `accumulate_row` adds `weight * p(s, a, s')` into `out[s']` and returns the
/// number of multiply-adds it performed, so callers can account for work.
pub trait TransitionKernel<T: Scalar> {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    fn accumulate_row(&self, s: usize, a: usize, weight: T, out: &mut [T]) -> usize;

    fn prob(&self, s: usize, a: usize, s_next: usize) -> T;
}

/// A finite MDP with known reward and discount, solvable by the planners in
/// [`crate::analysis`].
pub trait FiniteMdp<T: Scalar>: TransitionKernel<T> {
    fn gamma(&self) -> T;
    fn reward(&self, s: usize, a: usize) -> T;
    /// Calls `f(s', p)` for each successor with non-zero probability.
    fn for_each_successor(&self, s: usize, a: usize, f: &mut dyn FnMut(usize, T));
}

/// Dense row-major `(s, a, s')` transition table.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTransitions<T> {
    num_states: usize,
    num_actions: usize,
    table: Vec<T>,
}

impl<T: Scalar> DenseTransitions<T> {
    pub fn zeros(num_states: usize, num_actions: usize) -> Self {
        Self {
            num_states,
            num_actions,
            table: vec![T::zero(); num_states * num_actions * num_states],
        }
    }

    pub fn from_table(num_states: usize, num_actions: usize, table: Vec<T>) -> Result<Self> {
        if table.len() != num_states * num_actions * num_states {
            return Err(Error::InvalidSpec(format!(
                "transition table has {} entries, expected {}",
                table.len(),
                num_states * num_actions * num_states
            )));
        }
        Ok(Self {
            num_states,
            num_actions,
            table,
        })
    }

    #[inline]
    fn offset(&self, s: usize, a: usize) -> usize {
        (s * self.num_actions + a) * self.num_states
    }

    pub fn row(&self, s: usize, a: usize) -> &[T] {
        let o = self.offset(s, a);
        &self.table[o..o + self.num_states]
    }

    pub fn row_mut(&mut self, s: usize, a: usize) -> &mut [T] {
        let o = self.offset(s, a);
        let n = self.num_states;
        &mut self.table[o..o + n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.table
    }
}

impl<T: Scalar> TransitionKernel<T> for DenseTransitions<T> {
    fn num_states(&self) -> usize {
        self.num_states
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn accumulate_row(&self, s: usize, a: usize, weight: T, out: &mut [T]) -> usize {
        let row = self.row(s, a);
        for (o, &p) in out.iter_mut().zip(row) {
            *o += weight * p;
        }
        row.len()
    }

    fn prob(&self, s: usize, a: usize, s_next: usize) -> T {
        self.row(s, a)[s_next]
    }
}

/// Ground-truth MDP with a dense kernel. Terminal states are absorbing with
/// zero reward.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueMdp<T> {
    pub spec: MdpSpec<T>,
    transition: DenseTransitions<T>,
    reward: Vec<T>,
    terminal: Vec<bool>,
}

impl<T: Scalar> TrueMdp<T> {
    /// Validates rows and rewards, then rewrites terminal rows as zero-reward
    /// self-loops.
    pub fn new(
        spec: MdpSpec<T>,
        mut transition: DenseTransitions<T>,
        mut reward: Vec<T>,
        terminal: Vec<bool>,
    ) -> Result<Self> {
        let (ns, na) = (spec.num_states, spec.num_actions);
        if transition.num_states != ns || transition.num_actions != na {
            return Err(Error::InvalidSpec(
                "transition dimensions disagree with spec".into(),
            ));
        }
        if reward.len() != ns * na || terminal.len() != ns {
            return Err(Error::InvalidSpec(
                "reward/terminal dimensions disagree with spec".into(),
            ));
        }
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        for s in 0..ns {
            for a in 0..na {
                if terminal[s] {
                    let row = transition.row_mut(s, a);
                    row.iter_mut().for_each(|p| *p = T::zero());
                    row[s] = T::one();
                    reward[spec.sa(s, a)] = T::zero();
                    continue;
                }
                let row = transition.row(s, a);
                if row.iter().any(|&p| p < T::zero() || p > T::one()) {
                    return Err(Error::InvalidSpec(format!(
                        "row ({s},{a}) has entries outside [0,1]"
                    )));
                }
                let sum: T = row.iter().copied().sum();
                if (sum - T::one()).abs() > tol {
                    return Err(Error::InvalidSpec(format!("row ({s},{a}) sums to {sum}")));
                }
                if reward[spec.sa(s, a)] > spec.r_max {
                    return Err(Error::InvalidSpec(format!(
                        "reward at ({s},{a}) exceeds r_max {}",
                        spec.r_max
                    )));
                }
            }
        }
        Ok(Self {
            spec,
            transition,
            reward,
            terminal,
        })
    }

    pub fn transitions(&self) -> &DenseTransitions<T> {
        &self.transition
    }

    pub fn rewards(&self) -> &[T] {
        &self.reward
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminal[s]
    }
}

impl<T: Scalar> TransitionKernel<T> for TrueMdp<T> {
    fn num_states(&self) -> usize {
        self.spec.num_states
    }

    fn num_actions(&self) -> usize {
        self.spec.num_actions
    }

    fn accumulate_row(&self, s: usize, a: usize, weight: T, out: &mut [T]) -> usize {
        self.transition.accumulate_row(s, a, weight, out)
    }

    fn prob(&self, s: usize, a: usize, s_next: usize) -> T {
        self.transition.prob(s, a, s_next)
    }
}

impl<T: Scalar> FiniteMdp<T> for TrueMdp<T> {
    fn gamma(&self) -> T {
        self.spec.gamma
    }

    fn reward(&self, s: usize, a: usize) -> T {
        self.reward[self.spec.sa(s, a)]
    }

    fn for_each_successor(&self, s: usize, a: usize, f: &mut dyn FnMut(usize, T)) {
        for (s2, &p) in self.transition.row(s, a).iter().enumerate() {
            if p != T::zero() {
                f(s2, p);
            }
        }
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Greedy action at `s` from a row-major `(s, a)` table.
pub fn greedy_action<T: Scalar>(q: &[T], num_actions: usize, s: usize) -> Result<usize> {
    check_index("state", s, q.len() / num_actions.max(1))?;
    Ok(argmax(&q[s * num_actions..(s + 1) * num_actions]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_picks_max() {
        assert_eq!(greedy_action(&[0.0, 1.0, 0.0], 3, 0).unwrap(), 1);
    }

    #[test]
    fn greedy_tie_breaks_low() {
        assert_eq!(greedy_action(&[1.0, 1.0, 0.0], 3, 0).unwrap(), 0);
        assert_eq!(greedy_action(&[2.5f32; 4], 4, 0).unwrap(), 0);
    }

    #[test]
    fn greedy_rejects_bad_state() {
        assert!(greedy_action(&[0.0; 6], 3, 2).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(MdpSpec::new(0, 1, 0.5, 1.0).is_err());
        assert!(MdpSpec::new(1, 0, 0.5, 1.0).is_err());
        assert!(MdpSpec::new(1, 1, 1.0, 1.0).is_err());
        assert!(MdpSpec::new(1, 1, -0.1, 1.0).is_err());
        assert!(MdpSpec::new(1, 1, 0.0, 1.0).is_ok());
    }

    #[test]
    fn true_mdp_rejects_bad_rows_and_absorbs_terminals() {
        let spec = MdpSpec::new(2, 1, 0.9, 1.0).unwrap();
        let bad = DenseTransitions::from_table(2, 1, vec![0.5, 0.4, 0.0, 1.0]).unwrap();
        assert!(TrueMdp::new(spec, bad, vec![0.0, 0.0], vec![false, false]).is_err());

        let ok = DenseTransitions::from_table(2, 1, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let too_big = TrueMdp::new(spec, ok.clone(), vec![2.0, 0.0], vec![false, false]);
        assert!(too_big.is_err());

        let m = TrueMdp::new(spec, ok, vec![1.0, 1.0], vec![false, true]).unwrap();
        assert_eq!(m.transitions().row(1, 0), &[0.0, 1.0]);
        assert_eq!(m.reward(1, 0), 0.0);
    }
}
