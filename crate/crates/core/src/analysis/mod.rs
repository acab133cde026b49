//! Exact small-instance machinery: the augmented MDP for a fixed delay,
//! conditional state distributions by path enumeration, optimal values,
//! policy evaluation, and checks of the value bounds for belief-weighted
//! policies.

mod augmented;
mod oracle;
mod verify;

pub use augmented::{build_augmented, reward_identity_gap, AugmentedMdp, DEFAULT_SIZE_CAP};
pub use oracle::{conditional_distribution, ConditionalDistribution, ENUMERATION_BOUND};
pub use verify::{
    check_action_share, check_value_bound, oracle_policy, ActionShareReport, BoundRow,
    InitialDistribution, OraclePolicy, ValueBoundReport,
};

use rand::Rng;

use crate::mdp::{argmax, DenseTransitions, FiniteMdp, MdpSpec, TrueMdp};
use crate::scalar::Scalar;

/// Optimal action values and state values of a finite MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalValues<T> {
    pub q: Vec<T>,
    pub v: Vec<T>,
    pub sweeps: usize,
}

fn backup<T: Scalar, M: FiniteMdp<T> + ?Sized>(m: &M, v: &[T], s: usize, a: usize) -> T {
    let mut acc = T::zero();
    m.for_each_successor(s, a, &mut |s2, p| acc += p * v[s2]);
    m.reward(s, a) + m.gamma() * acc
}

fn state_values<T: Scalar>(q: &[T], na: usize) -> Vec<T> {
    q.chunks(na).map(|row| row[argmax(row)]).collect()
}

/// Value iteration until `gamma * max|dq| < tol`, which bounds the Bellman
/// residual of the returned table by `tol`.
pub fn optimal_values<T: Scalar, M: FiniteMdp<T> + ?Sized>(m: &M, tol: T) -> OptimalValues<T> {
    assert!(tol > T::zero(), "tolerance must be positive");
    let (ns, na) = (m.num_states(), m.num_actions());
    let mut q = vec![T::zero(); ns * na];
    let mut sweeps = 0;
    loop {
        let v = state_values(&q, na);
        let mut change = T::zero();
        for s in 0..ns {
            for a in 0..na {
                let next = backup(m, &v, s, a);
                change = change.max((next - q[s * na + a]).abs());
                q[s * na + a] = next;
            }
        }
        sweeps += 1;
        if m.gamma() * change < tol || sweeps >= 1_000_000 {
            break;
        }
    }
    let v = state_values(&q, na);
    OptimalValues { q, v, sweeps }
}

/// `max |T q - q|` for the optimality operator `T`.
pub fn bellman_residual<T: Scalar, M: FiniteMdp<T> + ?Sized>(m: &M, q: &[T]) -> T {
    let na = m.num_actions();
    let v = state_values(q, na);
    let mut worst = T::zero();
    for s in 0..m.num_states() {
        for a in 0..na {
            worst = worst.max((backup(m, &v, s, a) - q[s * na + a]).abs());
        }
    }
    worst
}

/// Value of a deterministic stationary policy by fixed-point iteration,
/// stopped once `gamma * max|dV| < tol`.
pub fn evaluate_policy<T: Scalar, M: FiniteMdp<T> + ?Sized>(
    m: &M,
    policy: &[usize],
    tol: T,
) -> Vec<T> {
    assert_eq!(
        policy.len(),
        m.num_states(),
        "policy must cover every state"
    );
    assert!(tol > T::zero(), "tolerance must be positive");
    let ns = m.num_states();
    let mut v = vec![T::zero(); ns];
    for _ in 0..1_000_000 {
        let next: Vec<T> = (0..ns).map(|s| backup(m, &v, s, policy[s])).collect();
        let change = next
            .iter()
            .zip(&v)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        v = next;
        if m.gamma() * change < tol {
            break;
        }
    }
    v
}

/// `max_s |V(s) - r(s, pi(s)) - gamma sum p V|`.
pub fn policy_residual<T: Scalar, M: FiniteMdp<T> + ?Sized>(m: &M, policy: &[usize], v: &[T]) -> T {
    (0..m.num_states())
        .map(|s| (backup(m, v, s, policy[s]) - v[s]).abs())
        .fold(T::zero(), T::max)
}

/// Random probability vector of length `n`; roughly a third of the entries
/// are zeroed (at least one stays positive).
pub fn random_distribution<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random::<f64>() + 1e-3
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|&x| T::lit(x / total)).collect()
}

/// Random instance with rewards in `[0, 1)` and `r_max = 1`, no terminals.
pub fn random_mdp<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    num_actions: usize,
    gamma: T,
) -> TrueMdp<T> {
    let spec = MdpSpec::new(num_states, num_actions, gamma, T::one()).expect("valid sizes");
    let mut table = Vec::with_capacity(num_states * num_actions * num_states);
    for _ in 0..num_states * num_actions {
        table.extend(random_distribution::<T, _>(rng, num_states));
    }
    let transitions =
        DenseTransitions::from_table(num_states, num_actions, table).expect("sized table");
    let reward = (0..num_states * num_actions)
        .map(|_| T::lit(rng.random::<f64>()))
        .collect();
    TrueMdp::new(spec, transitions, reward, vec![false; num_states])
        .expect("random rows are stochastic")
}

/// Random instance whose every transition row is deterministic.
pub fn random_deterministic_mdp<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    num_states: usize,
    num_actions: usize,
    gamma: T,
) -> TrueMdp<T> {
    let spec = MdpSpec::new(num_states, num_actions, gamma, T::one()).expect("valid sizes");
    let mut transitions = DenseTransitions::zeros(num_states, num_actions);
    for s in 0..num_states {
        for a in 0..num_actions {
            transitions.row_mut(s, a)[rng.random_range(0..num_states)] = T::one();
        }
    }
    let reward = (0..num_states * num_actions)
        .map(|_| T::lit(rng.random::<f64>()))
        .collect();
    TrueMdp::new(spec, transitions, reward, vec![false; num_states]).expect("deterministic rows")
}
