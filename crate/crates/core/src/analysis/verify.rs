use super::{build_augmented, evaluate_policy, optimal_values, AugmentedMdp};
use crate::error::{Error, Result};
use crate::mdp::{argmax, FiniteMdp, TrueMdp};
use crate::scalar::Scalar;

/// Distribution over starting states.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialDistribution<T>(Vec<T>);

impl<T: Scalar> InitialDistribution<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|&p| !(p >= T::zero())) {
            return Err(Error::InvalidSpec(
                "initial distribution needs non-negative entries".into(),
            ));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::InvalidSpec(format!(
                "initial distribution sums to {total}"
            )));
        }
        Ok(Self(probs))
    }

    pub fn one_hot(s: usize, n: usize) -> Result<Self> {
        crate::error::check_index("state", s, n)?;
        let mut p = vec![T::zero(); n];
        p[s] = T::one();
        Ok(Self(p))
    }

    pub fn probs(&self) -> &[T] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionShareReport<T> {
    /// `max_a sum_s mu(s) q*(s, a)`
    pub lhs: T,
    /// `sum_s mu(s) v*(s) / |A|`
    pub rhs: T,
    pub holds: bool,
}

/// Compares the best single action against a uniform split of the optimal
/// value, both averaged over `mu`.
pub fn check_action_share<T: Scalar>(
    q_star: &[T],
    v_star: &[T],
    num_actions: usize,
    mu: &InitialDistribution<T>,
) -> Result<ActionShareReport<T>> {
    let ns = mu.probs().len();
    if v_star.len() != ns || q_star.len() != ns * num_actions || num_actions == 0 {
        return Err(Error::InvalidSpec(format!(
            "dimension mismatch: mu {ns}, v {}, q {} with {num_actions} actions",
            v_star.len(),
            q_star.len()
        )));
    }
    let lhs = (0..num_actions)
        .map(|a| {
            mu.probs()
                .iter()
                .enumerate()
                .map(|(s, &p)| p * q_star[s * num_actions + a])
                .sum::<T>()
        })
        .fold(T::neg_infinity(), T::max);
    let avg_v: T = mu.probs().iter().zip(v_star).map(|(&p, &v)| p * v).sum();
    let rhs = avg_v / T::from_count(num_actions as u64);
    Ok(ActionShareReport {
        lhs,
        rhs,
        holds: lhs >= rhs - T::lit(1e-10),
    })
}

/// Augmented-state policies built from true-model quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OraclePolicy {
    /// `argmax_a sum_s P(s | x) q*(s, a)`
    ExpectedQ,
    /// `argmax_a sum_s P(s | x) r(s, a)`
    Myopic,
    /// Greedy on `q*` at the most probable state.
    MostLikely,
}

pub fn oracle_policy<T: Scalar>(
    m: &TrueMdp<T>,
    am: &AugmentedMdp<T>,
    q_star: &[T],
    kind: OraclePolicy,
) -> Vec<usize> {
    let na = m.spec.num_actions;
    (0..am.spec.num_states)
        .map(|x| {
            let scores: Vec<T> = match kind {
                OraclePolicy::ExpectedQ => (0..na)
                    .map(|a| am.expect(x, |s| q_star[s * na + a]))
                    .collect(),
                OraclePolicy::Myopic => (0..na).map(|a| am.expect(x, |s| m.reward(s, a))).collect(),
                OraclePolicy::MostLikely => {
                    let s = argmax(am.conditional(x));
                    q_star[s * na..(s + 1) * na].to_vec()
                }
            };
            argmax(&scores)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow<T> {
    pub code: usize,
    /// Value of the expected-Q policy from this augmented state.
    pub value: T,
    /// `E[v*(s_t) | x]`
    pub expected_optimal: T,
    pub lower_bound: T,
    pub slack: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueBoundReport<T> {
    pub rows: Vec<BoundRow<T>>,
    pub worst_slack: T,
    pub violations: usize,
}

/// Evaluates the expected-Q policy exactly on the augmented MDP and checks
/// `V(x) >= E[v* | x] - R_max (1 - 1/|A|) / (1 - gamma)^2` at every code.
pub fn check_value_bound<T: Scalar>(
    m: &TrueMdp<T>,
    d: usize,
    tol: T,
    size_cap: usize,
) -> Result<ValueBoundReport<T>> {
    let am = build_augmented(m, d, size_cap)?;
    let ov = optimal_values(m, tol);
    let policy = oracle_policy(m, &am, &ov.q, OraclePolicy::ExpectedQ);
    let values = evaluate_policy(&am, &policy, tol);

    let na = T::from_count(m.spec.num_actions as u64);
    let one = T::one();
    let gap = one - m.gamma();
    let penalty = m.spec.r_max * (one - one / na) / (gap * gap);
    let slack_tol = T::lit(1e-8);

    let mut rows = Vec::with_capacity(values.len());
    let mut worst_slack = T::infinity();
    let mut violations = 0;
    for (code, &value) in values.iter().enumerate() {
        let expected_optimal = am.expect(code, |s| ov.v[s]);
        let lower_bound = expected_optimal - penalty;
        let slack = value - lower_bound;
        if slack < -slack_tol {
            violations += 1;
        }
        worst_slack = worst_slack.min(slack);
        rows.push(BoundRow {
            code,
            value,
            expected_optimal,
            lower_bound,
            slack,
        });
    }
    Ok(ValueBoundReport {
        rows,
        worst_slack,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{random_deterministic_mdp, random_mdp, DEFAULT_SIZE_CAP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn action_share_one_hot_and_single_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_mdp::<f64, _>(&mut rng, 4, 3, 0.9);
        let ov = optimal_values(&m, 1e-10);
        let mu = InitialDistribution::one_hot(2, 4).unwrap();
        let r = check_action_share(&ov.q, &ov.v, 3, &mu).unwrap();
        assert!((r.lhs - ov.v[2]).abs() < 1e-12);
        assert!(r.holds && r.lhs > r.rhs);

        let m1 = random_mdp::<f64, _>(&mut rng, 3, 1, 0.9);
        let ov1 = optimal_values(&m1, 1e-10);
        let mu = InitialDistribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        let r = check_action_share(&ov1.q, &ov1.v, 1, &mu).unwrap();
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn initial_distribution_validates() {
        assert!(InitialDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(InitialDistribution::new(vec![-0.5, 1.5]).is_err());
        assert!(InitialDistribution::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn no_delay_gives_full_slack() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_mdp::<f64, _>(&mut rng, 4, 3, 0.9);
        let rep = check_value_bound(&m, 0, 1e-11, DEFAULT_SIZE_CAP).unwrap();
        let penalty = 1.0 * (1.0 - 1.0 / 3.0) / (0.1f64 * 0.1);
        for row in &rep.rows {
            assert!((row.value - row.expected_optimal).abs() < 1e-8);
            assert!((row.slack - penalty).abs() < 1e-8);
        }
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn deterministic_model_has_exact_beliefs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_deterministic_mdp::<f64, _>(&mut rng, 4, 2, 0.5);
        let rep = check_value_bound(&m, 2, 1e-11, DEFAULT_SIZE_CAP).unwrap();
        for row in &rep.rows {
            assert!((row.value - row.expected_optimal).abs() < 1e-8);
        }
    }

    #[test]
    fn greedy_on_augmented_optimum_beats_every_policy() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let m = random_mdp::<f64, _>(&mut rng, 2, 2, 0.8);
            let am = build_augmented(&m, 2, DEFAULT_SIZE_CAP).unwrap();
            let n = am.spec.num_states;
            assert!(n * 2 <= 64);
            let ov = optimal_values(&am, 1e-12);
            let greedy: Vec<usize> = ov.q.chunks(2).map(argmax).collect();
            let v_greedy = evaluate_policy(&am, &greedy, 1e-12);
            let mut best = vec![f64::NEG_INFINITY; n];
            for bits in 0..(1usize << n) {
                let pi: Vec<usize> = (0..n).map(|i| (bits >> i) & 1).collect();
                let v = evaluate_policy(&am, &pi, 1e-12);
                for (b, x) in best.iter_mut().zip(&v) {
                    *b = b.max(*x);
                }
            }
            for (g, b) in v_greedy.iter().zip(&best) {
                assert!((g - b).abs() < 1e-8, "{g} vs {b}");
            }
        }
    }

    #[test]
    fn oracle_policies_agree_without_delay() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_mdp::<f64, _>(&mut rng, 3, 2, 0.9);
        let am = build_augmented(&m, 0, DEFAULT_SIZE_CAP).unwrap();
        let ov = optimal_values(&m, 1e-12);
        let a = oracle_policy(&m, &am, &ov.q, OraclePolicy::ExpectedQ);
        let b = oracle_policy(&m, &am, &ov.q, OraclePolicy::MostLikely);
        assert_eq!(a, b);
        let my = oracle_policy(&m, &am, &ov.q, OraclePolicy::Myopic);
        for (s, &act) in my.iter().enumerate() {
            assert!(m.reward(s, act) >= m.reward(s, 1 - act));
        }
    }
}
