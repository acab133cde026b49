use crate::error::{check_index, Error, Result};
use crate::mdp::TrueMdp;
use crate::scalar::Scalar;

/// Longest action log [`conditional_distribution`] will enumerate.
pub const ENUMERATION_BOUND: usize = 6;

/// `P(s_t = s | s_{t-d}, a_{t-d}, ..., a_{t-1})` over all states.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution<T>(pub Vec<T>);

impl<T: Scalar> ConditionalDistribution<T> {
    pub fn probs(&self) -> &[T] {
        &self.0
    }

    pub fn total(&self) -> T {
        self.0.iter().copied().sum()
    }
}

/// Sums the probability of every intermediate state path. Exponential in the
/// log length; intended as a reference for small instances only.
pub fn conditional_distribution<T: Scalar>(
    m: &TrueMdp<T>,
    s0: usize,
    log: &[usize],
) -> Result<ConditionalDistribution<T>> {
    let ns = m.spec.num_states;
    check_index("state", s0, ns)?;
    if log.len() > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound {
            len: log.len(),
            bound: ENUMERATION_BOUND,
        });
    }
    for &a in log {
        check_index("action", a, m.spec.num_actions)?;
    }
    let mut out = vec![T::zero(); ns];
    if log.is_empty() {
        out[s0] = T::one();
        return Ok(ConditionalDistribution(out));
    }
    let table = m.transitions();
    // path[i] is the state after the i-th logged action
    let mut path = vec![0usize; log.len()];
    loop {
        let mut prob = T::one();
        let mut prev = s0;
        for (i, &s) in path.iter().enumerate() {
            prob *= table.row(prev, log[i])[s];
            prev = s;
        }
        out[prev] += prob;

        let mut i = path.len();
        loop {
            if i == 0 {
                return Ok(ConditionalDistribution(out));
            }
            i -= 1;
            path[i] += 1;
            if path[i] < ns {
                break;
            }
            path[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{random_deterministic_mdp, random_mdp};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_log_is_one_hot() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = random_mdp::<f64, _>(&mut rng, 4, 2, 0.5);
        assert_eq!(
            conditional_distribution(&m, 2, &[]).unwrap().0,
            vec![0.0, 0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn deterministic_model_forward_simulates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_deterministic_mdp::<f64, _>(&mut rng, 5, 3, 0.5);
        let log = [2, 0, 1, 1];
        let mut s = 3;
        for &a in &log {
            s = m
                .transitions()
                .row(s, a)
                .iter()
                .position(|&p| p == 1.0)
                .unwrap();
        }
        let mut expect = vec![0.0; 5];
        expect[s] = 1.0;
        assert_eq!(conditional_distribution(&m, 3, &log).unwrap().0, expect);
    }

    #[test]
    fn sums_to_one_and_respects_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_mdp::<f64, _>(&mut rng, 3, 2, 0.5);
        let c = conditional_distribution(&m, 0, &[1, 0, 1, 1, 0, 0]).unwrap();
        assert!((c.total() - 1.0).abs() < 1e-12);
        assert!(matches!(
            conditional_distribution(&m, 0, &[0; 7]),
            Err(Error::EnumerationBound { len: 7, .. })
        ));
    }
}
