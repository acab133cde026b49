use super::conditional_distribution;
use crate::agents::AugmentedCodec;
use crate::belief::{propagate, Belief};
use crate::error::{Error, Result};
use crate::mdp::{FiniteMdp, MdpSpec, TransitionKernel, TrueMdp};
use crate::scalar::Scalar;

/// Largest augmented space [`build_augmented`] will construct by default.
pub const DEFAULT_SIZE_CAP: usize = 10_000;

/// Delay-free MDP over `(s_{t-d}, a_{t-d}, ..., a_{t-1})` equivalent to a
/// base MDP observed with constant delay `d`.
#[derive(Debug, Clone)]
pub struct AugmentedMdp<T> {
    pub spec: MdpSpec<T>,
    codec: AugmentedCodec,
    rows: Vec<Vec<(usize, T)>>,
    reward: Vec<T>,
    conditionals: Vec<Vec<T>>,
}

impl<T: Scalar> AugmentedMdp<T> {
    pub fn codec(&self) -> &AugmentedCodec {
        &self.codec
    }

    pub fn delay(&self) -> usize {
        self.codec.delay()
    }

    /// `P(s_t = s | x)` for augmented code `x`, from the tail recursion.
    pub fn conditional(&self, code: usize) -> &[T] {
        &self.conditionals[code]
    }

    pub fn row(&self, code: usize, a: usize) -> &[(usize, T)] {
        &self.rows[self.spec.sa(code, a)]
    }

    /// `E[f(s_t) | x]`.
    pub fn expect(&self, code: usize, f: impl Fn(usize) -> T) -> T {
        self.conditionals[code]
            .iter()
            .enumerate()
            .map(|(s, &p)| p * f(s))
            .sum()
    }
}

impl<T: Scalar> TransitionKernel<T> for AugmentedMdp<T> {
    fn num_states(&self) -> usize {
        self.spec.num_states
    }

    fn num_actions(&self) -> usize {
        self.spec.num_actions
    }

    fn accumulate_row(&self, s: usize, a: usize, weight: T, out: &mut [T]) -> usize {
        let row = self.row(s, a);
        for &(s2, p) in row {
            out[s2] += weight * p;
        }
        row.len()
    }

    fn prob(&self, s: usize, a: usize, s_next: usize) -> T {
        self.row(s, a)
            .iter()
            .find(|&&(k, _)| k == s_next)
            .map_or_else(T::zero, |&(_, p)| p)
    }
}

impl<T: Scalar> FiniteMdp<T> for AugmentedMdp<T> {
    fn gamma(&self) -> T {
        self.spec.gamma
    }

    fn reward(&self, s: usize, a: usize) -> T {
        self.reward[self.spec.sa(s, a)]
    }

    fn for_each_successor(&self, s: usize, a: usize, f: &mut dyn FnMut(usize, T)) {
        for &(s2, p) in self.row(s, a) {
            f(s2, p);
        }
    }
}

/// Builds the augmented MDP for constant delay `d`.
///
/// From `(s, a_1, ..., a_d)` under action `a` the next base state is drawn
/// from `p(s, a_1, .)` and the tail shifts to `(a_2, ..., a_d, a)`. The
/// reward is `sum_s P(s | x) r(s, a)` with the conditional built by
/// propagating each tail prefix one action at a time.
pub fn build_augmented<T: Scalar>(
    m: &TrueMdp<T>,
    d: usize,
    size_cap: usize,
) -> Result<AugmentedMdp<T>> {
    let (ns, na) = (m.spec.num_states, m.spec.num_actions);
    let required = crate::agents::augmented_size(ns, na, d);
    if required > size_cap as u128 {
        return Err(Error::SizeCap {
            required,
            cap: size_cap,
        });
    }
    let codec = AugmentedCodec::new(ns, na, d)?;
    let n_codes = codec.num_codes();

    // Level k holds P(s_{k} | s_0, prefix of k actions) at index
    // s_0 * |A|^k + prefix code; appending action a maps index i to i*|A| + a.
    let mut level: Vec<Belief<T>> = (0..ns)
        .map(|s| Belief::one_hot(s, ns).expect("in range"))
        .collect();
    for _ in 0..d {
        let mut next = Vec::with_capacity(level.len() * na);
        for b in &level {
            for a in 0..na {
                next.push(propagate(b, m, a));
            }
        }
        level = next;
    }
    let conditionals: Vec<Vec<T>> = level.into_iter().map(|b| b.probs().to_vec()).collect();
    debug_assert_eq!(conditionals.len(), n_codes);

    let mut rows = Vec::with_capacity(n_codes * na);
    let mut reward = Vec::with_capacity(n_codes * na);
    let table = m.transitions();
    for x in 0..n_codes {
        let base = x / (n_codes / ns);
        let acting = codec.oldest_action(x);
        for a in 0..na {
            let base_action = acting.unwrap_or(a);
            let row: Vec<(usize, T)> = table
                .row(base, base_action)
                .iter()
                .enumerate()
                .filter(|&(_, &p)| p != T::zero())
                .map(|(s2, &p)| (codec.successor(x, s2, a), p))
                .collect();
            rows.push(row);
            reward.push(
                conditionals[x]
                    .iter()
                    .enumerate()
                    .map(|(s, &p)| p * m.reward(s, a))
                    .sum(),
            );
        }
    }
    let spec = MdpSpec::new(n_codes, na, m.spec.gamma, m.spec.r_max)?;
    Ok(AugmentedMdp {
        spec,
        codec,
        rows,
        reward,
        conditionals,
    })
}

/// Largest disagreement between the stored augmented reward and the same
/// quantity recomputed from path-enumerated conditionals.
pub fn reward_identity_gap<T: Scalar>(m: &TrueMdp<T>, am: &AugmentedMdp<T>) -> Result<T> {
    let na = m.spec.num_actions;
    let mut worst = T::zero();
    for x in 0..am.spec.num_states {
        let state = am.codec().decode(x)?;
        let cond = conditional_distribution(m, state.base, &state.tail)?;
        for a in 0..na {
            let direct: T = cond
                .probs()
                .iter()
                .enumerate()
                .map(|(s, &p)| p * m.reward(s, a))
                .sum();
            worst = worst.max((direct - am.reward(x, a)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::random_mdp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_delay_reproduces_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_mdp::<f64, _>(&mut rng, 4, 3, 0.9);
        let am = build_augmented(&m, 0, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(am.spec.num_states, 4);
        for s in 0..4 {
            for a in 0..3 {
                assert_eq!(am.reward(s, a), m.reward(s, a));
                for s2 in 0..4 {
                    assert_eq!(am.prob(s, a, s2), m.prob(s, a, s2));
                }
            }
        }
    }

    #[test]
    fn rows_are_stochastic_and_tails_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_mdp::<f64, _>(&mut rng, 2, 2, 0.9);
        let am = build_augmented(&m, 1, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(am.spec.num_states, 4);
        let m3 = random_mdp::<f64, _>(&mut rng, 3, 2, 0.9);
        let am3 = build_augmented(&m3, 2, DEFAULT_SIZE_CAP).unwrap();
        for x in 0..am3.spec.num_states {
            let tail = am3.codec().decode(x).unwrap().tail;
            for a in 0..2 {
                let sum: f64 = am3.row(x, a).iter().map(|&(_, p)| p).sum();
                assert!((sum - 1.0).abs() < 1e-12);
                for &(y, _) in am3.row(x, a) {
                    assert_eq!(am3.codec().decode(y).unwrap().tail, vec![tail[1], a]);
                }
            }
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_mdp::<f64, _>(&mut rng, 5, 3, 0.9);
        let err = build_augmented(&m, 3, 100).unwrap_err();
        assert_eq!(
            err,
            Error::SizeCap {
                required: 135,
                cap: 100
            }
        );
    }

    #[test]
    fn reward_identity_three_states_delay_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_mdp::<f64, _>(&mut rng, 3, 2, 0.9);
        let am = build_augmented(&m, 2, DEFAULT_SIZE_CAP).unwrap();
        assert!(reward_identity_gap(&m, &am).unwrap() < 1e-12);
    }
}
