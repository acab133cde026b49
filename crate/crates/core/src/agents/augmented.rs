use crate::error::{check_index, Error, Result};

/// Last known state plus the `d` actions taken since, oldest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedState {
    pub base: usize,
    pub tail: Vec<usize>,
    pub code: usize,
}

/// Mixed-radix index of augmented states:
/// `code = base * |A|^d + sum_i tail[i] * |A|^(d-1-i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AugmentedCodec {
    num_states: usize,
    num_actions: usize,
    delay: usize,
    tail_codes: usize,
}

impl AugmentedCodec {
    pub fn new(num_states: usize, num_actions: usize, delay: usize) -> Result<Self> {
        let tail_codes = u32::try_from(delay)
            .ok()
            .and_then(|d| num_actions.checked_pow(d))
            .filter(|t| t.checked_mul(num_states).is_some());
        match tail_codes {
            Some(tail_codes) => Ok(Self {
                num_states,
                num_actions,
                delay,
                tail_codes,
            }),
            None => Err(Error::SizeCap {
                required: augmented_size(num_states, num_actions, delay),
                cap: usize::MAX,
            }),
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    /// `|S| * |A|^d`.
    pub fn num_codes(&self) -> usize {
        self.num_states * self.tail_codes
    }

    pub fn encode(&self, base: usize, tail: &[usize]) -> Result<usize> {
        check_index("state", base, self.num_states)?;
        if tail.len() != self.delay {
            return Err(Error::InvalidSpec(format!(
                "tail has {} actions, delay is {}",
                tail.len(),
                self.delay
            )));
        }
        let mut t = 0;
        for &a in tail {
            check_index("action", a, self.num_actions)?;
            t = t * self.num_actions + a;
        }
        Ok(base * self.tail_codes + t)
    }

    /// Encodes a tail shorter than `d` by left-padding it with action 0.
    pub fn encode_padded(&self, base: usize, tail: &[usize]) -> usize {
        debug_assert!(tail.len() <= self.delay);
        let t = tail.iter().fold(0, |t, &a| t * self.num_actions + a);
        base * self.tail_codes + t
    }

    pub fn decode(&self, code: usize) -> Result<AugmentedState> {
        check_index("augmented state", code, self.num_codes())?;
        let base = code / self.tail_codes;
        let mut rest = code % self.tail_codes;
        let mut tail = vec![0; self.delay];
        for slot in tail.iter_mut().rev() {
            *slot = rest % self.num_actions;
            rest /= self.num_actions;
        }
        Ok(AugmentedState { base, tail, code })
    }

    /// Code reached from `code` when the oldest logged action resolves to
    /// `next_base` and `action` joins the tail.
    pub fn successor(&self, code: usize, next_base: usize, action: usize) -> usize {
        if self.delay == 0 {
            return next_base;
        }
        let tail = code % self.tail_codes;
        let shifted = (tail % (self.tail_codes / self.num_actions)) * self.num_actions + action;
        next_base * self.tail_codes + shifted
    }

    /// Oldest action in the tail (the one acting on `base`).
    pub fn oldest_action(&self, code: usize) -> Option<usize> {
        (self.delay > 0).then(|| (code % self.tail_codes) / (self.tail_codes / self.num_actions))
    }
}

pub fn augmented_size(num_states: usize, num_actions: usize, delay: usize) -> u128 {
    let mut n = num_states as u128;
    for _ in 0..delay {
        n = n.saturating_mul(num_actions as u128);
    }
    n
}
