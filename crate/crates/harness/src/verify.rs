//! Randomized suites over small exact instances: belief propagation against
//! path enumeration, the augmented reward identity, the value lower bound
//! of the expected-Q policy, and the best-action share inequality.

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use emql::analysis::{
    build_augmented, check_action_share, check_value_bound, conditional_distribution,
    optimal_values, random_distribution, random_mdp, reward_identity_gap, InitialDistribution,
    DEFAULT_SIZE_CAP,
};
use emql::belief::belief_after;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Belief,
    RewardIdentity,
    ValueBound,
    ActionShare,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Belief,
        Suite::RewardIdentity,
        Suite::ValueBound,
        Suite::ActionShare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Belief => "belief",
            Suite::RewardIdentity => "reward_identity",
            Suite::ValueBound => "value_bound",
            Suite::ActionShare => "action_share",
        }
    }

    /// Instance count of the full suite.
    pub fn default_instances(self) -> usize {
        match self {
            Suite::Belief => 200,
            Suite::RewardIdentity => 200,
            Suite::ValueBound => 500,
            Suite::ActionShare => 1000,
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Suite::Belief => 1e-10,
            Suite::RewardIdentity => 1e-12,
            Suite::ValueBound => 1e-8,
            Suite::ActionShare => 1e-10,
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One checked instance. `lhs >= rhs` is the property; `slack = lhs - rhs`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VerifyRow {
    pub suite: String,
    pub instance: usize,
    pub seed: u64,
    pub states: usize,
    pub actions: usize,
    pub delay: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub instances: usize,
    pub violations: usize,
    pub min_slack: f64,
    pub elapsed: Duration,
}

impl fmt::Display for SuiteSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {:>5} instances  {:>3} violations  min slack {:.3e}  {:.2?}",
            self.suite.name(),
            self.instances,
            self.violations,
            self.min_slack,
            self.elapsed
        )
    }
}

fn instance_rng(base_seed: u64, suite: Suite, i: usize) -> (u64, ChaCha8Rng) {
    let seed = base_seed.wrapping_add(i as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream());
    (seed, rng)
}

fn check_instance(suite: Suite, base_seed: u64, i: usize) -> Result<VerifyRow> {
    let (seed, mut rng) = instance_rng(base_seed, suite, i);
    let tol = suite.tolerance();
    let row = |states, actions, delay, lhs: f64, rhs: f64| VerifyRow {
        suite: suite.name().to_string(),
        instance: i,
        seed,
        states,
        actions,
        delay,
        lhs,
        rhs,
        slack: lhs - rhs,
        passed: lhs >= rhs,
    };
    Ok(match suite {
        Suite::Belief => {
            let (ns, na, d) = (
                rng.random_range(1..=6),
                rng.random_range(1..=3),
                rng.random_range(0..=4),
            );
            let m = random_mdp::<f64, _>(&mut rng, ns, na, 0.9);
            let s0 = rng.random_range(0..ns);
            let log: Vec<usize> = (0..d).map(|_| rng.random_range(0..na)).collect();
            let (b, _) = belief_after(s0, &log, &m)?;
            let oracle = conditional_distribution(&m, s0, &log)?;
            let gap = b
                .probs()
                .iter()
                .zip(oracle.probs())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            row(ns, na, d, tol, gap)
        }
        Suite::RewardIdentity => {
            let (ns, na, d) = (
                rng.random_range(1..=5),
                rng.random_range(1..=3),
                rng.random_range(0..=3),
            );
            let m = random_mdp::<f64, _>(&mut rng, ns, na, 0.9);
            let am = build_augmented(&m, d, DEFAULT_SIZE_CAP)?;
            row(ns, na, d, tol, reward_identity_gap(&m, &am)?)
        }
        Suite::ValueBound => {
            let (ns, na, d) = (
                rng.random_range(1..=5),
                rng.random_range(1..=3),
                rng.random_range(0..=3),
            );
            let gamma = if rng.random_bool(0.5) { 0.5 } else { 0.9 };
            let m = random_mdp::<f64, _>(&mut rng, ns, na, gamma);
            let rep = check_value_bound(&m, d, 1e-11, DEFAULT_SIZE_CAP)?;
            let worst = rep
                .rows
                .iter()
                .min_by(|a, b| a.slack.total_cmp(&b.slack))
                .expect("augmented space is non-empty");
            // tolerance folded into lhs
            let mut r = row(ns, na, d, worst.value + tol, worst.lower_bound);
            r.passed = rep.violations == 0;
            r
        }
        Suite::ActionShare => {
            let (ns, na) = (rng.random_range(1..=6), rng.random_range(1..=4));
            let gamma = rng.random_range(0.0..0.95);
            let m = random_mdp::<f64, _>(&mut rng, ns, na, gamma);
            let ov = optimal_values(&m, 1e-10);
            let mu = InitialDistribution::new(random_distribution::<f64, _>(&mut rng, ns))?;
            let rep = check_action_share(&ov.q, &ov.v, na, &mu)?;
            let mut r = row(ns, na, 0, rep.lhs + tol, rep.rhs);
            r.passed = rep.holds;
            r
        }
    })
}

/// Runs `instances` checks of `suite` in parallel.
pub fn run_suite(
    suite: Suite,
    instances: usize,
    base_seed: u64,
) -> Result<(SuiteSummary, Vec<VerifyRow>)> {
    let start = Instant::now();
    let rows: Vec<VerifyRow> = (0..instances)
        .into_par_iter()
        .map(|i| check_instance(suite, base_seed, i))
        .collect::<Result<_>>()?;
    let summary = SuiteSummary {
        suite,
        instances,
        violations: rows.iter().filter(|r| !r.passed).count(),
        min_slack: rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min),
        elapsed: start.elapsed(),
    };
    Ok((summary, rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub summaries: Vec<SuiteSummary>,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.summaries.iter().all(|s| s.violations == 0)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
        for r in &self.rows {
            w.serialize(r).map_err(|e| HarnessError::csv(path, e))?;
        }
        w.flush().map_err(|e| HarnessError::io(path, e))
    }
}

/// Every suite at `scale` times its full instance count (at least one).
pub fn run_all(base_seed: u64, scale: f64) -> Result<VerifyReport> {
    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    for suite in Suite::ALL {
        let n = ((suite.default_instances() as f64 * scale).round() as usize).max(1);
        let (s, r) = run_suite(suite, n, base_seed)?;
        summaries.push(s);
        rows.extend(r);
    }
    Ok(VerifyReport { summaries, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let rep = run_all(0, 0.05).unwrap();
        assert!(rep.passed(), "{:?}", rep.summaries);
        assert_eq!(rep.summaries.len(), 4);
    }

    #[test]
    fn instances_are_reproducible() {
        let a = check_instance(Suite::ValueBound, 9, 3).unwrap();
        let b = check_instance(Suite::ValueBound, 9, 3).unwrap();
        assert_eq!(a, b);
    }
}
