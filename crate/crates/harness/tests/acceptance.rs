//! Acceptance checks. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use emql::agents::{augmented_size, AgentKind};
use emql::belief::get_emql_action_counted;
use emql::channel::{sample_delay, DelayModel};
use emql::env::{Cell, Environment, FrozenLake};
use emql::mdp::{DenseTransitions, MdpSpec, TrueMdp};
use emql_harness::config::{EnvKind, ExperimentConfig};
use emql_harness::experiment::run_iteration;
use emql_harness::output::emit;
use emql_harness::verify::{run_suite, Suite};
use emql_harness::{compare, ExperimentResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn suite_check(suite: Suite, instances: usize, budget: Duration) -> Outcome {
    match run_suite(suite, instances, 0) {
        Ok((s, _)) => outcome(
            s.violations == 0 && s.elapsed < budget,
            format!(
                "{} instances, {} violations, tol {:.0e}, min slack {:.3e}, {:.2?} (budget {:?})",
                s.instances,
                s.violations,
                suite.tolerance(),
                s.min_slack,
                s.elapsed,
                budget
            ),
        ),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn belief_matches_enumeration() -> Outcome {
    suite_check(Suite::Belief, 200, Duration::from_secs(5))
}

fn augmented_reward_identity() -> Outcome {
    suite_check(Suite::RewardIdentity, 200, Duration::from_secs(60))
}

fn expected_q_value_bound() -> Outcome {
    suite_check(Suite::ValueBound, 500, Duration::from_secs(60))
}

fn best_action_share() -> Outcome {
    suite_check(Suite::ActionShare, 1000, Duration::from_secs(5))
}

fn lake_config(
    agent: AgentKind,
    delay: DelayModel,
    episodes: usize,
    iterations: usize,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        agent,
        delay,
        episodes,
        iterations: Some(iterations),
        base_seed: seed,
        ..Default::default()
    }
}

fn zero_delay_reduction() -> Outcome {
    let mut checked = 0;
    for kind in [EnvKind::FrozenLake, EnvKind::CartPole] {
        for i in 0..3 {
            let mut cfg = lake_config(AgentKind::Emql, DelayModel::Constant(0), 100, 3, 11);
            cfg.env.kind = kind;
            let mut runs = Vec::new();
            for agent in [AgentKind::Emql, AgentKind::Emdp, AgentKind::Mbs] {
                let mut traces = Vec::new();
                let logs = match run_iteration(&cfg, agent, i, Some(&mut traces)) {
                    Ok(l) => l,
                    Err(e) => return outcome(false, format!("error: {e}")),
                };
                let rewards: Vec<u64> = logs.iter().map(|l| l.reward.to_bits()).collect();
                runs.push((agent, rewards, traces));
            }
            for (agent, rewards, traces) in &runs[1..] {
                if *rewards != runs[0].1 || *traces != runs[0].2 {
                    return outcome(
                        false,
                        format!("{kind} iteration {i}: {} diverges from emql", agent.name()),
                    );
                }
            }
            checked += 1;
        }
    }
    outcome(
        true,
        format!("emql, emdp and mbs action traces and rewards identical in {checked} iterations of 100 episodes"),
    )
}

fn share_best(results: &[ExperimentResult], window: usize) -> (usize, usize) {
    let scores: Vec<Vec<f64>> = results.iter().map(|r| r.final_scores(window)).collect();
    let n = scores[0].len();
    let wins = (0..n)
        .filter(|&i| scores[1..].iter().all(|s| scores[0][i] >= s[i]))
        .count();
    (wins, n)
}

fn medians(results: &[ExperimentResult], window: usize) -> String {
    results
        .iter()
        .map(|r| {
            let mut s = r.final_scores(window);
            s.sort_by(f64::total_cmp);
            format!(
                "{} {:.3}",
                r.agent.name(),
                emql_harness::stats::quantile_sorted(&s, 0.5)
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

const ALL_AGENTS: [AgentKind; 4] = [
    AgentKind::Emql,
    AgentKind::Mbs,
    AgentKind::Dq,
    AgentKind::Emdp,
];

fn constant_delay_ranking() -> Outcome {
    let cfg = lake_config(AgentKind::Emql, DelayModel::Constant(4), 1000, 10, 0);
    let start = Instant::now();
    let results = match compare(&cfg, &ALL_AGENTS) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let (wins, n) = share_best(&results, cfg.window);
    let share = wins as f64 / n as f64;

    let mut info = String::new();
    let cfg2 = lake_config(AgentKind::Emql, DelayModel::Constant(2), 1000, 10, 0);
    if let Ok(r2) = compare(&cfg2, &ALL_AGENTS) {
        let (w2, n2) = share_best(&r2, cfg2.window);
        info = format!("; d=2 (info): {w2}/{n2}, {}", medians(&r2, cfg2.window));
    }
    outcome(
        share >= 0.7,
        format!(
            "d=4: emql best in {wins}/{n} iterations (need 70%), medians {}{info}, {:.1?}",
            medians(&results, cfg.window),
            start.elapsed()
        ),
    )
}

fn geometric_delay_ranking() -> Outcome {
    let cfg = lake_config(
        AgentKind::Emql,
        DelayModel::Geometric(2.0 / 3.0),
        1000,
        10,
        0,
    );
    let results = match compare(&cfg, &[AgentKind::Emql, AgentKind::Mbs]) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let last = |r: &ExperimentResult| r.summary.last().map_or(f64::NAN, |row| row.median);
    let (e, m) = (last(&results[0]), last(&results[1]));
    outcome(
        e >= m,
        format!(
            "final moving-average median emql {e:.3} vs mbs {m:.3}; tail means (info): {}",
            medians(&results, cfg.window)
        ),
    )
}

fn geometric_delay_mean() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for p in [0.0, 0.5, 2.0 / 3.0] {
        let model = DelayModel::Geometric(p);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| sample_delay(&model, &mut rng) as f64)
            .sum::<f64>()
            / n as f64;
        let expected = 1.0 / (1.0 - p);
        let rel = (mean - expected).abs() / expected;
        worst = worst.max(rel);
        parts.push(format!("p={p:.3}: {mean:.4} vs {expected:.4}"));
    }
    outcome(
        worst <= 0.05,
        format!("{} (worst rel err {worst:.4}, tol 0.05)", parts.join(", ")),
    )
}

fn lake_mdp() -> TrueMdp<f64> {
    let lake = FrozenLake::standard(true);
    let (ns, na) = (lake.num_states(), lake.num_actions());
    let mut k = DenseTransitions::zeros(ns, na);
    let mut r = vec![0.0; ns * na];
    for s in 0..ns {
        for a in 0..na {
            for (t, p) in lake.transition_probs(s, a) {
                k.row_mut(s, a)[t] += p;
                if lake.cell(t) == Cell::Goal {
                    r[s * na + a] += p;
                }
            }
        }
    }
    let terminal = (0..ns)
        .map(|s| matches!(lake.cell(s), Cell::Hole | Cell::Goal))
        .collect();
    TrueMdp::new(MdpSpec::new(ns, na, 0.95, 1.0).unwrap(), k, r, terminal).unwrap()
}

fn complexity_counts() -> Outcome {
    let m = lake_mdp();
    let (ns, na) = (m.spec.num_states, m.spec.num_actions);
    let q = vec![0.0; ns * na];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in 1..=4 {
        let log: Vec<usize> = (0..d).map(|_| rng.random_range(0..na)).collect();
        let ops = match get_emql_action_counted(0, &log, m.transitions(), &q) {
            Ok((_, ops)) => ops,
            Err(e) => return outcome(false, format!("error: {e}")),
        };
        if ops != d * ns * ns {
            return outcome(
                false,
                format!("d={d}: {ops} operations, expected {}", d * ns * ns),
            );
        }
    }
    let emql_table = (ns * na) as u128;
    for d in 1..=2u32 {
        let emdp_table = augmented_size(ns, na, d as usize) * na as u128;
        if emdp_table / emql_table != (na as u128).pow(d) || !emdp_table.is_multiple_of(emql_table)
        {
            return outcome(
                false,
                format!("d={d}: table ratio {emdp_table}/{emql_table}"),
            );
        }
    }
    outcome(
        true,
        format!("propagation costs d*|S|^2 for d=1..4 (|S|={ns}); augmented/plain table ratio = |A|^d for d=1,2"),
    )
}

fn byte_identical_reruns() -> Outcome {
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut files = Vec::new();
    for (run, dir) in dirs.iter().enumerate() {
        let mut cfg = lake_config(AgentKind::Emql, DelayModel::Geometric(0.5), 300, 4, 77);
        cfg.workers = run + 1;
        let mut bytes = Vec::new();
        for agent in ALL_AGENTS {
            if agent == AgentKind::Emdp {
                continue;
            }
            cfg.agent = agent;
            let r = match compare(&cfg, &[agent]) {
                Ok(mut r) => r.remove(0),
                Err(e) => return outcome(false, format!("error: {e}")),
            };
            let sub = dir.path().join(agent.name());
            let written = match emit(&r, &sub, "determinism") {
                Ok(w) => w,
                Err(e) => return outcome(false, format!("error: {e}")),
            };
            bytes.push(std::fs::read(&written.episodes).unwrap());
        }
        files.push(bytes);
    }
    outcome(
        files[0] == files[1],
        "episodes.csv identical across two runs with 1 and 2 workers (emql, mbs, dq; geometric delay)",
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "belief matches path enumeration",
            belief_matches_enumeration,
        ),
        ("augmented reward identity", augmented_reward_identity),
        (
            "expected-Q policy value lower bound",
            expected_q_value_bound,
        ),
        ("best action share inequality", best_action_share),
        (
            "zero delay reduces to plain Q-learning",
            zero_delay_reduction,
        ),
        (
            "constant delay ranking on FrozenLake",
            constant_delay_ranking,
        ),
        (
            "geometric delay ranking on FrozenLake",
            geometric_delay_ranking,
        ),
        ("geometric delay mean", geometric_delay_mean),
        ("planning cost and table sizes", complexity_counts),
        ("seeded reruns are byte identical", byte_identical_reruns),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
