use emql::agents::{build_agent, Agent, AgentKind};
use emql::channel::Channel;
use emql::env::Environment;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::stats::{moving_average, summarize, SummaryRow};

/// One row of `episodes.csv`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EpisodeLog {
    pub iteration: usize,
    pub episode: usize,
    pub reward: f64,
    pub steps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub reward: f64,
    pub steps: usize,
    /// Transition tuples the agent learned from during this episode,
    /// including those completed by the end-of-episode flush.
    pub recorded: u64,
}

/// Independent random streams of one iteration.
pub struct Streams {
    pub env: ChaCha8Rng,
    pub agent: ChaCha8Rng,
    pub delay: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        let stream = |id| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        Self {
            env: stream(0),
            agent: stream(1),
            delay: stream(2),
        }
    }
}

/// Plays one episode through the delay channel.
///
/// The start state reaches the agent synchronously. After each step the new
/// state is stamped with the step count and sent; whatever has arrived by
/// then is ingested before the next action. At termination or the step cap
/// the channel is flushed and the agent plans.
pub fn run_episode(
    env: &mut dyn Environment,
    agent: &mut dyn Agent,
    channel: &mut Channel<ChaCha8Rng>,
    env_rng: &mut ChaCha8Rng,
    agent_rng: &mut ChaCha8Rng,
    cap: usize,
    mut trace: Option<&mut Vec<usize>>,
) -> Result<EpisodeOutcome> {
    let before = agent.transitions_recorded();
    let s0 = env.reset(env_rng);
    agent.begin_episode(s0)?;
    let mut reward = 0.0;
    let mut steps = 0;
    while steps < cap {
        let a = agent.act(agent_rng);
        if let Some(t) = trace.as_deref_mut() {
            t.push(a);
        }
        let step = env.step(a, env_rng)?;
        steps += 1;
        reward += step.reward;
        let now = steps as u64;
        channel.send(now, step.next_state, step.reward, step.done, now)?;
        agent.ingest(&channel.poll(now));
        if step.done {
            break;
        }
    }
    agent.ingest(&channel.flush());
    agent.end_episode();
    Ok(EpisodeOutcome {
        reward,
        steps,
        recorded: agent.transitions_recorded() - before,
    })
}

/// Seed of iteration `i`.
pub fn iteration_seed(base_seed: u64, i: usize) -> u64 {
    base_seed.wrapping_add(i as u64)
}

fn fresh_agent(
    cfg: &ExperimentConfig,
    agent: AgentKind,
    env: &dyn Environment,
) -> Result<Box<dyn Agent>> {
    Ok(build_agent(
        agent,
        env.num_states(),
        env.num_actions(),
        env.r_max(),
        &cfg.delay,
        cfg.params,
    )?)
}

/// Runs iteration `i` of `cfg` for `agent` with fresh environment, agent and
/// channel. Optionally records the action trace of every episode.
pub fn run_iteration(
    cfg: &ExperimentConfig,
    agent: AgentKind,
    i: usize,
    mut traces: Option<&mut Vec<Vec<usize>>>,
) -> Result<Vec<EpisodeLog>> {
    let seed = iteration_seed(cfg.base_seed, i);
    let mut env = cfg.environment_spec()?.instantiate();
    let mut learner = fresh_agent(cfg, agent, env.as_ref())?;
    let mut streams = Streams::new(seed);
    let mut channel = Channel::new(cfg.delay, streams.delay.clone());
    let mut logs = Vec::with_capacity(cfg.episodes);
    for episode in 0..cfg.episodes {
        let mut trace = traces.as_ref().map(|_| Vec::new());
        let out = run_episode(
            env.as_mut(),
            learner.as_mut(),
            &mut channel,
            &mut streams.env,
            &mut streams.agent,
            cfg.env.cap,
            trace.as_mut(),
        )?;
        if let (Some(all), Some(t)) = (traces.as_deref_mut(), trace) {
            all.push(t);
        }
        logs.push(EpisodeLog {
            iteration: i,
            episode,
            reward: out.reward,
            steps: out.steps,
            seed,
        });
    }
    Ok(logs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub agent: AgentKind,
    /// Ordered by iteration, then episode.
    pub logs: Vec<EpisodeLog>,
    /// Moving-average curve of each iteration.
    pub curves: Vec<Vec<f64>>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentResult {
    /// Mean of the final `n` moving-average values of each iteration.
    pub fn final_scores(&self, n: usize) -> Vec<f64> {
        self.curves
            .iter()
            .map(|c| crate::stats::tail_mean(c, n))
            .collect()
    }
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every iteration of `cfg` for `agent`, concurrently, and assembles
/// curves and the cross-iteration summary.
pub fn run_experiment_for(cfg: &ExperimentConfig, agent: AgentKind) -> Result<ExperimentResult> {
    let mut cfg = cfg.clone();
    cfg.agent = agent;
    cfg.validate()?;
    // surface construction errors before spawning work
    fresh_agent(&cfg, agent, cfg.environment_spec()?.instantiate().as_ref())?;

    let n = cfg.iterations();
    let per_iteration: Vec<Result<Vec<EpisodeLog>>> = with_pool(cfg.workers, || {
        (0..n)
            .into_par_iter()
            .map(|i| run_iteration(&cfg, agent, i, None))
            .collect()
    })?;
    let mut logs = Vec::with_capacity(n * cfg.episodes);
    let mut curves = Vec::with_capacity(n);
    for rows in per_iteration {
        let rows = rows?;
        let rewards: Vec<f64> = rows.iter().map(|r| r.reward).collect();
        curves.push(moving_average(&rewards, cfg.window));
        logs.extend(rows);
    }
    let summary = summarize(&curves, cfg.quantiles.0, cfg.quantiles.1);
    Ok(ExperimentResult {
        agent,
        logs,
        curves,
        summary,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_for(cfg, cfg.agent)
}

/// Matched-seed runs of several agents under one configuration.
pub fn compare(cfg: &ExperimentConfig, agents: &[AgentKind]) -> Result<Vec<ExperimentResult>> {
    for &a in agents {
        let mut c = cfg.clone();
        c.agent = a;
        c.validate()?;
    }
    agents.iter().map(|&a| run_experiment_for(cfg, a)).collect()
}
