//! Experiment configuration read from flat `key = value` text.
//!
//! Keys are dotted (`agent.kind = emql`). A `[section]` line prefixes the
//! keys after it, so `[agent]` followed by `kind = emql` means the same.
//! `#` starts a comment; blank lines are ignored.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use emql::agents::{AgentKind, AgentParams, Exploration, Planner, TieBreak};
use emql::channel::DelayModel;
use emql::env::{CartPole, Discretizer, FrozenLake};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    FrozenLake,
    CartPole,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::FrozenLake => "frozen_lake",
            EnvKind::CartPole => "cart_pole",
        }
    }

    pub fn default_iterations(self) -> usize {
        match self {
            EnvKind::FrozenLake => 50,
            EnvKind::CartPole => 20,
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "frozen_lake" | "frozenlake" => Ok(EnvKind::FrozenLake),
            "cart_pole" | "cartpole" => Ok(EnvKind::CartPole),
            other => Err(HarnessError::Config(format!(
                "unknown environment `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub kind: EnvKind,
    pub slippery: bool,
    pub map_file: Option<PathBuf>,
    /// Step cap per episode.
    pub cap: usize,
    /// Cart-pole bins per dimension.
    pub bins: [usize; 4],
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            kind: EnvKind::FrozenLake,
            slippery: true,
            map_file: None,
            cap: 200,
            bins: [6, 6, 12, 12],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub agent: AgentKind,
    pub params: AgentParams,
    pub delay: DelayModel,
    pub episodes: usize,
    /// `None` picks the environment default.
    pub iterations: Option<usize>,
    pub base_seed: u64,
    pub window: usize,
    pub quantiles: (f64, f64),
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            env: EnvConfig::default(),
            agent: AgentKind::Emql,
            params: AgentParams::default(),
            delay: DelayModel::Constant(0),
            episodes: 1000,
            iterations: None,
            base_seed: 0,
            window: 50,
            quantiles: (0.25, 0.75),
            workers: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(HarnessError::Config(format!(
            "`{key}`: expected a boolean, got `{value}`"
        ))),
    }
}

impl ExperimentConfig {
    pub fn iterations(&self) -> usize {
        self.iterations
            .unwrap_or_else(|| self.env.kind.default_iterations())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            let key = key.trim();
            let full = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            cfg.set(&full, value.trim()).map_err(|e| {
                HarnessError::Config(format!("line {}: {}", i + 1, strip_prefix(&e)))
            })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse_str(&text)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "env.kind" => self.env.kind = value.parse()?,
            "env.slippery" => self.env.slippery = parse_bool(key, value)?,
            "env.map_file" => self.env.map_file = Some(PathBuf::from(value)),
            "env.cap" => self.env.cap = parse(key, value)?,
            "env.bins" => {
                let bins: Vec<usize> = value
                    .split(',')
                    .map(|b| parse(key, b.trim()))
                    .collect::<Result<_>>()?;
                self.env.bins = bins.try_into().map_err(|_| {
                    HarnessError::Config("`env.bins` needs four comma-separated counts".into())
                })?;
            }
            "agent.kind" => self.agent = value.parse()?,
            "agent.gamma" => self.params.gamma = parse(key, value)?,
            "agent.alpha" => self.params.alpha = parse(key, value)?,
            "agent.planner" => self.params.planner = value.parse::<Planner>()?,
            "agent.ties" => self.params.ties = value.parse::<TieBreak>()?,
            "agent.epsilon" => {
                self.params.exploration = if value == "schedule" {
                    Exploration::Schedule
                } else {
                    Exploration::Fixed(parse(key, value)?)
                }
            }
            "delay.kind" => {
                self.delay = match value {
                    "constant" => DelayModel::Constant(match self.delay {
                        DelayModel::Constant(d) => d,
                        DelayModel::Geometric(_) => 0,
                    }),
                    "geometric" => DelayModel::Geometric(match self.delay {
                        DelayModel::Geometric(p) => p,
                        DelayModel::Constant(_) => 0.0,
                    }),
                    other => {
                        return Err(HarnessError::Config(format!(
                            "unknown delay kind `{other}`"
                        )))
                    }
                }
            }
            "delay.d" => self.delay = DelayModel::Constant(parse(key, value)?),
            "delay.p" => {
                self.delay = DelayModel::geometric(parse(key, value)?).map_err(config_err)?
            }
            "run.episodes" => self.episodes = parse(key, value)?,
            "run.iterations" => self.iterations = Some(parse(key, value)?),
            "run.seed" => self.base_seed = parse(key, value)?,
            "run.window" => self.window = parse(key, value)?,
            "run.quantile_low" => self.quantiles.0 = parse(key, value)?,
            "run.quantile_high" => self.quantiles.1 = parse(key, value)?,
            "run.workers" => self.workers = parse(key, value)?,
            "run.out" => self.out_dir = PathBuf::from(value),
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Checks everything that can be checked before any episode runs.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.window == 0 {
            return fail("window must be at least 1".into());
        }
        if self.episodes < self.window {
            return fail(format!(
                "episodes ({}) must be at least the window ({})",
                self.episodes, self.window
            ));
        }
        if self.iterations() == 0 {
            return fail("iterations must be at least 1".into());
        }
        let (lo, hi) = self.quantiles;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return fail(format!(
                "quantiles ({lo}, {hi}) must satisfy 0 <= low <= high <= 1"
            ));
        }
        if self.env.cap == 0 {
            return fail("env.cap must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.params.gamma) {
            return fail(format!(
                "agent.gamma = {} must lie in [0, 1)",
                self.params.gamma
            ));
        }
        if !(0.0..=1.0).contains(&self.params.alpha) {
            return fail(format!(
                "agent.alpha = {} must lie in [0, 1]",
                self.params.alpha
            ));
        }
        if let DelayModel::Geometric(p) = self.delay {
            DelayModel::geometric(p).map_err(config_err)?;
            if self.agent == AgentKind::Emdp {
                return fail("emdp needs a constant delay".into());
            }
        }
        if self.env.bins.contains(&0) {
            return fail("env.bins entries must be positive".into());
        }
        Ok(())
    }

    pub fn environment_spec(&self) -> Result<EnvSpec> {
        match self.env.kind {
            EnvKind::FrozenLake => {
                let lake = match &self.env.map_file {
                    Some(path) => {
                        let text =
                            std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
                        text.parse::<FrozenLake>().map_err(config_err)?
                    }
                    None => FrozenLake::standard(true),
                };
                Ok(EnvSpec::FrozenLake(lake.with_slippery(self.env.slippery)))
            }
            EnvKind::CartPole => {
                let theta = 12.0_f64.to_radians();
                let disc = Discretizer::uniform(
                    &[(-2.4, 2.4), (-3.0, 3.0), (-theta, theta), (-3.5, 3.5)],
                    &self.env.bins,
                )
                .map_err(config_err)?;
                Ok(EnvSpec::CartPole(
                    CartPole::new(Default::default(), disc).map_err(config_err)?,
                ))
            }
        }
    }
}

/// A ready-to-clone environment template.
#[derive(Debug, Clone)]
pub enum EnvSpec {
    FrozenLake(FrozenLake),
    CartPole(CartPole),
}

impl EnvSpec {
    pub fn instantiate(&self) -> Box<dyn emql::env::Environment> {
        match self {
            EnvSpec::FrozenLake(l) => Box::new(l.clone()),
            EnvSpec::CartPole(c) => Box::new(c.clone()),
        }
    }
}

fn config_err(e: emql::Error) -> HarnessError {
    HarnessError::Config(e.to_string())
}

fn strip_prefix(e: &HarnessError) -> String {
    match e {
        HarnessError::Config(m) => m.clone(),
        other => other.to_string(),
    }
}
