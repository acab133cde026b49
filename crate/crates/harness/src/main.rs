use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emql::agents::AgentKind;
use emql::channel::DelayModel;
use emql_harness::{compare, run_experiment, verify, ExperimentConfig, HarnessError, Result};

#[derive(Parser)]
#[command(
    name = "emql",
    version,
    about = "Delayed-observation Q-learning experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one agent over seeded iterations and write CSV and SVG output.
    Run(RunArgs),
    /// Run several agents with matched seeds.
    Compare {
        /// Comma-separated agent kinds.
        #[arg(long, value_delimiter = ',', default_value = "emql,mbs,dq,emdp")]
        agents: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the randomized exact-instance verification suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fraction of the full instance counts to run.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Where to write the per-instance report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    agent: Option<String>,
    #[arg(long, conflicts_with = "delay_geom")]
    delay_const: Option<u32>,
    #[arg(long)]
    delay_geom: Option<f64>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(e) = &self.env {
            cfg.set("env.kind", e)?;
        }
        if let Some(a) = &self.agent {
            cfg.set("agent.kind", a)?;
        }
        if let Some(d) = self.delay_const {
            cfg.delay = DelayModel::Constant(d);
        }
        if let Some(p) = self.delay_geom {
            cfg.delay =
                DelayModel::geometric(p).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        if let Some(n) = self.episodes {
            cfg.episodes = n;
        }
        if let Some(n) = self.iterations {
            cfg.iterations = Some(n);
        }
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn title(cfg: &ExperimentConfig) -> String {
    format!("{}, delay {}", cfg.env.kind, cfg.delay)
}

fn report(result: &emql_harness::ExperimentResult, window: usize) {
    let scores = result.final_scores(window);
    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    println!(
        "{:<5} final moving average: median {:.4}  over {} iterations",
        result.agent.name(),
        emql_harness::stats::quantile_sorted(&sorted, 0.5),
        scores.len()
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let result = run_experiment(&cfg)?;
            let written = emql_harness::output::emit(&result, &cfg.out_dir, &title(&cfg))?;
            report(&result, cfg.window);
            println!("wrote {}", written.episodes.display());
        }
        Command::Compare { agents, run } => {
            let cfg = run.resolve()?;
            let kinds: Vec<AgentKind> = agents
                .iter()
                .map(|a| a.parse::<AgentKind>())
                .collect::<Result<_, _>>()?;
            let results = compare(&cfg, &kinds)?;
            let plot = emql_harness::output::emit_comparison(&results, &cfg.out_dir, &title(&cfg))?;
            for r in &results {
                report(r, cfg.window);
            }
            println!("wrote {}", plot.display());
        }
        Command::Verify { seed, scale, out } => {
            if !(scale > 0.0) {
                return Err(HarnessError::Config("--scale must be positive".into()));
            }
            let rep = verify::run_all(seed, scale)?;
            for s in &rep.summaries {
                println!("{s}");
            }
            if let Some(path) = out {
                rep.write_csv(&path)?;
                println!("wrote {}", path.display());
            }
            if !rep.passed() {
                return Err(HarnessError::Verification(
                    "at least one suite reported violations".into(),
                ));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
