use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bama_core::{
    bellman_value, decide, run_assessment, History, PolicyConfig, PosteriorState, TimeLimit,
    Transcript,
};
use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::{load_json, AssessConfig};
use crate::error::{Error, Result};
use crate::experiments::{sensitivity_sweep, SweepSpec};
use crate::output::OutputDir;
use crate::reproduce::{reproduce, Figure};

#[derive(Debug, Parser)]
#[command(
    name = "bama",
    version,
    about = "Adaptive mastery assessment from response accuracy and time"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one student under the stopping policy.
    Assess {
        /// JSON file with `profile` and optional `prior`, `policy`, `seed`.
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Regenerate the data behind a figure or table (fig1..fig8, table1).
    Reproduce {
        id: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Defaults to `results/<id>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Value and decision for one information state.
    #[command(allow_negative_numbers = true)]
    Solve {
        alpha: f64,
        beta: f64,
        n: f64,
        gamma: f64,
        #[arg(long, default_value_t = 0.8)]
        eta: f64,
        #[arg(long, default_value_t = 0.5)]
        xi: f64,
        #[arg(long, default_value_t = 20.0)]
        d: f64,
        #[arg(long, default_value_t = 4)]
        horizon: u32,
        #[arg(long, default_value_t = 16)]
        nodes: u32,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo and exact expected score over a (theta, lambda) grid.
    Sweep {
        /// JSON sweep spec; every field has a default.
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Runs a command and returns its exit code; errors map through [`Error::exit_code`].
pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Assess { config, seed, out } => assess(&config, seed, &out),
        Command::Reproduce { id, seed, out } => {
            let figure: Figure = id.parse()?;
            let dir = out.unwrap_or_else(|| Path::new("results").join(figure.id()));
            let outcome = reproduce(figure, seed, &dir)?;
            for f in &outcome.manifest.files {
                println!("{}  {}", f.sha256, dir.join(&f.name).display());
            }
            if outcome.failed_checks.is_empty() {
                Ok(0)
            } else {
                for c in &outcome.failed_checks {
                    eprintln!("check failed: {}: {}", c.name, c.detail);
                }
                Ok(1)
            }
        }
        Command::Solve {
            alpha,
            beta,
            n,
            gamma,
            eta,
            xi,
            d,
            horizon,
            nodes,
            json,
        } => {
            let state = PosteriorState::new(alpha, beta, n, gamma)
                .map_err(|e| Error::config("state", e))?;
            let cfg = PolicyConfig {
                d: TimeLimit::new(d).map_err(|e| Error::config("policy", e))?,
                eta,
                xi,
                horizon,
                quad_nodes: nodes,
                min_items: 0,
                ..PolicyConfig::default()
            };
            cfg.validate().map_err(|e| Error::config("policy", e))?;
            solve(&state, &cfg, json)?;
            Ok(0)
        }
        Command::Sweep { config, seed, out } => {
            let mut spec: SweepSpec = match &config {
                Some(path) => load_json(path)?,
                None => SweepSpec::default(),
            };
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            spec.validate()?;
            let dir = out
                .or_else(|| spec.output.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("results/sweep"));
            let rows = sensitivity_sweep(&spec)?;
            let mut w = OutputDir::create(&dir)?;
            w.write_csv("sweep.csv", &rows)?;
            w.write_json(
                "sweep.json",
                &json!({ "id": "sweep", "seed": spec.seed, "spec": spec }),
            )?;
            w.finish("sweep", spec.seed)?;
            println!("{} rows -> {}", rows.len(), dir.join("sweep.csv").display());
            Ok(0)
        }
    }
}

fn assess(path: &Path, seed: Option<u64>, out: &Path) -> Result<u8> {
    let mut cfg: AssessConfig = load_json(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let transcript = run_assessment(&cfg.profile, &cfg.prior, &cfg.policy, cfg.seed)?;
    let text = summary(&transcript);
    let mut w = OutputDir::create(out)?;
    w.write_json("transcript.json", &transcript)?;
    w.write_bytes("summary.txt", text.as_bytes())?;
    w.finish("assess", cfg.seed)?;
    print!("{text}");
    Ok(0)
}

/// Human-readable outcome of a run.
pub fn summary(t: &Transcript) -> String {
    let (action, reason) = t
        .final_decision()
        .map_or(("none", "none"), |d| (d.action.as_str(), d.reason.as_str()));
    format!(
        "decision: {action} ({reason})\nitems: {}\nfinal E[Z]: {:.4}\nmastery: {} / {}\n",
        t.len(),
        t.final_summary().mean,
        t.final_class.label.as_str(),
        t.final_class.directive.as_str(),
    )
}

fn solve(state: &PosteriorState, cfg: &PolicyConfig, as_json: bool) -> Result<()> {
    let mean = state.expected_z_mean(cfg.d);
    let value = bellman_value(state, cfg, 0)?;
    let decision = decide(state, &History::new(mean), cfg)?;
    if as_json {
        let doc = json!({
            "state": state,
            "ez_mean": mean,
            "value": value,
            "threshold": cfg.threshold(),
            "action": decision.action.as_str(),
        });
        println!("{doc}");
    } else {
        println!("E[Z]      {mean:.6}");
        println!("value     {value:.6}");
        println!("threshold {:.6}", cfg.threshold());
        println!("action    {}", decision.action.as_str());
    }
    Ok(())
}
