use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use waitgo::harness::{self, ExperimentConfig, SweepAxis, SweepSpec};
use waitgo::regression::FeatureMode;
use waitgo::world::{ScenarioName, WorldKind};

#[derive(Parser)]
#[command(name = "waitgo", version, about = "Wait-or-go drone mission simulator and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pre-generate event traces (trace_<seed>.csv), one per seed
    GenTraces(ExperimentArgs),
    /// Run every configuration against the traces and write results.csv
    Run(ExperimentArgs),
    /// Summarize a results.csv into a table and summary.csv
    Report {
        #[arg(default_value = "out/results.csv")]
        results: PathBuf,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// out, out_in, in_out or all (comma separated)
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    world: Option<WorldKind>,
    /// learn, wait, go, random, oracle or all (comma separated)
    #[arg(long)]
    policy: Option<String>,
    /// linear, tree, bayesian or all (comma separated)
    #[arg(long)]
    estimator: Option<String>,
    /// Experience memory size per (waypoint, hour); integers or inf
    #[arg(long = "H")]
    memory: Option<String>,
    /// none, reset1, reset2 or all (comma separated)
    #[arg(long)]
    reset: Option<String>,
    /// Processing time in seconds (comma separated to sweep)
    #[arg(long = "procT")]
    proc_t: Option<String>,
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    traces: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Defaults to <out-dir>/traces
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    /// Also render SVG charts next to results.csv
    #[arg(long)]
    svg: bool,
    /// Regression inputs: coords or id
    #[arg(long)]
    features: Option<FeatureMode>,
    /// Sweep an axis, e.g. H=8,12,16,20,inf or procT=8,10,12 (repeatable)
    #[arg(long)]
    sweep: Vec<SweepSpec>,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = &self.scenario {
            cfg.scenarios = if s.eq_ignore_ascii_case("all") {
                ScenarioName::ALL.to_vec()
            } else {
                s.split(',').map(|v| v.trim().parse()).collect::<waitgo::Result<_>>()?
            };
        }
        let axes = [
            (SweepAxis::Policy, &self.policy),
            (SweepAxis::Estimator, &self.estimator),
            (SweepAxis::Memory, &self.memory),
            (SweepAxis::Reset, &self.reset),
            (SweepAxis::ProcT, &self.proc_t),
        ];
        for (axis, value) in axes {
            if let Some(v) = value {
                cfg.apply(&SweepSpec::new(axis, v).with_context(|| format!("--{axis}"))?);
            }
        }
        for sweep in &self.sweep {
            cfg.apply(sweep);
        }
        if let Some(w) = self.world {
            cfg.world = w;
        }
        if let Some(f) = self.features {
            cfg.features = f;
        }
        cfg.days = self.days.or(cfg.days);
        cfg.num_traces = self.traces.unwrap_or(cfg.num_traces);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(d) = &self.trace_dir {
            cfg.trace_dir = Some(d.clone());
        }
        cfg.svg |= self.svg;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenTraces(args) => {
            let cfg = args.config()?;
            let paths = harness::cmd_gen_traces(&cfg)?;
            println!("wrote {} traces ({} days) to {}", paths.len(), cfg.days(), cfg.trace_dir().display());
        }
        Command::Run(args) => {
            let cfg = args.config()?;
            let out = harness::cmd_run(&cfg)?;
            for key in &out.skipped {
                eprintln!("skipped {} {}: reset detectors need a finite H", key.scenario, key.label());
            }
            for key in &out.configs {
                let n = out.rows.iter().filter(|r| r.key == *key).count();
                println!("{:<7} {:<9} procT={:<4} {:<28} {n} rows", key.scenario, key.world, key.proc_t, key.label());
            }
            println!("wrote {} rows to {}", out.rows.len(), out.results_path.display());
            for chart in &out.charts {
                println!("wrote {}", chart.display());
            }
        }
        Command::Report { results } => {
            let (summary, path) = harness::cmd_report(&results)?;
            print!("{}", harness::format_table(&summary));
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config_error = matches!(e.downcast_ref::<waitgo::Error>(), Some(waitgo::Error::Config(_) | waitgo::Error::Parse { .. }));
            ExitCode::from(if config_error { 2 } else { 1 })
        }
    }
}
