//! Experiment orchestration: config loading, trace files, sweeps over the
//! experiment axes, CSV output and charts.

mod results;
pub mod svg;

use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use results::{
    format_table, read_results, summarize, write_results, write_summary, ConfigKey, ResultRow, SummaryRow,
    RESULTS_HEADER, STEADY_FROM_DAY, SUMMARY_HEADER,
};

use crate::decision::PolicyKind;
use crate::experience::{Capacity, ResetMode};
use crate::flight::KinematicParams;
use crate::regression::{EstimatorConfig, EstimatorKind, FeatureMode};
use crate::sim::{run_experiment, ExperimentSpec, LearnerConfig, TimingParams};
use crate::world::{
    builtin_scenario_with, generate_trace, survey_plan, survey_world, ScenarioName, Trace, WorldKind,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenarios: Vec<ScenarioName>,
    pub world: WorldKind,
    /// Defaults to the world's horizon (31 stable, 41 changing).
    pub days: Option<u32>,
    pub num_traces: u32,
    /// First trace seed; also seeds the random policy and isolation forests.
    pub seed: u64,
    pub timing: TimingParams,
    pub kinematics: KinematicParams,
    pub policies: Vec<PolicyKind>,
    pub estimators: Vec<EstimatorKind>,
    /// Memory sizes H.
    pub memory: Vec<Capacity>,
    pub resets: Vec<ResetMode>,
    /// Processing times to sweep; empty means `timing.proc_t` alone.
    pub proc_t: Vec<f64>,
    pub features: FeatureMode,
    pub out_dir: PathBuf,
    /// Defaults to `<out_dir>/traces`.
    pub trace_dir: Option<PathBuf>,
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenarios: ScenarioName::ALL.to_vec(),
            world: WorldKind::Stable,
            days: None,
            num_traces: 20,
            seed: 1,
            timing: TimingParams::default(),
            kinematics: KinematicParams::default(),
            policies: vec![PolicyKind::Learn],
            estimators: vec![EstimatorKind::Tree],
            memory: vec![Capacity::Bounded(12)],
            resets: vec![ResetMode::None],
            proc_t: Vec::new(),
            features: FeatureMode::Coords,
            out_dir: PathBuf::from("out"),
            trace_dir: None,
            svg: false,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_traces == 0 {
            return Err(Error::Config("num_traces must be at least 1".into()));
        }
        if self.days == Some(0) {
            return Err(Error::Config("days must be at least 1".into()));
        }
        let lists = [
            ("scenarios", self.scenarios.is_empty()),
            ("policies", self.policies.is_empty()),
            ("estimators", self.estimators.is_empty()),
            ("memory", self.memory.is_empty()),
            ("resets", self.resets.is_empty()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, empty)| *empty) {
            return Err(Error::Config(format!("{name} must list at least one value")));
        }
        if self.memory.contains(&Capacity::Bounded(0)) {
            return Err(Error::Config("memory size H must be positive".into()));
        }
        self.kinematics.validate()?;
        let plan = survey_plan("check", 0.0);
        for proc_t in self.proc_t_values() {
            TimingParams { proc_t, ..self.timing }.validate(&plan, &self.kinematics)?;
        }
        Ok(())
    }

    pub fn days(&self) -> u32 {
        self.days.unwrap_or_else(|| self.world.default_days())
    }

    pub fn proc_t_values(&self) -> Vec<f64> {
        if self.proc_t.is_empty() { vec![self.timing.proc_t] } else { self.proc_t.clone() }
    }

    pub fn trace_seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.num_traces as u64).map(move |i| self.seed.wrapping_add(i))
    }

    /// Trace files live under `<trace_dir>/<world>/`.
    pub fn trace_dir(&self) -> PathBuf {
        let base = self.trace_dir.clone().unwrap_or_else(|| self.out_dir.join("traces"));
        base.join(self.world.as_str())
    }

    pub fn trace_path(&self, seed: u64) -> PathBuf {
        self.trace_dir().join(format!("trace_{seed}.csv"))
    }

    pub fn apply(&mut self, sweep: &SweepSpec) {
        match &sweep.values {
            SweepValues::Memory(v) => self.memory = v.clone(),
            SweepValues::ProcT(v) => self.proc_t = v.clone(),
            SweepValues::Estimator(v) => self.estimators = v.clone(),
            SweepValues::Policy(v) => self.policies = v.clone(),
            SweepValues::Reset(v) => self.resets = v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Memory,
    ProcT,
    Estimator,
    Policy,
    Reset,
}

impl SweepAxis {
    /// Default value set when `--sweep <axis>` is given without values.
    pub fn default_values(&self) -> &'static str {
        match self {
            SweepAxis::Memory => "8,12,16,20,inf",
            SweepAxis::ProcT => "8,10,12",
            SweepAxis::Estimator => "linear,tree,bayesian",
            SweepAxis::Policy => "learn,wait,go,random,oracle",
            SweepAxis::Reset => "none,reset1,reset2",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Memory => "H",
            SweepAxis::ProcT => "procT",
            SweepAxis::Estimator => "estimator",
            SweepAxis::Policy => "policy",
            SweepAxis::Reset => "reset",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "h" | "memory" => Ok(SweepAxis::Memory),
            "proct" | "proc_t" => Ok(SweepAxis::ProcT),
            "estimator" => Ok(SweepAxis::Estimator),
            "policy" => Ok(SweepAxis::Policy),
            "reset" => Ok(SweepAxis::Reset),
            other => Err(Error::Config(format!("unknown sweep axis '{other}' (expected H, procT, estimator, policy, reset)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValues {
    Memory(Vec<Capacity>),
    ProcT(Vec<f64>),
    Estimator(Vec<EstimatorKind>),
    Policy(Vec<PolicyKind>),
    Reset(Vec<ResetMode>),
}

/// One swept axis, written `axis=v1,v2,...` (e.g. `H=8,12,inf`).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: SweepValues,
}

fn parse_list<T: FromStr<Err = Error>>(values: &str) -> Result<Vec<T>> {
    let out: Vec<T> = values.split(',').map(|v| v.trim()).filter(|v| !v.is_empty()).map(str::parse).collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    Ok(out)
}

impl SweepSpec {
    /// `values` is a comma list; `all` stands for the axis default set.
    pub fn new(axis: SweepAxis, values: &str) -> Result<Self> {
        let values = if values.trim().eq_ignore_ascii_case("all") { axis.default_values() } else { values };
        let values = match axis {
            SweepAxis::Memory => SweepValues::Memory(parse_list(values)?),
            SweepAxis::Estimator => SweepValues::Estimator(parse_list(values)?),
            SweepAxis::Policy => SweepValues::Policy(parse_list(values)?),
            SweepAxis::Reset => SweepValues::Reset(parse_list(values)?),
            SweepAxis::ProcT => {
                let raw: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
                let parsed: Vec<f64> = raw
                    .iter()
                    .map(|v| match v.parse::<f64>() {
                        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
                        _ => Err(Error::Config(format!("procT must be a non-negative number, got '{v}'"))),
                    })
                    .collect::<Result<_>>()?;
                if parsed.is_empty() {
                    return Err(Error::Config("sweep needs at least one value".into()));
                }
                SweepValues::ProcT(parsed)
            }
        };
        Ok(Self { axis, values })
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('=') {
            Some((axis, values)) => SweepSpec::new(axis.parse()?, values),
            None => {
                let axis: SweepAxis = s.parse()?;
                SweepSpec::new(axis, axis.default_values())
            }
        }
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        write(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Generates one trace file per seed. Files are replaced atomically, so
/// rerunning with the same config rewrites identical bytes.
pub fn cmd_gen_traces(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let world = survey_world(cfg.world);
    let plan = survey_plan("traces", 0.0);
    let days = cfg.days();
    fs::create_dir_all(cfg.trace_dir())
        .map_err(|e| Error::Config(format!("cannot create trace directory {}: {e}", cfg.trace_dir().display())))?;
    let seeds: Vec<u64> = cfg.trace_seeds().collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let trace = generate_trace(&world, &plan, days, seed)?;
            let path = cfg.trace_path(seed);
            write_atomic(&path, |w| trace.write_to(w))?;
            Ok(path)
        })
        .collect()
}

pub fn load_traces(cfg: &ExperimentConfig) -> Result<Vec<Trace>> {
    cfg.trace_seeds()
        .map(|seed| {
            let path = cfg.trace_path(seed);
            let file = File::open(&path).map_err(|_| {
                Error::Config(format!(
                    "missing trace file {}; run `waitgo gen-traces` with the same --world, --seed, --traces and --days first",
                    path.display()
                ))
            })?;
            let trace = Trace::read_from(BufReader::new(file), &path.display().to_string())?;
            if trace.seed != seed {
                return Err(Error::Config(format!("{} holds seed {}, expected {seed}", path.display(), trace.seed)));
            }
            Ok(trace)
        })
        .collect()
}

/// Expands the config into the experiments to run. Non-learning policies
/// ignore the estimator, H and reset axes, so they appear once per
/// (scenario, procT). Learning with a reset detector needs a finite H; such
/// combinations are returned separately as skipped.
pub fn expand(cfg: &ExperimentConfig) -> (Vec<ConfigKey>, Vec<ConfigKey>) {
    let mut run = Vec::new();
    let mut skipped = Vec::new();
    for &scenario in &cfg.scenarios {
        for proc_t in cfg.proc_t_values() {
            for &policy in &cfg.policies {
                let base = ConfigKey { scenario, world: cfg.world, policy, estimator: None, memory: None, reset: None, proc_t };
                if policy != PolicyKind::Learn {
                    if !run.contains(&base) {
                        run.push(base);
                    }
                    continue;
                }
                for &est in &cfg.estimators {
                    for &mem in &cfg.memory {
                        for &reset in &cfg.resets {
                            let key = ConfigKey { estimator: Some(est), memory: Some(mem), reset: Some(reset), ..base };
                            let target = if mem == Capacity::Unbounded && reset != ResetMode::None { &mut skipped } else { &mut run };
                            if !target.contains(&key) {
                                target.push(key);
                            }
                        }
                    }
                }
            }
        }
    }
    (run, skipped)
}

pub fn run_config(cfg: &ExperimentConfig, key: &ConfigKey, traces: &[Trace]) -> Result<Vec<ResultRow>> {
    let timing = TimingParams { proc_t: key.proc_t, ..cfg.timing };
    let (plan, world) = builtin_scenario_with(key.scenario, key.world, &timing, &cfg.kinematics)?;
    let mut learner = LearnerConfig { features: cfg.features, ..LearnerConfig::default() };
    if let (Some(est), Some(mem), Some(reset)) = (key.estimator, key.memory, key.reset) {
        learner.estimator = EstimatorConfig::new(est);
        learner.capacity = mem;
        learner.reset = reset;
    }
    let spec = ExperimentSpec {
        plan: &plan,
        world: &world,
        timing,
        kinematics: cfg.kinematics,
        policy: key.policy,
        learner,
        days: cfg.days(),
        policy_seed: cfg.seed,
    };
    let result = run_experiment(&spec, traces)?;
    Ok(result.outcomes.iter().map(|o| ResultRow::from_outcome(*key, o)).collect())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub configs: Vec<ConfigKey>,
    pub skipped: Vec<ConfigKey>,
    pub results_path: PathBuf,
    pub charts: Vec<PathBuf>,
}

/// Runs the full cross-product and writes `results.csv` (plus SVG charts
/// when enabled) into the output directory.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let traces = load_traces(cfg)?;
    let (configs, skipped) = expand(cfg);
    let per_config: Vec<Vec<ResultRow>> =
        configs.par_iter().map(|key| run_config(cfg, key, &traces)).collect::<Result<_>>()?;
    let rows: Vec<ResultRow> = per_config.into_iter().flatten().collect();

    let results_path = cfg.out_dir.join("results.csv");
    write_atomic(&results_path, |w| write_results(w, &rows))?;
    let charts = if cfg.svg { svg::write_charts(&cfg.out_dir, &rows)? } else { Vec::new() };
    Ok(RunOutput { rows, configs, skipped, results_path, charts })
}

/// Summarizes a results file and writes `summary.csv` beside it.
pub fn cmd_report(results: &Path) -> Result<(Vec<SummaryRow>, PathBuf)> {
    let file = File::open(results).map_err(|e| Error::Config(format!("cannot open {}: {e}", results.display())))?;
    let rows = read_results(BufReader::new(file), &results.display().to_string())?;
    let summary = summarize(&rows);
    let path = results.with_file_name("summary.csv");
    write_atomic(&path, |w| write_summary(w, &summary))?;
    Ok((summary, path))
}
