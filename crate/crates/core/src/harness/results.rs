//! Tidy per-day result rows and the summary computed from them. The summary
//! is always computed from rows, whether they come from memory or a CSV file.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::decision::PolicyKind;
use crate::experience::{Capacity, ResetMode};
use crate::regression::EstimatorKind;
use crate::sim::DayOutcome;
use crate::world::{ScenarioName, WorldKind, CHANGE_DAY};
use crate::{Error, Result};

pub const RESULTS_HEADER: &str = "scenario,world,policy,estimator,H,reset,trace_seed,day,mission_time_s,total_penalty_s,ri,proc_t_s,oracle_time_s,reset_checked,reset_fired";

pub const SUMMARY_HEADER: &str = "scenario,world,policy,estimator,H,reset,proc_t_s,rows,traces,mean_ri,mean_ri_post_change,mean_mission_time_s,resets_fired,resets_checked,fpr,improvement_vs_wait,improvement_vs_go,improvement_vs_random";

/// Days before this are the learning warm-up and excluded from means.
pub const STEADY_FROM_DAY: u32 = 12;

/// Identifies one experiment. Baseline policies carry no estimator, H or reset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigKey {
    pub scenario: ScenarioName,
    pub world: WorldKind,
    pub policy: PolicyKind,
    pub estimator: Option<EstimatorKind>,
    pub memory: Option<Capacity>,
    pub reset: Option<ResetMode>,
    pub proc_t: f64,
}

impl ConfigKey {
    fn hash_key(&self) -> (ScenarioName, WorldKind, PolicyKind, Option<EstimatorKind>, Option<Capacity>, Option<ResetMode>, u64) {
        (self.scenario, self.world, self.policy, self.estimator, self.memory, self.reset, self.proc_t.to_bits())
    }

    /// Short human label, e.g. `learn/tree/H=12/reset1`.
    pub fn label(&self) -> String {
        let mut s = self.policy.to_string();
        if let (Some(e), Some(m), Some(r)) = (self.estimator, self.memory, self.reset) {
            let _ = write!(s, "/{e}/H={m}");
            if r != ResetMode::None {
                let _ = write!(s, "/{r}");
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub key: ConfigKey,
    pub trace_seed: u64,
    pub day: u32,
    pub mission_time: f64,
    pub total_penalty: f64,
    pub ri: f64,
    pub oracle_time: f64,
    pub reset_checked: bool,
    pub reset_fired: bool,
}

impl ResultRow {
    pub fn from_outcome(key: ConfigKey, o: &DayOutcome) -> Self {
        Self {
            key,
            trace_seed: o.trace_seed,
            day: o.day,
            mission_time: o.mission_time,
            total_penalty: o.total_penalty,
            ri: o.ri,
            oracle_time: o.oracle_time,
            reset_checked: o.reset_checked,
            reset_fired: o.reset_fired,
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// Floats use the shortest representation that parses back to the same value.
pub fn write_results(out: &mut dyn Write, rows: &[ResultRow]) -> Result<()> {
    writeln!(out, "{RESULTS_HEADER}")?;
    for r in rows {
        let k = &r.key;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            k.scenario,
            k.world,
            k.policy,
            opt(k.estimator),
            opt(k.memory),
            opt(k.reset),
            r.trace_seed,
            r.day,
            r.mission_time,
            r.total_penalty,
            r.ri,
            k.proc_t,
            r.oracle_time,
            u8::from(r.reset_checked),
            u8::from(r.reset_fired),
        )?;
    }
    Ok(())
}

pub fn read_results<R: BufRead>(input: R, path: &str) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    let mut lines = input.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).transpose()?;
    if header.as_deref().map(str::trim) != Some(RESULTS_HEADER) {
        return Err(Error::parse(path, 1, format!("expected header '{RESULTS_HEADER}'")));
    }
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 15 {
            return Err(Error::parse(path, lineno, format!("expected 15 fields, found {}", f.len())));
        }
        let err = |e: Error| Error::parse(path, lineno, e.to_string());
        let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| Error::parse(path, lineno, format!("bad {what} '{s}'")));
        let flag = |s: &str| match s {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(Error::parse(path, lineno, format!("bad flag '{s}'"))),
        };
        fn optional<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<Option<T>> {
            if s == "-" { Ok(None) } else { s.parse().map(Some) }
        }
        let key = ConfigKey {
            scenario: f[0].parse().map_err(err)?,
            world: f[1].parse().map_err(err)?,
            policy: f[2].parse().map_err(err)?,
            estimator: optional(f[3]).map_err(err)?,
            memory: optional(f[4]).map_err(err)?,
            reset: optional(f[5]).map_err(err)?,
            proc_t: num(f[11], "proc_t_s")?,
        };
        rows.push(ResultRow {
            key,
            trace_seed: f[6].parse().map_err(|_| Error::parse(path, lineno, format!("bad trace_seed '{}'", f[6])))?,
            day: f[7].parse().map_err(|_| Error::parse(path, lineno, format!("bad day '{}'", f[7])))?,
            mission_time: num(f[8], "mission_time_s")?,
            total_penalty: num(f[9], "total_penalty_s")?,
            ri: num(f[10], "ri")?,
            oracle_time: num(f[12], "oracle_time_s")?,
            reset_checked: flag(f[13])?,
            reset_fired: flag(f[14])?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub key: ConfigKey,
    pub rows: usize,
    pub traces: usize,
    /// Mean RI from [`STEADY_FROM_DAY`] on; in a changing world only up to the change.
    pub mean_ri: Option<f64>,
    /// Changing world only: mean RI from the change day on.
    pub mean_ri_post_change: Option<f64>,
    /// Over the same days as `mean_ri`.
    pub mean_mission_time: Option<f64>,
    pub resets_fired: usize,
    /// Reset checks on days without a world change.
    pub resets_checked: usize,
    /// Resets fired with no world change, divided by `resets_checked`.
    pub fpr: Option<f64>,
    /// `(T_baseline - T) / T_baseline` on mean mission time.
    pub improvement_vs_wait: Option<f64>,
    pub improvement_vs_go: Option<f64>,
    pub improvement_vs_random: Option<f64>,
}

fn steady(r: &ResultRow) -> bool {
    r.day >= STEADY_FROM_DAY && (r.key.world == WorldKind::Stable || r.day < CHANGE_DAY)
}

fn unchanged(r: &ResultRow) -> bool {
    r.key.world == WorldKind::Stable || r.day < CHANGE_DAY
}

fn mean<'a>(rows: impl Iterator<Item = &'a ResultRow>, f: impl Fn(&ResultRow) -> f64) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for r in rows {
        sum += f(r);
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Groups rows by configuration in first-appearance order.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<ConfigKey> = Vec::new();
    let mut groups: HashMap<_, Vec<&ResultRow>> = HashMap::new();
    for r in rows {
        let g = groups.entry(r.key.hash_key()).or_default();
        if g.is_empty() {
            order.push(r.key);
        }
        g.push(r);
    }
    let mut out: Vec<SummaryRow> = order
        .iter()
        .map(|key| {
            let g = &groups[&key.hash_key()];
            let mut seeds: Vec<u64> = g.iter().map(|r| r.trace_seed).collect();
            seeds.sort_unstable();
            seeds.dedup();
            let resets_fired = g.iter().filter(|r| unchanged(r) && r.reset_fired).count();
            let resets_checked = g.iter().filter(|r| unchanged(r) && r.reset_checked).count();
            SummaryRow {
                key: *key,
                rows: g.len(),
                traces: seeds.len(),
                mean_ri: mean(g.iter().copied().filter(|r| steady(r)), |r| r.ri),
                mean_ri_post_change: (key.world == WorldKind::Changing)
                    .then(|| mean(g.iter().copied().filter(|r| r.day >= CHANGE_DAY), |r| r.ri))
                    .flatten(),
                mean_mission_time: mean(g.iter().copied().filter(|r| steady(r)), |r| r.mission_time),
                resets_fired,
                resets_checked,
                fpr: (resets_checked > 0).then(|| resets_fired as f64 / resets_checked as f64),
                improvement_vs_wait: None,
                improvement_vs_go: None,
                improvement_vs_random: None,
            }
        })
        .collect();

    let baseline = |out: &[SummaryRow], key: &ConfigKey, policy: PolicyKind| -> Option<f64> {
        out.iter()
            .find(|s| {
                s.key.policy == policy
                    && s.key.scenario == key.scenario
                    && s.key.world == key.world
                    && s.key.proc_t.to_bits() == key.proc_t.to_bits()
            })
            .and_then(|s| s.mean_mission_time)
    };
    for i in 0..out.len() {
        let key = out[i].key;
        let Some(t) = out[i].mean_mission_time else { continue };
        let improvement = |b: Option<f64>| b.map(|b| (b - t) / b);
        out[i].improvement_vs_wait = improvement(baseline(&out, &key, PolicyKind::Wait));
        out[i].improvement_vs_go = improvement(baseline(&out, &key, PolicyKind::Go));
        out[i].improvement_vs_random = improvement(baseline(&out, &key, PolicyKind::Random));
    }
    out
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn write_summary(out: &mut dyn Write, summary: &[SummaryRow]) -> Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for s in summary {
        let k = &s.key;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            k.scenario,
            k.world,
            k.policy,
            opt(k.estimator),
            opt(k.memory),
            opt(k.reset),
            k.proc_t,
            s.rows,
            s.traces,
            cell(s.mean_ri),
            cell(s.mean_ri_post_change),
            cell(s.mean_mission_time),
            s.resets_fired,
            s.resets_checked,
            cell(s.fpr),
            cell(s.improvement_vs_wait),
            cell(s.improvement_vs_go),
            cell(s.improvement_vs_random),
        )?;
    }
    Ok(())
}

/// Aligned text table; RI, FPR and improvements shown as percentages.
pub fn format_table(summary: &[SummaryRow]) -> String {
    let pct = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{:.2}%", 100.0 * x));
    let mut table = vec![[
        "scenario", "world", "config", "procT", "rows", "RI", "RI post", "time (s)", "FPR", "vs wait", "vs go", "vs random",
    ]
    .map(String::from)
    .to_vec()];
    for s in summary {
        table.push(vec![
            s.key.scenario.to_string(),
            s.key.world.to_string(),
            s.key.label(),
            s.key.proc_t.to_string(),
            s.rows.to_string(),
            pct(s.mean_ri),
            pct(s.mean_ri_post_change),
            s.mean_mission_time.map_or_else(|| "-".to_string(), |t| format!("{t:.1}")),
            s.fpr.map_or_else(|| "-".to_string(), |f| format!("{:.2}% ({}/{})", 100.0 * f, s.resets_fired, s.resets_checked)),
            pct(s.improvement_vs_wait),
            pct(s.improvement_vs_go),
            pct(s.improvement_vs_random),
        ]);
    }
    let widths: Vec<usize> =
        (0..table[0].len()).map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (v, w))| if c < 3 { format!("{v:<w$}") } else { format!("{v:>w$}") })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
