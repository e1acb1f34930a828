//! Experience memory of past detection outcomes and the anomaly detectors
//! that decide when to forget it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::iforest::{IsolationForest, IsolationForestParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExperienceEntry {
    pub wp_id: u32,
    pub hour: u32,
    pub event: u8,
    /// Mission day that produced the entry.
    pub day: u32,
}

/// Per-key cap on stored entries. Serialized as an integer or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Capacity {
    Bounded(usize),
    Unbounded,
}

impl Capacity {
    pub fn limit(&self) -> Option<usize> {
        match self {
            Capacity::Bounded(h) => Some(*h),
            Capacity::Unbounded => None,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Bounded(h) => write!(f, "{h}"),
            Capacity::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Capacity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "unbounded" | "∞" => Ok(Capacity::Unbounded),
            other => match other.parse::<usize>() {
                Ok(h) if h > 0 => Ok(Capacity::Bounded(h)),
                _ => Err(Error::Config(format!("memory size must be a positive integer or 'inf', got '{s}'"))),
            },
        }
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Capacity::Bounded(h) => s.serialize_u64(*h as u64),
            Capacity::Unbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(h) => h.to_string().parse(),
            Raw::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Waypoints and hours of day a mission is expected to cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissionContext {
    pub waypoint_ids: BTreeSet<u32>,
    /// Hour of day at take-off.
    pub t_start: u32,
    /// Operational autonomy in whole hours.
    pub op_t: u32,
}

impl MissionContext {
    pub fn new(waypoint_ids: BTreeSet<u32>, t_start: u32, op_t: u32) -> Result<Self> {
        if op_t == 0 {
            return Err(Error::Config("operational autonomy must be > 0 hours".into()));
        }
        Ok(Self { waypoint_ids, t_start: t_start % 24, op_t })
    }

    /// True when `hour` lies in `[t_start, t_start + op_t]`, wrapping at midnight.
    pub fn covers_hour(&self, hour: u32) -> bool {
        (hour + 24 - self.t_start) % 24 <= self.op_t
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperienceMemory {
    capacity: Capacity,
    store: BTreeMap<(u32, u32), VecDeque<ExperienceEntry>>,
}

impl ExperienceMemory {
    pub fn new(capacity: Capacity) -> Self {
        Self { capacity, store: BTreeMap::new() }
    }

    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.store.values().map(VecDeque::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    /// Appends an entry, evicting the oldest one for the same key when full.
    pub fn record(&mut self, wp_id: u32, hour: u32, event: u8, day: u32) -> Result<()> {
        if hour > 23 || event > 1 {
            return Err(Error::Domain(format!("invalid experience entry hour={hour} event={event}")));
        }
        let list = self.store.entry((wp_id, hour)).or_default();
        list.push_back(ExperienceEntry { wp_id, hour, event, day });
        if let Some(h) = self.capacity.limit() {
            while list.len() > h {
                list.pop_front();
            }
        }
        Ok(())
    }

    pub fn entries_for(&self, wp_id: u32, hour: u32) -> impl Iterator<Item = &ExperienceEntry> {
        self.store.get(&(wp_id, hour)).into_iter().flatten()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExperienceEntry> {
        self.store.values().flatten()
    }

    /// Entries for the mission's waypoints within its time period, in key
    /// order and creation order within a key.
    pub fn relevant_entries(&self, ctx: &MissionContext) -> Vec<ExperienceEntry> {
        self.store
            .iter()
            .filter(|((wp, hour), _)| ctx.waypoint_ids.contains(wp) && ctx.covers_hour(*hour))
            .flat_map(|(_, list)| list.iter().copied())
            .collect()
    }

    /// Drops every entry not created on `keep_day`.
    pub fn reset(&mut self, keep_day: u32) {
        for list in self.store.values_mut() {
            list.retain(|e| e.day == keep_day);
        }
        self.store.retain(|_, list| !list.is_empty());
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "day,wp_id,hour,event")?;
        let mut all: Vec<&ExperienceEntry> = self.iter().collect();
        // Stable sort keeps creation order for equal (day, key).
        all.sort_by_key(|e| (e.day, e.wp_id, e.hour));
        for e in all {
            writeln!(out, "{},{},{},{}", e.day, e.wp_id, e.hour, e.event)?;
        }
        Ok(())
    }

    /// Rebuilds a memory by replaying the file's rows in order.
    pub fn read_from<R: BufRead>(input: R, capacity: Capacity, path: &str) -> Result<Self> {
        let mut mem = ExperienceMemory::new(capacity);
        for (lineno, fields) in csv_rows(input, "day,wp_id,hour,event", 4, path)? {
            let num = |s: &str| s.parse::<u32>().map_err(|_| Error::parse(path, lineno, format!("bad number '{s}'")));
            let (day, wp, hour, ev) = (num(&fields[0])?, num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
            if ev > 1 {
                return Err(Error::parse(path, lineno, "event must be 0 or 1"));
            }
            mem.record(wp, hour, ev as u8, day).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        }
        Ok(mem)
    }
}

/// Total turn-back penalty per mission day.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PenaltyLog {
    daily_totals: BTreeMap<u32, f64>,
}

impl PenaltyLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, day: u32, seconds: f64) -> Result<()> {
        if !(seconds >= 0.0) || !seconds.is_finite() {
            return Err(Error::Domain(format!("penalty must be finite and >= 0, got {seconds}")));
        }
        *self.daily_totals.entry(day).or_insert(0.0) += seconds;
        Ok(())
    }

    pub fn total(&self, day: u32) -> f64 {
        self.daily_totals.get(&day).copied().unwrap_or(0.0)
    }

    pub fn days(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.daily_totals.iter().map(|(d, t)| (*d, *t))
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "day,total_penalty_s")?;
        for (d, t) in self.days() {
            writeln!(out, "{d},{t}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R, path: &str) -> Result<Self> {
        let mut log = PenaltyLog::new();
        for (lineno, f) in csv_rows(input, "day,total_penalty_s", 2, path)? {
            let day = f[0].parse::<u32>().map_err(|_| Error::parse(path, lineno, "bad day"))?;
            let t = f[1].parse::<f64>().map_err(|_| Error::parse(path, lineno, "bad penalty"))?;
            log.add(day, t).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        }
        Ok(log)
    }
}

fn csv_rows<R: BufRead>(input: R, header: &str, width: usize, path: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != header {
                return Err(Error::parse(path, i + 1, format!("expected header '{header}'")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if fields.len() != width {
            return Err(Error::parse(path, i + 1, format!("expected {width} fields")));
        }
        rows.push((i + 1, fields));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetMode {
    None,
    Reset1,
    Reset2,
}

impl ResetMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResetMode::None => "none",
            ResetMode::Reset1 => "reset1",
            ResetMode::Reset2 => "reset2",
        }
    }
}

impl fmt::Display for ResetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(ResetMode::None),
            "reset1" => Ok(ResetMode::Reset1),
            "reset2" => Ok(ResetMode::Reset2),
            other => Err(Error::Config(format!("unknown reset mode '{other}' (expected none, reset1, reset2)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    /// Still inside the first `H` learning days; no decision possible.
    NotReady,
    Quiet,
    Fired,
}

impl CheckOutcome {
    pub fn fired(&self) -> bool {
        matches!(self, CheckOutcome::Fired)
    }

    pub fn checked(&self) -> bool {
        !matches!(self, CheckOutcome::NotReady)
    }
}

/// Threshold detector: fires when today's penalty exceeds the largest daily
/// penalty seen during the first `h` days after `learning_start`.
pub fn reset1_check(log: &PenaltyLog, learning_start: u32, current_day: u32, h: usize) -> CheckOutcome {
    let h = h as u32;
    if current_day < learning_start + h {
        return CheckOutcome::NotReady;
    }
    let baseline = (learning_start..learning_start + h).map(|d| log.total(d)).fold(0.0, f64::max);
    if log.total(current_day) > baseline { CheckOutcome::Fired } else { CheckOutcome::Quiet }
}

/// Isolation-forest detector over the last `h` daily totals, today included.
/// Fires when today's total is an outlier at the forest's contamination level.
pub fn reset2_check(
    log: &PenaltyLog,
    learning_start: u32,
    current_day: u32,
    h: usize,
    params: &IsolationForestParams,
    seed: u64,
) -> Result<CheckOutcome> {
    if current_day < learning_start + h as u32 {
        return Ok(CheckOutcome::NotReady);
    }
    let window: Vec<f64> = (current_day + 1 - h as u32..=current_day).map(|d| log.total(d)).collect();
    let forest = IsolationForest::fit(&window, params, seed)?;
    let today = log.total(current_day);
    Ok(if forest.is_outlier(today) { CheckOutcome::Fired } else { CheckOutcome::Quiet })
}
