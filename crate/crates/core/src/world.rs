//! Ground truth: mission geometry, the space- and time-dependent event
//! probability field, and pre-sampled event traces.
//!
//! The simulator never reads the probability field during replay; it only
//! sees the events stored in a [`Trace`].

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::flight::KinematicParams;
use crate::rng;
use crate::sim::{self, TimingParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

impl Waypoint {
    pub fn new(id: u32, x: f64, y: f64) -> Self {
        Self { id, x, y }
    }

    pub fn distance_to(&self, other: &Waypoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Ordered visiting sequence; the first and last entries are the home location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan {
    pub name: String,
    pub waypoints: Vec<Waypoint>,
    /// Take-off time as fractional hour of day.
    pub start_hour: f64,
}

impl MissionPlan {
    pub fn validate(&self) -> Result<()> {
        let n = self.waypoints.len();
        if n < 3 {
            return Err(Error::Config(format!("plan '{}' needs at least 3 waypoints, has {n}", self.name)));
        }
        let (first, last) = (&self.waypoints[0], &self.waypoints[n - 1]);
        if first != last {
            return Err(Error::Config(format!("plan '{}' must start and end at home", self.name)));
        }
        if self.waypoints.iter().any(|w| !w.x.is_finite() || !w.y.is_finite()) {
            return Err(Error::Config(format!("plan '{}' has non-finite coordinates", self.name)));
        }
        let mut ids = BTreeSet::new();
        for w in &self.waypoints[..n - 1] {
            if !ids.insert(w.id) {
                return Err(Error::Config(format!("plan '{}' repeats waypoint id {}", self.name, w.id)));
            }
        }
        if !(0.0..24.0).contains(&self.start_hour) {
            return Err(Error::Config(format!("start hour {} outside [0, 24)", self.start_hour)));
        }
        Ok(())
    }

    pub fn home(&self) -> &Waypoint {
        &self.waypoints[0]
    }

    /// Points of interest, i.e. everything except the home location at both ends.
    pub fn interior(&self) -> &[Waypoint] {
        &self.waypoints[1..self.waypoints.len() - 1]
    }

    /// Axis-aligned bounding box `(min_x, min_y, max_x, max_y)` over all waypoints.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.waypoints.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), w| (a.min(w.x), b.min(w.y), c.max(w.x), d.max(w.y)),
        )
    }

    /// Hash of the waypoint geometry. Start hour and name are excluded so
    /// scenarios sharing a grid can share traces.
    pub fn geometry_hash(&self) -> u64 {
        let mut s = String::new();
        for w in &self.waypoints {
            s.push_str(&format!("{}:{:?}:{:?};", w.id, w.x, w.y));
        }
        fnv1a64(s.as_bytes())
    }
}

/// Half-open rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub rect: Rect,
    /// Event probability outside the time window.
    pub base_prob: f64,
    /// Event probability inside the time window.
    pub window_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityField {
    pub regions: Vec<Region>,
    /// `[start_hour, end_hour)` during which `window_prob` applies.
    pub time_window: (u32, u32),
}

impl ProbabilityField {
    pub fn validate(&self) -> Result<()> {
        for r in &self.regions {
            for p in [r.base_prob, r.window_prob] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Config(format!("probability {p} outside [0, 1]")));
                }
            }
        }
        let (s, e) = self.time_window;
        if s > 24 || e > 24 || s > e {
            return Err(Error::Config(format!("invalid time window [{s}, {e})")));
        }
        Ok(())
    }

    fn region_of(&self, wp: &Waypoint) -> Result<&Region> {
        let mut hits = self.regions.iter().filter(|r| r.rect.contains(wp.x, wp.y));
        match (hits.next(), hits.next()) {
            (Some(r), None) => Ok(r),
            (None, _) => Err(Error::Config(format!("waypoint {} ({}, {}) lies in no region", wp.id, wp.x, wp.y))),
            (Some(_), Some(_)) => {
                Err(Error::Config(format!("waypoint {} ({}, {}) lies in several regions", wp.id, wp.x, wp.y)))
            }
        }
    }

    pub fn prob(&self, wp: &Waypoint, hour: u32) -> Result<f64> {
        let region = self.region_of(wp)?;
        let (s, e) = self.time_window;
        Ok(if hour >= s && hour < e { region.window_prob } else { region.base_prob })
    }

    /// Same regions with base and window probabilities exchanged.
    pub fn reversed(&self) -> Self {
        Self {
            regions: self
                .regions
                .iter()
                .map(|r| Region { base_prob: r.window_prob, window_prob: r.base_prob, ..*r })
                .collect(),
            time_window: self.time_window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldModel {
    pub field_before: ProbabilityField,
    pub field_after: ProbabilityField,
    /// First day governed by `field_after`; `None` for a stable world.
    pub change_day: Option<u32>,
}

impl WorldModel {
    pub fn stable(field: ProbabilityField) -> Self {
        Self { field_after: field.clone(), field_before: field, change_day: None }
    }

    pub fn validate(&self) -> Result<()> {
        self.field_before.validate()?;
        self.field_after.validate()?;
        if self.change_day == Some(0) {
            return Err(Error::Config("change_day must be >= 1".into()));
        }
        Ok(())
    }

    pub fn field_for_day(&self, day: u32) -> &ProbabilityField {
        match self.change_day {
            Some(c) if day >= c => &self.field_after,
            _ => &self.field_before,
        }
    }

    pub fn content_hash(&self) -> u64 {
        fnv1a64(format!("{self:?}").as_bytes())
    }
}

/// Ground-truth event probability at `wp` on `day` during `hour`.
pub fn true_prob(world: &WorldModel, wp: &Waypoint, day: u32, hour: u32) -> Result<f64> {
    if hour > 23 {
        return Err(Error::Domain(format!("hour {hour} outside 0..=23")));
    }
    world.field_for_day(day).prob(wp, hour)
}

/// Pre-sampled detection events for every `(day, waypoint, hour)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub seed: u64,
    pub days: u32,
    pub plan_hash: u64,
    pub world_hash: u64,
    wp_ids: Vec<u32>,
    events: Vec<u8>,
}

impl Trace {
    fn index(&self, day: u32, wp_id: u32, hour: u32) -> Option<usize> {
        if day >= self.days || hour > 23 {
            return None;
        }
        let w = self.wp_ids.binary_search(&wp_id).ok()?;
        Some(((day as usize * self.wp_ids.len()) + w) * 24 + hour as usize)
    }

    pub fn event(&self, day: u32, wp_id: u32, hour: u32) -> Result<u8> {
        self.index(day, wp_id, hour)
            .map(|i| self.events[i])
            .ok_or(Error::TraceMiss { day, wp_id, hour })
    }

    pub fn waypoint_ids(&self) -> &[u32] {
        &self.wp_ids
    }

    /// Rows `(day, wp_id, hour, event)` in lexicographic key order.
    pub fn rows(&self) -> impl Iterator<Item = (u32, u32, u32, u8)> + '_ {
        (0..self.days).flat_map(move |d| {
            self.wp_ids.iter().flat_map(move |&w| {
                (0..24).map(move |h| (d, w, h, self.events[self.index(d, w, h).unwrap()]))
            })
        })
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# waitgo-trace v1")?;
        writeln!(out, "# seed={}", self.seed)?;
        writeln!(out, "# days={}", self.days)?;
        writeln!(out, "# plan_hash={:016x}", self.plan_hash)?;
        writeln!(out, "# world_hash={:016x}", self.world_hash)?;
        writeln!(out, "day,wp_id,hour,event")?;
        for (d, w, h, e) in self.rows() {
            writeln!(out, "{d},{w},{h},{e}")?;
        }
        Ok(())
    }

    /// Parses the format produced by [`Trace::write_to`]. `path` only labels errors.
    pub fn read_from<R: BufRead>(input: R, path: &str) -> Result<Trace> {
        let mut seed = None;
        let mut days = None;
        let mut plan_hash = None;
        let mut world_hash = None;
        let mut rows: Vec<(u32, u32, u32, u8)> = Vec::new();
        let mut saw_columns = false;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    let bad = |_| Error::parse(path, lineno, format!("bad value for {k}"));
                    match k.trim() {
                        "seed" => seed = Some(v.trim().parse::<u64>().map_err(bad)?),
                        "days" => days = Some(v.trim().parse::<u32>().map_err(bad)?),
                        "plan_hash" => plan_hash = Some(u64::from_str_radix(v.trim(), 16).map_err(bad)?),
                        "world_hash" => world_hash = Some(u64::from_str_radix(v.trim(), 16).map_err(bad)?),
                        _ => {}
                    }
                }
                continue;
            }
            if !saw_columns {
                if line != "day,wp_id,hour,event" {
                    return Err(Error::parse(path, lineno, "expected column header 'day,wp_id,hour,event'"));
                }
                saw_columns = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(Error::parse(path, lineno, "expected 4 fields"));
            }
            let num = |s: &str| s.trim().parse::<u32>().map_err(|_| Error::parse(path, lineno, format!("bad number '{s}'")));
            let (d, w, h, e) = (num(f[0])?, num(f[1])?, num(f[2])?, num(f[3])?);
            if e > 1 || h > 23 {
                return Err(Error::parse(path, lineno, "event must be 0/1 and hour 0..=23"));
            }
            rows.push((d, w, h, e as u8));
        }
        let missing = |what: &str| Error::parse(path, 0, format!("missing header field {what}"));
        let seed = seed.ok_or_else(|| missing("seed"))?;
        let days = days.ok_or_else(|| missing("days"))?;
        let plan_hash = plan_hash.ok_or_else(|| missing("plan_hash"))?;
        let world_hash = world_hash.ok_or_else(|| missing("world_hash"))?;
        let wp_ids: Vec<u32> = rows.iter().map(|r| r.1).collect::<BTreeSet<_>>().into_iter().collect();
        let mut trace = Trace { seed, days, plan_hash, world_hash, events: vec![2; days as usize * wp_ids.len() * 24], wp_ids };
        for (d, w, h, e) in rows {
            let idx = trace.index(d, w, h).ok_or_else(|| Error::parse(path, 0, format!("day {d} beyond declared days")))?;
            trace.events[idx] = e;
        }
        if trace.events.contains(&2) {
            return Err(Error::parse(path, 0, "trace does not cover every (day, waypoint, hour)"));
        }
        Ok(trace)
    }
}

/// Samples a Bernoulli event for every `(day, interior waypoint, hour)`.
///
/// Each draw is keyed on `(seed, day, wp_id, hour)`, so the result does not
/// depend on generation order. Two worlds sampled with the same seed share
/// their underlying uniforms.
pub fn generate_trace(world: &WorldModel, plan: &MissionPlan, days: u32, seed: u64) -> Result<Trace> {
    if days == 0 {
        return Err(Error::Config("trace needs at least one day".into()));
    }
    plan.validate()?;
    world.validate()?;
    let wp_ids: Vec<u32> = plan.interior().iter().map(|w| w.id).collect::<BTreeSet<_>>().into_iter().collect();
    let by_id = |id: u32| plan.interior().iter().find(|w| w.id == id).copied().unwrap();
    let mut events = Vec::with_capacity(days as usize * wp_ids.len() * 24);
    for day in 0..days {
        for &id in &wp_ids {
            let wp = by_id(id);
            for hour in 0..24u32 {
                let p = true_prob(world, &wp, day, hour)?;
                let u = rng::uniform(seed, &[day as u64, id as u64, hour as u64]);
                events.push(u8::from(u < p));
            }
        }
    }
    Ok(Trace { seed, days, plan_hash: plan.geometry_hash(), world_hash: world.content_hash(), wp_ids, events })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Out,
    OutIn,
    InOut,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 3] = [ScenarioName::Out, ScenarioName::OutIn, ScenarioName::InOut];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioName::Out => "out",
            ScenarioName::OutIn => "out_in",
            ScenarioName::InOut => "in_out",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "out" => Ok(ScenarioName::Out),
            "out_in" => Ok(ScenarioName::OutIn),
            "in_out" => Ok(ScenarioName::InOut),
            other => Err(Error::Config(format!("unknown scenario '{other}' (expected out, out_in, in_out)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldKind {
    Stable,
    Changing,
}

impl WorldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WorldKind::Stable => "stable",
            WorldKind::Changing => "changing",
        }
    }

    /// Experiment length: 30 days after day 0, or 20 more days after the change.
    pub fn default_days(&self) -> u32 {
        match self {
            WorldKind::Stable => 31,
            WorldKind::Changing => CHANGE_DAY + 20,
        }
    }
}

impl fmt::Display for WorldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WorldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stable" => Ok(WorldKind::Stable),
            "changing" => Ok(WorldKind::Changing),
            other => Err(Error::Config(format!("unknown world '{other}' (expected stable, changing)"))),
        }
    }
}

pub const CHANGE_DAY: u32 = 21;
pub const GRID_COLS: u32 = 10;
pub const GRID_ROWS: u32 = 5;
pub const GRID_SPACING: f64 = 50.0;
pub const HOME_OFFSET: f64 = 30.0;
const WINDOW: (u32, u32) = (12, 16);
const LOW: f64 = 0.1;
const HIGH: f64 = 0.6;

/// The 10 x 5 survey grid flown column by column, starting and ending at a
/// home point diagonally offset from the first corner.
///
/// Columns 4..=8 (path positions 21..=45) form the red region, so the path
/// covers most of the green region first, then all of the red region, then
/// the remaining green column.
pub fn survey_plan(name: &str, start_hour: f64) -> MissionPlan {
    let home = Waypoint::new(0, -HOME_OFFSET, -HOME_OFFSET);
    let mut waypoints = vec![home];
    let mut id = 1;
    for c in 0..GRID_COLS {
        let rows: Vec<u32> = if c % 2 == 0 { (0..GRID_ROWS).collect() } else { (0..GRID_ROWS).rev().collect() };
        for r in rows {
            waypoints.push(Waypoint::new(id, c as f64 * GRID_SPACING, r as f64 * GRID_SPACING));
            id += 1;
        }
    }
    waypoints.push(home);
    MissionPlan { name: name.to_string(), waypoints, start_hour }
}

/// Two-region field over [`survey_plan`]: green is 0.1 outside and 0.6 inside
/// 12:00-15:59; red is the opposite.
pub fn survey_field() -> ProbabilityField {
    let half = GRID_SPACING / 2.0;
    let y0 = -half;
    let y1 = (GRID_ROWS - 1) as f64 * GRID_SPACING + half;
    let col_edge = |c: u32| c as f64 * GRID_SPACING - half;
    let rect = |c0: u32, c1: u32| Rect { x0: col_edge(c0), y0, x1: col_edge(c1), y1 };
    let green = |rect| Region { rect, base_prob: LOW, window_prob: HIGH };
    let red = |rect| Region { rect, base_prob: HIGH, window_prob: LOW };
    ProbabilityField {
        regions: vec![green(rect(0, 4)), red(rect(4, 9)), green(rect(9, 10))],
        time_window: WINDOW,
    }
}

pub fn survey_world(kind: WorldKind) -> WorldModel {
    let field = survey_field();
    match kind {
        WorldKind::Stable => WorldModel::stable(field),
        WorldKind::Changing => {
            WorldModel { field_after: field.reversed(), field_before: field, change_day: Some(CHANGE_DAY) }
        }
    }
}

/// Builtin scenario with default timing and kinematics.
pub fn builtin_scenario(name: ScenarioName, kind: WorldKind) -> Result<(MissionPlan, WorldModel)> {
    builtin_scenario_with(name, kind, &TimingParams::default(), &KinematicParams::default())
}

/// Builtin scenario whose start hour is solved for the given timing.
///
/// `out` starts at 08:00. `out_in` and `in_out` start so that the midpoint of
/// the oracle's expected mission (stable world, day 0) falls on 12:00 and
/// 16:00 respectively.
pub fn builtin_scenario_with(
    name: ScenarioName,
    kind: WorldKind,
    timing: &TimingParams,
    kinematics: &KinematicParams,
) -> Result<(MissionPlan, WorldModel)> {
    let world = survey_world(kind);
    let start_hour = match name {
        ScenarioName::Out => 8.0,
        ScenarioName::OutIn => solve_midpoint_start(WINDOW.0 as f64, timing, kinematics)?,
        ScenarioName::InOut => solve_midpoint_start(WINDOW.1 as f64, timing, kinematics)?,
    };
    Ok((survey_plan(name.as_str(), start_hour), world))
}

/// Fixed point of `start = boundary - T(start) / 2`, where `T` is the
/// oracle's expected mission duration in hours.
fn solve_midpoint_start(boundary_hour: f64, timing: &TimingParams, k: &KinematicParams) -> Result<f64> {
    let world = survey_world(WorldKind::Stable);
    let duration_h = |start: f64| -> Result<f64> {
        let plan = survey_plan("solve", start);
        Ok(sim::oracle_expected_mission_time(&plan, &world, 0, timing, k)? / 3600.0)
    };
    let mut start = boundary_hour - 0.25;
    let mut prev = f64::NAN;
    for _ in 0..50 {
        let next = boundary_hour - duration_h(start)? / 2.0;
        if (next - start).abs() < 1e-9 {
            return Ok(next);
        }
        // A two-cycle appears when the midpoint straddles an hour edge; settle between.
        if (next - prev).abs() < 1e-9 {
            return Ok(0.5 * (start + next));
        }
        prev = start;
        start = next;
    }
    Ok(start)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region_color(wp: &Waypoint) -> &'static str {
        if true_prob(&survey_world(WorldKind::Stable), wp, 0, 9).unwrap() == LOW { "green" } else { "red" }
    }

    #[test]
    fn survey_plan_geometry() {
        let plan = survey_plan("t", 8.0);
        plan.validate().unwrap();
        assert_eq!(plan.interior().len(), 50);
        let xs: Vec<f64> = plan.interior().iter().map(|w| w.x).collect();
        let ys: Vec<f64> = plan.interior().iter().map(|w| w.y).collect();
        let span = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
        assert_eq!(span(&xs), 450.0);
        assert_eq!(span(&ys), 200.0);
        for pair in plan.interior().windows(2) {
            assert_eq!(pair[0].distance_to(&pair[1]), 50.0);
        }
    }

    #[test]
    fn path_scans_most_green_then_red_then_rest() {
        let plan = survey_plan("t", 8.0);
        let colors: Vec<&str> = plan.interior().iter().map(region_color).collect();
        assert!(colors[..20].iter().all(|c| *c == "green"));
        assert!(colors[20..45].iter().all(|c| *c == "red"));
        assert!(colors[45..].iter().all(|c| *c == "green"));
    }

    #[test]
    fn true_prob_examples() {
        let green = Waypoint::new(1, 0.0, 0.0);
        let stable = survey_world(WorldKind::Stable);
        let changing = survey_world(WorldKind::Changing);
        assert_eq!(true_prob(&stable, &green, 3, 13).unwrap(), 0.6);
        assert_eq!(true_prob(&stable, &green, 3, 9).unwrap(), 0.1);
        assert_eq!(true_prob(&changing, &green, 20, 9).unwrap(), 0.1);
        assert_eq!(true_prob(&changing, &green, 21, 9).unwrap(), 0.6);
        assert_eq!(true_prob(&stable, &green, 40, 9).unwrap(), 0.1);
        assert!(matches!(true_prob(&stable, &green, 0, 24), Err(Error::Domain(_))));
        let outside = Waypoint::new(99, 1000.0, 0.0);
        assert!(matches!(true_prob(&stable, &outside, 0, 9), Err(Error::Config(_))));
    }

    #[test]
    fn changing_world_reverses_every_probability() {
        let w = survey_world(WorldKind::Changing);
        let plan = survey_plan("t", 8.0);
        for wp in plan.interior() {
            for h in 0..24 {
                let before = true_prob(&w, wp, 0, h).unwrap();
                let after = true_prob(&w, wp, CHANGE_DAY, h).unwrap();
                assert!((before + after - 0.7).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overlapping_regions_are_rejected() {
        let mut f = survey_field();
        f.regions.push(f.regions[0]);
        let wp = Waypoint::new(1, 0.0, 0.0);
        assert!(matches!(f.prob(&wp, 3), Err(Error::Config(_))));
    }

    #[test]
    fn degenerate_probabilities_give_constant_traces() {
        let plan = survey_plan("t", 8.0);
        for (p, expected) in [(0.0, 0u8), (1.0, 1u8)] {
            let mut field = survey_field();
            for r in &mut field.regions {
                r.base_prob = p;
                r.window_prob = p;
            }
            let t = generate_trace(&WorldModel::stable(field), &plan, 3, 11).unwrap();
            assert!(t.rows().all(|r| r.3 == expected));
        }
    }

    #[test]
    fn traces_are_deterministic() {
        let plan = survey_plan("t", 8.0);
        let w = survey_world(WorldKind::Changing);
        let a = generate_trace(&w, &plan, 5, 77).unwrap();
        let b = generate_trace(&w, &plan, 5, 77).unwrap();
        assert_eq!(a, b);
        let c = generate_trace(&w, &plan, 5, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empirical_frequency_converges() {
        let plan = survey_plan("t", 8.0);
        let w = survey_world(WorldKind::Stable);
        let t = generate_trace(&w, &plan, 100, 5).unwrap();
        // 50 waypoints x 100 days = 5000 samples per hour; 25 green + 25 red.
        for (hour, green_p) in [(9u32, LOW), (13, HIGH)] {
            let mut hits = [0usize; 2];
            let mut n = [0usize; 2];
            for wp in plan.interior() {
                let g = usize::from(region_color(wp) == "green");
                for d in 0..100 {
                    hits[g] += t.event(d, wp.id, hour).unwrap() as usize;
                    n[g] += 1;
                }
            }
            let red_p = if green_p == LOW { HIGH } else { LOW };
            assert!((hits[1] as f64 / n[1] as f64 - green_p).abs() < 0.02);
            assert!((hits[0] as f64 / n[0] as f64 - red_p).abs() < 0.02);
        }
    }

    #[test]
    fn trace_file_round_trip() {
        let plan = survey_plan("t", 8.0);
        let w = survey_world(WorldKind::Stable);
        let t = generate_trace(&w, &plan, 2, 3).unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# waitgo-trace v1\n# seed=3\n# days=2\n"));
        assert!(text.contains("\nday,wp_id,hour,event\n0,1,0,"));
        let back = Trace::read_from(&buf[..], "mem").unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn truncated_trace_is_rejected() {
        let plan = survey_plan("t", 8.0);
        let t = generate_trace(&survey_world(WorldKind::Stable), &plan, 1, 3).unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(100).map(|l| format!("{l}\n")).collect();
        assert!(Trace::read_from(cut.as_bytes(), "cut").is_err());
    }

    #[test]
    fn trace_miss_is_an_error() {
        let plan = survey_plan("t", 8.0);
        let t = generate_trace(&survey_world(WorldKind::Stable), &plan, 1, 3).unwrap();
        assert!(matches!(t.event(1, 1, 0), Err(Error::TraceMiss { .. })));
        assert!(matches!(t.event(0, 0, 0), Err(Error::TraceMiss { .. })));
    }

    #[test]
    fn scenario_names_parse() {
        assert_eq!("out-in".parse::<ScenarioName>().unwrap(), ScenarioName::OutIn);
        assert_eq!("in_out".parse::<ScenarioName>().unwrap(), ScenarioName::InOut);
        assert!("sideways".parse::<ScenarioName>().is_err());
        assert!("weird".parse::<WorldKind>().is_err());
    }
}
