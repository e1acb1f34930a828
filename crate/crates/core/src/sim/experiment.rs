//! Multi-day experiments: each day the learner refits its estimator on
//! relevant experience, flies, records what it saw, and may reset its memory.
//! Every policy is compared against the oracle on the same trace and day.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::{run_mission, EstimateSource, MissionReport, NoSource, TimingParams, TruthSource};
use crate::decision::{Policy, PolicyKind};
use crate::experience::{
    reset1_check, reset2_check, Capacity, CheckOutcome, ExperienceMemory, MissionContext, PenaltyLog, ResetMode,
};
use crate::flight::{flight_time, penalty_time, KinematicParams};
use crate::iforest::IsolationForestParams;
use crate::regression::{EstimatorConfig, EstimatorKind, FeatureEncoder, FeatureMode, ProbEstimator, Sample};
use crate::rng;
use crate::world::{MissionPlan, Trace, Waypoint, WorldModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub estimator: EstimatorConfig,
    pub features: FeatureMode,
    pub capacity: Capacity,
    pub reset: ResetMode,
    pub forest: IsolationForestParams,
    /// Operational autonomy in hours; derived from the plan when `None`.
    pub op_t_hours: Option<u32>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            estimator: EstimatorConfig::new(EstimatorKind::Tree),
            features: FeatureMode::Coords,
            capacity: Capacity::Bounded(12),
            reset: ResetMode::None,
            forest: IsolationForestParams::default(),
            op_t_hours: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec<'a> {
    pub plan: &'a MissionPlan,
    pub world: &'a WorldModel,
    pub timing: TimingParams,
    pub kinematics: KinematicParams,
    pub policy: PolicyKind,
    pub learner: LearnerConfig,
    pub days: u32,
    /// Seeds the random policy and the isolation forests.
    pub policy_seed: u64,
}

impl ExperimentSpec<'_> {
    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        self.world.validate()?;
        self.kinematics.validate()?;
        self.timing.validate(self.plan, &self.kinematics)?;
        if self.days == 0 {
            return Err(Error::Config("experiment needs at least one day".into()));
        }
        if self.policy == PolicyKind::Learn
            && self.learner.reset != ResetMode::None
            && self.learner.capacity == Capacity::Unbounded
        {
            return Err(Error::Config("reset detectors need a finite memory size H".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayOutcome {
    pub trace_seed: u64,
    pub day: u32,
    pub mission_time: f64,
    pub total_penalty: f64,
    pub oracle_time: f64,
    /// `(mission_time - oracle_time) / oracle_time`.
    pub ri: f64,
    pub reset_checked: bool,
    pub reset_fired: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Sorted by `(trace_seed, day)`.
    pub outcomes: Vec<DayOutcome>,
    pub days: u32,
}

impl ExperimentResult {
    fn mean_by_day(&self, f: impl Fn(&DayOutcome) -> f64) -> Vec<f64> {
        let mut sum = vec![0.0; self.days as usize];
        let mut n = vec![0usize; self.days as usize];
        for o in &self.outcomes {
            sum[o.day as usize] += f(o);
            n[o.day as usize] += 1;
        }
        sum.iter().zip(&n).map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 }).collect()
    }

    /// Relative increase over the oracle per day, averaged over traces.
    pub fn ri_series(&self) -> Vec<f64> {
        self.mean_by_day(|o| o.ri)
    }

    pub fn mission_time_series(&self) -> Vec<f64> {
        self.mean_by_day(|o| o.mission_time)
    }

    fn mean_over(&self, days: RangeInclusive<u32>, f: impl Fn(&DayOutcome) -> f64) -> f64 {
        let v: Vec<f64> = self.outcomes.iter().filter(|o| days.contains(&o.day)).map(f).collect();
        v.iter().sum::<f64>() / v.len() as f64
    }

    pub fn mean_ri(&self, days: RangeInclusive<u32>) -> f64 {
        self.mean_over(days, |o| o.ri)
    }

    pub fn mean_mission_time(&self, days: RangeInclusive<u32>) -> f64 {
        self.mean_over(days, |o| o.mission_time)
    }

    /// `(fired, checked)` reset counts over all traces and days.
    pub fn reset_counts(&self) -> (usize, usize) {
        let fired = self.outcomes.iter().filter(|o| o.reset_fired).count();
        let checked = self.outcomes.iter().filter(|o| o.reset_checked).count();
        (fired, checked)
    }
}

/// Mission context covering the plan's waypoints from take-off until the
/// latest possible landing (every event occurring and every "go" turning back).
pub fn mission_context(
    plan: &MissionPlan,
    timing: &TimingParams,
    k: &KinematicParams,
    op_t_hours: Option<u32>,
) -> Result<MissionContext> {
    let op_t = match op_t_hours {
        Some(h) => h,
        None => {
            let w = &plan.waypoints;
            let mut worst = k.takeoff_time + k.land_time + flight_time(w[0].distance_to(&w[1]), k)?;
            for i in 1..w.len() - 1 {
                let leg = w[i].distance_to(&w[i + 1]);
                worst += timing.sense_t
                    + timing.proc_t
                    + flight_time(leg, k)?
                    + penalty_time(leg, timing.proc_t, k)?
                    + timing.action_t;
            }
            ((plan.start_hour.fract() + worst / 3600.0).ceil() as u32).max(1)
        }
    };
    MissionContext::new(plan.interior().iter().map(|w| w.id).collect(), plan.start_hour.floor() as u32, op_t)
}

/// Runs every trace independently (in parallel) and merges the outcomes in
/// a fixed order.
pub fn run_experiment(spec: &ExperimentSpec<'_>, traces: &[Trace]) -> Result<ExperimentResult> {
    spec.validate()?;
    if traces.is_empty() {
        return Err(Error::Config("experiment needs at least one trace".into()));
    }
    let per_trace: Vec<Vec<DayOutcome>> = traces.par_iter().map(|t| run_trace(spec, t)).collect::<Result<_>>()?;
    let mut outcomes: Vec<DayOutcome> = per_trace.into_iter().flatten().collect();
    outcomes.sort_by_key(|o| (o.trace_seed, o.day));
    Ok(ExperimentResult { outcomes, days: spec.days })
}

pub fn run_trace(spec: &ExperimentSpec<'_>, trace: &Trace) -> Result<Vec<DayOutcome>> {
    if trace.plan_hash != spec.plan.geometry_hash() {
        return Err(Error::Config(format!("trace {} was generated for a different plan", trace.seed)));
    }
    if trace.world_hash != spec.world.content_hash() {
        return Err(Error::Config(format!("trace {} was generated for a different world", trace.seed)));
    }
    if trace.days < spec.days {
        return Err(Error::Config(format!("trace {} covers {} days, experiment needs {}", trace.seed, trace.days, spec.days)));
    }
    let (plan, timing, k) = (spec.plan, &spec.timing, &spec.kinematics);
    let mut policy = Policy::new(spec.policy, spec.policy_seed);
    let mut learner = (spec.policy == PolicyKind::Learn).then(|| Learner::new(spec)).transpose()?;

    let mut outcomes = Vec::with_capacity(spec.days as usize);
    for day in 0..spec.days {
        let truth = TruthSource { world: spec.world, day };
        let oracle = run_mission(plan, timing, k, &mut Policy::Oracle, &truth, trace, day)?;
        let report = match (&mut learner, spec.policy) {
            (_, PolicyKind::Oracle) => oracle.clone(),
            (Some(l), _) => {
                let estimator = l.fit()?;
                let source = EstimateSource { estimator: &estimator, encoder: &l.encoder };
                run_mission(plan, timing, k, &mut policy, &source, trace, day)?
            }
            (None, _) => run_mission(plan, timing, k, &mut policy, &NoSource, trace, day)?,
        };
        let check = match &mut learner {
            Some(l) => l.after_mission(&report, trace.seed)?,
            None => CheckOutcome::NotReady,
        };
        outcomes.push(DayOutcome {
            trace_seed: trace.seed,
            day,
            mission_time: report.mission_time,
            total_penalty: report.total_penalty,
            oracle_time: oracle.mission_time,
            ri: (report.mission_time - oracle.mission_time) / oracle.mission_time,
            reset_checked: check.checked(),
            reset_fired: check.fired(),
        });
    }
    Ok(outcomes)
}

/// Per-trace learning state.
struct Learner<'a> {
    spec: &'a ExperimentSpec<'a>,
    memory: ExperienceMemory,
    log: PenaltyLog,
    learning_start: u32,
    context: MissionContext,
    encoder: FeatureEncoder,
    waypoints: HashMap<u32, Waypoint>,
}

impl<'a> Learner<'a> {
    fn new(spec: &'a ExperimentSpec<'a>) -> Result<Self> {
        let cfg = &spec.learner;
        Ok(Self {
            spec,
            memory: ExperienceMemory::new(cfg.capacity),
            log: PenaltyLog::new(),
            learning_start: 0,
            context: mission_context(spec.plan, &spec.timing, &spec.kinematics, cfg.op_t_hours)?,
            encoder: FeatureEncoder::for_plan(spec.plan, cfg.features),
            waypoints: spec.plan.interior().iter().map(|w| (w.id, *w)).collect(),
        })
    }

    fn fit(&self) -> Result<ProbEstimator> {
        let samples: Vec<Sample> = self
            .memory
            .relevant_entries(&self.context)
            .into_iter()
            .map(|e| Sample { features: self.encoder.encode(&self.waypoints[&e.wp_id], e.hour), target: f64::from(e.event) })
            .collect();
        ProbEstimator::fit(&self.spec.learner.estimator, &samples)
    }

    /// Stores the mission's observations, then runs the configured reset check.
    fn after_mission(&mut self, report: &MissionReport, trace_seed: u64) -> Result<CheckOutcome> {
        let day = report.day;
        for v in &report.visits {
            self.memory.record(v.wp_id, v.hour, v.event, day)?;
        }
        self.log.add(day, report.total_penalty)?;
        let cfg = &self.spec.learner;
        let h = cfg.capacity.limit().unwrap_or(usize::MAX);
        let outcome = match cfg.reset {
            ResetMode::None => CheckOutcome::NotReady,
            ResetMode::Reset1 => reset1_check(&self.log, self.learning_start, day, h),
            ResetMode::Reset2 => {
                let seed = rng::hash_key(self.spec.policy_seed, &[trace_seed, day as u64]);
                reset2_check(&self.log, self.learning_start, day, h, &cfg.forest, seed)?
            }
        };
        if outcome.fired() {
            self.memory.reset(day);
            self.learning_start = day + 1;
        }
        Ok(outcome)
    }
}
