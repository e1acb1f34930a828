//! Mission execution over a replayed event trace.
//!
//! Mission time is `takeoff + flight(home, wp_2) + sum(visit_i) + land`, where
//! each visit costs `sense + proc + flight(wp_i, wp_i+1)`, plus the turn-back
//! penalty when the drone left and an event occurred, minus `proc` when it
//! left and no event occurred, plus `action` whenever an event occurred.

mod experiment;

pub use experiment::{
    mission_context, run_experiment, run_trace, DayOutcome, ExperimentResult, ExperimentSpec, LearnerConfig,
};

use serde::{Deserialize, Serialize};

use crate::decision::{best_decision, Decision, DecisionInputs, Policy, PolicyKind};
use crate::flight::{flight_time, penalty_time, KinematicParams};
use crate::regression::{FeatureEncoder, ProbEstimator};
use crate::world::{true_prob, MissionPlan, Trace, Waypoint, WorldModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimingParams {
    /// Sensing duration at each point of interest, s.
    pub sense_t: f64,
    /// Onboard processing duration, s.
    pub proc_t: f64,
    /// Follow-up action duration when an event occurs, s.
    pub action_t: f64,
}

impl Default for TimingParams {
    fn default() -> Self {
        Self { sense_t: 1.0, proc_t: 10.0, action_t: 10.0 }
    }
}

impl TimingParams {
    /// Checks signs and that every result arrives before the next waypoint.
    pub fn validate(&self, plan: &MissionPlan, k: &KinematicParams) -> Result<()> {
        for (name, v) in [("sense_t", self.sense_t), ("proc_t", self.proc_t), ("action_t", self.action_t)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        let shortest = decision_legs(plan)
            .map(|(a, b)| flight_time(a.distance_to(b), k))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if self.proc_t >= shortest {
            return Err(Error::Config(format!(
                "proc_t = {} s must be below the shortest inter-waypoint flight time {shortest} s",
                self.proc_t
            )));
        }
        Ok(())
    }
}

/// Legs leaving a point of interest, where a wait/go decision is taken.
fn decision_legs(plan: &MissionPlan) -> impl Iterator<Item = (&Waypoint, &Waypoint)> {
    let w = &plan.waypoints;
    (1..w.len() - 1).map(move |i| (&w[i], &w[i + 1]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisitRecord {
    pub wp_id: u32,
    pub hour: u32,
    pub decision: Decision,
    pub event: u8,
    /// Total time attributed to this visit, s.
    pub visit_time: f64,
    pub penalty_incurred: f64,
    pub gain_realized: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecisionSummary {
    pub waits: u32,
    pub goes: u32,
    pub events: u32,
    /// Left, then had to turn back.
    pub wrong_goes: u32,
    /// Waited for a result that required nothing.
    pub wrong_waits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionReport {
    pub day: u32,
    pub policy: PolicyKind,
    pub mission_time: f64,
    pub visits: Vec<VisitRecord>,
    pub total_penalty: f64,
    pub summary: DecisionSummary,
}

/// Where a probability-driven policy gets `p` for a waypoint and hour.
pub trait ProbabilitySource {
    fn probability(&self, wp: &Waypoint, hour: u32) -> Result<Option<f64>>;
}

/// Ground truth for a given day; what the oracle sees.
pub struct TruthSource<'a> {
    pub world: &'a WorldModel,
    pub day: u32,
}

impl ProbabilitySource for TruthSource<'_> {
    fn probability(&self, wp: &Waypoint, hour: u32) -> Result<Option<f64>> {
        true_prob(self.world, wp, self.day, hour).map(Some)
    }
}

/// A fitted estimator queried at the realized sensing hour.
pub struct EstimateSource<'a> {
    pub estimator: &'a ProbEstimator,
    pub encoder: &'a FeatureEncoder,
}

impl ProbabilitySource for EstimateSource<'_> {
    fn probability(&self, wp: &Waypoint, hour: u32) -> Result<Option<f64>> {
        Ok(self.estimator.predict(&self.encoder.encode(wp, hour)))
    }
}

/// For policies that never look at probabilities.
pub struct NoSource;

impl ProbabilitySource for NoSource {
    fn probability(&self, _: &Waypoint, _: u32) -> Result<Option<f64>> {
        Ok(None)
    }
}

/// Hour of day at absolute time `seconds` after midnight of the mission day.
pub fn hour_of(seconds: f64) -> u32 {
    ((seconds / 3600.0).floor() as i64).rem_euclid(24) as u32
}

/// Flies `plan` on `day`, looking events up in `trace` at the hour sensing completes.
pub fn run_mission(
    plan: &MissionPlan,
    timing: &TimingParams,
    kinematics: &KinematicParams,
    policy: &mut Policy,
    source: &dyn ProbabilitySource,
    trace: &Trace,
    day: u32,
) -> Result<MissionReport> {
    let w = &plan.waypoints;
    let start = plan.start_hour * 3600.0;
    let mut elapsed = kinematics.takeoff_time + flight_time(w[0].distance_to(&w[1]), kinematics)?;
    let mut visits = Vec::with_capacity(w.len() - 2);
    let mut summary = DecisionSummary::default();
    let mut total_penalty = 0.0;
    for (wp, next) in decision_legs(plan) {
        let hour = hour_of(start + elapsed + timing.sense_t);
        let event = trace.event(day, wp.id, hour)?;
        let leg = wp.distance_to(next);
        let flight = flight_time(leg, kinematics)?;
        let penalty = penalty_time(leg, timing.proc_t, kinematics)?;
        let p_hat = if policy.needs_probability() { source.probability(wp, hour)? } else { None };
        let decision = policy.decide(&DecisionInputs { p_hat, penalty, proc_t: timing.proc_t });

        let e = f64::from(event);
        let d = f64::from(decision.as_bit());
        let penalty_incurred = e * d * penalty;
        let gain_realized = (1.0 - e) * d * timing.proc_t;
        let visit_time =
            timing.sense_t + timing.proc_t + flight + penalty_incurred - gain_realized + e * timing.action_t;

        match decision {
            Decision::Wait => summary.waits += 1,
            Decision::Go => summary.goes += 1,
        }
        summary.events += event as u32;
        if decision == Decision::Go && event == 1 {
            summary.wrong_goes += 1;
        }
        if decision == Decision::Wait && event == 0 {
            summary.wrong_waits += 1;
        }
        total_penalty += penalty_incurred;
        elapsed += visit_time;
        visits.push(VisitRecord { wp_id: wp.id, hour, decision, event, visit_time, penalty_incurred, gain_realized });
    }
    elapsed += kinematics.land_time;
    Ok(MissionReport { day, policy: policy.kind(), mission_time: elapsed, visits, total_penalty, summary })
}

/// Expected mission time when the drone leaves waypoint `wp` (sensed at
/// `hour`) with probability `go_prob(wp, hour, p, penalty)`.
///
/// Hours are taken along the expected clock, so the result is exact whenever
/// the mission's hour sequence does not depend on the realized events.
pub fn expected_mission_time(
    plan: &MissionPlan,
    world: &WorldModel,
    day: u32,
    timing: &TimingParams,
    kinematics: &KinematicParams,
    mut go_prob: impl FnMut(&Waypoint, u32, f64, f64) -> f64,
) -> Result<f64> {
    let w = &plan.waypoints;
    let start = plan.start_hour * 3600.0;
    let mut elapsed = kinematics.takeoff_time + flight_time(w[0].distance_to(&w[1]), kinematics)?;
    for (wp, next) in decision_legs(plan) {
        let hour = hour_of(start + elapsed + timing.sense_t);
        let p = true_prob(world, wp, day, hour)?;
        let leg = wp.distance_to(next);
        let penalty = penalty_time(leg, timing.proc_t, kinematics)?;
        let q = go_prob(wp, hour, p, penalty);
        elapsed += timing.sense_t + timing.proc_t + flight_time(leg, kinematics)?
            + q * (p * penalty - (1.0 - p) * timing.proc_t)
            + p * timing.action_t;
    }
    Ok(elapsed + kinematics.land_time)
}

/// [`expected_mission_time`] under the oracle's decisions.
pub fn oracle_expected_mission_time(
    plan: &MissionPlan,
    world: &WorldModel,
    day: u32,
    timing: &TimingParams,
    kinematics: &KinematicParams,
) -> Result<f64> {
    expected_mission_time(plan, world, day, timing, kinematics, |_, _, p, penalty| {
        f64::from(best_decision(p, penalty, timing.proc_t).as_bit())
    })
}
