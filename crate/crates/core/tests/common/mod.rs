#![allow(dead_code)]

use waitgo::decision::{Policy, PolicyKind};
use waitgo::flight::KinematicParams;
use waitgo::sim::{run_mission, NoSource, ProbabilitySource, TimingParams, TruthSource};
use waitgo::world::{
    generate_trace, true_prob, MissionPlan, ProbabilityField, Rect, Region, Trace, Waypoint, WorldModel,
};

/// Home at the origin, then `n` points 50 m apart along x, then home.
pub fn line_plan(n: u32, start_hour: f64) -> MissionPlan {
    let home = Waypoint::new(0, 0.0, -40.0);
    let mut waypoints = vec![home];
    waypoints.extend((1..=n).map(|i| Waypoint::new(i, 50.0 * (i - 1) as f64, 0.0)));
    waypoints.push(home);
    MissionPlan { name: "line".into(), waypoints, start_hour }
}

/// Left half (x < 125) is 0.15 outside and 0.7 inside 12:00-15:59; the right half the opposite.
pub fn two_region_world() -> WorldModel {
    let left = Rect { x0: -1e4, y0: -1e4, x1: 125.0, y1: 1e4 };
    let right = Rect { x0: 125.0, y0: -1e4, x1: 1e4, y1: 1e4 };
    WorldModel::stable(ProbabilityField {
        regions: vec![
            Region { rect: left, base_prob: 0.15, window_prob: 0.7 },
            Region { rect: right, base_prob: 0.7, window_prob: 0.15 },
        ],
        time_window: (12, 16),
    })
}

/// A one-day trace in which waypoint `i` (1-based) has event bit `i - 1` of
/// `bits` at every hour.
pub fn assigned_trace(world: &WorldModel, plan: &MissionPlan, bits: u64) -> Trace {
    let base = generate_trace(world, plan, 1, 0).unwrap();
    let mut text = Vec::new();
    base.write_to(&mut text).unwrap();
    let text = String::from_utf8(text).unwrap();
    let mut out = String::new();
    for line in text.lines() {
        let f: Vec<&str> = line.split(',').collect();
        match f[..] {
            [d, w, h, _] if !line.starts_with('#') && d != "day" => {
                let id: u32 = w.parse().unwrap();
                out.push_str(&format!("{d},{w},{h},{}\n", (bits >> (id - 1)) & 1));
            }
            _ => {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    Trace::read_from(out.as_bytes(), "assigned").unwrap()
}

/// Expected mission time by enumerating all 2^N event outcomes. Each outcome
/// is weighted by the true probabilities at the hours the mission actually
/// visits, so hour changes caused by earlier events are accounted for.
pub fn brute_force_expectation(
    plan: &MissionPlan,
    world: &WorldModel,
    timing: &TimingParams,
    k: &KinematicParams,
    kind: PolicyKind,
) -> f64 {
    let n = plan.interior().len();
    assert!(n <= 16);
    let truth = TruthSource { world, day: 0 };
    let source: &dyn ProbabilitySource = if kind == PolicyKind::Oracle { &truth } else { &NoSource };
    let by_id = |id: u32| *plan.interior().iter().find(|w| w.id == id).unwrap();
    let mut total = 0.0;
    for bits in 0..(1u64 << n) {
        let trace = assigned_trace(world, plan, bits);
        let report = run_mission(plan, timing, k, &mut Policy::new(kind, 0), source, &trace, 0).unwrap();
        let weight: f64 = report
            .visits
            .iter()
            .map(|v| {
                let p = true_prob(world, &by_id(v.wp_id), 0, v.hour).unwrap();
                if v.event == 1 { p } else { 1.0 - p }
            })
            .product();
        total += weight * report.mission_time;
    }
    total
}
