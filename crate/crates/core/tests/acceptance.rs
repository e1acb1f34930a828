//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::HashMap;
use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use waitgo::decision::{Decision, DecisionInputs, Policy, PolicyKind};
use waitgo::experience::{Capacity, ResetMode};
use waitgo::flight::{flight_time, penalty_time, KinematicParams};
use waitgo::harness::{self, ExperimentConfig};
use waitgo::iforest::{IsolationForest, IsolationForestParams};
use waitgo::regression::{
    BayesPrior, BayesianLinear, EstimatorConfig, EstimatorKind, FeatureEncoder, FeatureMode, LinearModel,
    ProbEstimator, Sample,
};
use waitgo::sim::{
    run_experiment, run_mission, ExperimentResult, ExperimentSpec, LearnerConfig, TimingParams, TruthSource,
};
use waitgo::world::{
    builtin_scenario, builtin_scenario_with, generate_trace, survey_plan, survey_world, MissionPlan,
    ProbabilityField, Rect, Region, ScenarioName, Trace, Waypoint, WorldKind, WorldModel, CHANGE_DAY,
};

const TRACES: u64 = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

// ---------------------------------------------------------------------------
// Experiment runner shared by criteria 3-7.

#[derive(Clone, Copy)]
struct Run {
    scenario: ScenarioName,
    world: WorldKind,
    policy: PolicyKind,
    estimator: EstimatorKind,
    memory: Capacity,
    reset: ResetMode,
    proc_t: f64,
}

impl Run {
    fn learn(scenario: ScenarioName, world: WorldKind) -> Self {
        Run {
            scenario,
            world,
            policy: PolicyKind::Learn,
            estimator: EstimatorKind::Tree,
            memory: Capacity::Bounded(12),
            reset: ResetMode::None,
            proc_t: 10.0,
        }
    }

    fn policy(scenario: ScenarioName, world: WorldKind, policy: PolicyKind) -> Self {
        Run { policy, ..Run::learn(scenario, world) }
    }
}

struct Lab {
    traces: HashMap<WorldKind, Vec<Trace>>,
    cache: HashMap<String, ExperimentResult>,
}

impl Lab {
    fn new() -> Self {
        let plan = survey_plan("traces", 0.0);
        let traces = [WorldKind::Stable, WorldKind::Changing]
            .into_iter()
            .map(|w| {
                let world = survey_world(w);
                let t = (1..=TRACES).map(|s| generate_trace(&world, &plan, w.default_days(), s).unwrap()).collect();
                (w, t)
            })
            .collect();
        Lab { traces, cache: HashMap::new() }
    }

    fn get(&mut self, r: Run) -> &ExperimentResult {
        let key = format!(
            "{}/{}/{}/{}/{}/{}/{}",
            r.scenario, r.world, r.policy, r.estimator, r.memory, r.reset, r.proc_t
        );
        if !self.cache.contains_key(&key) {
            let timing = TimingParams { proc_t: r.proc_t, ..TimingParams::default() };
            let k = KinematicParams::default();
            let (plan, world) = builtin_scenario_with(r.scenario, r.world, &timing, &k).unwrap();
            let learner = LearnerConfig {
                estimator: EstimatorConfig::new(r.estimator),
                capacity: r.memory,
                reset: r.reset,
                ..LearnerConfig::default()
            };
            let spec = ExperimentSpec {
                plan: &plan,
                world: &world,
                timing,
                kinematics: k,
                policy: r.policy,
                learner,
                days: r.world.default_days(),
                policy_seed: 1,
            };
            let result = run_experiment(&spec, &self.traces[&r.world]).unwrap();
            self.cache.insert(key.clone(), result);
        }
        &self.cache[&key]
    }
}

// ---------------------------------------------------------------------------
// 1. Accounting identity.

fn random_plan(rng: &mut ChaCha8Rng, k: &KinematicParams) -> (MissionPlan, f64) {
    let n = rng.random_range(1..=20);
    let mut waypoints = vec![Waypoint::new(0, rng.random_range(-50.0..0.0), rng.random_range(-50.0..0.0))];
    for id in 1..=n {
        waypoints.push(Waypoint::new(id, rng.random_range(0.0..400.0), rng.random_range(0.0..200.0)));
    }
    waypoints.push(waypoints[0]);
    let shortest = waypoints[1..]
        .windows(2)
        .map(|w| flight_time(w[0].distance_to(&w[1]), k).unwrap())
        .fold(f64::INFINITY, f64::min);
    (MissionPlan { name: "random".into(), waypoints, start_hour: rng.random_range(0.0..23.0) }, shortest)
}

fn random_world(rng: &mut ChaCha8Rng) -> WorldModel {
    let split = rng.random_range(50.0..350.0);
    let mut p = || rng.random_range(0.0..=1.0);
    let field = ProbabilityField {
        regions: vec![
            Region { rect: Rect { x0: -1e4, y0: -1e4, x1: split, y1: 1e4 }, base_prob: p(), window_prob: p() },
            Region { rect: Rect { x0: split, y0: -1e4, x1: 1e4, y1: 1e4 }, base_prob: p(), window_prob: p() },
        ],
        time_window: (12, 16),
    };
    WorldModel::stable(field)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 1000 {
        let k = KinematicParams {
            cruise_speed: rng.random_range(1.0..12.0),
            accel: rng.random_range(0.5..5.0),
            takeoff_time: rng.random_range(0.0..20.0),
            land_time: rng.random_range(0.0..20.0),
            turnaround_overhead: rng.random_range(0.0..5.0),
        };
        let (plan, shortest) = random_plan(&mut rng, &k);
        if shortest < 1e-3 {
            continue;
        }
        let timing = TimingParams {
            sense_t: rng.random_range(0.0..5.0),
            proc_t: rng.random_range(0.0..0.99) * shortest,
            action_t: rng.random_range(0.0..30.0),
        };
        let world = random_world(&mut rng);
        let trace = generate_trace(&world, &plan, 1, rng.random()).unwrap();
        let kind = PolicyKind::ALL[rng.random_range(0..5)];
        let truth = TruthSource { world: &world, day: 0 };
        let report = run_mission(&plan, &timing, &k, &mut Policy::new(kind, rng.random()), &truth, &trace, 0).unwrap();

        // Independent re-summation: clock, hour lookup and visit terms recomputed here.
        let w = &plan.waypoints;
        let mut clock = k.takeoff_time + flight_time(w[0].distance_to(&w[1]), &k).unwrap();
        for (i, v) in report.visits.iter().enumerate() {
            let hour = (((plan.start_hour * 3600.0 + clock + timing.sense_t) / 3600.0).floor() as i64).rem_euclid(24) as u32;
            assert_eq!(hour, v.hour);
            assert_eq!(trace.event(0, v.wp_id, hour).unwrap(), v.event);
            let leg = w[i + 1].distance_to(&w[i + 2]);
            let (e, d) = (f64::from(v.event), f64::from(v.decision.as_bit()));
            clock += timing.sense_t + timing.proc_t + flight_time(leg, &k).unwrap()
                + e * d * penalty_time(leg, timing.proc_t, &k).unwrap()
                - (1.0 - e) * d * timing.proc_t
                + e * timing.action_t;
        }
        clock += k.land_time;
        worst = worst.max((clock - report.mission_time).abs());
        checked += 1;
    }
    outcome(worst <= 1e-9, format!("{checked} random missions, max |difference| = {worst:.2e} s (tolerance 1e-9)"))
}

// ---------------------------------------------------------------------------
// 2. Learning with the true probability decides exactly like the oracle.

fn criterion_2() -> Outcome {
    let k = KinematicParams::default();
    let (mut agree, mut total, mut excluded) = (0, 0, Vec::new());
    for proc_t in [8.0, 10.0, 12.0] {
        for d in [25.0, 50.0, 100.0] {
            let Ok(penalty) = penalty_time(d, proc_t, &k) else {
                excluded.push(format!("({d} m, {proc_t} s)"));
                continue;
            };
            for i in 0..=20 {
                let p = i as f64 * 0.05;
                let inputs = DecisionInputs { p_hat: Some(p), penalty, proc_t };
                let learn = Policy::Learn.decide(&inputs);
                let oracle = Policy::Oracle.decide(&inputs);
                // Brute force over both choices, ties resolved to waiting.
                let saving = |c: Decision| match c {
                    Decision::Wait => p * penalty,
                    Decision::Go => (1.0 - p) * proc_t,
                };
                let brute = if saving(Decision::Go) > saving(Decision::Wait) { Decision::Go } else { Decision::Wait };
                total += 1;
                agree += usize::from(learn == oracle && learn == brute);
            }
        }
    }
    // Whole missions: learning fed ground truth replays the oracle's decisions.
    let mut missions_equal = true;
    for scenario in ScenarioName::ALL {
        let (plan, world) = builtin_scenario(scenario, WorldKind::Changing).unwrap();
        let trace = generate_trace(&world, &plan, 41, 5).unwrap();
        for day in [0, 20, 21, 40] {
            let truth = TruthSource { world: &world, day };
            let (t, kk) = (TimingParams::default(), KinematicParams::default());
            let a = run_mission(&plan, &t, &kk, &mut Policy::Learn, &truth, &trace, day).unwrap();
            let b = run_mission(&plan, &t, &kk, &mut Policy::Oracle, &truth, &trace, day).unwrap();
            missions_equal &= a.visits == b.visits && a.mission_time.to_bits() == b.mission_time.to_bits();
        }
    }
    outcome(
        agree == total && missions_equal,
        format!(
            "{agree}/{total} grid points identical, full missions identical: {missions_equal}; excluded (procT >= flight time): {}",
            if excluded.is_empty() { "none".into() } else { excluded.join(" ") }
        ),
    )
}

// ---------------------------------------------------------------------------
// 3-7. Experiments.

fn criterion_3(lab: &mut Lab) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut h8 = 0.0;
    let mut h12 = 0.0;
    for scenario in ScenarioName::ALL {
        let mut line = format!("{scenario}:");
        for h in [8, 12, 16, 20] {
            let ri = lab.get(Run { memory: Capacity::Bounded(h), ..Run::learn(scenario, WorldKind::Stable) }).mean_ri(12..=30);
            if h >= 12 {
                pass &= ri <= 0.03;
            }
            if h == 8 {
                h8 += ri / 3.0;
            }
            if h == 12 {
                h12 += ri / 3.0;
            }
            line.push_str(&format!(" H{h}={}", pct(ri)));
        }
        parts.push(line);
    }
    pass &= h8 > h12;
    parts.push(format!("mean H8={} > H12={}", pct(h8), pct(h12)));
    outcome(pass, format!("RI days 12-30, limit 3% for H>=12; {}", parts.join("; ")))
}

fn criterion_4(lab: &mut Lab) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for scenario in ScenarioName::ALL {
        let ri = |lab: &mut Lab, e| {
            lab.get(Run { estimator: e, reset: ResetMode::Reset1, ..Run::learn(scenario, WorldKind::Stable) }).mean_ri(12..=30)
        };
        let (tree, linear, bayes) =
            (ri(lab, EstimatorKind::Tree), ri(lab, EstimatorKind::Linear), ri(lab, EstimatorKind::Bayesian));
        pass &= tree < linear && tree < bayes;
        parts.push(format!("{scenario}: tree={} linear={} bayesian={}", pct(tree), pct(linear), pct(bayes)));
    }
    outcome(pass, format!("H=12+reset1, RI days 12-30; {}", parts.join("; ")))
}

fn criterion_5(lab: &mut Lab) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let c = CHANGE_DAY as usize;
    for scenario in ScenarioName::ALL {
        let ri = lab.get(Run { reset: ResetMode::Reset1, ..Run::learn(scenario, WorldKind::Changing) }).ri_series();
        let before = ri[12..c].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spike = ri[c] > before && ri[c] >= 0.05;
        let recovered = (c + 1..ri.len()).find(|&d| ri[d] <= 0.05);
        let recovered_ok = recovered.is_some_and(|d| d <= c + 12);
        let inf = lab.get(Run { memory: Capacity::Unbounded, ..Run::learn(scenario, WorldKind::Changing) }).ri_series();
        let inf_min = inf[c..c + 10].iter().copied().fold(f64::INFINITY, f64::min);
        pass &= spike && recovered_ok && inf_min > 0.10;
        parts.push(format!(
            "{scenario}: day21={} (pre max {}), back <=5% on day {}, H=inf min RI days 21-30={}",
            pct(ri[c]),
            pct(before),
            recovered.map_or("never".to_string(), |d| d.to_string()),
            pct(inf_min)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_6(lab: &mut Lab) -> Outcome {
    let mut totals = [(0usize, 0usize); 2];
    let mut parts = Vec::new();
    for scenario in ScenarioName::ALL {
        let mut line = format!("{scenario}:");
        for (i, reset) in [ResetMode::Reset1, ResetMode::Reset2].into_iter().enumerate() {
            let (f, c) = lab.get(Run { reset, ..Run::learn(scenario, WorldKind::Stable) }).reset_counts();
            totals[i].0 += f;
            totals[i].1 += c;
            line.push_str(&format!(" {reset}={f}/{c}"));
        }
        parts.push(line);
    }
    let fpr = |(f, c): (usize, usize)| f as f64 / c as f64;
    let (r1, r2) = (fpr(totals[0]), fpr(totals[1]));
    outcome(
        r1 < r2 && r2 <= 0.10,
        format!("pooled stable FPR reset1={} reset2={} (limit 10%); {}", pct(r1), pct(r2), parts.join("; ")),
    )
}

fn criterion_7(lab: &mut Lab) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for scenario in ScenarioName::ALL {
        let t = |lab: &mut Lab, p| lab.get(Run::policy(scenario, WorldKind::Stable, p)).mean_mission_time(12..=30);
        let learn = t(lab, PolicyKind::Learn);
        let (wait, go, random) = (t(lab, PolicyKind::Wait), t(lab, PolicyKind::Go), t(lab, PolicyKind::Random));
        let a = learn < wait && learn < go && learn < random;

        let pre = |lab: &mut Lab, p| lab.get(Run::policy(scenario, WorldKind::Changing, p)).mean_mission_time(0..=20);
        let (wait_pre, go_pre) = (pre(lab, PolicyKind::Wait), pre(lab, PolicyKind::Go));
        let b = match scenario {
            ScenarioName::InOut => wait_pre < go_pre,
            _ => go_pre < wait_pre,
        };

        let mut gains = Vec::new();
        for proc_t in [8.0, 10.0, 12.0] {
            let l = lab.get(Run { proc_t, ..Run::learn(scenario, WorldKind::Stable) }).mean_mission_time(12..=30);
            let w = lab.get(Run { proc_t, ..Run::policy(scenario, WorldKind::Stable, PolicyKind::Wait) }).mean_mission_time(12..=30);
            gains.push((w - l) / w);
        }
        let c = gains.windows(2).all(|g| g[1] > g[0]);
        pass &= a && b && c;
        parts.push(format!(
            "{scenario}: (a) learn={learn:.1}s wait={wait:.1}s go={go:.1}s random={random:.1}s {}; (b) pre-change wait={wait_pre:.1}s go={go_pre:.1}s {}; (c) vs wait at procT 8/10/12 = {}/{}/{} {}",
            if a { "ok" } else { "FAIL" },
            if b { "ok" } else { "FAIL" },
            pct(gains[0]),
            pct(gains[1]),
            pct(gains[2]),
            if c { "ok" } else { "FAIL" },
        ));
    }
    outcome(pass, parts.join("; "))
}

// ---------------------------------------------------------------------------
// 8. Regression oracles.

/// Dense Gauss-Jordan elimination with partial pivoting.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot_row = a[col].clone();
        for row in 0..n {
            if row != col {
                let f = a[row][col] / pivot_row[col];
                for (x, p) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
                b[row] -= f * b[col];
            }
        }
    }
    (0..n).map(|i| b[i] / a[i][i]).collect()
}

fn normal_equations(samples: &[Sample], ridge: f64) -> Vec<f64> {
    let p = samples[0].features.len() + 1;
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for s in samples {
        let x: Vec<f64> = std::iter::once(1.0).chain(s.features.iter().copied()).collect();
        for i in 0..p {
            b[i] += x[i] * s.target;
            for j in 0..p {
                a[i][j] += x[i] * x[j];
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += ridge;
    }
    gauss_solve(a, b)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // OLS vs normal equations.
    let mut ols_err: f64 = 0.0;
    let mut bayes_err: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(12..200);
        let width = rng.random_range(1..6);
        let samples: Vec<Sample> = (0..n)
            .map(|_| Sample {
                features: (0..width).map(|_| rng.random_range(-1.0..1.0)).collect(),
                target: f64::from(rng.random_bool(0.4)),
            })
            .collect();
        let ols = LinearModel::fit(&samples).unwrap();
        let oracle = normal_equations(&samples, 0.0);
        ols_err = ols.coefficients.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(ols_err, f64::max);

        let prior = BayesPrior { strength: 1e-10, ..BayesPrior::default() };
        let bayes = BayesianLinear::fit(&samples, &prior).unwrap();
        for _ in 0..10 {
            let x: Vec<f64> = (0..width).map(|_| rng.random_range(-1.0..1.0)).collect();
            bayes_err = bayes_err.max((bayes.predict_raw(&x) - ols.predict_raw(&x)).abs());
        }
        // The prior's own mean at finite strength is the ridge solution.
        let ridge = BayesianLinear::fit(&samples, &BayesPrior { strength: 2.5, ..BayesPrior::default() }).unwrap();
        let ridge_oracle = normal_equations(&samples, 2.5);
        bayes_err = ridge.mean.iter().zip(&ridge_oracle).map(|(a, b)| (a - b).abs()).fold(bayes_err, f64::max);
    }

    // CART on per-key data: every (waypoint, hour) key has its own rate.
    let plan = survey_plan("keys", 8.0);
    let enc = FeatureEncoder::for_plan(&plan, FeatureMode::Coords);
    let mut samples = Vec::new();
    let mut keys = Vec::new();
    for wp in plan.interior().iter().step_by(7) {
        for hour in [9u32, 12, 15] {
            let rate = rng.random_range(0.0..1.0);
            let n = 20;
            let hits: Vec<f64> = (0..n).map(|_| f64::from(rng.random_bool(rate))).collect();
            let freq = hits.iter().sum::<f64>() / n as f64;
            keys.push((enc.encode(wp, hour), freq));
            samples.extend(hits.into_iter().map(|t| Sample { features: enc.encode(wp, hour), target: t }));
        }
    }
    let tree = ProbEstimator::fit(&EstimatorConfig::new(EstimatorKind::Tree), &samples).unwrap();
    let cart_err = keys.iter().map(|(x, f)| (tree.predict(x).unwrap() - f).abs()).fold(0.0, f64::max);

    outcome(
        ols_err <= 1e-6 && cart_err <= 0.01 && bayes_err <= 1e-6,
        format!(
            "OLS vs normal equations {ols_err:.1e} (1e-6); CART vs per-key frequency over {} keys {cart_err:.1e} (0.01); Bayesian vs OLS/ridge {bayes_err:.1e} (1e-6)",
            keys.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 9. Isolation forest against an exhaustive leaf scan.

/// `c(n) = 2 H(n) - 2`, summed from the smallest term.
fn c_ref(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    2.0 * (1..=n).rev().map(|i| 1.0 / i as f64).sum::<f64>() - 2.0
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let params = IsolationForestParams::default();
    let mut worst: f64 = 0.0;
    let mut structure_ok = true;
    let mut windows = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=16);
        let mut points: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..60.0)).collect();
        if rng.random_bool(0.3) {
            points[n - 1] = rng.random_range(200.0..400.0);
        }
        if rng.random_bool(0.1) {
            points[0] = points[1];
        }
        let forest = IsolationForest::fit(&points, &params, rng.random()).unwrap();
        let psi = forest.sample_size();
        let leaves = forest.leaf_cells();
        for cells in &leaves {
            let mut sorted = cells.clone();
            sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            structure_ok &= sorted.first().unwrap().lo == f64::NEG_INFINITY
                && sorted.last().unwrap().hi == f64::INFINITY
                && sorted.windows(2).all(|w| w[0].hi == w[1].lo)
                && sorted.iter().map(|c| c.size).sum::<usize>() == psi;
        }
        let mut probes = points.clone();
        probes.extend((0..8).map(|_| rng.random_range(-20.0..450.0)));
        for x in probes {
            let mut total = 0.0;
            for cells in &leaves {
                let hits: Vec<_> = cells.iter().filter(|c| c.lo <= x && x < c.hi).collect();
                structure_ok &= hits.len() == 1;
                total += hits[0].depth as f64 + c_ref(hits[0].size);
            }
            let mean = total / leaves.len() as f64;
            let score = 2f64.powf(-mean / c_ref(psi));
            worst = worst.max((forest.mean_path_length(x) - mean).abs()).max((forest.score(x) - score).abs());
        }
        // Threshold: linear-interpolated (1 - contamination) quantile of the window's scores.
        let mut scores: Vec<f64> = points.iter().map(|&x| forest.score(x)).collect();
        scores.sort_by(f64::total_cmp);
        let pos = (1.0 - params.contamination) * (n - 1) as f64;
        let (i, frac) = (pos.floor() as usize, pos.fract());
        let thr = if i + 1 < n { scores[i] + frac * (scores[i + 1] - scores[i]) } else { scores[i] };
        worst = worst.max((forest.threshold() - thr).abs());
        windows += 1;
    }
    outcome(
        worst <= 1e-9 && structure_ok,
        format!("{windows} windows of 2-16 points, max |difference| = {worst:.1e} (1e-9), leaves partition the line: {structure_ok}"),
    )
}

// ---------------------------------------------------------------------------
// 10. Byte-identical CSV.

fn criterion_10() -> Outcome {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig { world: WorldKind::Changing, out_dir: dir.path().to_path_buf(), ..Default::default() };
        cfg.apply(&"policy=all".parse().unwrap());
        cfg.apply(&"reset=none,reset1,reset2".parse().unwrap());
        let traces = harness::cmd_gen_traces(&cfg).unwrap();
        let trace_bytes: Vec<Vec<u8>> = traces.iter().map(|p| fs::read(p).unwrap()).collect();
        let out = harness::cmd_run(&cfg).unwrap();
        let (_, summary) = harness::cmd_report(&out.results_path).unwrap();
        (trace_bytes, fs::read(&out.results_path).unwrap(), fs::read(summary).unwrap())
    };
    let (ta, ra, sa) = run();
    let (tb, rb, sb) = run();
    let rows = ra.iter().filter(|&&b| b == b'\n').count() - 1;
    outcome(
        ta == tb && ra == rb && sa == sb,
        format!("changing world, all scenarios/policies/resets, {TRACES} traces: {rows} result rows, traces/results/summary identical: {}/{}/{}", ta == tb, ra == rb, sa == sb),
    )
}

fn main() {
    let start = Instant::now();
    let mut lab = Lab::new();
    type Check = Box<dyn FnOnce(&mut Lab) -> Outcome>;
    let criteria: Vec<(&str, Check)> = vec![
        ("accounting identity", Box::new(|_| criterion_1())),
        ("learn with true p equals oracle", Box::new(|_| criterion_2())),
        ("stable-world convergence", Box::new(criterion_3)),
        ("estimator ordering", Box::new(criterion_4)),
        ("changing-world adaptation", Box::new(criterion_5)),
        ("reset false-positive ordering", Box::new(criterion_6)),
        ("policy relationships", Box::new(criterion_7)),
        ("regression oracles", Box::new(|_| criterion_8())),
        ("isolation-forest oracle", Box::new(|_| criterion_9())),
        ("determinism", Box::new(|_| criterion_10())),
    ];
    let mut failed = 0;
    println!();
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let o = check(&mut lab);
        failed += usize::from(!o.pass);
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
