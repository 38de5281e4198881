//! Planner runs and seeded repetition suites.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use strike_core::flight::{Propagator, SCAN_STEP};
use strike_core::planner::{PlanError, StrikeOutcome};
use strike_core::{BallState, PhysicsParams, PlanResult, PsoConfig, StrikeProblem};

use crate::report::{self, Objectives, RunReport, SuiteReport};
use crate::scenario::Scenario;
use crate::trajectory::write_csv;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: RunReport,
    /// Incoming flight at 1 ms up to the strike (or the whole horizon when
    /// no strike was found).
    pub pre_impact: Vec<BallState>,
    /// Post-strike flight at 1 ms from the strike through the first sample
    /// past the landing.
    pub post_impact: Vec<BallState>,
}

/// Plans one strike for `scenario` with the given seed.
///
/// `parallel` turns on parallel cost evaluation in addition to whatever the
/// scenario asks for; results are identical either way.
pub fn run(scenario: &Scenario, seed: u64, parallel: bool) -> Result<RunOutput, CliError> {
    let invalid = |e: PlanError| CliError::Validation {
        source_name: scenario.name.clone(),
        field: "scenario".into(),
        constraint: e.to_string(),
    };
    let problem = StrikeProblem::new(
        scenario.incoming,
        scenario.cost.clone(),
        scenario.workspace,
        scenario.table,
        scenario.physics,
    )
    .map_err(invalid)?;
    let mut config = scenario.pso.config(seed);
    config.parallel |= parallel;

    let started = Instant::now();
    let planned = if config.bounds.is_empty() {
        problem.default_bounds().and_then(|bounds| problem.plan(&PsoConfig { bounds, ..config }))
    } else {
        problem.plan(&config)
    };
    let plan_seconds = started.elapsed().as_secs_f64();

    let (plan, note) = match planned {
        Ok(p) => (Some(p), None),
        Err(e @ PlanError::NoWindow(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(invalid(e)),
    };
    let outcome = plan.as_ref().and_then(|p| p.outcome.as_ref());
    let note = note.or_else(|| outcome.is_none().then(|| "every candidate strike was infeasible".to_owned()));

    let report = build_report(scenario, seed, &problem, plan.as_ref(), plan_seconds, note);
    let incoming = Propagator::new(scenario.incoming.spin, &scenario.physics).map_err(|e| invalid(e.into()))?;
    let (pre_impact, post_impact) = match outcome {
        Some(o) => (
            sample(&incoming, &scenario.incoming, |s| s.t <= o.candidate.time, problem.t_max),
            sample_post(o, &scenario.physics, problem.t_max),
        ),
        None => (sample(&incoming, &scenario.incoming, |s| s.t == 0.0 || s.pos.z >= 0.0, problem.t_max), Vec::new()),
    };
    Ok(RunOutput { report, pre_impact, post_impact })
}

fn build_report(
    scenario: &Scenario,
    seed: u64,
    problem: &StrikeProblem,
    plan: Option<&PlanResult>,
    plan_seconds: f64,
    note: Option<String>,
) -> RunReport {
    let outcome = plan.and_then(|p| p.outcome.as_ref());
    let distance = outcome.map(|o| o.breakdown.distance);
    RunReport {
        name: scenario.name.clone(),
        seed,
        feasible: outcome.is_some(),
        target: scenario.cost.target,
        reached: outcome.map(StrikeOutcome::landing_point),
        distance,
        tolerance: scenario.tolerance,
        within_tolerance: distance.is_some_and(|d| d <= scenario.tolerance),
        terms: outcome.map(|o| o.breakdown.terms.clone()).unwrap_or_default(),
        objectives: outcome.map(|o| objectives(o, problem)),
        cost: outcome.map(|o| o.breakdown.total),
        strike: plan.map(|p| p.strike),
        evaluations: plan.map_or(0, |p| p.evaluations),
        plan_seconds,
        note,
    }
}

fn objectives(o: &StrikeOutcome, problem: &StrikeProblem) -> Objectives {
    let post = o.post_impact();
    let apex = strike_core::flight::max_height(post, problem.t_max, &problem.params);
    Objectives {
        landing_speed: o.landing.vel.norm(),
        spin_xy: post.spin.x.hypot(post.spin.y),
        spin_x: post.spin.x.abs(),
        max_height: apex,
        v_ty: o.landing.vel.y,
        v_tz: o.landing.vel.z,
    }
}

/// Samples at `start.t + k ms` while `keep` holds and within `horizon`.
fn sample(
    flight: &Propagator,
    start: &BallState,
    mut keep: impl FnMut(&BallState) -> bool,
    horizon: f64,
) -> Vec<BallState> {
    let mut out = Vec::new();
    let mut state = *start;
    for k in 0.. {
        let t = start.t + k as f64 * SCAN_STEP;
        if t > start.t + horizon {
            break;
        }
        state.t = t;
        if !keep(&state) {
            break;
        }
        out.push(state);
        state = flight.advance(&state, SCAN_STEP);
    }
    out
}

fn sample_post(o: &StrikeOutcome, params: &PhysicsParams, horizon: f64) -> Vec<BallState> {
    let post = *o.post_impact();
    let Ok(flight) = Propagator::new(post.spin, params) else {
        return Vec::new();
    };
    let landing_t = o.landing.t;
    let mut passed = false;
    sample(
        &flight,
        &post,
        |s| {
            let keep = !passed;
            passed |= s.t > landing_t;
            keep
        },
        horizon,
    )
}

/// Writes `pre_impact.csv`, `post_impact.csv` and `report.json` into `dir`.
pub fn write_run(dir: &Path, output: &RunOutput) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_csv(&dir.join("pre_impact.csv"), &output.pre_impact)?;
    write_csv(&dir.join("post_impact.csv"), &output.post_impact)?;
    let path = dir.join("report.json");
    let json = serde_json::to_string_pretty(&output.report).expect("report serializes");
    std::fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))
}

/// Runs every scenario `repetitions` times with seeds
/// `seed_base..seed_base + repetitions`. Runs execute concurrently; rows come
/// back in input order. With `out`, each run writes into
/// `out/<scenario>/seed_<n>/`.
pub fn run_suite(
    scenarios: &[Scenario],
    repetitions: usize,
    seed_base: u64,
    out: Option<&Path>,
) -> Result<SuiteReport, CliError> {
    if repetitions == 0 {
        return Err(CliError::Validation {
            source_name: "suite".into(),
            field: "reps".into(),
            constraint: "must be >= 1".into(),
        });
    }
    let jobs: Vec<(usize, u64)> =
        (0..scenarios.len()).flat_map(|i| (0..repetitions as u64).map(move |k| (i, seed_base + k))).collect();
    let results: Vec<Result<RunReport, String>> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let sc = &scenarios[i];
            let output = run(sc, seed, false).map_err(|e| e.to_string())?;
            if let Some(root) = out {
                let dir = root.join(&sc.name).join(format!("seed_{seed}"));
                write_run(&dir, &output).map_err(|e| e.to_string())?;
            }
            Ok(output.report)
        })
        .collect();

    let mut suite = SuiteReport::default();
    for (i, sc) in scenarios.iter().enumerate() {
        let mut runs = Vec::new();
        let mut errors = Vec::new();
        for (&(j, seed), r) in jobs.iter().zip(&results) {
            if j != i {
                continue;
            }
            match r {
                Ok(rep) => runs.push(rep.clone()),
                Err(msg) => errors.push(format!("{seed}: {msg}")),
            }
        }
        suite.scenarios.push(report::summarize(&sc.name, sc.tolerance, &runs, errors));
        suite.runs.extend(runs);
    }
    Ok(suite)
}
