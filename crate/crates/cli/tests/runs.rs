use std::process::Command;

use strike_cli::trajectory::{check_cadence, parse_csv, to_csv, HEADER};
use strike_cli::{bundled, replay_landing, run, run_suite, write_run, RunReport};

#[test]
fn fixed_seed_is_reproducible_and_thread_independent() {
    let s = bundled("case1").unwrap();
    let a = run(&s, 7, false).unwrap();
    let b = run(&s, 7, false).unwrap();
    let c = run(&s, 7, true).unwrap();
    for other in [&b, &c] {
        assert_eq!(a.report.without_timing(), other.report.without_timing());
        assert_eq!(to_csv(&a.pre_impact), to_csv(&other.pre_impact));
        assert_eq!(to_csv(&a.post_impact), to_csv(&other.post_impact));
    }
    let d = run(&s, 8, false).unwrap();
    assert_ne!(a.report.strike, d.report.strike);
}

#[test]
fn trajectories_have_constant_cadence_and_all_columns() {
    let out = run(&bundled("case2").unwrap(), 3, false).unwrap();
    let strike = out.report.strike.unwrap();
    for (samples, name) in [(&out.pre_impact, "pre"), (&out.post_impact, "post")] {
        let text = to_csv(samples);
        assert_eq!(text.lines().next(), Some(HEADER));
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 10));
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed.len(), samples.len());
        check_cadence(&parsed).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    assert_eq!(out.pre_impact[0].t, 0.0);
    assert!(out.pre_impact.last().unwrap().t <= strike.time);
    assert!(strike.time - out.pre_impact.last().unwrap().t < 1e-3);
    assert_eq!(out.post_impact[0].t, strike.time);
    let last = out.post_impact.last().unwrap();
    assert!(last.pos.z < 0.0);
    assert!(out.post_impact[..out.post_impact.len() - 1].iter().all(|s| s.pos.z > 0.0 || s.vel.z > 0.0));
}

#[test]
fn replayed_landing_matches_reported_point() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["case1", "case3", "table1_row4"] {
        let out = run(&bundled(name).unwrap(), 11, false).unwrap();
        let sub = dir.path().join(name);
        write_run(&sub, &out).unwrap();
        let text = std::fs::read_to_string(sub.join("post_impact.csv")).unwrap();
        let landing = replay_landing(&parse_csv(&text).unwrap()).unwrap();
        let report: RunReport =
            serde_json::from_str(&std::fs::read_to_string(sub.join("report.json")).unwrap()).unwrap();
        let [x, y] = report.reached.unwrap();
        assert!((landing.x - x).hypot(landing.y - y) < 1e-6, "{name}");
        assert_eq!(report.without_timing(), out.report.without_timing());
    }
}

#[test]
fn suite_orders_runs_and_degenerates_to_run() {
    let scenarios = vec![bundled("case2").unwrap(), bundled("case1").unwrap()];
    let suite = run_suite(&scenarios, 3, 5, None).unwrap();
    let names: Vec<&str> = suite.runs.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["case2", "case2", "case2", "case1", "case1", "case1"]);
    let seeds: Vec<u64> = suite.runs.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, [5, 6, 7, 5, 6, 7]);
    assert_eq!(suite.scenarios.len(), 2);
    assert_eq!(suite.scenarios[0].runs, 3);

    let single = run_suite(&scenarios[1..], 1, 9, None).unwrap();
    let direct = run(&scenarios[1], 9, false).unwrap();
    assert_eq!(single.runs[0].without_timing(), direct.report.without_timing());
    let row = &single.scenarios[0];
    assert_eq!(row.success_rate, if direct.report.within_tolerance { 1.0 } else { 0.0 });

    let empty = run_suite(&[], 20, 0, None).unwrap();
    assert!(empty.scenarios.is_empty() && empty.runs.is_empty());
    assert!(run_suite(&scenarios, 0, 0, None).is_err());
}

#[test]
fn suite_writes_isolated_directories() {
    let dir = tempfile::tempdir().unwrap();
    run_suite(&[bundled("case1").unwrap()], 2, 0, Some(dir.path())).unwrap();
    for seed in 0..2 {
        let sub = dir.path().join("case1").join(format!("seed_{seed}"));
        for f in ["pre_impact.csv", "post_impact.csv", "report.json"] {
            assert!(sub.join(f).is_file(), "{}", sub.join(f).display());
        }
    }
}

fn strike() -> Command {
    Command::new(env!("CARGO_BIN_EXE_strike"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let status = |args: &[&str]| strike().args(args).current_dir(out).output().unwrap().status.code();

    assert_eq!(status(&["plan", "case1", "--out", "c1"]), Some(0));
    assert!(out.join("c1/post_impact.csv").is_file());
    assert_eq!(status(&["replay", "c1/post_impact.csv", "--report", "c1/report.json"]), Some(0));

    std::fs::write(
        out.join("away.toml"),
        "name = \"away\"\n[incoming]\npos = [0.0, 0.5, 0.0]\nvel = [0.0, 4.0, 2.0]\n[cost]\ntarget = [0.0, 1.0]\n",
    )
    .unwrap();
    assert_eq!(status(&["plan", "away.toml", "--out", "away"]), Some(2));
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out.join("away/report.json")).unwrap()).unwrap();
    assert!(!report.feasible && report.reached.is_none());

    std::fs::write(out.join("bad.toml"), "name = \"bad\"\n[incoming]\npos = [0.0, -0.5, 0.0]\nvel = [0.0, -4.0, 2.0]\n[cost]\ntarget = [0.0, 1.0]\n[physics]\ne = 1.3\n").unwrap();
    let bad = strike().args(["plan", "bad.toml"]).current_dir(out).output().unwrap();
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("e must be in (0,1]"));

    std::fs::write(out.join("broken.toml"), "name = [\n").unwrap();
    assert_eq!(status(&["plan", "broken.toml"]), Some(4));
    assert_eq!(status(&["plan", "no_such_fixture"]), Some(3));
    assert_eq!(status(&["frobnicate"]), Some(3));

    std::fs::create_dir(out.join("empty")).unwrap();
    assert_eq!(status(&["suite", "empty", "--out", "s"]), Some(0));
    assert!(out.join("s/suite.json").is_file());
}
