use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use strike_cli::report::{run_table, suite_table};
use strike_cli::trajectory::check_cadence;
use strike_cli::{
    exit, load_scenario, read_csv, replay_landing, resolve_scenario, run, run_suite, write_run, CliError, RunReport,
    Scenario, BUNDLED,
};

#[derive(Parser)]
#[command(name = "strike", version, about = "Plan ping-pong strikes with a particle swarm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one strike and export its trajectories.
    Plan {
        /// Scenario file, or the name of a bundled fixture.
        scenario: String,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory [default: out/<scenario name>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate swarm costs in parallel.
        #[arg(long)]
        parallel: bool,
    },
    /// Run scenarios repeatedly with consecutive seeds and aggregate.
    Suite {
        /// Directories of *.toml scenarios, scenario files or fixture names.
        paths: Vec<String>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        /// Output directory [default: out/suite].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive the landing point from an exported trajectory.
    Replay {
        trajectory: PathBuf,
        /// Report to compare against; exits 1 if the landing differs by more than 1e-6 m.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List the bundled fixtures, or write them out as scenario files.
    Fixtures {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Agreement required between a replayed landing and the reported one (m).
const REPLAY_TOLERANCE: f64 = 1e-6;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::VALIDATION as u8 } else { exit::OK as u8 });
        }
    };
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Plan { scenario, seed, out, parallel } => {
            let sc = resolve_scenario(&scenario)?;
            let output = run(&sc, seed.unwrap_or(sc.seed), parallel)?;
            let dir = out.unwrap_or_else(|| Path::new("out").join(&sc.name));
            write_run(&dir, &output)?;
            print!("{}", run_table(std::slice::from_ref(&output.report)));
            if let Some(note) = &output.report.note {
                eprintln!("note: {note}");
            }
            println!("wrote {}", dir.display());
            Ok(if output.report.feasible { exit::OK } else { exit::INFEASIBLE })
        }
        Command::Suite { paths, reps, seed_base, out } => {
            let scenarios = collect_scenarios(&paths)?;
            let dir = out.unwrap_or_else(|| Path::new("out").join("suite"));
            let suite = run_suite(&scenarios, reps, seed_base, Some(&dir))?;
            std::fs::create_dir_all(&dir).map_err(|e| CliError::Io { path: dir.display().to_string(), source: e })?;
            let path = dir.join("suite.json");
            let json = serde_json::to_string_pretty(&suite).expect("report serializes");
            std::fs::write(&path, json + "\n")
                .map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
            print!("{}", suite_table(&suite.scenarios));
            println!("wrote {}", dir.display());
            Ok(exit::OK)
        }
        Command::Replay { trajectory, report } => {
            let samples = read_csv(&trajectory)?;
            check_cadence(&samples).map_err(CliError::Trajectory)?;
            let Some(landing) = replay_landing(&samples) else {
                return Err(CliError::Trajectory(format!("{}: no landing in trajectory", trajectory.display())));
            };
            println!("landing t={:.9} x={:.9} y={:.9}", landing.t, landing.x, landing.y);
            let Some(report) = report else { return Ok(exit::OK) };
            let text = std::fs::read_to_string(&report)
                .map_err(|e| CliError::Io { path: report.display().to_string(), source: e })?;
            let rep: RunReport =
                serde_json::from_str(&text).map_err(|e| CliError::Trajectory(format!("{}: {e}", report.display())))?;
            let Some([x, y]) = rep.reached else {
                println!("report has no reached point");
                return Ok(exit::IO);
            };
            let gap = (landing.x - x).hypot(landing.y - y);
            println!("reported ({x:.9}, {y:.9}), difference {gap:.3e} m");
            Ok(if gap <= REPLAY_TOLERANCE { exit::OK } else { exit::IO })
        }
        Command::Fixtures { out } => {
            match out {
                None => BUNDLED.iter().for_each(|(name, _)| println!("{name}")),
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .map_err(|e| CliError::Io { path: dir.display().to_string(), source: e })?;
                    for (name, text) in BUNDLED {
                        let path = dir.join(format!("{name}.toml"));
                        std::fs::write(&path, text)
                            .map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
                    }
                    println!("wrote {} fixtures to {}", BUNDLED.len(), dir.display());
                }
            }
            Ok(exit::OK)
        }
    }
}

/// Expands directories to their `*.toml` files in name order.
fn collect_scenarios(paths: &[String]) -> Result<Vec<Scenario>, CliError> {
    let mut out = Vec::new();
    for arg in paths {
        let path = Path::new(arg);
        if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|e| CliError::Io { path: arg.clone(), source: e })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "toml"))
                .collect();
            files.sort();
            for f in files {
                out.push(load_scenario(&f)?);
            }
        } else {
            out.push(resolve_scenario(arg)?);
        }
    }
    Ok(out)
}
