//! Per-run and per-suite reports: an aligned text table for people and a
//! JSON sidecar for tools.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use strike_core::planner::{StrikeCandidate, TermValue};

/// Secondary quantities of a feasible strike, whatever the cost optimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    /// Ball speed at the landing (m/s).
    pub landing_speed: f64,
    /// `sqrt(w_x^2 + w_y^2)` right after the strike (rad/s).
    pub spin_xy: f64,
    /// `|w_x|` right after the strike (rad/s).
    pub spin_x: f64,
    /// Apex height of the post-strike flight (m).
    pub max_height: f64,
    /// Landing velocity components (m/s).
    pub v_ty: f64,
    pub v_tz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub seed: u64,
    pub feasible: bool,
    pub target: [f64; 2],
    /// Verified landing of the planned strike.
    pub reached: Option<[f64; 2]>,
    pub distance: Option<f64>,
    pub tolerance: f64,
    pub within_tolerance: bool,
    pub terms: Vec<TermValue>,
    pub objectives: Option<Objectives>,
    pub cost: Option<f64>,
    pub strike: Option<StrikeCandidate>,
    pub evaluations: usize,
    /// Planner wall time only; varies between otherwise identical runs.
    pub plan_seconds: f64,
    /// Why the run produced no feasible strike.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl RunReport {
    /// Copy with the wall time zeroed, for comparing runs.
    pub fn without_timing(&self) -> RunReport {
        RunReport { plan_seconds: 0.0, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub name: String,
    pub runs: usize,
    pub feasible: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub tolerance: f64,
    pub median_plan_seconds: Option<f64>,
    pub median_distance: Option<f64>,
    /// Medians over feasible runs.
    pub median_objectives: Option<Objectives>,
    /// Runs that failed outright, as `seed: message`.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SuiteReport {
    pub scenarios: Vec<SuiteRow>,
    pub runs: Vec<RunReport>,
}

pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Aggregates the runs of one scenario.
pub fn summarize(name: &str, tolerance: f64, runs: &[RunReport], errors: Vec<String>) -> SuiteRow {
    let total = runs.len() + errors.len();
    let feasible: Vec<&RunReport> = runs.iter().filter(|r| r.feasible).collect();
    let successes = runs.iter().filter(|r| r.within_tolerance).count();
    let objectives: Vec<Objectives> = feasible.iter().filter_map(|r| r.objectives).collect();
    let med = |f: fn(&Objectives) -> f64| median(objectives.iter().map(f));
    let median_objectives = (!objectives.is_empty()).then(|| Objectives {
        landing_speed: med(|o| o.landing_speed).unwrap_or_default(),
        spin_xy: med(|o| o.spin_xy).unwrap_or_default(),
        spin_x: med(|o| o.spin_x).unwrap_or_default(),
        max_height: med(|o| o.max_height).unwrap_or_default(),
        v_ty: med(|o| o.v_ty).unwrap_or_default(),
        v_tz: med(|o| o.v_tz).unwrap_or_default(),
    });
    SuiteRow {
        name: name.to_owned(),
        runs: total,
        feasible: feasible.len(),
        successes,
        success_rate: if total == 0 { 0.0 } else { successes as f64 / total as f64 },
        tolerance,
        median_plan_seconds: median(runs.iter().map(|r| r.plan_seconds)),
        median_distance: median(feasible.iter().filter_map(|r| r.distance)),
        median_objectives,
        errors,
    }
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{v:.digits$}"))
}

fn point(p: Option<[f64; 2]>) -> String {
    p.map_or_else(|| "-".to_owned(), |[x, y]| format!("({x:.3}, {y:.3})"))
}

fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn run_table(runs: &[RunReport]) -> String {
    let header = [
        "scenario", "seed", "feasible", "target", "reached", "distance", "cost", "|v_land|", "|w_x|", "w_xy", "max_h",
        "time_s",
    ];
    let rows: Vec<Vec<String>> = runs
        .iter()
        .map(|r| {
            let o = r.objectives;
            vec![
                r.name.clone(),
                r.seed.to_string(),
                if r.feasible { "yes" } else { "no" }.to_owned(),
                point(Some(r.target)),
                point(r.reached),
                opt(r.distance, 4),
                opt(r.cost, 4),
                opt(o.map(|o| o.landing_speed), 2),
                opt(o.map(|o| o.spin_x), 2),
                opt(o.map(|o| o.spin_xy), 2),
                opt(o.map(|o| o.max_height), 3),
                format!("{:.4}", r.plan_seconds),
            ]
        })
        .collect();
    render(&header, &rows)
}

pub fn suite_table(rows: &[SuiteRow]) -> String {
    let header = [
        "scenario",
        "runs",
        "feasible",
        "success",
        "rate",
        "tol",
        "med_dist",
        "med_|v_land|",
        "med_|w_x|",
        "med_w_xy",
        "med_max_h",
        "med_time_s",
        "errors",
    ];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let o = r.median_objectives;
            vec![
                r.name.clone(),
                r.runs.to_string(),
                r.feasible.to_string(),
                r.successes.to_string(),
                format!("{:.2}", r.success_rate),
                format!("{}", r.tolerance),
                opt(r.median_distance, 4),
                opt(o.map(|o| o.landing_speed), 2),
                opt(o.map(|o| o.spin_x), 2),
                opt(o.map(|o| o.spin_xy), 2),
                opt(o.map(|o| o.max_height), 3),
                opt(r.median_plan_seconds, 4),
                r.errors.len().to_string(),
            ]
        })
        .collect();
    render(&header, &cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median([3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median([4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(std::iter::empty()), None);
    }

    #[test]
    fn table_columns_align() {
        let t = render(&["a", "bb"], &[vec!["xxx".into(), "y".into()]]);
        assert_eq!(t, "a    bb\nxxx  y\n");
    }
}
