//! Scenario files (TOML).
//!
//! ```toml
//! name = "case1"
//! seed = 7            # default 7
//! tolerance = 0.05    # success radius around the target (m), default 0.05
//!
//! [incoming]          # ball right after its bounce on the robot's half, t = 0
//! pos = [-0.2, -0.4, 0.0]
//! vel = [0.5, -5.0, 4.0]
//! spin = [10.0, 10.0, 10.0]
//!
//! [cost]
//! target = [-0.3, 1.0]
//! [[cost.terms]]
//! kind = "landing_speed_bonus"
//! weight = 0.5
//!
//! [physics]           # optional overrides: k_v k_d k_m g e mu_k r drag_mode cap_slip_reversal
//! [table]             # optional overrides: length width net_height
//! [workspace]         # optional overrides: x_range y_range z_range v_limit
//! [pso]               # optional overrides: swarm_size iterations c1 c2 inertia
//!                     #   per_dimension_random parallel bounds
//! ```
//!
//! Every section except `incoming` and `cost` may be omitted or partial;
//! missing keys take their defaults and unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use strike_core::{BallState, CostSpec, InvalidParam, PhysicsParams, PsoConfig, TableGeometry, Workspace};

use crate::CliError;

/// Bundled fixtures, by name.
pub const BUNDLED: [(&str, &str); 7] = [
    ("case1", include_str!("../scenarios/case1.toml")),
    ("case2", include_str!("../scenarios/case2.toml")),
    ("case3", include_str!("../scenarios/case3.toml")),
    ("table1_row1", include_str!("../scenarios/table1_row1.toml")),
    ("table1_row2", include_str!("../scenarios/table1_row2.toml")),
    ("table1_row3", include_str!("../scenarios/table1_row3.toml")),
    ("table1_row4", include_str!("../scenarios/table1_row4.toml")),
];

fn default_seed() -> u64 {
    7
}

fn default_tolerance() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub incoming: BallState,
    pub cost: CostSpec,
    #[serde(default)]
    pub physics: PhysicsParams,
    #[serde(default)]
    pub table: TableGeometry,
    #[serde(default)]
    pub workspace: Workspace,
    #[serde(default)]
    pub pso: PsoSettings,
}

/// Swarm settings; the seed comes from the scenario or the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoSettings {
    pub swarm_size: usize,
    pub iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub inertia: f64,
    pub per_dimension_random: bool,
    pub parallel: bool,
    /// `(T, v_xr, v_yr, v_zr)` search bounds; derived from the incoming
    /// trajectory and the workspace when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl Default for PsoSettings {
    fn default() -> Self {
        let c = PsoConfig::new(Vec::new());
        Self {
            swarm_size: c.swarm_size,
            iterations: c.iterations,
            c1: c.c1,
            c2: c.c2,
            inertia: c.inertia,
            per_dimension_random: c.per_dimension_random,
            parallel: c.parallel,
            bounds: None,
        }
    }
}

impl PsoSettings {
    /// Swarm configuration; `bounds` stays empty when not overridden.
    pub fn config(&self, seed: u64) -> PsoConfig {
        PsoConfig {
            swarm_size: self.swarm_size,
            iterations: self.iterations,
            c1: self.c1,
            c2: self.c2,
            inertia: self.inertia,
            bounds: self.bounds.clone().unwrap_or_default(),
            seed,
            per_dimension_random: self.per_dimension_random,
            parallel: self.parallel,
        }
    }

    fn validate(&self) -> Result<(), InvalidParam> {
        let fail = |field, constraint| Err(InvalidParam { field, constraint });
        if self.swarm_size == 0 {
            return fail("swarm_size", "must be >= 1");
        }
        if self.iterations == 0 {
            return fail("iterations", "must be >= 1");
        }
        if !(self.c1.is_finite() && self.c1 >= 0.0) {
            return fail("c1", "must be >= 0");
        }
        if !(self.c2.is_finite() && self.c2 >= 0.0) {
            return fail("c2", "must be >= 0");
        }
        if !self.inertia.is_finite() {
            return fail("inertia", "must be finite");
        }
        if let Some(b) = &self.bounds {
            if b.len() != 4 {
                return fail("bounds", "must have 4 entries (T, v_xr, v_yr, v_zr)");
            }
            if b.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
                return fail("bounds", "must be finite ranges with lo < hi");
            }
        }
        Ok(())
    }
}

impl Scenario {
    /// Checks every section; errors carry the dotted field path.
    pub fn validate(&self) -> Result<(), (String, &'static str)> {
        let within = |section: &str, r: Result<(), InvalidParam>| {
            r.map_err(|e| (format!("{section}.{}", e.field), e.constraint))
        };
        if self.name.trim().is_empty() {
            return Err(("name".into(), "must not be empty"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(("tolerance".into(), "must be > 0"));
        }
        if self.incoming.t != 0.0 {
            return Err(("incoming.t".into(), "must be 0"));
        }
        if !self.incoming.is_finite() {
            return Err(("incoming".into(), "must be finite"));
        }
        within("cost", self.cost.validate())?;
        within("physics", self.physics.validate())?;
        within("table", self.table.validate())?;
        within("workspace", self.workspace.validate())?;
        within("pso", self.pso.validate())?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are all TOML-representable")
    }
}

/// Parses and validates scenario text. `source_name` labels errors.
pub fn parse_scenario(text: &str, source_name: &str) -> Result<Scenario, CliError> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        CliError::Parse { source_name: source_name.to_owned(), line, column, message: e.message().to_owned() }
    })?;
    scenario.validate().map_err(|(field, constraint)| CliError::Validation {
        source_name: source_name.to_owned(),
        field,
        constraint: constraint.to_owned(),
    })?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scenario(&text, &path.display().to_string())
}

pub fn bundled(name: &str) -> Option<Scenario> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| parse_scenario(text, n).expect("bundled fixtures are valid"))
}

/// A path to a scenario file, or else the name of a bundled fixture.
pub fn resolve_scenario(arg: &str) -> Result<Scenario, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        return load_scenario(path);
    }
    bundled(arg).ok_or_else(|| CliError::UnknownScenario(arg.to_owned()))
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
