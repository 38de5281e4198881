//! Strike planning: choose the strike time and racket velocity that send the
//! ball to a target point on the opponent's half.
//!
//! The decision variable is `(T, v_xr, v_yr, v_zr)`. A candidate is simulated
//! as: incoming flight to `T`, workspace and velocity-limit checks, racket
//! rebound, net check, landing on `z = 0`. Every failed check maps to an
//! infinite cost so the swarm never treats a violation as merely "large".
//!
//! Coordinates: origin at the table center, robot half at `y < 0`, opponent
//! half at `y > 0`, `z = 0` on the table surface.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flight::{BallState, PhysicsParams, Propagator, DEFAULT_T_MAX, SCAN_STEP};
use crate::impact::{racket_rebound, ImpactOutcome, RacketVelocity};
use crate::pso::{optimize, PsoConfig, PsoError};
use crate::vec3::Vec3;
use crate::InvalidParam;

/// Guard for reciprocal cost terms.
pub const TERM_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("incoming trajectory never enters the robot workspace within {0} s")]
    NoWindow(f64),
    #[error(transparent)]
    Flight(#[from] crate::flight::FlightError),
    #[error(transparent)]
    Pso(PsoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableGeometry {
    /// Extent along y (m).
    pub length: f64,
    /// Extent along x (m).
    pub width: f64,
    pub net_height: f64,
}

impl Default for TableGeometry {
    fn default() -> Self {
        Self { length: 2.74, width: 1.525, net_height: 0.15 }
    }
}

impl TableGeometry {
    pub fn validate(&self) -> Result<(), InvalidParam> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.length) {
            return Err(InvalidParam { field: "length", constraint: "must be > 0" });
        }
        if !pos(self.width) {
            return Err(InvalidParam { field: "width", constraint: "must be > 0" });
        }
        if !pos(self.net_height) {
            return Err(InvalidParam { field: "net_height", constraint: "must be > 0" });
        }
        Ok(())
    }
}

/// Reachable box for the racket center plus per-axis racket speed limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Workspace {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub z_range: (f64, f64),
    pub v_limit: Vec3,
}

impl Default for Workspace {
    /// Robot half of a standard table, 0.25 m beyond its edges, up to 0.76 m
    /// high; 5 m/s per axis.
    fn default() -> Self {
        Self {
            x_range: (-1.0125, 1.0125),
            y_range: (-1.62, 0.0),
            z_range: (0.0, 0.76),
            v_limit: Vec3::new(5.0, 5.0, 5.0),
        }
    }
}

impl Workspace {
    pub fn contains(&self, p: Vec3) -> bool {
        let within = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        within(p.x, self.x_range) && within(p.y, self.y_range) && within(p.z, self.z_range)
    }

    pub fn velocity_attainable(&self, r: &RacketVelocity) -> bool {
        r.vx.abs() <= self.v_limit.x && r.vy.abs() <= self.v_limit.y && r.vz.abs() <= self.v_limit.z
    }

    pub fn validate(&self) -> Result<(), InvalidParam> {
        let range_ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo < hi;
        for (field, r) in [("x_range", self.x_range), ("y_range", self.y_range), ("z_range", self.z_range)] {
            if !range_ok(r) {
                return Err(InvalidParam { field, constraint: "must be a finite range with lo < hi" });
            }
        }
        let v = self.v_limit;
        if !(v.is_finite() && v.x > 0.0 && v.y > 0.0 && v.z > 0.0) {
            return Err(InvalidParam { field: "v_limit", constraint: "must be > 0 on every axis" });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrikeCandidate {
    /// Strike time after the incoming ball's table bounce (s).
    pub time: f64,
    pub racket: RacketVelocity,
}

impl StrikeCandidate {
    pub fn new(time: f64, vx: f64, vy: f64, vz: f64) -> Self {
        Self { time, racket: RacketVelocity::new(vx, vy, vz) }
    }

    /// From a PSO position `(T, v_xr, v_yr, v_zr)`.
    pub fn from_slice(x: &[f64]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.time, self.racket.vx, self.racket.vy, self.racket.vz]
    }
}

/// Secondary objective added to the landing distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SecondaryTerm {
    /// `weight / |v_landing|`
    LandingSpeedBonus { weight: f64 },
    /// `weight / sqrt(w_x^2 + w_y^2)` of the post-impact spin.
    SpinXyBonus { weight: f64 },
    /// `vz_weight * |v_tz| + vy_weight / |v_ty|` at landing.
    Flatness { vz_weight: f64, vy_weight: f64 },
    /// `weight / max_height` of the post-impact flight.
    MaxHeightBonus { weight: f64 },
    /// `weight * max_height` of the post-impact flight.
    MaxHeightPenalty { weight: f64 },
    /// `weight / |w_x|` of the post-impact spin.
    SpinXBonus { weight: f64 },
}

impl SecondaryTerm {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::LandingSpeedBonus { .. } => "landing_speed_bonus",
            Self::SpinXyBonus { .. } => "spin_xy_bonus",
            Self::Flatness { .. } => "flatness",
            Self::MaxHeightBonus { .. } => "max_height_bonus",
            Self::MaxHeightPenalty { .. } => "max_height_penalty",
            Self::SpinXBonus { .. } => "spin_x_bonus",
        }
    }

    fn weights(&self) -> Vec<f64> {
        match *self {
            Self::Flatness { vz_weight, vy_weight } => vec![vz_weight, vy_weight],
            Self::LandingSpeedBonus { weight }
            | Self::SpinXyBonus { weight }
            | Self::MaxHeightBonus { weight }
            | Self::MaxHeightPenalty { weight }
            | Self::SpinXBonus { weight } => vec![weight],
        }
    }

    fn needs_max_height(&self) -> bool {
        matches!(self, Self::MaxHeightBonus { .. } | Self::MaxHeightPenalty { .. })
    }

    /// Value of the term; `max_height` is the post-impact apex.
    pub fn value(&self, landing: &BallState, post_impact: &BallState, max_height: f64) -> f64 {
        let recip = |w: f64, x: f64| w / x.abs().max(TERM_EPSILON);
        let w = post_impact.spin;
        match *self {
            Self::LandingSpeedBonus { weight } => recip(weight, landing.vel.norm()),
            Self::SpinXyBonus { weight } => recip(weight, w.x.hypot(w.y)),
            Self::Flatness { vz_weight, vy_weight } => {
                vz_weight * landing.vel.z.abs() + recip(vy_weight, landing.vel.y)
            }
            Self::MaxHeightBonus { weight } => recip(weight, max_height),
            Self::MaxHeightPenalty { weight } => weight * max_height,
            Self::SpinXBonus { weight } => recip(weight, w.x),
        }
    }
}

/// Evaluates one secondary term; `t_max` bounds the apex search.
pub fn secondary_term(
    term: &SecondaryTerm,
    landing: &BallState,
    post_impact: &BallState,
    params: &PhysicsParams,
    t_max: f64,
) -> f64 {
    let h = if term.needs_max_height() { crate::flight::max_height(post_impact, t_max, params) } else { 0.0 };
    term.value(landing, post_impact, h)
}

/// Target point plus weighted secondary objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub target: [f64; 2],
    #[serde(default)]
    pub terms: Vec<SecondaryTerm>,
}

impl CostSpec {
    pub fn new(x: f64, y: f64) -> Self {
        Self { target: [x, y], terms: Vec::new() }
    }

    pub fn with_term(mut self, term: SecondaryTerm) -> Self {
        self.terms.push(term);
        self
    }

    pub fn validate(&self) -> Result<(), InvalidParam> {
        if !(self.target[0].is_finite() && self.target[1].is_finite()) {
            return Err(InvalidParam { field: "target", constraint: "must be finite" });
        }
        // y = 0 is admitted: a target on the net line is a legal request the
        // planner resolves to the nearest feasible landing.
        if self.target[1] < 0.0 {
            return Err(InvalidParam { field: "target", constraint: "must lie on the opponent's side (y >= 0)" });
        }
        for t in &self.terms {
            if t.weights().iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(InvalidParam { field: "terms.weight", constraint: "must be >= 0" });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermValue {
    pub kind: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Distance from the landing point to the target (m).
    pub distance: f64,
    pub terms: Vec<TermValue>,
    pub total: f64,
}

/// Why a candidate was given infinite cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasible {
    NonPositiveTime,
    OutsideWorkspace,
    VelocityLimit,
    NoContact,
    NetCollision,
    NoLanding,
    Diverged,
}

/// Everything that happens to the ball for one strike.
#[derive(Debug, Clone, PartialEq)]
pub struct StrikeOutcome {
    pub candidate: StrikeCandidate,
    /// Ball right before contact.
    pub at_impact: BallState,
    pub impact: ImpactOutcome,
    /// Ball at table contact on the far side.
    pub landing: BallState,
    pub breakdown: CostBreakdown,
}

impl StrikeOutcome {
    pub fn landing_point(&self) -> [f64; 2] {
        [self.landing.pos.x, self.landing.pos.y]
    }

    pub fn post_impact(&self) -> &BallState {
        &self.impact.post
    }
}

/// A fully specified planning problem.
#[derive(Debug, Clone)]
pub struct StrikeProblem {
    pub incoming: BallState,
    pub spec: CostSpec,
    pub workspace: Workspace,
    pub table: TableGeometry,
    pub params: PhysicsParams,
    /// Horizon for post-impact trajectory queries (s).
    pub t_max: f64,
    incoming_flight: Propagator,
    needs_apex: bool,
}

impl StrikeProblem {
    pub fn new(
        incoming: BallState,
        spec: CostSpec,
        workspace: Workspace,
        table: TableGeometry,
        params: PhysicsParams,
    ) -> Result<Self, PlanError> {
        let incoming_flight = Propagator::new(incoming.spin, &params)?;
        let needs_apex = spec.terms.iter().any(SecondaryTerm::needs_max_height);
        Ok(Self { incoming, spec, workspace, table, params, t_max: DEFAULT_T_MAX, incoming_flight, needs_apex })
    }

    /// Incoming ball at time `T` after the bounce.
    pub fn incoming_at(&self, time: f64) -> Result<BallState, crate::flight::FlightError> {
        self.incoming_flight.propagate(&self.incoming, time)
    }

    pub fn simulate(&self, candidate: &StrikeCandidate) -> Result<StrikeOutcome, Infeasible> {
        if !(candidate.time > 0.0) {
            return Err(Infeasible::NonPositiveTime);
        }
        let at_impact = self.incoming_at(candidate.time).map_err(|_| Infeasible::Diverged)?;
        if !self.workspace.contains(at_impact.pos) {
            return Err(Infeasible::OutsideWorkspace);
        }
        if !self.workspace.velocity_attainable(&candidate.racket) {
            return Err(Infeasible::VelocityLimit);
        }
        let impact = racket_rebound(&at_impact, &candidate.racket, &self.params).map_err(|_| Infeasible::NoContact)?;
        let post = impact.post;
        if !post.is_finite() {
            return Err(Infeasible::Diverged);
        }
        let flight = Propagator::new(post.spin, &self.params).map_err(|_| Infeasible::Diverged)?;
        if flight.crosses_net_too_low(&post, self.t_max, self.table.net_height) {
            return Err(Infeasible::NetCollision);
        }
        let landing = flight.find_descending_crossing(&post, 0.0, self.t_max).ok_or(Infeasible::NoLanding)?;

        let [xt, yt] = self.spec.target;
        let distance = (landing.pos.x - xt).hypot(landing.pos.y - yt);
        let apex = if self.needs_apex { flight.max_height(&post, self.t_max) } else { 0.0 };
        let terms: Vec<TermValue> = self
            .spec
            .terms
            .iter()
            .map(|t| TermValue { kind: t.kind().to_owned(), value: t.value(&landing, &post, apex) })
            .collect();
        let total = distance + terms.iter().map(|t| t.value).sum::<f64>();
        Ok(StrikeOutcome {
            candidate: *candidate,
            at_impact,
            impact,
            landing,
            breakdown: CostBreakdown { distance, terms, total },
        })
    }

    /// The PSO cost of a candidate; infinite when infeasible.
    pub fn cost(&self, candidate: &StrikeCandidate) -> f64 {
        match self.simulate(candidate) {
            Ok(o) if o.breakdown.total.is_finite() => o.breakdown.total,
            _ => f64::INFINITY,
        }
    }

    /// First contiguous span of strike times for which the incoming ball is
    /// inside the workspace, scanned at 1 ms.
    pub fn strike_window(&self) -> Option<(f64, f64)> {
        let start = self.incoming;
        let mut window: Option<(f64, f64)> = self.workspace.contains(start.pos).then_some((0.0, 0.0));
        self.incoming_flight.scan(&start, self.t_max, |_, next, _| {
            let t = next.t - start.t;
            let inside = self.workspace.contains(next.pos);
            match (&mut window, inside) {
                (None, true) => window = Some((t, t)),
                (Some(w), true) => w.1 = t,
                (Some(_), false) => return ControlFlow::Break(()),
                (None, false) => {}
            }
            ControlFlow::Continue(())
        });
        window
    }

    /// Search bounds for `(T, v_xr, v_yr, v_zr)`: the strike window widened by
    /// 10% of its length on each side (never below 0), and `+-v_limit`.
    pub fn default_bounds(&self) -> Result<Vec<(f64, f64)>, PlanError> {
        let (lo, hi) = self.strike_window().ok_or(PlanError::NoWindow(self.t_max))?;
        let pad = 0.1 * (hi - lo).max(SCAN_STEP);
        let v = self.workspace.v_limit;
        Ok(vec![((lo - pad).max(0.0), hi + pad), (-v.x, v.x), (-v.y, v.y), (-v.z, v.z)])
    }

    /// Runs the swarm and re-simulates its best candidate. All-infeasible
    /// searches come back with `feasible == false`, not as an error.
    pub fn plan(&self, config: &PsoConfig) -> Result<PlanResult, PlanError> {
        let cost = |x: &[f64]| self.cost(&StrikeCandidate::from_slice(x));
        let (result, feasible) = match optimize(cost, config) {
            Ok(r) => (r, true),
            Err(PsoError::AllInfeasible(r)) => (*r, false),
            Err(e) => return Err(PlanError::Pso(e)),
        };
        let strike = StrikeCandidate::from_slice(&result.best_pos);
        let outcome = if feasible { self.simulate(&strike).ok() } else { None };
        let feasible = outcome.is_some();
        Ok(PlanResult {
            strike,
            cost: outcome.as_ref().map_or(f64::INFINITY, |o| o.breakdown.total),
            feasible,
            pso_history: result.history,
            evaluations: result.evaluations,
            outcome,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub strike: StrikeCandidate,
    pub cost: f64,
    pub feasible: bool,
    pub pso_history: Vec<f64>,
    pub evaluations: usize,
    /// Re-simulated outcome of `strike`; present iff feasible.
    pub outcome: Option<StrikeOutcome>,
}

impl PlanResult {
    pub fn landing(&self) -> Option<[f64; 2]> {
        self.outcome.as_ref().map(StrikeOutcome::landing_point)
    }
}

/// Cost of one candidate plus its breakdown when feasible.
pub fn evaluate_candidate(
    candidate: &StrikeCandidate,
    incoming: &BallState,
    spec: &CostSpec,
    workspace: &Workspace,
    table: &TableGeometry,
    params: &PhysicsParams,
) -> (f64, Option<CostBreakdown>) {
    let Ok(problem) = StrikeProblem::new(*incoming, spec.clone(), *workspace, *table, *params) else {
        return (f64::INFINITY, None);
    };
    match problem.simulate(candidate) {
        Ok(o) => (o.breakdown.total, Some(o.breakdown)),
        Err(_) => (f64::INFINITY, None),
    }
}

/// Strike-time and racket-velocity search bounds for an incoming ball.
pub fn default_bounds(
    incoming: &BallState,
    workspace: &Workspace,
    params: &PhysicsParams,
) -> Result<Vec<(f64, f64)>, PlanError> {
    StrikeProblem::new(*incoming, CostSpec::new(0.0, 1.0), *workspace, TableGeometry::default(), *params)?
        .default_bounds()
}

/// Plans a strike. Empty `pso_config.bounds` are filled from [`default_bounds`].
pub fn plan_strike(
    incoming: &BallState,
    spec: &CostSpec,
    workspace: &Workspace,
    table: &TableGeometry,
    params: &PhysicsParams,
    pso_config: &PsoConfig,
) -> Result<PlanResult, PlanError> {
    let problem = StrikeProblem::new(*incoming, spec.clone(), *workspace, *table, *params)?;
    if pso_config.bounds.is_empty() {
        let config = PsoConfig { bounds: problem.default_bounds()?, ..pso_config.clone() };
        problem.plan(&config)
    } else {
        problem.plan(pso_config)
    }
}
