//! Strike planning for a 3-DOF Cartesian ping-pong robot.
//!
//! - [`flight`]: ball flight with drag and Magnus force, plus trajectory queries.
//! - [`impact`]: ball/racket rebound with restitution and kinetic friction.
//! - [`pso`]: a seeded, bounded particle swarm optimizer.
//! - [`planner`]: the strike search that ties the three together.

// `!(x > 0.0)` and friends are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod flight;
pub mod impact;
pub mod planner;
pub mod pso;
pub mod vec3;

pub use flight::{BallState, DragMode, PhysicsParams, Propagator};
pub use impact::{ImpactOutcome, RacketVelocity};
pub use planner::{
    plan_strike, CostSpec, PlanResult, SecondaryTerm, StrikeCandidate, StrikeProblem, TableGeometry, Workspace,
};
pub use pso::{optimize, PsoConfig};
pub use vec3::Vec3;

/// A model parameter outside its admissible range.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field} {constraint}")]
pub struct InvalidParam {
    pub field: &'static str,
    pub constraint: &'static str,
}
