//! Ball flight under gravity, air drag and the Magnus force.
//!
//! In the default linear-drag mode the flight is the affine LTI system
//!
//! ```text
//! d/dt [v; x] = A [v; x] + B
//! ```
//!
//! with `A` built by [`build_system`]. The spin is constant between impacts,
//! so `A` is fixed for a flight segment and the exact solution is the matrix
//! exponential of the augmented 7x7 generator `[[A, B], [0, 0]]`.
//!
//! The quadratic-drag mode replaces the `-K_v v` term with `-k_d |v| v` and is
//! integrated with classical fourth-order Runge-Kutta at 1 ms.

use std::ops::ControlFlow;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::TableGeometry;
use crate::vec3::Vec3;
use crate::InvalidParam;

/// Fixed scan step for trajectory queries and RK4 stepping, in seconds.
pub const SCAN_STEP: f64 = 1e-3;

/// Default horizon for trajectory queries, in seconds.
pub const DEFAULT_T_MAX: f64 = 3.0;

/// Crossing refinement stops once the residual is below this (m or m/s).
/// The public contract is 1e-6; refinement goes tighter.
const REFINE_TOL: f64 = 1e-9;

const REFINE_MAX_ITER: usize = 100;

type Matrix7 = SMatrix<f64, 7, 7>;
type Vector7 = SVector<f64, 7>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlightError {
    #[error("spin must be finite, got {0:?}")]
    NonFiniteSpin(Vec3),
    #[error("propagation time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("trajectory diverged (non-finite state) at t = {0}")]
    Diverged(f64),
    #[error("the LTI system matrix is only defined for linear drag mode")]
    NotLinear,
}

/// Position, velocity and spin of the ball at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallState {
    #[serde(default)]
    pub t: f64,
    pub pos: Vec3,
    pub vel: Vec3,
    #[serde(default)]
    pub spin: Vec3,
}

impl BallState {
    pub fn new(t: f64, pos: Vec3, vel: Vec3, spin: Vec3) -> Self {
        Self { t, pos, vel, spin }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.pos.is_finite() && self.vel.is_finite() && self.spin.is_finite()
    }

    fn to_vector(self) -> Vector7 {
        Vector7::from_column_slice(&[self.vel.x, self.vel.y, self.vel.z, self.pos.x, self.pos.y, self.pos.z, 1.0])
    }

    fn with_vector(self, t: f64, s: &Vector7) -> Self {
        Self { t, vel: Vec3::new(s[0], s[1], s[2]), pos: Vec3::new(s[3], s[4], s[5]), spin: self.spin }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DragMode {
    /// `-K_v v`, the LTI model.
    #[default]
    Linear,
    /// `-k_d |v| v`, integrated numerically.
    Quadratic,
}

/// Model constants shared by flight and impact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsParams {
    /// Linear drag rate `K_v` (1/s).
    #[serde(rename = "k_v")]
    pub drag_rate: f64,
    /// Quadratic drag coefficient `k_d` (1/m), used only in quadratic mode.
    #[serde(rename = "k_d")]
    pub quadratic_drag: f64,
    /// Magnus coupling `k_m`.
    #[serde(rename = "k_m")]
    pub magnus: f64,
    /// Gravity magnitude (m/s^2).
    #[serde(rename = "g")]
    pub gravity: f64,
    /// Ball/racket coefficient of restitution.
    #[serde(rename = "e")]
    pub restitution: f64,
    /// Ball/racket kinetic friction coefficient.
    #[serde(rename = "mu_k")]
    pub friction: f64,
    /// Ball radius (m).
    #[serde(rename = "r")]
    pub ball_radius: f64,
    pub drag_mode: DragMode,
    /// Clamp the friction impulse so the contact slip never changes sign.
    pub cap_slip_reversal: bool,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            drag_rate: 0.7,
            quadratic_drag: 0.1,
            magnus: 0.01,
            gravity: 9.81,
            restitution: 0.8,
            friction: 0.2,
            ball_radius: 0.02,
            drag_mode: DragMode::Linear,
            cap_slip_reversal: false,
        }
    }
}

impl PhysicsParams {
    pub fn validate(&self) -> Result<(), InvalidParam> {
        let check = |ok: bool, field: &'static str, constraint: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(InvalidParam { field, constraint })
            }
        };
        check(self.drag_rate.is_finite() && self.drag_rate > 0.0, "k_v", "must be > 0")?;
        check(self.quadratic_drag.is_finite() && self.quadratic_drag >= 0.0, "k_d", "must be >= 0")?;
        check(self.magnus.is_finite() && self.magnus >= 0.0, "k_m", "must be >= 0")?;
        check(self.gravity.is_finite() && self.gravity > 0.0, "g", "must be > 0")?;
        check(self.restitution > 0.0 && self.restitution <= 1.0, "e", "must be in (0,1]")?;
        check(self.friction.is_finite() && self.friction >= 0.0, "mu_k", "must be >= 0")?;
        check(self.ball_radius.is_finite() && self.ball_radius > 0.0, "r", "must be > 0")?;
        Ok(())
    }
}

/// The `A` and `B` of the LTI flight system, state ordered as `[v; x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrix {
    pub a: SMatrix<f64, 6, 6>,
    pub b: SVector<f64, 6>,
}

impl SystemMatrix {
    /// The velocity block of `A` (upper-left 3x3).
    pub fn velocity_block(&self) -> SMatrix<f64, 3, 3> {
        self.a.fixed_view::<3, 3>(0, 0).into_owned()
    }

    fn augmented(&self) -> Matrix7 {
        let mut m = Matrix7::zeros();
        m.fixed_view_mut::<6, 6>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<6, 1>(0, 6).copy_from(&self.b);
        m
    }
}

/// Builds the LTI system matrices for a constant spin.
pub fn build_system(spin: Vec3, params: &PhysicsParams) -> Result<SystemMatrix, FlightError> {
    if params.drag_mode != DragMode::Linear {
        return Err(FlightError::NotLinear);
    }
    system_for(spin, params.drag_rate, params)
}

fn system_for(spin: Vec3, drag: f64, params: &PhysicsParams) -> Result<SystemMatrix, FlightError> {
    if !spin.is_finite() {
        return Err(FlightError::NonFiniteSpin(spin));
    }
    let km = params.magnus;
    let (wx, wy, wz) = (km * spin.x, km * spin.y, km * spin.z);
    #[rustfmt::skip]
    let a = SMatrix::<f64, 6, 6>::from_row_slice(&[
        -drag, -wz,    wy,   0.0, 0.0, 0.0,
         wz,  -drag,  -wx,   0.0, 0.0, 0.0,
        -wy,   wx,   -drag,  0.0, 0.0, 0.0,
         1.0,  0.0,   0.0,   0.0, 0.0, 0.0,
         0.0,  1.0,   0.0,   0.0, 0.0, 0.0,
         0.0,  0.0,   1.0,   0.0, 0.0, 0.0,
    ]);
    let b = SVector::<f64, 6>::from_column_slice(&[0.0, 0.0, -params.gravity, 0.0, 0.0, 0.0]);
    Ok(SystemMatrix { a, b })
}

/// Instantaneous acceleration `dv/dt` of the ball.
pub fn acceleration(state: &BallState, params: &PhysicsParams) -> Vec3 {
    let drag = match params.drag_mode {
        DragMode::Linear => -params.drag_rate * state.vel,
        DragMode::Quadratic => -params.quadratic_drag * state.vel.norm() * state.vel,
    };
    let magnus = params.magnus * state.spin.cross(state.vel);
    drag + magnus + Vec3::new(0.0, 0.0, -params.gravity)
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)] // built once per flight segment, never moved in bulk
enum Scheme {
    /// Exact LTI flow: the augmented generator and its 1 ms transition map.
    Exact {
        generator: Matrix7,
        step_map: Matrix7,
    },
    Rk4,
}

/// Propagates a ball with a fixed spin.
///
/// Built once per flight segment; trajectory queries reuse the cached 1 ms
/// transition map in linear mode.
#[derive(Debug, Clone)]
pub struct Propagator {
    params: PhysicsParams,
    spin: Vec3,
    scheme: Scheme,
}

impl Propagator {
    pub fn new(spin: Vec3, params: &PhysicsParams) -> Result<Self, FlightError> {
        let scheme = match params.drag_mode {
            DragMode::Linear => {
                let generator = system_for(spin, params.drag_rate, params)?.augmented();
                let step_map = (generator * SCAN_STEP).exp();
                Scheme::Exact { generator, step_map }
            }
            DragMode::Quadratic => {
                if !spin.is_finite() {
                    return Err(FlightError::NonFiniteSpin(spin));
                }
                Scheme::Rk4
            }
        };
        Ok(Self { params: *params, spin, scheme })
    }

    pub fn params(&self) -> &PhysicsParams {
        &self.params
    }

    /// State after `dt` seconds. No finiteness check.
    pub fn advance(&self, state: &BallState, dt: f64) -> BallState {
        let state = BallState { spin: self.spin, ..*state };
        if dt == 0.0 {
            return state;
        }
        match &self.scheme {
            Scheme::Exact { generator, step_map } => {
                let s = state.to_vector();
                let next = if dt == SCAN_STEP {
                    step_map * s
                } else if dt < SCAN_STEP {
                    taylor_flow(generator, &s, dt)
                } else {
                    (generator * dt).exp() * s
                };
                state.with_vector(state.t + dt, &next)
            }
            Scheme::Rk4 => {
                let n = (dt / SCAN_STEP).ceil().max(1.0) as usize;
                let h = dt / n as f64;
                let mut cur = state;
                for _ in 0..n {
                    cur = self.rk4_step(&cur, h);
                }
                cur.t = state.t + dt;
                cur
            }
        }
    }

    fn rk4_step(&self, s: &BallState, h: f64) -> BallState {
        let p = &self.params;
        let eval = |pos: Vec3, vel: Vec3| {
            let st = BallState { pos, vel, ..*s };
            (vel, acceleration(&st, p))
        };
        let (k1x, k1v) = eval(s.pos, s.vel);
        let (k2x, k2v) = eval(s.pos + 0.5 * h * k1x, s.vel + 0.5 * h * k1v);
        let (k3x, k3v) = eval(s.pos + 0.5 * h * k2x, s.vel + 0.5 * h * k2v);
        let (k4x, k4v) = eval(s.pos + h * k3x, s.vel + h * k3v);
        BallState {
            t: s.t + h,
            pos: s.pos + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            vel: s.vel + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
            spin: s.spin,
        }
    }

    /// State after `t` seconds, with divergence reporting.
    pub fn propagate(&self, initial: &BallState, t: f64) -> Result<BallState, FlightError> {
        if !(t >= 0.0) {
            return Err(FlightError::NegativeTime(t));
        }
        let out = self.advance(initial, t);
        if out.is_finite() {
            Ok(out)
        } else {
            Err(FlightError::Diverged(out.t))
        }
    }

    /// Walks the trajectory in `SCAN_STEP` increments over `(0, t_max]`,
    /// handing each consecutive pair of states to `visit`. Stops early on
    /// `Break` or a non-finite state.
    pub fn scan<R>(
        &self,
        initial: &BallState,
        t_max: f64,
        mut visit: impl FnMut(&BallState, &BallState, f64) -> ControlFlow<R>,
    ) -> Option<R> {
        if !(t_max > 0.0) {
            return None;
        }
        let full = (t_max / SCAN_STEP).floor() as usize;
        let rest = t_max - full as f64 * SCAN_STEP;
        let mut cur = BallState { spin: self.spin, ..*initial };
        for k in 0..=full {
            let dt = if k < full { SCAN_STEP } else { rest };
            if dt <= 1e-12 {
                break;
            }
            let mut next = self.advance(&cur, dt);
            next.t = if k < full { initial.t + (k + 1) as f64 * SCAN_STEP } else { initial.t + t_max };
            if !next.is_finite() {
                return None;
            }
            if let ControlFlow::Break(r) = visit(&cur, &next, dt) {
                return Some(r);
            }
            cur = next;
        }
        None
    }

    /// Bisects `[0, dt]` from `prev` for the zero of `g`, assuming
    /// `g(prev) > 0 >= g(advance(prev, dt))`.
    fn refine(&self, prev: &BallState, dt: f64, g: impl Fn(&BallState) -> f64) -> BallState {
        let (mut lo, mut hi) = (0.0, dt);
        let mut best = self.advance(prev, hi);
        for _ in 0..REFINE_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            let s = self.advance(prev, mid);
            let val = g(&s);
            if val.abs() < REFINE_TOL {
                return s;
            }
            if val > 0.0 {
                lo = mid;
            } else {
                hi = mid;
                best = s;
            }
            if hi - lo <= f64::EPSILON * prev.t.abs().max(1.0) {
                break;
            }
        }
        best
    }

    /// Earliest descent through `z = plane_z` within `t_max`.
    pub fn find_descending_crossing(&self, initial: &BallState, plane_z: f64, t_max: f64) -> Option<BallState> {
        self.scan(initial, t_max, |prev, next, dt| {
            if prev.pos.z > plane_z && next.pos.z <= plane_z {
                let hit = self.refine(prev, dt, |s| s.pos.z - plane_z);
                if hit.vel.z < 0.0 {
                    return ControlFlow::Break(hit);
                }
            }
            ControlFlow::Continue(())
        })
    }

    /// First crossing of the net plane `y = 0` from the robot's side, unless
    /// the ball lands on the table (`z = 0`) first.
    pub fn net_plane_crossing(&self, initial: &BallState, t_max: f64) -> Option<BallState> {
        if initial.pos.y >= 0.0 {
            return None;
        }
        self.scan(initial, t_max, |prev, next, dt| {
            if prev.pos.y < 0.0 && next.pos.y >= 0.0 {
                let hit = self.refine(prev, dt, |s| -s.pos.y);
                return ControlFlow::Break(Some(hit));
            }
            if prev.pos.z > 0.0 && next.pos.z <= 0.0 {
                return ControlFlow::Break(None);
            }
            ControlFlow::Continue(())
        })
        .flatten()
    }

    /// True if the ball fails to pass over the net.
    pub fn crosses_net_too_low(&self, initial: &BallState, t_max: f64, net_height: f64) -> bool {
        match self.net_plane_crossing(initial, t_max) {
            Some(at_net) => at_net.pos.z <= net_height,
            None => true,
        }
    }

    /// Highest point reached before landing on `z = 0` or `t_max`.
    pub fn max_height(&self, initial: &BallState, t_max: f64) -> f64 {
        let mut best = initial.pos.z;
        self.scan(initial, t_max, |prev, next, dt| {
            if prev.vel.z > 0.0 && next.vel.z <= 0.0 {
                let apex = self.refine(prev, dt, |s| s.vel.z);
                best = best.max(apex.pos.z);
            }
            if prev.pos.z > 0.0 && next.pos.z <= 0.0 {
                return ControlFlow::Break(());
            }
            best = best.max(next.pos.z);
            ControlFlow::Continue(())
        });
        best
    }
}

/// `exp(M dt) s` by Taylor series; only used for `dt` below one scan step,
/// where the series converges to rounding in a handful of terms.
fn taylor_flow(generator: &Matrix7, s: &Vector7, dt: f64) -> Vector7 {
    let mut term = *s;
    let mut sum = *s;
    for k in 1..=30 {
        term = generator * term * (dt / k as f64);
        sum += term;
        if term.amax() <= 1e-18 * sum.amax() {
            break;
        }
    }
    sum
}

/// State at `initial.t + t` with the spin held constant.
pub fn propagate(initial: &BallState, t: f64, params: &PhysicsParams) -> Result<BallState, FlightError> {
    Propagator::new(initial.spin, params)?.propagate(initial, t)
}

/// Earliest time in `(0, t_max]` at which the ball descends through the
/// plane `z = plane_z`, with the state there.
pub fn find_descending_crossing(
    initial: &BallState,
    plane_z: f64,
    t_max: f64,
    params: &PhysicsParams,
) -> Option<(f64, BallState)> {
    let prop = Propagator::new(initial.spin, params).ok()?;
    prop.find_descending_crossing(initial, plane_z, t_max).map(|s| (s.t - initial.t, s))
}

/// True iff the ball reaches the net plane at or below the net height, or
/// lands on the robot's side without reaching it. Expects `initial.pos.y < 0`;
/// a ball already past the plane is reported as failing.
pub fn crosses_net_too_low(initial: &BallState, t_max: f64, params: &PhysicsParams, table: &TableGeometry) -> bool {
    match Propagator::new(initial.spin, params) {
        Ok(prop) => prop.crosses_net_too_low(initial, t_max, table.net_height),
        Err(_) => true,
    }
}

/// Maximum height over the flight up to landing or `t_max`.
pub fn max_height(initial: &BallState, t_max: f64, params: &PhysicsParams) -> f64 {
    match Propagator::new(initial.spin, params) {
        Ok(prop) => prop.max_height(initial, t_max),
        Err(_) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const G: f64 = 9.81;

    fn ballistic() -> PhysicsParams {
        PhysicsParams { drag_mode: DragMode::Quadratic, quadratic_drag: 0.0, magnus: 0.0, ..PhysicsParams::default() }
    }

    fn state(pos: [f64; 3], vel: [f64; 3], spin: [f64; 3]) -> BallState {
        BallState::new(0.0, pos.into(), vel.into(), spin.into())
    }

    #[test]
    fn zero_spin_system_is_pure_drag() {
        let sys = build_system(Vec3::ZERO, &PhysicsParams::default()).unwrap();
        let m = sys.velocity_block();
        assert_eq!(m, SMatrix::<f64, 3, 3>::from_diagonal_element(-0.7));
        assert_eq!(sys.b.as_slice(), &[0.0, 0.0, -9.81, 0.0, 0.0, 0.0]);
        assert_eq!(sys.a.fixed_view::<3, 3>(3, 0).into_owned(), SMatrix::<f64, 3, 3>::identity());
        assert!(sys.a.fixed_view::<6, 3>(0, 3).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn magnus_entries_follow_skew_pattern() {
        let sys = build_system(Vec3::new(10.0, 10.0, 10.0), &PhysicsParams::default()).unwrap();
        assert_relative_eq!(sys.a[(0, 1)], -0.1);
        assert_relative_eq!(sys.a[(1, 0)], 0.1);
        let m = sys.velocity_block();
        let sym = m + m.transpose();
        assert_relative_eq!(sym, SMatrix::<f64, 3, 3>::from_diagonal_element(-1.4));
    }

    #[test]
    fn build_rejects_non_finite_spin() {
        let err = build_system(Vec3::new(f64::NAN, 0.0, 0.0), &PhysicsParams::default());
        assert!(matches!(err, Err(FlightError::NonFiniteSpin(_))));
    }

    #[test]
    fn acceleration_cases() {
        let p = PhysicsParams::default();
        assert_eq!(acceleration(&BallState::default(), &p), Vec3::new(0.0, 0.0, -G));
        let a = acceleration(&state([0.0; 3], [1.0, 0.0, 0.0], [0.0; 3]), &p);
        assert_relative_eq!(a.x, -0.7);
        assert_eq!(a.y, 0.0);
        assert_relative_eq!(a.z, -G);

        let q = PhysicsParams { drag_mode: DragMode::Quadratic, quadratic_drag: 0.1, ..p };
        let a = acceleration(&state([0.0; 3], [3.0, 4.0, 0.0], [0.0; 3]), &q);
        assert_relative_eq!(a.x, -0.1 * 5.0 * 3.0);
        assert_relative_eq!(a.y, -0.1 * 5.0 * 4.0);
        assert_relative_eq!(a.z, -G);
    }

    #[test]
    fn linear_acceleration_matches_system_matrix() {
        let p = PhysicsParams::default();
        let s = state([0.1, -0.5, 0.3], [1.0, -4.0, 2.0], [5.0, -3.0, 8.0]);
        let sys = build_system(s.spin, &p).unwrap();
        let v = nalgebra::Vector3::new(s.vel.x, s.vel.y, s.vel.z);
        let expected = sys.velocity_block() * v;
        let a = acceleration(&s, &p);
        assert_relative_eq!(a.x, expected[0], epsilon = 1e-15);
        assert_relative_eq!(a.y, expected[1], epsilon = 1e-15);
        assert_relative_eq!(a.z, expected[2] - G, epsilon = 1e-15);
    }

    #[test]
    fn zero_time_is_identity() {
        let s = state([0.1, -0.4, 0.2], [0.5, -5.0, 4.0], [10.0, 10.0, 10.0]);
        assert_eq!(propagate(&s, 0.0, &PhysicsParams::default()).unwrap(), s);
    }

    #[test]
    fn negative_time_rejected() {
        let s = BallState::default();
        assert_eq!(propagate(&s, -0.1, &PhysicsParams::default()), Err(FlightError::NegativeTime(-0.1)));
    }

    #[test]
    fn divergence_is_reported() {
        let p = PhysicsParams { drag_mode: DragMode::Quadratic, quadratic_drag: 1e3, ..Default::default() };
        let s = state([0.0; 3], [-1e200, 0.0, 0.0], [0.0; 3]);
        assert!(matches!(propagate(&s, 0.01, &p), Err(FlightError::Diverged(_))));
    }

    #[test]
    fn velocity_halves_per_second_without_gravity() {
        let p = PhysicsParams { gravity: 0.0, ..Default::default() };
        let s = state([0.0; 3], [3.0, -4.0, 1.0], [0.0; 3]);
        let out = propagate(&s, 1.0, &p).unwrap();
        let ratio = out.vel.norm() / s.vel.norm();
        assert!((ratio - 0.5).abs() < 0.005, "ratio {ratio}");
    }

    #[test]
    fn ballistic_landing_and_apex() {
        let p = ballistic();
        let s = state([0.0; 3], [0.0, 0.0, 5.0], [0.0; 3]);
        let (t, hit) = find_descending_crossing(&s, 0.0, DEFAULT_T_MAX, &p).unwrap();
        assert_relative_eq!(t, 2.0 * 5.0 / G, epsilon = 1e-6);
        assert!(hit.pos.z.abs() < 1e-6 && hit.vel.z < 0.0);
        assert!(hit.pos.x.abs() < 1e-12 && hit.pos.y.abs() < 1e-12);
        assert_relative_eq!(max_height(&s, DEFAULT_T_MAX, &p), 25.0 / (2.0 * G), epsilon = 1e-7);
    }

    #[test]
    fn no_crossing_when_starting_below_plane() {
        let s = state([0.0, 0.0, 0.1], [0.0, 0.0, -1.0], [0.0; 3]);
        assert!(find_descending_crossing(&s, 0.2, DEFAULT_T_MAX, &PhysicsParams::default()).is_none());
    }

    #[test]
    fn descending_start_has_initial_height_as_max() {
        let s = state([0.0, -1.0, 0.4], [0.0, 2.0, -0.5], [0.0; 3]);
        assert_eq!(max_height(&s, DEFAULT_T_MAX, &PhysicsParams::default()), 0.4);
    }

    // Drag-free, Magnus-free ballistic flight from z0 with horizontal speed vy:
    // the height at y = 0 is z0 + vz t - g t^2 / 2 with t = -y0 / vy.
    fn net_height_at_plane(y0: f64, z0: f64, vy: f64, vz: f64) -> f64 {
        let t = -y0 / vy;
        z0 + vz * t - 0.5 * G * t * t
    }

    #[test]
    fn net_clearance() {
        let p = ballistic();
        let table = TableGeometry::default();
        // clears at about 0.30 m
        let vz = (0.30 - 0.3 + 0.5 * G * 0.25 * 0.25) / 0.25;
        let high = state([0.0, -1.0, 0.3], [0.0, 4.0, vz], [0.0; 3]);
        assert_relative_eq!(net_height_at_plane(-1.0, 0.3, 4.0, vz), 0.30, epsilon = 1e-12);
        assert!(!crosses_net_too_low(&high, DEFAULT_T_MAX, &p, &table));
        // reaches the net at about 0.10 m
        let vz = (0.10 - 0.3 + 0.5 * G * 0.25 * 0.25) / 0.25;
        let low = state([0.0, -1.0, 0.3], [0.0, 4.0, vz], [0.0; 3]);
        assert!(crosses_net_too_low(&low, DEFAULT_T_MAX, &p, &table));
    }

    #[test]
    fn short_lob_lands_before_net() {
        let p = ballistic();
        // flight time 2 vz / g = 0.4077 s, vy = 0.5 -> lands at y = -0.6 + 0.204
        let s = state([0.0, -0.6, 0.0], [0.0, 0.5, 2.0], [0.0; 3]);
        let (_, land) = find_descending_crossing(&s, 0.0, DEFAULT_T_MAX, &p).unwrap();
        assert_relative_eq!(land.pos.y, -0.6 + 0.5 * 2.0 * 2.0 / G, epsilon = 1e-6);
        assert!(land.pos.y < 0.0);
        assert!(crosses_net_too_low(&s, DEFAULT_T_MAX, &p, &TableGeometry::default()));
    }

    #[test]
    fn already_past_net_is_rejected() {
        let s = state([0.0, 0.2, 0.3], [0.0, 3.0, 1.0], [0.0; 3]);
        assert!(crosses_net_too_low(&s, DEFAULT_T_MAX, &PhysicsParams::default(), &TableGeometry::default()));
    }

    #[test]
    fn semigroup_property() {
        let p = PhysicsParams::default();
        let s = state([-0.2, -0.4, 0.0], [0.5, -5.0, 4.0], [10.0, 10.0, 10.0]);
        let a = propagate(&propagate(&s, 0.31, &p).unwrap(), 0.47, &p).unwrap();
        let b = propagate(&s, 0.78, &p).unwrap();
        assert_relative_eq!(a.pos.x, b.pos.x, epsilon = 1e-12);
        assert_relative_eq!(a.pos.z, b.pos.z, epsilon = 1e-12);
        assert_relative_eq!(a.vel.y, b.vel.y, epsilon = 1e-12);
    }

    #[test]
    fn scan_steps_agree_with_direct_propagation() {
        let p = PhysicsParams::default();
        let s = state([0.3, -1.2, 0.5], [-1.0, 6.0, 1.5], [-20.0, 5.0, 12.0]);
        let prop = Propagator::new(s.spin, &p).unwrap();
        let mut last = s;
        prop.scan(&s, 0.5, |_, next, _| {
            last = *next;
            ControlFlow::<()>::Continue(())
        });
        let direct = prop.propagate(&s, 0.5).unwrap();
        assert_relative_eq!(last.pos.y, direct.pos.y, epsilon = 1e-12);
        assert_relative_eq!(last.vel.z, direct.vel.z, epsilon = 1e-12);
        assert_relative_eq!(last.t, 0.5);
    }

    #[test]
    fn validation_names_field() {
        let p = PhysicsParams { restitution: 1.3, ..Default::default() };
        assert_eq!(p.validate().unwrap_err().to_string(), "e must be in (0,1]");
        assert!(PhysicsParams::default().validate().is_ok());
    }
}
