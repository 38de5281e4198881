//! Ball/racket rebound.
//!
//! The racket face is always normal to the y axis and the racket is treated
//! as infinitely massive, moving at a constant velocity during the contact.
//! The normal (y) relative velocity is reversed and scaled by the restitution
//! coefficient; the tangential (x, z) impulse is kinetic friction opposing the
//! contact-point slip, with magnitude `mu_k` times the normal velocity change.
//! Ball mass and contact duration cancel out of both and are not parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flight::{BallState, PhysicsParams};
use crate::vec3::Vec3;

/// Spin change per unit tangential velocity change is `SPIN_IMPULSE_FACTOR / r`.
pub const SPIN_IMPULSE_FACTOR: f64 = 2.0 / 3.0;

/// Slip speeds at or below this are treated as rolling contact (no friction).
pub const SLIP_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImpactError {
    #[error("ball is not approaching the racket (relative normal velocity {0} >= 0)")]
    NoContact(f64),
}

/// Racket velocity components during the strike (m/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RacketVelocity {
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

impl RacketVelocity {
    pub fn new(vx: f64, vy: f64, vz: f64) -> Self {
        Self { vx, vy, vz }
    }

    pub fn as_vec3(&self) -> Vec3 {
        Vec3::new(self.vx, self.vy, self.vz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactOutcome {
    /// Ball state right after contact; same `t` and `pos` as before.
    pub post: BallState,
    pub delta_v: Vec3,
    pub delta_w: Vec3,
    pub slipped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentialExchange {
    pub delta_vx: f64,
    pub delta_vz: f64,
    pub slipped: bool,
}

/// Normal-direction exchange. Returns `(v_fyb, delta_v_yb)`.
pub fn normal_exchange(ball_vy: f64, racket_vy: f64, restitution: f64) -> Result<(f64, f64), ImpactError> {
    let rel_in = ball_vy - racket_vy;
    if !(rel_in < 0.0) {
        return Err(ImpactError::NoContact(rel_in));
    }
    let rel_out = -restitution * rel_in;
    Ok((rel_out + racket_vy, rel_out - rel_in))
}

/// Contact-point slip of the ball relative to the racket, `(s_x, s_z)`.
pub fn contact_slip(ball: &BallState, racket: &RacketVelocity, radius: f64) -> (f64, f64) {
    ((ball.vel.x - racket.vx) + radius * ball.spin.z, (ball.vel.z - racket.vz) - radius * ball.spin.x)
}

/// Friction-driven tangential velocity change.
pub fn tangential_exchange(
    ball: &BallState,
    racket: &RacketVelocity,
    delta_vy: f64,
    params: &PhysicsParams,
) -> TangentialExchange {
    let (sx, sz) = contact_slip(ball, racket, params.ball_radius);
    let slip = sx.hypot(sz);
    if !(slip > SLIP_EPSILON) {
        return TangentialExchange { delta_vx: 0.0, delta_vz: 0.0, slipped: false };
    }
    let mut impulse = delta_vy * params.friction;
    if params.cap_slip_reversal {
        // each unit of tangential dv also changes the rim speed by
        // r * (SPIN_IMPULSE_FACTOR / r), so slip shrinks (1 + factor) times faster
        impulse = impulse.min(slip / (1.0 + SPIN_IMPULSE_FACTOR));
    }
    TangentialExchange { delta_vx: -impulse * sx / slip, delta_vz: -impulse * sz / slip, slipped: true }
}

/// Spin change `(dw_x, dw_y, dw_z)` from the tangential velocity change.
pub fn spin_update(delta_vx: f64, delta_vz: f64, radius: f64) -> Vec3 {
    let k = SPIN_IMPULSE_FACTOR / radius;
    Vec3::new(-k * delta_vz, 0.0, k * delta_vx)
}

/// Full rebound off the racket.
pub fn racket_rebound(
    ball: &BallState,
    racket: &RacketVelocity,
    params: &PhysicsParams,
) -> Result<ImpactOutcome, ImpactError> {
    let (_, delta_vy) = normal_exchange(ball.vel.y, racket.vy, params.restitution)?;
    let tang = tangential_exchange(ball, racket, delta_vy, params);
    let delta_v = Vec3::new(tang.delta_vx, delta_vy, tang.delta_vz);
    let delta_w = spin_update(tang.delta_vx, tang.delta_vz, params.ball_radius);
    Ok(ImpactOutcome {
        post: BallState { vel: ball.vel + delta_v, spin: ball.spin + delta_w, ..*ball },
        delta_v,
        delta_w,
        slipped: tang.slipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ball(vel: [f64; 3], spin: [f64; 3]) -> BallState {
        BallState::new(0.3, Vec3::new(0.1, -1.0, 0.4), vel.into(), spin.into())
    }

    #[test]
    fn normal_exchange_examples() {
        assert_eq!(normal_exchange(-5.0, 0.0, 0.8).unwrap(), (4.0, 9.0));
        let (vf, dv) = normal_exchange(-5.0, 1.0, 0.8).unwrap();
        assert_relative_eq!(vf, 5.8, epsilon = 1e-12);
        assert_relative_eq!(dv, 10.8, epsilon = 1e-12);
        let (vf, _) = normal_exchange(-3.5, 0.0, 1.0).unwrap();
        assert_eq!(vf, 3.5);
    }

    #[test]
    fn receding_ball_has_no_contact() {
        assert_eq!(normal_exchange(1.0, 1.0, 0.8), Err(ImpactError::NoContact(0.0)));
        assert!(normal_exchange(2.0, 1.0, 0.8).is_err());
        let b = ball([0.0, 1.0, 0.0], [0.0; 3]);
        assert!(racket_rebound(&b, &RacketVelocity::new(0.0, 1.0, 0.0), &PhysicsParams::default()).is_err());
    }

    #[test]
    fn zero_slip_gives_no_friction() {
        let b = ball([0.0, -5.0, 0.0], [0.0; 3]);
        let t = tangential_exchange(&b, &RacketVelocity::default(), 9.0, &PhysicsParams::default());
        assert_eq!(t, TangentialExchange { delta_vx: 0.0, delta_vz: 0.0, slipped: false });
    }

    #[test]
    fn pure_x_slip() {
        let b = ball([1.0, -5.0, 0.0], [0.0; 3]);
        let t = tangential_exchange(&b, &RacketVelocity::default(), 9.0, &PhysicsParams::default());
        assert_relative_eq!(t.delta_vx, -1.8, epsilon = 1e-12);
        assert_eq!(t.delta_vz, 0.0);
        assert!(t.slipped);
    }

    #[test]
    fn spin_induced_slip() {
        let b = ball([0.0, -5.0, 0.0], [0.0, 0.0, 10.0]);
        let (sx, sz) = contact_slip(&b, &RacketVelocity::default(), 0.02);
        assert_relative_eq!(sx, 0.2, epsilon = 1e-15);
        assert_eq!(sz, 0.0);
        let t = tangential_exchange(&b, &RacketVelocity::default(), 9.0, &PhysicsParams::default());
        assert!(t.delta_vx < 0.0);
    }

    #[test]
    fn spin_update_examples() {
        assert_eq!(spin_update(0.0, 0.0, 0.02), Vec3::ZERO);
        let w = spin_update(-1.8, 0.0, 0.02);
        assert_relative_eq!(w.z, -60.0, epsilon = 1e-12);
        assert_eq!((w.x, w.y), (0.0, 0.0));
        let w = spin_update(0.0, 0.3, 0.02);
        assert_relative_eq!(w.x, -10.0, epsilon = 1e-12);
    }

    #[test]
    fn rebound_compositions() {
        let p = PhysicsParams::default();
        let out = racket_rebound(&ball([0.0, -5.0, 0.0], [0.0; 3]), &RacketVelocity::default(), &p).unwrap();
        assert_eq!(out.post.vel, Vec3::new(0.0, 4.0, 0.0));
        assert_eq!(out.post.spin, Vec3::ZERO);
        assert!(!out.slipped);

        let before = ball([1.0, -5.0, 0.0], [0.0; 3]);
        let out = racket_rebound(&before, &RacketVelocity::default(), &p).unwrap();
        assert_relative_eq!(out.post.vel.x, -0.8, epsilon = 1e-12);
        assert_relative_eq!(out.post.vel.y, 4.0, epsilon = 1e-12);
        assert_relative_eq!(out.post.spin.z, -60.0, epsilon = 1e-12);
        assert_eq!(out.post.pos, before.pos);
        assert_eq!(out.post.t, before.t);
    }

    #[test]
    fn slip_cap_stops_reversal() {
        let p = PhysicsParams { cap_slip_reversal: true, ..Default::default() };
        let before = ball([1.0, -5.0, 0.0], [0.0; 3]);
        let out = racket_rebound(&before, &RacketVelocity::default(), &p).unwrap();
        let (sx, _) = contact_slip(&out.post, &RacketVelocity::default(), p.ball_radius);
        assert!(sx.abs() < 1e-12, "slip after capped impact {sx}");
        // small enough impulses are unaffected
        let tiny = ball([10.0, -0.1, 0.0], [0.0; 3]);
        let capped = racket_rebound(&tiny, &RacketVelocity::default(), &p).unwrap();
        let free = racket_rebound(&tiny, &RacketVelocity::default(), &PhysicsParams::default()).unwrap();
        assert_eq!(capped, free);
    }
}
