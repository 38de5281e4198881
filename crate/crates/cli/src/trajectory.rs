//! Trajectory CSV export and the independent landing replay.
//!
//! Files hold one flight segment sampled every millisecond, columns
//! `t,x,y,z,vx,vy,vz,wx,wy,wz`, numbers at 9 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use strike_core::{BallState, Vec3};

use crate::CliError;

pub const HEADER: &str = "t,x,y,z,vx,vy,vz,wx,wy,wz";

/// Allowed deviation of a sample interval from 1 ms, absorbing the rounding
/// of `t` to 9 significant digits.
const CADENCE_SLACK: f64 = 2e-8;

/// `printf("%.9g")`.
pub fn format_g9(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn to_csv(samples: &[BallState]) -> String {
    let mut out = String::with_capacity(128 * (samples.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for s in samples {
        let cols = [s.t, s.pos.x, s.pos.y, s.pos.z, s.vel.x, s.vel.y, s.vel.z, s.spin.x, s.spin.y, s.spin.z];
        for (i, v) in cols.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_g9(*v));
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, samples: &[BallState]) -> Result<(), CliError> {
    std::fs::write(path, to_csv(samples)).map_err(|e| CliError::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<BallState>, CliError> {
    let bad = |msg: String| CliError::Trajectory(msg);
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => return Err(bad(format!("expected header '{HEADER}', found {other:?}"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = i + 2;
        let v: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("line {row}: {e}")))?;
        if v.len() != 10 {
            return Err(bad(format!("line {row}: expected 10 columns, found {}", v.len())));
        }
        out.push(BallState::new(
            v[0],
            Vec3::new(v[1], v[2], v[3]),
            Vec3::new(v[4], v[5], v[6]),
            Vec3::new(v[7], v[8], v[9]),
        ));
    }
    Ok(out)
}

pub fn read_csv(path: &Path) -> Result<Vec<BallState>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(&text).map_err(|e| CliError::Trajectory(format!("{}: {e}", path.display())))
}

/// Checks strict ordering and a constant 1 ms step.
pub fn check_cadence(samples: &[BallState]) -> Result<(), String> {
    for (k, w) in samples.windows(2).enumerate() {
        let dt = w[1].t - w[0].t;
        if !(dt > 0.0) || (dt - 1e-3).abs() > CADENCE_SLACK {
            return Err(format!("samples {k} and {} are {dt} s apart", k + 1));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Landing {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// First descending crossing of `z = 0`, located on the cubic Hermite
/// interpolant of positions and velocities between the bracketing samples.
/// Uses no flight model, so it cross-checks the planner's landing.
pub fn replay_landing(samples: &[BallState]) -> Option<Landing> {
    let w = samples.windows(2).find(|w| w[0].pos.z > 0.0 && w[1].pos.z <= 0.0)?;
    let (a, b) = (&w[0], &w[1]);
    let h = b.t - a.t;
    let hermite = |p0: f64, v0: f64, p1: f64, v1: f64, s: f64| {
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * h * v0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * h * v1
    };
    let z = |s| hermite(a.pos.z, a.vel.z, b.pos.z, b.vel.z, s);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if z(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    Some(Landing {
        t: a.t + s * h,
        x: hermite(a.pos.x, a.vel.x, b.pos.x, b.vel.x, s),
        y: hermite(a.pos.y, a.vel.y, b.pos.y, b.vel.y, s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_matches_printf() {
        assert_eq!(format_g9(0.0), "0");
        assert_eq!(format_g9(1.0), "1");
        assert_eq!(format_g9(0.001), "0.001");
        assert_eq!(format_g9(-0.25), "-0.25");
        assert_eq!(format_g9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_g9(123456789.0), "123456789");
        assert_eq!(format_g9(1234567890.0), "1.23456789e+09");
        assert_eq!(format_g9(0.0001), "0.0001");
        assert_eq!(format_g9(0.00001234), "1.234e-05");
        assert_eq!(format_g9(9.9999999999), "10");
        assert_eq!(format_g9(-6.6e-12), "-6.6e-12");
    }

    #[test]
    fn csv_round_trip_keeps_nine_digits() {
        let s = BallState::new(
            0.003,
            Vec3::new(-0.2, 1.0 / 3.0, 0.0),
            Vec3::new(1e-7, -5.0, 4.0),
            Vec3::new(10.0, 0.0, -60.123456789),
        );
        let back = parse_csv(&to_csv(&[s])).unwrap();
        assert_eq!(back.len(), 1);
        assert!((back[0].pos.y - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(back[0].spin.z, -60.1234568);
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(parse_csv("t,x,y\n0,0,0\n").is_err());
    }

    #[test]
    fn replay_on_a_parabola() {
        // z = 1 - t^2 / 2 lands at t = sqrt(2); cubic Hermite is exact here
        let samples: Vec<BallState> = (0..2000)
            .map(|k| {
                let t = k as f64 * 1e-3;
                BallState::new(t, Vec3::new(t, 2.0 * t, 1.0 - 0.5 * t * t), Vec3::new(1.0, 2.0, -t), Vec3::ZERO)
            })
            .collect();
        let l = replay_landing(&samples).unwrap();
        assert!((l.t - 2f64.sqrt()).abs() < 1e-12);
        assert!((l.y - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(check_cadence(&samples).is_ok());
    }
}
