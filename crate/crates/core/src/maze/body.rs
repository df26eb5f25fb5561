use serde::{Deserialize, Serialize};

use crate::geometry::{normalize_angle, Vec2};

/// Planar robot pose. Heading is kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn with_position(&self, p: Vec2) -> Pose {
        Pose {
            x: p.x,
            y: p.y,
            heading: self.heading,
        }
    }
}

/// Physical constants of the differential-drive body (e-puck dimensions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobotBody {
    pub body_radius: f64,
    pub wheel_radius: f64,
    pub axle_length: f64,
    pub min_wheel_speed: f64,
    pub max_wheel_speed: f64,
    pub control_dt: f64,
}

impl Default for RobotBody {
    fn default() -> Self {
        Self {
            body_radius: 0.037,
            wheel_radius: 0.0205,
            axle_length: 0.052,
            min_wheel_speed: -3.14,
            max_wheel_speed: 6.28,
            control_dt: 0.064,
        }
    }
}

impl RobotBody {
    pub fn clamp_speed(&self, w: f64) -> f64 {
        w.clamp(self.min_wheel_speed, self.max_wheel_speed)
    }

    pub fn clamp_speeds(&self, w: [f64; 2]) -> [f64; 2] {
        [self.clamp_speed(w[0]), self.clamp_speed(w[1])]
    }

    /// Forward speed (m/s) and yaw rate (rad/s) for wheel speeds `(left, right)` in rad/s.
    pub fn twist(&self, wheels: [f64; 2]) -> (f64, f64) {
        let vl = wheels[0] * self.wheel_radius;
        let vr = wheels[1] * self.wheel_radius;
        (0.5 * (vl + vr), (vr - vl) / self.axle_length)
    }
}

/// Advance `pose` along the exact differential-drive arc for `dt` seconds.
///
/// Wheel speeds are `(left, right)` in rad/s and must already be clamped.
pub fn step_kinematics(pose: Pose, wheels: [f64; 2], body: &RobotBody, dt: f64) -> Pose {
    let (v, omega) = body.twist(wheels);
    let th = pose.heading;
    let dth = omega * dt;
    let (dx, dy) = if dth.abs() < 1e-12 {
        (v * dt * th.cos(), v * dt * th.sin())
    } else {
        let radius = v / omega;
        (
            radius * ((th + dth).sin() - th.sin()),
            -radius * ((th + dth).cos() - th.cos()),
        )
    };
    Pose::new(pose.x + dx, pose.y + dy, th + dth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn euler(pose: Pose, wheels: [f64; 2], body: &RobotBody, dt: f64, n: usize) -> Pose {
        let (v, omega) = body.twist(wheels);
        let h = dt / n as f64;
        let (mut x, mut y, mut th) = (pose.x, pose.y, pose.heading);
        for _ in 0..n {
            x += v * h * th.cos();
            y += v * h * th.sin();
            th += omega * h;
        }
        Pose::new(x, y, th)
    }

    #[test]
    fn straight_line() {
        let b = RobotBody::default();
        let p = step_kinematics(Pose::new(0.5, 0.5, FRAC_PI_2), [3.0, 3.0], &b, 0.064);
        assert!((p.x - 0.5).abs() < 1e-12);
        assert!((p.y - (0.5 + 3.0 * b.wheel_radius * 0.064)).abs() < 1e-12);
        assert!((p.heading - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn pure_rotation() {
        let b = RobotBody::default();
        let w = 2.5;
        let p = step_kinematics(Pose::new(0.5, 0.5, 0.3), [-w, w], &b, 0.064);
        assert!((p.x - 0.5).abs() < 1e-12 && (p.y - 0.5).abs() < 1e-12);
        let expect = 0.3 + 2.0 * w * b.wheel_radius * 0.064 / b.axle_length;
        assert!((p.heading - expect).abs() < 1e-12);
    }

    #[test]
    fn arc_matches_fine_euler() {
        let b = RobotBody::default();
        let start = Pose::new(0.4, 0.6, 1.1);
        for wheels in [[2.0, 4.0], [6.28, -3.14], [-1.0, 5.5]] {
            let exact = step_kinematics(start, wheels, &b, 0.064);
            let approx = euler(start, wheels, &b, 0.064, 1000);
            assert!(exact.position().dist(approx.position()) < 1e-6, "{wheels:?}");
        }
    }

    #[test]
    fn heading_stays_normalized() {
        let b = RobotBody::default();
        let mut p = Pose::new(0.5, 0.5, 0.0);
        for _ in 0..500 {
            p = step_kinematics(p, [-3.14, 6.28], &b, 0.064);
            assert!((0.0..std::f64::consts::TAU).contains(&p.heading));
        }
    }
}
