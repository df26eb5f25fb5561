//! Hand-written controllers used as oracles and baselines.

use crate::geometry::{angle_diff, Vec2};
use crate::maze::{Controller, Pose};
use crate::sensors::N_INPUTS;

/// Always outputs the same raw wheel command.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantController(pub [f64; 2]);

impl Controller for ConstantController {
    fn reset(&mut self) {}

    fn act(&mut self, _inputs: &[f64; N_INPUTS], _pose: &Pose) -> [f64; 2] {
        self.0
    }
}

/// Drives through a list of waypoints using the true pose: turn in place
/// when badly misaligned, otherwise steer proportionally. Stops after the
/// last waypoint.
#[derive(Debug, Clone)]
pub struct WaypointController {
    pub waypoints: Vec<Vec2>,
    pub tolerance: f64,
    pub cruise: f64,
    next: usize,
}

impl WaypointController {
    pub fn new(waypoints: Vec<Vec2>) -> Self {
        WaypointController {
            waypoints,
            tolerance: 0.015,
            cruise: 4.0,
            next: 0,
        }
    }

    pub fn finished(&self) -> bool {
        self.next >= self.waypoints.len()
    }
}

impl Controller for WaypointController {
    fn reset(&mut self) {
        self.next = 0;
    }

    fn act(&mut self, _inputs: &[f64; N_INPUTS], pose: &Pose) -> [f64; 2] {
        let p = pose.position();
        while self.next < self.waypoints.len() && p.dist(self.waypoints[self.next]) < self.tolerance {
            self.next += 1;
        }
        let Some(&target) = self.waypoints.get(self.next) else {
            return [0.0, 0.0];
        };
        let d = target - p;
        let err = angle_diff(d.y.atan2(d.x), pose.heading);
        if err.abs() > 0.3 {
            let s = 2.0 * err.signum();
            return [-s, s];
        }
        [self.cruise - 4.0 * err, self.cruise + 4.0 * err]
    }
}
