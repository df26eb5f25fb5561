//! The 91-value input vector: proximity, accelerometer and a coarse camera.

use serde::{Deserialize, Serialize};

use crate::geometry::{Segment, Vec2};
use crate::maze::{Pose, Texture};

pub const N_PROXIMITY: usize = 8;
pub const N_ACCEL: usize = 3;
pub const CAMERA_COLS: usize = 10;
pub const CAMERA_ROWS: usize = 8;
pub const N_PIXELS: usize = CAMERA_COLS * CAMERA_ROWS;
pub const N_INPUTS: usize = N_PROXIMITY + N_ACCEL + N_PIXELS;

/// Offsets of each sensor group inside the flattened input vector.
pub const PROXIMITY_RANGE: std::ops::Range<usize> = 0..N_PROXIMITY;
pub const ACCEL_RANGE: std::ops::Range<usize> = N_PROXIMITY..N_PROXIMITY + N_ACCEL;
pub const PIXEL_RANGE: std::ops::Range<usize> = N_PROXIMITY + N_ACCEL..N_INPUTS;

/// Sensor indices 0..4 face right, 4..8 face left; 0 and 7 are the front pair.
pub const RIGHT_SENSORS: [usize; 4] = [0, 1, 2, 3];
pub const LEFT_SENSORS: [usize; 4] = [4, 5, 6, 7];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorConfig {
    /// Proximity rays report 0 beyond this distance from the rim (m).
    pub proximity_range: f64,
    /// Body-relative ray angles in degrees, counter-clockwise positive.
    pub proximity_angles_deg: [f64; N_PROXIMITY],
    pub accel_norm: f64,
    pub gravity: f64,
    pub camera_fov_deg: f64,
    /// Camera shade falls to zero at this distance from the rim (m).
    pub camera_range: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            proximity_range: 0.06,
            proximity_angles_deg: [-17.0, -47.0, -90.0, -151.0, 151.0, 90.0, 47.0, 17.0],
            accel_norm: 10.0,
            gravity: 9.81,
            camera_fov_deg: 60.0,
            camera_range: 0.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorFrame {
    pub proximity: [f64; N_PROXIMITY],
    pub accel: [f64; N_ACCEL],
    /// Row-major, `pixels[row * CAMERA_COLS + col]`.
    pub pixels: [f64; N_PIXELS],
}

impl Default for SensorFrame {
    fn default() -> Self {
        Self {
            proximity: [0.0; N_PROXIMITY],
            accel: [0.0; N_ACCEL],
            pixels: [0.0; N_PIXELS],
        }
    }
}

impl SensorFrame {
    pub fn flatten(&self) -> [f64; N_INPUTS] {
        let mut out = [0.0; N_INPUTS];
        out[PROXIMITY_RANGE].copy_from_slice(&self.proximity);
        out[ACCEL_RANGE].copy_from_slice(&self.accel);
        out[PIXEL_RANGE].copy_from_slice(&self.pixels);
        out
    }

    pub fn from_flat(v: &[f64; N_INPUTS]) -> Self {
        let mut f = SensorFrame::default();
        f.proximity.copy_from_slice(&v[PROXIMITY_RANGE]);
        f.accel.copy_from_slice(&v[ACCEL_RANGE]);
        f.pixels.copy_from_slice(&v[PIXEL_RANGE]);
        f
    }
}

/// Nearest obstacle along a ray: `(t, obstacle index, arc position on the hit segment)`.
pub fn cast_ray(origin: Vec2, dir: Vec2, obstacles: &[(Segment, Texture)]) -> Option<(f64, usize, f64)> {
    let mut best: Option<(f64, usize, f64)> = None;
    for (i, (seg, _)) in obstacles.iter().enumerate() {
        if let Some((t, s)) = seg.ray_hit(origin, dir) {
            if best.is_none_or(|(bt, _, _)| t < bt) {
                best = Some((t, i, s));
            }
        }
    }
    best
}

pub fn proximity_response(d: f64, range: f64) -> f64 {
    (1.0 - d / range).clamp(0.0, 1.0)
}

pub fn read_proximity(pose: &Pose, radius: f64, obstacles: &[(Segment, Texture)], cfg: &SensorConfig) -> [f64; N_PROXIMITY] {
    let c = pose.position();
    let mut out = [0.0; N_PROXIMITY];
    for (o, a) in out.iter_mut().zip(cfg.proximity_angles_deg) {
        let dir = Vec2::from_angle(pose.heading + a.to_radians());
        if let Some((t, _, _)) = cast_ray(c, dir, obstacles) {
            *o = proximity_response((t - radius).max(0.0), cfg.proximity_range);
        }
    }
    out
}

/// Body-frame acceleration `(forward, left, gravity)` divided by `accel_norm`.
pub fn read_accelerometer(prev_velocity: Vec2, velocity: Vec2, heading: f64, dt: f64, cfg: &SensorConfig) -> [f64; N_ACCEL] {
    let a = (velocity - prev_velocity).scale(1.0 / dt);
    let fwd = Vec2::from_angle(heading);
    let left = Vec2::new(-fwd.y, fwd.x);
    [
        a.dot(fwd) / cfg.accel_norm,
        a.dot(left) / cfg.accel_norm,
        cfg.gravity / cfg.accel_norm,
    ]
}

/// Direction of camera column `col`, leftmost column first.
pub fn camera_ray_angle(heading: f64, col: usize, cfg: &SensorConfig) -> f64 {
    let fov = cfg.camera_fov_deg.to_radians();
    heading + 0.5 * fov - (col as f64 + 0.5) * fov / CAMERA_COLS as f64
}

pub fn render_camera(pose: &Pose, radius: f64, obstacles: &[(Segment, Texture)], cfg: &SensorConfig) -> [f64; N_PIXELS] {
    let c = pose.position();
    let mut out = [0.0; N_PIXELS];
    for col in 0..CAMERA_COLS {
        let dir = Vec2::from_angle(camera_ray_angle(pose.heading, col, cfg));
        let shade = match cast_ray(c, dir, obstacles) {
            Some((t, i, s)) => {
                let (seg, tex) = &obstacles[i];
                let d = (t - radius).max(0.0);
                tex.shade(s, seg.length()) * (1.0 - d / cfg.camera_range).max(0.0)
            }
            None => 0.0,
        };
        for row in 0..CAMERA_ROWS {
            out[row * CAMERA_COLS + col] = shade.clamp(0.0, 1.0);
        }
    }
    out
}

pub fn sense(
    pose: &Pose,
    radius: f64,
    prev_velocity: Vec2,
    velocity: Vec2,
    dt: f64,
    obstacles: &[(Segment, Texture)],
    cfg: &SensorConfig,
) -> SensorFrame {
    SensorFrame {
        proximity: read_proximity(pose, radius, obstacles, cfg),
        accel: read_accelerometer(prev_velocity, velocity, pose.heading, dt, cfg),
        pixels: render_camera(pose, radius, obstacles, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_walls(tex: Texture) -> Vec<(Segment, Texture)> {
        [
            Segment::new(0.0, 0.0, 2.0, 0.0),
            Segment::new(2.0, 0.0, 2.0, 2.0),
            Segment::new(2.0, 2.0, 0.0, 2.0),
            Segment::new(0.0, 2.0, 0.0, 0.0),
        ]
        .iter()
        .map(|s| (*s, tex))
        .collect()
    }

    #[test]
    fn open_space_reads_zero() {
        let w = box_walls(Texture::UniformLight);
        let p = read_proximity(&Pose::new(1.0, 1.0, 0.3), 0.037, &w, &SensorConfig::default());
        assert_eq!(p, [0.0; 8]);
    }

    #[test]
    fn contact_saturates_front_pair() {
        let w = vec![(Segment::new(1.0, -1.0, 1.0, 1.0), Texture::UniformDark)];
        // sensor 0 sits at -17 degrees; turn the body so it faces the wall
        let p = read_proximity(&Pose::new(1.0 - 0.037, 0.0, 17f64.to_radians()), 0.037, &w, &SensorConfig::default());
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(p[7] < 1.0);
    }

    #[test]
    fn frame_flatten_round_trips() {
        let mut f = SensorFrame::default();
        f.proximity[3] = 0.5;
        f.accel[2] = 0.981;
        f.pixels[79] = 0.25;
        let v = f.flatten();
        assert_eq!(v.len(), 91);
        assert_eq!(v[3], 0.5);
        assert_eq!(v[10], 0.981);
        assert_eq!(v[90], 0.25);
        assert_eq!(SensorFrame::from_flat(&v), f);
    }

    #[test]
    fn uniform_light_wall_close_up() {
        let w = box_walls(Texture::UniformLight);
        let px = render_camera(&Pose::new(2.0 - 0.038, 1.0, 0.0), 0.037, &w, &SensorConfig::default());
        assert!(px.iter().all(|&v| v > 0.99));
    }

    #[test]
    fn long_corridor_centre_is_dark() {
        let w = vec![(Segment::new(5.0, -1.0, 5.0, 1.0), Texture::UniformLight)];
        let px = render_camera(&Pose::new(0.0, 0.0, 0.0), 0.037, &w, &SensorConfig::default());
        assert!(px[4] < 1e-12 && px[5] < 1e-12);
    }
}
