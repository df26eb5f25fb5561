//! Planar primitives shared by the simulator and the sensors.

use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

/// Line segment from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub const fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self {
            a: Vec2::new(x1, y1),
            b: Vec2::new(x2, y2),
        }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Closest point on the segment to `p`.
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        self.a + d.scale(t)
    }

    pub fn distance_to(&self, p: Vec2) -> f64 {
        self.closest_point(p).dist(p)
    }

    /// Ray parameter `t >= 0` at which `origin + t * dir` hits the segment,
    /// together with the arc-length position of the hit along the segment.
    pub fn ray_hit(&self, origin: Vec2, dir: Vec2) -> Option<(f64, f64)> {
        let e = self.b - self.a;
        let denom = dir.cross(e);
        if denom.abs() < 1e-15 {
            return None;
        }
        let w = self.a - origin;
        let t = w.cross(e) / denom;
        let u = w.cross(dir) / denom;
        if t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
            Some((t, u.clamp(0.0, 1.0) * e.norm()))
        } else {
            None
        }
    }

    pub fn mirrored_x(&self, axis: f64) -> Segment {
        Segment::new(2.0 * axis - self.a.x, self.a.y, 2.0 * axis - self.b.x, self.b.y)
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            x0: x0.min(x1),
            y0: y0.min(y1),
            x1: x0.max(x1),
            y1: y0.max(y1),
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    /// Shrink every side by `m`; `None` when nothing is left.
    pub fn eroded(&self, m: f64) -> Option<Rect> {
        let r = Rect {
            x0: self.x0 + m,
            y0: self.y0 + m,
            x1: self.x1 - m,
            y1: self.y1 - m,
        };
        (r.x0 <= r.x1 && r.y0 <= r.y1).then_some(r)
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn mirrored_x(&self, axis: f64) -> Rect {
        Rect::new(2.0 * axis - self.x1, self.y0, 2.0 * axis - self.x0, self.y1)
    }
}

/// Wrap an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed smallest difference `a - b` wrapped into `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_hits_perpendicular_wall() {
        let wall = Segment::new(1.0, -1.0, 1.0, 1.0);
        let (t, s) = wall.ray_hit(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert!((s - 1.0).abs() < 1e-12);
        assert!(wall.ray_hit(Vec2::new(0.0, 0.0), Vec2::new(-1.0, 0.0)).is_none());
        assert!(wall.ray_hit(Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0)).is_none());
    }

    #[test]
    fn closest_point_clamps_to_endpoints() {
        let s = Segment::new(0.0, 0.0, 1.0, 0.0);
        assert_eq!(s.closest_point(Vec2::new(2.0, 1.0)), Vec2::new(1.0, 0.0));
        assert_eq!(s.closest_point(Vec2::new(0.5, 1.0)), Vec2::new(0.5, 0.0));
        assert!((s.distance_to(Vec2::new(-3.0, 4.0)) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn angles_wrap() {
        assert_eq!(normalize_angle(-1e-20), 0.0);
        assert!((normalize_angle(-std::f64::consts::FRAC_PI_2) - 1.5 * std::f64::consts::PI).abs() < 1e-12);
        assert!((angle_diff(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
    }
}
