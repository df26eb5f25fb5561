use crate::error::{Error, Result};
use crate::geometry::{Segment, Vec2};
use crate::maze::layout::{DoorStates, MazeLayout, Texture};
use crate::maze::{Pose, RobotBody};

const MAX_PASSES: usize = 16;
const SLACK: f64 = 1e-12;

/// Push the body out of every wall and closed door it overlaps.
pub fn resolve_collision(pose: Pose, body: &RobotBody, layout: &MazeLayout, doors: &DoorStates) -> Result<Pose> {
    let obstacles: Vec<(Segment, Texture)> = layout.obstacles(doors).collect();
    resolve_against(pose, body.body_radius, &obstacles)
}

/// Same as [`resolve_collision`] against a prepared obstacle list.
///
/// Contacts are resolved deepest first; each pass moves the centre along the
/// contact normal by exactly the penetration depth, which for axis-aligned
/// walls is the minimal axis-aligned push-out.
pub fn resolve_against(pose: Pose, radius: f64, obstacles: &[(Segment, Texture)]) -> Result<Pose> {
    let start = pose.position();
    let mut p = start;
    let unresolvable = || Error::Unresolvable { x: pose.x, y: pose.y };
    for _ in 0..MAX_PASSES {
        let mut worst: Option<(f64, Vec2)> = None;
        for (seg, _) in obstacles {
            let c = seg.closest_point(p);
            let d = c.dist(p);
            if d < radius - SLACK && worst.is_none_or(|(dw, _)| d < dw) {
                worst = Some((d, c));
            }
        }
        let Some((d, c)) = worst else {
            return if p.dist(start) <= radius { Ok(pose.with_position(p)) } else { Err(unresolvable()) };
        };
        if d < 1e-12 {
            return Err(unresolvable());
        }
        p = c + (p - c).scale(radius / d);
    }
    Err(unresolvable())
}

pub fn min_clearance(p: Vec2, obstacles: &[(Segment, Texture)]) -> f64 {
    obstacles.iter().map(|(s, _)| s.distance_to(p)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walls(segs: &[Segment]) -> Vec<(Segment, Texture)> {
        segs.iter().map(|s| (*s, Texture::UniformDark)).collect()
    }

    #[test]
    fn clear_pose_is_unchanged() {
        let w = walls(&[Segment::new(0.0, 0.0, 1.0, 0.0)]);
        let p = Pose::new(0.5, 0.2, 1.0);
        assert_eq!(resolve_against(p, 0.037, &w).unwrap(), p);
    }

    #[test]
    fn single_wall_push_equals_overlap() {
        let w = walls(&[Segment::new(0.0, 0.0, 1.0, 0.0)]);
        let delta = 0.01;
        let p = Pose::new(0.5, 0.037 - delta, 0.3);
        let q = resolve_against(p, 0.037, &w).unwrap();
        assert!((q.y - p.y - delta).abs() < 1e-12);
        assert_eq!(q.x, p.x);
        assert_eq!(q.heading, p.heading);
    }

    #[test]
    fn inside_corner_matches_grid_search() {
        let r = 0.037;
        let w = walls(&[Segment::new(0.0, 0.0, 1.0, 0.0), Segment::new(0.0, 0.0, 0.0, 1.0)]);
        for (x, y) in [(0.02, 0.03), (0.035, 0.01), (0.03, 0.03), (0.1, 0.02)] {
            let p = Pose::new(x, y, 0.0);
            let q = resolve_against(p, r, &w).unwrap();
            assert!(min_clearance(q.position(), &w) >= r - 1e-9);
            // nearest valid point on a fine grid around the input
            let h = 1e-4;
            let n = (2.0 * r / h) as i32;
            let mut best = f64::INFINITY;
            for i in -n..=n {
                for j in -n..=n {
                    let c = Vec2::new(x + i as f64 * h, y + j as f64 * h);
                    if min_clearance(c, &w) >= r {
                        best = best.min(c.dist(p.position()));
                    }
                }
            }
            let ours = q.position().dist(p.position());
            assert!((ours - best).abs() < 2.0 * h, "({x},{y}): ours {ours} grid {best}");
        }
    }

    #[test]
    fn centre_on_wall_is_unresolvable() {
        let w = walls(&[Segment::new(0.0, 0.0, 1.0, 0.0)]);
        assert!(matches!(
            resolve_against(Pose::new(0.5, 0.0, 0.0), 0.037, &w),
            Err(Error::Unresolvable { .. })
        ));
    }
}
