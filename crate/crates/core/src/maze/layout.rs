use std::fmt;
use std::str::FromStr;

use crate::geometry::{Rect, Segment, Vec2};
use crate::maze::Pose;

/// Grayscale landmark patterns painted on wall faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Texture {
    UniformDark,
    UniformLight,
    StripesCoarse,
    StripesFine,
    GradientUp,
    GradientDown,
}

impl Texture {
    pub const ALL: [Texture; 6] = [
        Texture::UniformDark,
        Texture::UniformLight,
        Texture::StripesCoarse,
        Texture::StripesFine,
        Texture::GradientUp,
        Texture::GradientDown,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Texture> {
        Texture::ALL.get(id as usize).copied()
    }

    /// Base shade in `[0, 1]` at arc-length `s` along a wall of length `len`.
    pub fn shade(self, s: f64, len: f64) -> f64 {
        const DARK: f64 = 0.25;
        const LIGHT: f64 = 1.0;
        let stripe = |period: f64| {
            if (s / period).rem_euclid(1.0) < 0.5 {
                LIGHT
            } else {
                DARK
            }
        };
        let frac = if len > 0.0 { (s / len).clamp(0.0, 1.0) } else { 0.0 };
        match self {
            Texture::UniformDark => DARK,
            Texture::UniformLight => LIGHT,
            Texture::StripesCoarse => stripe(0.10),
            Texture::StripesFine => stripe(0.04),
            Texture::GradientUp => DARK + (LIGHT - DARK) * frac,
            Texture::GradientDown => LIGHT - (LIGHT - DARK) * frac,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub seg: Segment,
    pub texture: Texture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DoorKind {
    /// Closes behind the robot once it has moved past a junction.
    BacktrackBlocker,
    /// Closes the far-side route after the third junction above a reward.
    ReturnPathEnforcer,
}

impl fmt::Display for DoorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DoorKind::BacktrackBlocker => "backtrack",
            DoorKind::ReturnPathEnforcer => "return-enforcer",
        })
    }
}

impl FromStr for DoorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "backtrack" => Ok(DoorKind::BacktrackBlocker),
            "return-enforcer" => Ok(DoorKind::ReturnPathEnforcer),
            other => Err(format!("unknown door kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Door {
    pub id: String,
    pub kind: DoorKind,
    pub seg: Segment,
    pub trigger: Rect,
    pub texture: Texture,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardSite {
    /// Path id, 1-based.
    pub path: u8,
    pub pos: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TJunction {
    pub label: String,
    pub rect: Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodingDirection {
    /// Label a traversal by the path taken after it.
    Prospective,
    /// Label a traversal by the path the robot is returning from.
    Retrospective,
}

impl fmt::Display for CodingDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodingDirection::Prospective => "prospective",
            CodingDirection::Retrospective => "retrospective",
        })
    }
}

impl FromStr for CodingDirection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "prospective" => Ok(CodingDirection::Prospective),
            "retrospective" => Ok(CodingDirection::Retrospective),
            other => Err(format!("unknown coding direction `{other}`")),
        }
    }
}

/// Named analysis region with the path classes that can traverse it.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRegion {
    pub name: String,
    pub direction: CodingDirection,
    pub classes: Vec<u8>,
    pub rect: Rect,
}

/// Which reference topology a layout claims to be; drives validation counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    TripleT,
    DoubleT,
    Custom,
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayoutKind::TripleT => "triple-t",
            LayoutKind::DoubleT => "double-t",
            LayoutKind::Custom => "custom",
        })
    }
}

impl FromStr for LayoutKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "triple-t" => Ok(LayoutKind::TripleT),
            "double-t" => Ok(LayoutKind::DoubleT),
            "custom" => Ok(LayoutKind::Custom),
            other => Err(format!("unknown layout kind `{other}`")),
        }
    }
}

/// Complete maze description. Layouts are plain data; see `maze::file` for
/// the on-disk form and `maze::canonical` for the shipped mazes.
#[derive(Debug, Clone, PartialEq)]
pub struct MazeLayout {
    pub kind: LayoutKind,
    pub width: f64,
    pub height: f64,
    /// Corridor rectangles; their union is the traversable area.
    pub corridors: Vec<Rect>,
    pub walls: Vec<Wall>,
    pub doors: Vec<Door>,
    pub home: Pose,
    pub home_radius: f64,
    pub reward_radius: f64,
    pub rewards: Vec<RewardSite>,
    pub t_junctions: Vec<TJunction>,
    pub segments: Vec<SegmentRegion>,
    /// Entering this region from outside starts a new lap.
    pub lap_start: Rect,
}

/// Closed flags, one per door in layout order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct DoorStates(Vec<bool>);

impl DoorStates {
    pub fn all_open(n: usize) -> Self {
        DoorStates(vec![false; n])
    }

    pub fn is_closed(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn close(&mut self, i: usize) -> bool {
        let was = self.0[i];
        self.0[i] = true;
        !was
    }

    pub fn open_all(&mut self) {
        self.0.iter_mut().for_each(|d| *d = false);
    }

    pub fn closed_count(&self) -> usize {
        self.0.iter().filter(|&&c| c).count()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every door closed in `self` is also closed in `later`.
    pub fn is_subset_of(&self, later: &DoorStates) -> bool {
        self.0.iter().zip(&later.0).all(|(&a, &b)| !a || b)
    }
}

impl MazeLayout {
    pub fn reward_count(&self) -> usize {
        self.rewards.len()
    }

    pub fn reward(&self, path: u8) -> Option<&RewardSite> {
        self.rewards.iter().find(|r| r.path == path)
    }

    pub fn door_index(&self, id: &str) -> Option<usize> {
        self.doors.iter().position(|d| d.id == id)
    }

    pub fn segment(&self, name: &str) -> Option<&SegmentRegion> {
        self.segments.iter().find(|s| s.name == name)
    }

    pub fn initial_doors(&self) -> DoorStates {
        DoorStates::all_open(self.doors.len())
    }

    /// Every segment the robot can collide with or see: walls and closed doors.
    pub fn obstacles<'a>(&'a self, doors: &'a DoorStates) -> impl Iterator<Item = (Segment, Texture)> + 'a {
        self.walls.iter().map(|w| (w.seg, w.texture)).chain(
            self.doors
                .iter()
                .enumerate()
                .filter(move |(i, _)| doors.is_closed(*i))
                .map(|(_, d)| (d.seg, d.texture)),
        )
    }

    pub fn in_corridor(&self, p: Vec2) -> bool {
        self.corridors.iter().any(|c| c.contains(p))
    }

    pub fn in_bounds(&self, p: Vec2) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    /// Mirror image about the vertical axis `x = width / 2`.
    pub fn mirrored(&self) -> MazeLayout {
        let axis = 0.5 * self.width;
        let mx = |p: Vec2| Vec2::new(2.0 * axis - p.x, p.y);
        MazeLayout {
            kind: LayoutKind::Custom,
            width: self.width,
            height: self.height,
            corridors: self.corridors.iter().map(|r| r.mirrored_x(axis)).collect(),
            walls: self
                .walls
                .iter()
                .map(|w| Wall {
                    seg: w.seg.mirrored_x(axis),
                    texture: w.texture,
                })
                .collect(),
            doors: self
                .doors
                .iter()
                .map(|d| Door {
                    seg: d.seg.mirrored_x(axis),
                    trigger: d.trigger.mirrored_x(axis),
                    ..d.clone()
                })
                .collect(),
            home: mirror_pose(self.home, axis),
            home_radius: self.home_radius,
            reward_radius: self.reward_radius,
            rewards: self
                .rewards
                .iter()
                .map(|r| RewardSite {
                    path: r.path,
                    pos: mx(r.pos),
                })
                .collect(),
            t_junctions: self
                .t_junctions
                .iter()
                .map(|t| TJunction {
                    label: t.label.clone(),
                    rect: t.rect.mirrored_x(axis),
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|s| SegmentRegion {
                    rect: s.rect.mirrored_x(axis),
                    ..s.clone()
                })
                .collect(),
            lap_start: self.lap_start.mirrored_x(axis),
        }
    }
}

pub fn mirror_pose(p: Pose, axis: f64) -> Pose {
    Pose::new(2.0 * axis - p.x, p.y, std::f64::consts::PI - p.heading)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textures_in_unit_range() {
        for t in Texture::ALL {
            for i in 0..100 {
                let s = t.shade(i as f64 * 0.013, 1.0);
                assert!((0.0..=1.0).contains(&s));
            }
            assert_eq!(Texture::from_id(t.id()), Some(t));
        }
        assert_eq!(Texture::from_id(6), None);
    }

    #[test]
    fn door_state_subset() {
        let mut a = DoorStates::all_open(3);
        let b0 = a.clone();
        assert!(a.close(1));
        assert!(!a.close(1));
        assert!(b0.is_subset_of(&a));
        assert!(!a.is_subset_of(&b0));
    }
}
