//! Shipped maze layouts.
//!
//! Both mazes share one frame: a 1.6 m x 1.25 m arena, a bottom return row
//! through the home position, outer return columns on the far left and right,
//! and a top row joining the tops of the reward arms. Corridors are 0.10 m
//! wide. Vertical corridors are centred either on a bin centre or on a bin
//! boundary so the robot's free space always falls inside corridor bins.

use std::f64::consts::FRAC_PI_2;

use crate::geometry::{Rect, Segment, Vec2};
use crate::maze::layout::{
    CodingDirection, Door, DoorKind, LayoutKind, MazeLayout, RewardSite, SegmentRegion, TJunction,
    Texture, Wall,
};
use crate::maze::Pose;

pub const WIDTH: f64 = 1.6;
pub const HEIGHT: f64 = 1.25;
pub const CORRIDOR: f64 = 0.10;
const HALF: f64 = 0.5 * CORRIDOR;
/// Body radius the trigger offsets are computed for.
const R: f64 = 0.037;
const DIAM: f64 = 2.0 * R;
const CENTER_X: f64 = 0.8;
const TOP_Y0: f64 = 1.1;
const TOP_Y1: f64 = 1.2;
const T1_Y0: f64 = 0.4;
const T1_Y1: f64 = 0.5;
const REWARD_Y: f64 = 1.0;

fn vdoor(x: f64, y0: f64, y1: f64) -> Segment {
    Segment::new(x, y0, x, y1)
}

fn door(id: &str, kind: DoorKind, seg: Segment, trigger: Rect) -> Door {
    Door {
        id: id.to_string(),
        kind,
        seg,
        trigger,
        texture: Texture::UniformDark,
    }
}

/// Frame shared by both mazes: bottom row, outer columns, top row, seg1, T1 row.
fn frame_corridors(t1_half_span: f64) -> Vec<Rect> {
    vec![
        Rect::new(0.0, 0.0, WIDTH, CORRIDOR),
        Rect::new(0.0, 0.0, CORRIDOR, TOP_Y1),
        Rect::new(WIDTH - CORRIDOR, 0.0, WIDTH, TOP_Y1),
        Rect::new(0.0, TOP_Y0, WIDTH, TOP_Y1),
        Rect::new(CENTER_X - HALF, 0.0, CENTER_X + HALF, T1_Y1),
        Rect::new(CENTER_X - t1_half_span - HALF, T1_Y0, CENTER_X + t1_half_span + HALF, T1_Y1),
    ]
}

/// Doors around home and the first junction.
fn frame_doors(t1_x_min: f64, t1_x_max: f64, lap_start: Rect) -> Vec<Door> {
    let t1_left = Rect::new(t1_x_min, T1_Y0, CENTER_X - HALF - DIAM, T1_Y1);
    let t1_right = Rect::new(CENTER_X + HALF + DIAM, T1_Y0, t1_x_max, T1_Y1);
    vec![
        door(
            "home-exit",
            DoorKind::BacktrackBlocker,
            Segment::new(CENTER_X - HALF, CORRIDOR, CENTER_X + HALF, CORRIDOR),
            lap_start,
        ),
        door("T1-left", DoorKind::BacktrackBlocker, vdoor(CENTER_X - HALF, T1_Y0, T1_Y1), t1_left),
        door("T1-right", DoorKind::BacktrackBlocker, vdoor(CENTER_X + HALF, T1_Y0, T1_Y1), t1_right),
        // committing to one subtree shuts the other subtree's return entrance at home
        door("home-right", DoorKind::ReturnPathEnforcer, vdoor(CENTER_X + 0.08, 0.0, CORRIDOR), t1_left),
        door("home-left", DoorKind::ReturnPathEnforcer, vdoor(CENTER_X - 0.08, 0.0, CORRIDOR), t1_right),
    ]
}

/// Doors at the junction on top of a reward arm at `xa`. `near_left` tells
/// which way the closer return corridor lies. `inner_arm` is the arm that
/// sits between this junction and the near return, if any.
fn top_junction_doors(label: &str, xa: f64, near_left: bool, inner_arm: Option<f64>) -> Vec<Door> {
    let s = if near_left { -1.0 } else { 1.0 };
    let far_x = xa - s * 0.065;
    let trigger = if near_left {
        Rect::new(xa - HALF, TOP_Y0 - 0.02, xa + 0.02, TOP_Y1)
    } else {
        Rect::new(xa - 0.02, TOP_Y0 - 0.02, xa + HALF, TOP_Y1)
    };
    let near_edge = xa + s * HALF;
    let near_trigger_edge = near_edge + s * DIAM;
    let back_trigger = if near_left {
        Rect::new((near_trigger_edge - 0.2).max(0.0), 0.8, near_trigger_edge, TOP_Y1)
    } else {
        Rect::new(near_trigger_edge, 0.8, (near_trigger_edge + 0.2).min(WIDTH), TOP_Y1)
    };
    let mut doors = vec![
        door(
            &format!("{label}-far"),
            DoorKind::ReturnPathEnforcer,
            vdoor(far_x, TOP_Y0, TOP_Y1),
            trigger,
        ),
        door(
            &format!("{label}-back"),
            DoorKind::BacktrackBlocker,
            vdoor(near_edge, TOP_Y0, TOP_Y1),
            back_trigger,
        ),
    ];
    if let Some(xi) = inner_arm {
        doors.push(door(
            &format!("{label}-inner-arm"),
            DoorKind::ReturnPathEnforcer,
            Segment::new(xi - HALF, TOP_Y0, xi + HALF, TOP_Y0),
            trigger,
        ));
    }
    doors
}

fn top_junction(label: &str, xa: f64) -> TJunction {
    TJunction {
        label: label.to_string(),
        rect: Rect::new(xa - HALF, TOP_Y0, xa + HALF, TOP_Y1),
    }
}

fn texture_for(mid: Vec2) -> Texture {
    if mid.x <= CORRIDOR + 1e-9 && mid.y > CORRIDOR {
        return Texture::UniformDark;
    }
    if mid.x >= WIDTH - CORRIDOR - 1e-9 && mid.y > CORRIDOR {
        return Texture::UniformLight;
    }
    if mid.y <= CORRIDOR + 1e-9 {
        return if mid.x < CENTER_X { Texture::GradientDown } else { Texture::GradientUp };
    }
    if mid.y > 0.8 + 1e-9 {
        return match mid.x {
            x if x < 0.3 => Texture::GradientUp,
            x if x < CENTER_X => Texture::StripesCoarse,
            x if x < 1.3 => Texture::StripesFine,
            _ => Texture::GradientDown,
        };
    }
    if mid.x < CENTER_X {
        Texture::UniformLight
    } else {
        Texture::UniformDark
    }
}

/// Boundary of the union of `rects`, clipped to the arena, as merged wall
/// segments. Walls are also cut at every x in `splits_x` so texture zones can
/// change there.
#[allow(clippy::needless_range_loop)] // indices address both grid lines and cells
pub fn union_boundary(
    rects: &[Rect],
    width: f64,
    height: f64,
    splits_x: &[f64],
    texture: impl Fn(Vec2) -> Texture,
) -> Vec<Wall> {
    let key = |v: f64| (v * 1e9).round() as i64;
    let mut xs: Vec<f64> = rects
        .iter()
        .flat_map(|r| [r.x0, r.x1])
        .chain([0.0, width])
        .chain(splits_x.iter().copied())
        .collect();
    let mut ys: Vec<f64> = rects.iter().flat_map(|r| [r.y0, r.y1]).chain([0.0, height]).collect();
    for v in [&mut xs, &mut ys] {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup_by(|a, b| key(*a) == key(*b));
    }
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;
    let filled = |i: isize, j: isize| -> bool {
        if i < 0 || j < 0 || i as usize >= nx || j as usize >= ny {
            return false;
        }
        let c = Vec2::new(
            0.5 * (xs[i as usize] + xs[i as usize + 1]),
            0.5 * (ys[j as usize] + ys[j as usize + 1]),
        );
        rects.iter().any(|r| r.contains(c))
    };

    let mut walls: Vec<Wall> = Vec::new();
    // vertical boundary edges, merged along each x line
    for i in 0..=nx {
        let mut run: Option<(f64, f64, bool, Texture)> = None;
        for j in 0..ny {
            let l = filled(i as isize - 1, j as isize);
            let r = filled(i as isize, j as isize);
            let edge = if l != r {
                let mid = Vec2::new(xs[i], 0.5 * (ys[j] + ys[j + 1]));
                Some((l, texture(mid)))
            } else {
                None
            };
            run = merge_run(run, edge, ys[j], ys[j + 1], &mut walls, |a, b| Segment::new(xs[i], a, xs[i], b));
        }
        merge_run(run, None, 0.0, 0.0, &mut walls, |a, b| Segment::new(xs[i], a, xs[i], b));
    }
    for j in 0..=ny {
        let mut run: Option<(f64, f64, bool, Texture)> = None;
        for i in 0..nx {
            let d = filled(i as isize, j as isize - 1);
            let u = filled(i as isize, j as isize);
            let edge = if d != u {
                let mid = Vec2::new(0.5 * (xs[i] + xs[i + 1]), ys[j]);
                Some((d, texture(mid)))
            } else {
                None
            };
            run = merge_run(run, edge, xs[i], xs[i + 1], &mut walls, |a, b| Segment::new(a, ys[j], b, ys[j]));
        }
        merge_run(run, None, 0.0, 0.0, &mut walls, |a, b| Segment::new(a, ys[j], b, ys[j]));
    }
    walls
}

fn merge_run(
    run: Option<(f64, f64, bool, Texture)>,
    edge: Option<(bool, Texture)>,
    a: f64,
    b: f64,
    out: &mut Vec<Wall>,
    mk: impl Fn(f64, f64) -> Segment,
) -> Option<(f64, f64, bool, Texture)> {
    match (run, edge) {
        (Some((s, e, side, tex)), Some((side2, tex2))) if side == side2 && tex == tex2 && (e - a).abs() < 1e-12 => {
            Some((s, b, side, tex))
        }
        (prev, next) => {
            if let Some((s, e, _, tex)) = prev {
                out.push(Wall { seg: mk(s, e), texture: tex });
            }
            next.map(|(side, tex)| (a, b, side, tex))
        }
    }
}

fn home() -> Pose {
    Pose::new(CENTER_X, 0.05, FRAC_PI_2)
}

fn lap_start() -> Rect {
    Rect::new(CENTER_X - HALF, CORRIDOR + DIAM, CENTER_X + HALF, T1_Y0)
}

/// The canonical triple T-maze: 4 rewards, 7 junctions, 110 corridor bins.
pub fn triple_t() -> MazeLayout {
    let arms = [0.2, 0.6, 1.0, 1.4];
    let seg3 = [0.4, 1.2];
    let mid_y0 = 0.7;
    let mid_y1 = 0.8;

    let mut corridors = frame_corridors(0.4);
    for x in seg3 {
        corridors.push(Rect::new(x - HALF, T1_Y0, x + HALF, mid_y1));
    }
    corridors.push(Rect::new(arms[0] - HALF, mid_y0, arms[1] + HALF, mid_y1));
    corridors.push(Rect::new(arms[2] - HALF, mid_y0, arms[3] + HALF, mid_y1));
    for x in arms {
        corridors.push(Rect::new(x - HALF, mid_y0, x + HALF, TOP_Y1));
    }

    let lap = lap_start();
    let mut doors = frame_doors(seg3[0] - HALF, seg3[1] + HALF, lap);
    // second-level junctions: a door closes behind the robot in the junction row
    for (label, x, lo, hi) in [("T2", seg3[0], arms[0], arms[1]), ("T3", seg3[1], arms[2], arms[3])] {
        doors.push(door(
            &format!("{label}-left"),
            DoorKind::BacktrackBlocker,
            vdoor(x - HALF, mid_y0, mid_y1),
            Rect::new(lo - HALF, mid_y0, x - HALF - DIAM, TOP_Y0),
        ));
        doors.push(door(
            &format!("{label}-right"),
            DoorKind::BacktrackBlocker,
            vdoor(x + HALF, mid_y0, mid_y1),
            Rect::new(x + HALF + DIAM, mid_y0, hi + HALF, TOP_Y0),
        ));
    }
    doors.extend(top_junction_doors("T4", arms[0], true, None));
    doors.extend(top_junction_doors("T5", arms[1], true, Some(arms[0])));
    doors.extend(top_junction_doors("T6", arms[2], false, Some(arms[3])));
    doors.extend(top_junction_doors("T7", arms[3], false, None));

    let mut t_junctions = vec![
        TJunction {
            label: "T1".into(),
            rect: Rect::new(CENTER_X - HALF, T1_Y0, CENTER_X + HALF, T1_Y1),
        },
        TJunction {
            label: "T2".into(),
            rect: Rect::new(seg3[0] - HALF, mid_y0, seg3[0] + HALF, mid_y1),
        },
        TJunction {
            label: "T3".into(),
            rect: Rect::new(seg3[1] - HALF, mid_y0, seg3[1] + HALF, mid_y1),
        },
    ];
    for (i, x) in arms.iter().enumerate() {
        t_junctions.push(top_junction(&format!("T{}", i + 4), *x));
    }

    let segments = vec![
        SegmentRegion {
            name: "seg1".into(),
            direction: CodingDirection::Prospective,
            classes: vec![1, 2, 3, 4],
            rect: Rect::new(CENTER_X - HALF, CORRIDOR, CENTER_X + HALF, T1_Y0),
        },
        SegmentRegion {
            name: "seg3-1".into(),
            direction: CodingDirection::Prospective,
            classes: vec![1, 2],
            rect: Rect::new(seg3[0] - HALF, T1_Y1, seg3[0] + HALF, mid_y0),
        },
        SegmentRegion {
            name: "seg3-2".into(),
            direction: CodingDirection::Prospective,
            classes: vec![3, 4],
            rect: Rect::new(seg3[1] - HALF, T1_Y1, seg3[1] + HALF, mid_y0),
        },
        SegmentRegion {
            name: "seg8-1".into(),
            direction: CodingDirection::Retrospective,
            classes: vec![1, 2],
            rect: Rect::new(0.0, CORRIDOR, CORRIDOR, TOP_Y0),
        },
        SegmentRegion {
            name: "seg8-2".into(),
            direction: CodingDirection::Retrospective,
            classes: vec![3, 4],
            rect: Rect::new(WIDTH - CORRIDOR, CORRIDOR, WIDTH, TOP_Y0),
        },
    ];

    MazeLayout {
        kind: LayoutKind::TripleT,
        width: WIDTH,
        height: HEIGHT,
        walls: union_boundary(&corridors, WIDTH, HEIGHT, &[CENTER_X], texture_for),
        corridors,
        doors,
        home: home(),
        home_radius: 0.06,
        reward_radius: 0.06,
        rewards: arms
            .iter()
            .enumerate()
            .map(|(i, &x)| RewardSite {
                path: i as u8 + 1,
                pos: Vec2::new(x, REWARD_Y),
            })
            .collect(),
        t_junctions,
        segments,
        lap_start: lap,
    }
}

/// Reduced two-reward maze: one choice junction, arms rising straight to the top row.
pub fn double_t() -> MazeLayout {
    let arms = [0.4, 1.2];
    let mut corridors = frame_corridors(0.4);
    for x in arms {
        corridors.push(Rect::new(x - HALF, T1_Y0, x + HALF, TOP_Y1));
    }
    let lap = lap_start();
    let mut doors = frame_doors(arms[0] - HALF, arms[1] + HALF, lap);
    doors.extend(top_junction_doors("T2", arms[0], true, None));
    doors.extend(top_junction_doors("T3", arms[1], false, None));

    MazeLayout {
        kind: LayoutKind::DoubleT,
        width: WIDTH,
        height: HEIGHT,
        walls: union_boundary(&corridors, WIDTH, HEIGHT, &[CENTER_X], texture_for),
        corridors,
        doors,
        home: home(),
        home_radius: 0.06,
        reward_radius: 0.06,
        rewards: arms
            .iter()
            .enumerate()
            .map(|(i, &x)| RewardSite {
                path: i as u8 + 1,
                pos: Vec2::new(x, REWARD_Y),
            })
            .collect(),
        t_junctions: vec![
            TJunction {
                label: "T1".into(),
                rect: Rect::new(CENTER_X - HALF, T1_Y0, CENTER_X + HALF, T1_Y1),
            },
            top_junction("T2", arms[0]),
            top_junction("T3", arms[1]),
        ],
        segments: vec![SegmentRegion {
            name: "seg1".into(),
            direction: CodingDirection::Prospective,
            classes: vec![1, 2],
            rect: Rect::new(CENTER_X - HALF, CORRIDOR, CENTER_X + HALF, T1_Y0),
        }],
        lap_start: lap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rect_has_four_walls() {
        let walls = union_boundary(&[Rect::new(0.2, 0.2, 0.4, 0.3)], 1.0, 1.0, &[], |_| Texture::UniformDark);
        assert_eq!(walls.len(), 4);
        let perimeter: f64 = walls.iter().map(|w| w.seg.length()).sum();
        assert!((perimeter - 0.6).abs() < 1e-12);
    }

    #[test]
    fn l_shape_boundary_has_six_walls() {
        let rects = [Rect::new(0.0, 0.0, 0.3, 0.1), Rect::new(0.0, 0.0, 0.1, 0.3)];
        let walls = union_boundary(&rects, 1.0, 1.0, &[], |_| Texture::UniformDark);
        assert_eq!(walls.len(), 6);
        let perimeter: f64 = walls.iter().map(|w| w.seg.length()).sum();
        assert!((perimeter - 1.2).abs() < 1e-12);
    }

    #[test]
    fn canonical_counts() {
        let m = triple_t();
        assert_eq!(m.rewards.len(), 4);
        assert_eq!(m.t_junctions.len(), 7);
        assert_eq!(m.segments.len(), 5);
        let d = double_t();
        assert_eq!(d.rewards.len(), 2);
        assert_eq!(d.t_junctions.len(), 3);
    }

    #[test]
    fn triple_t_geometry_is_mirror_symmetric() {
        let m = triple_t();
        let mut a: Vec<_> = m.walls.iter().map(|w| key(w.seg)).collect();
        let mut b: Vec<_> = m.mirrored().walls.iter().map(|w| key(w.seg)).collect();
        a.sort();
        b.sort();
        let only_a: Vec<_> = a.iter().filter(|k| !b.contains(k)).collect();
        let only_b: Vec<_> = b.iter().filter(|k| !a.contains(k)).collect();
        assert_eq!(a, b, "{only_a:?} vs {only_b:?}");
    }

    fn key(s: Segment) -> [i64; 4] {
        let k = |v: f64| (v * 1e6).round() as i64;
        let (p, q) = if (s.a.x, s.a.y) <= (s.b.x, s.b.y) { (s.a, s.b) } else { (s.b, s.a) };
        [k(p.x), k(p.y), k(q.x), k(q.y)]
    }
}
