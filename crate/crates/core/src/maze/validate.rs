//! Structural checks on a maze layout.

use std::collections::VecDeque;

use crate::analysis::BinGrid;
use crate::geometry::{Segment, Vec2};
use crate::maze::collision::min_clearance;
use crate::maze::layout::{LayoutKind, MazeLayout, Texture};

pub const TRIPLE_T_SEGMENTS: [&str; 5] = ["seg1", "seg3-1", "seg3-2", "seg8-1", "seg8-2"];

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub corridor_bins: usize,
    pub rewards: usize,
    pub junctions: usize,
    pub segments: usize,
    pub doors: usize,
    pub free_samples: usize,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Sample spacing for free-space checks (m).
const STEP: f64 = 0.005;

pub fn validate_layout(layout: &MazeLayout, body_radius: f64, grid: &BinGrid, expected_bins: usize) -> ValidationReport {
    let mut problems = Vec::new();
    let r = body_radius;

    match layout.kind {
        LayoutKind::TripleT => {
            expect(&mut problems, "reward sites", layout.rewards.len(), 4);
            expect(&mut problems, "T-intersections", layout.t_junctions.len(), 7);
            expect(&mut problems, "analysis segments", layout.segments.len(), 5);
            for name in TRIPLE_T_SEGMENTS {
                if layout.segment(name).is_none() {
                    problems.push(format!("missing segment `{name}`"));
                }
            }
            expect(&mut problems, "corridor bins", grid.len(), expected_bins);
        }
        LayoutKind::DoubleT => {
            expect(&mut problems, "reward sites", layout.rewards.len(), 2);
            expect(&mut problems, "T-intersections", layout.t_junctions.len(), 3);
        }
        LayoutKind::Custom => {}
    }
    for (i, rw) in layout.rewards.iter().enumerate() {
        if rw.path as usize != i + 1 {
            problems.push(format!("reward paths must be numbered 1..n, found {}", rw.path));
        }
    }
    for s in &layout.segments {
        if s.classes.iter().any(|c| layout.reward(*c).is_none()) {
            problems.push(format!("segment `{}` names a path with no reward site", s.name));
        }
    }

    for (i, c) in layout.corridors.iter().enumerate() {
        if c.width().min(c.height()) < 2.0 * r {
            problems.push(format!("corridor {i} is narrower than the robot ({:.3} m)", c.width().min(c.height())));
        }
        if c.x0 < 0.0 || c.y0 < 0.0 || c.x1 > layout.width || c.y1 > layout.height {
            problems.push(format!("corridor {i} leaves the arena"));
        }
    }
    for w in &layout.walls {
        if !layout.in_bounds(w.seg.a) || !layout.in_bounds(w.seg.b) {
            problems.push(format!("wall {:?} leaves the arena", w.seg));
        }
    }

    // free space of the robot centre with every door open
    let walls: Vec<(Segment, Texture)> = layout.walls.iter().map(|w| (w.seg, w.texture)).collect();
    let nx = (layout.width / STEP).floor() as usize + 1;
    let ny = (layout.height / STEP).floor() as usize + 1;
    let at = |i: usize, j: usize| Vec2::new(i as f64 * STEP, j as f64 * STEP);
    let mut free = vec![false; nx * ny];
    let mut free_samples = 0;
    let mut unbinned = 0;
    for j in 0..ny {
        for i in 0..nx {
            let p = at(i, j);
            if layout.in_corridor(p) && min_clearance(p, &walls) >= r {
                free[j * nx + i] = true;
                free_samples += 1;
                if grid.bin_at(p).is_none() {
                    unbinned += 1;
                }
            }
        }
    }
    if unbinned > 0 {
        problems.push(format!("{unbinned} free positions fall outside every corridor bin"));
    }

    let home = layout.home.position();
    if !layout.in_corridor(home) || min_clearance(home, &walls) < r {
        problems.push("home pose is not collision-free".into());
    }
    let nearest = |p: Vec2| -> Option<usize> {
        (0..nx * ny)
            .filter(|&k| free[k])
            .min_by(|&a, &b| {
                let da = at(a % nx, a / nx).dist(p);
                let db = at(b % nx, b / nx).dist(p);
                da.partial_cmp(&db).unwrap()
            })
    };
    match nearest(home) {
        Some(start) => {
            let seen = flood(&free, nx, ny, start);
            for rw in &layout.rewards {
                let reachable = (0..nx * ny).any(|k| seen[k] && at(k % nx, k / nx).dist(rw.pos) < layout.reward_radius);
                if !reachable {
                    problems.push(format!("reward {} is not reachable from home", rw.path));
                }
            }
        }
        None => problems.push("layout has no free space".into()),
    }

    // a closing door must never overlap a robot standing in its trigger
    for d in &layout.doors {
        let mut hit = false;
        for k in (0..nx * ny).filter(|&k| free[k]) {
            let p = at(k % nx, k / nx);
            if d.trigger.contains(p) && d.seg.distance_to(p) < r {
                hit = true;
                break;
            }
        }
        if hit {
            problems.push(format!("door `{}` would close onto a robot inside its trigger", d.id));
        }
    }
    if !layout.lap_start.contains(layout.lap_start.center()) || !layout.in_corridor(layout.lap_start.center()) {
        problems.push("lap start region is outside the corridors".into());
    }

    ValidationReport {
        corridor_bins: grid.len(),
        rewards: layout.rewards.len(),
        junctions: layout.t_junctions.len(),
        segments: layout.segments.len(),
        doors: layout.doors.len(),
        free_samples,
        problems,
    }
}

fn expect(problems: &mut Vec<String>, what: &str, found: usize, want: usize) {
    if found != want {
        problems.push(format!("expected {want} {what}, found {found}"));
    }
}

fn flood(free: &[bool], nx: usize, ny: usize, start: usize) -> Vec<bool> {
    let mut seen = vec![false; free.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(k) = queue.pop_front() {
        let (i, j) = (k % nx, k / nx);
        let mut push = |ii: usize, jj: usize| {
            let n = jj * nx + ii;
            if free[n] && !seen[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        };
        if i > 0 {
            push(i - 1, j);
        }
        if i + 1 < nx {
            push(i + 1, j);
        }
        if j > 0 {
            push(i, j - 1);
        }
        if j + 1 < ny {
            push(i, j + 1);
        }
    }
    seen
}
