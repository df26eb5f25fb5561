//! Synthetic logs with known ground truth for checking the decoders.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::analysis::BinGrid;
use crate::geometry::Vec2;
use crate::maze::{LogRow, MazeLayout, PathVisit, Pose, TrialLog, TrialSummary};

fn empty_summary(steps: usize) -> TrialSummary {
    TrialSummary {
        fitness: 0.0,
        elapsed_steps: steps,
        visits: Vec::new(),
        rewards_obtained: Vec::new(),
        num_repeats: 0,
    }
}

fn row(step: usize, p: Vec2, activities: Vec<f64>) -> LogRow {
    LogRow {
        step,
        pose: Pose::new(p.x, p.y, 0.0),
        inputs: Vec::new(),
        activities,
        motor: [0.0; 2],
        events: Vec::new(),
    }
}

/// A log visiting `positions` in order with activity `act(step, position)`.
pub fn log_from_positions(positions: &[Vec2], act: impl Fn(usize, Vec2) -> Vec<f64>) -> TrialLog {
    TrialLog {
        rows: positions.iter().enumerate().map(|(i, &p)| row(i, p, act(i, p))).collect(),
        summary: empty_summary(positions.len()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaceCodeSynth {
    pub n_neurons: usize,
    /// Gaussian tuning width (m).
    pub tuning_width: f64,
    pub noise: f64,
    pub steps_per_bin: usize,
}

impl Default for PlaceCodeSynth {
    fn default() -> Self {
        Self {
            n_neurons: 50,
            tuning_width: 0.12,
            noise: 0.05,
            steps_per_bin: 10,
        }
    }
}

/// Preferred location of each neuron, spread evenly over the corridor bins.
pub fn place_field_centres(grid: &BinGrid, n_neurons: usize) -> Vec<Vec2> {
    (0..n_neurons)
        .map(|j| grid.bins[(j * grid.len()) / n_neurons].center)
        .collect()
}

/// Logs that sweep every corridor bin once, with each neuron tuned to a
/// place field and independent Gaussian noise on every step.
pub fn place_code_logs(grid: &BinGrid, synth: &PlaceCodeSynth, n_trials: usize, seed: u64) -> Vec<TrialLog> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres = place_field_centres(grid, synth.n_neurons);
    let noise = Normal::new(0.0, synth.noise).expect("finite noise");
    let two_w2 = 2.0 * synth.tuning_width * synth.tuning_width;
    (0..n_trials)
        .map(|_| {
            let mut rows = Vec::with_capacity(grid.len() * synth.steps_per_bin);
            for bin in &grid.bins {
                for _ in 0..synth.steps_per_bin {
                    let r = &bin.rect;
                    let p = Vec2::new(rng.random_range(r.x0..r.x1), rng.random_range(r.y0..r.y1));
                    let act = centres
                        .iter()
                        .map(|c| (-c.dist(p).powi(2) / two_w2).exp() + noise.sample(&mut rng))
                        .collect();
                    rows.push(row(rows.len(), p, act));
                }
            }
            let n = rows.len();
            TrialLog {
                rows,
                summary: empty_summary(n),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySynth {
    pub n_neurons: usize,
    pub noise: f64,
    /// Scale of the path-class pattern added on every step of a lap.
    pub class_gain: f64,
    /// Spacing of samples along a segment (m).
    pub spacing: f64,
    /// Seed of the per-class patterns, shared by all trials.
    pub pattern_seed: u64,
}

impl Default for TrajectorySynth {
    fn default() -> Self {
        Self {
            n_neurons: 50,
            noise: 0.05,
            class_gain: 0.5,
            spacing: 0.02,
            pattern_seed: 11,
        }
    }
}

fn segment_points(r: &crate::geometry::Rect, spacing: f64) -> Vec<Vec2> {
    let c = r.center();
    if r.height() >= r.width() {
        let n = (r.height() / spacing).floor() as usize;
        (0..n).map(|i| Vec2::new(c.x, r.y0 + (i as f64 + 0.5) * spacing)).collect()
    } else {
        let n = (r.width() / spacing).floor() as usize;
        (0..n).map(|i| Vec2::new(r.x0 + (i as f64 + 0.5) * spacing, c.y)).collect()
    }
}

/// Logs of laps in random order. Inside each lap the activity is a smooth
/// function of position plus a fixed pattern for the lap's path, so shared
/// segments carry the path identity.
pub fn trajectory_logs(layout: &MazeLayout, synth: &TrajectorySynth, n_trials: usize, seed: u64) -> Vec<TrialLog> {
    let n = synth.n_neurons;
    let mut prng = ChaCha8Rng::seed_from_u64(synth.pattern_seed);
    let paths: Vec<u8> = layout.rewards.iter().map(|r| r.path).collect();
    let patterns: Vec<Vec<f64>> = paths
        .iter()
        .map(|_| (0..n).map(|_| prng.random_range(-1.0..1.0)).collect())
        .collect();
    let base = |p: Vec2, j: usize| 0.3 * (j as f64 + 10.0 * p.x + 7.0 * p.y).sin();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, synth.noise.max(0.0)).expect("finite noise");
    let home = layout.home.position();
    (0..n_trials)
        .map(|_| {
            let mut order: Vec<usize> = (0..paths.len()).collect();
            order.shuffle(&mut rng);
            let mut rows: Vec<LogRow> = Vec::new();
            let mut visits = Vec::new();
            let push = |rows: &mut Vec<LogRow>, p: Vec2, k: usize, rng: &mut ChaCha8Rng| {
                let act = (0..n)
                    .map(|j| base(p, j) + synth.class_gain * patterns[k][j] + noise.sample(rng))
                    .collect();
                rows.push(row(rows.len(), p, act));
            };
            for &k in &order {
                let path = paths[k];
                let holding = |prospective: bool| {
                    layout.segments.iter().filter(move |s| {
                        s.classes.contains(&path) && (s.direction == crate::maze::CodingDirection::Prospective) == prospective
                    })
                };
                push(&mut rows, home, k, &mut rng);
                for s in holding(true) {
                    for p in segment_points(&s.rect, synth.spacing) {
                        push(&mut rows, p, k, &mut rng);
                    }
                }
                push(&mut rows, layout.rewards[k].pos, k, &mut rng);
                visits.push(PathVisit {
                    path,
                    returned_home: true,
                    step: rows.len() - 1,
                });
                for s in holding(false) {
                    for p in segment_points(&s.rect, synth.spacing).into_iter().rev() {
                        push(&mut rows, p, k, &mut rng);
                    }
                }
            }
            let steps = rows.len();
            let mut rewards: Vec<u8> = visits.iter().map(|v: &PathVisit| v.path).collect();
            rewards.sort_unstable();
            let mut summary = TrialSummary {
                fitness: 0.0,
                elapsed_steps: steps,
                visits,
                rewards_obtained: rewards,
                num_repeats: 0,
            };
            summary.fitness = crate::maze::compute_fitness(&summary);
            TrialLog { rows, summary }
        })
        .collect()
}
