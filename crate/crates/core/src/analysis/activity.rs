//! Per-bin mean activity matrices.

use crate::analysis::BinGrid;
use crate::maze::TrialLog;

/// Bins × neurons matrix of mean activity, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BinMatrix {
    pub n_bins: usize,
    pub n_neurons: usize,
    pub values: Vec<f64>,
    /// Steps that fell in each bin; 0 marks an unvisited (masked) row.
    pub counts: Vec<usize>,
}

impl BinMatrix {
    pub fn row(&self, bin: usize) -> &[f64] {
        &self.values[bin * self.n_neurons..(bin + 1) * self.n_neurons]
    }

    pub fn visited(&self, bin: usize) -> bool {
        self.counts[bin] > 0
    }

    pub fn visited_bins(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_bins).filter(|&b| self.visited(b))
    }
}

fn neurons_in(log: &TrialLog) -> usize {
    log.rows.first().map_or(0, |r| r.activities.len())
}

/// Mean activity of every neuron over the steps spent in each bin.
pub fn bin_activity_matrix(log: &TrialLog, grid: &BinGrid) -> BinMatrix {
    bin_activity_matrix_where(log, grid, |_| true)
}

/// Like [`bin_activity_matrix`], restricted to rows whose index passes `keep`.
pub fn bin_activity_matrix_where(log: &TrialLog, grid: &BinGrid, keep: impl Fn(usize) -> bool) -> BinMatrix {
    let n = neurons_in(log);
    let mut values = vec![0.0; grid.len() * n];
    let mut counts = vec![0; grid.len()];
    for (i, row) in log.rows.iter().enumerate() {
        if !keep(i) {
            continue;
        }
        let b = grid.locate(row.pose.position());
        counts[b] += 1;
        for (v, a) in values[b * n..(b + 1) * n].iter_mut().zip(&row.activities) {
            *v += a;
        }
    }
    for (b, &c) in counts.iter().enumerate() {
        if c > 0 {
            for v in &mut values[b * n..(b + 1) * n] {
                *v /= c as f64;
            }
        }
    }
    BinMatrix {
        n_bins: grid.len(),
        n_neurons: n,
        values,
        counts,
    }
}

/// Template matrix averaged over the trials that visited each bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedActivityMatrix {
    pub n_bins: usize,
    pub n_neurons: usize,
    pub values: Vec<f64>,
    /// Number of contributing trials per bin; rows with 0 are excluded from decoding.
    pub support: Vec<usize>,
}

impl ExpectedActivityMatrix {
    pub fn row(&self, bin: usize) -> &[f64] {
        &self.values[bin * self.n_neurons..(bin + 1) * self.n_neurons]
    }

    pub fn supported(&self, bin: usize) -> bool {
        self.support[bin] > 0
    }

    pub fn supported_count(&self) -> usize {
        self.support.iter().filter(|&&s| s > 0).count()
    }
}

/// Average per-trial matrices bin by bin.
pub fn expected_from_matrices(mats: &[BinMatrix]) -> ExpectedActivityMatrix {
    let n_bins = mats.first().map_or(0, |m| m.n_bins);
    let n = mats.iter().map(|m| m.n_neurons).max().unwrap_or(0);
    let mut values = vec![0.0; n_bins * n];
    let mut support = vec![0; n_bins];
    for m in mats {
        for b in m.visited_bins() {
            support[b] += 1;
            for (v, a) in values[b * n..(b + 1) * n].iter_mut().zip(m.row(b)) {
                *v += a;
            }
        }
    }
    for (b, &s) in support.iter().enumerate() {
        if s > 0 {
            for v in &mut values[b * n..(b + 1) * n] {
                *v /= s as f64;
            }
        }
    }
    ExpectedActivityMatrix {
        n_bins,
        n_neurons: n,
        values,
        support,
    }
}

pub fn expected_matrix(logs: &[TrialLog], grid: &BinGrid) -> ExpectedActivityMatrix {
    let mats: Vec<BinMatrix> = logs.iter().map(|l| bin_activity_matrix(l, grid)).collect();
    let mut e = expected_from_matrices(&mats);
    if mats.is_empty() {
        e.n_bins = grid.len();
        e.support = vec![0; grid.len()];
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::synthetic::log_from_positions;
    use crate::geometry::Vec2;
    use crate::maze::canonical;

    fn grid() -> BinGrid {
        BinGrid::new(&canonical::triple_t(), 0.037, 0.08, 0.10)
    }

    #[test]
    fn stationary_robot_fills_one_row() {
        let g = grid();
        let p = Vec2::new(0.8, 0.05);
        let log = log_from_positions(&[p, p, p], |i, _| vec![i as f64, 1.0]);
        let m = bin_activity_matrix(&log, &g);
        let b = g.locate(p);
        assert_eq!(m.visited_bins().collect::<Vec<_>>(), vec![b]);
        assert_eq!(m.row(b), &[1.0, 1.0]);
    }

    #[test]
    fn bin_visited_by_some_trials() {
        let g = grid();
        let a = Vec2::new(0.8, 0.05);
        let far = Vec2::new(0.05, 0.6);
        let mut logs = Vec::new();
        for t in 0..15 {
            let pos = if t < 3 { vec![a, far] } else { vec![far] };
            logs.push(log_from_positions(&pos, |_, _| vec![t as f64]));
        }
        let e = expected_matrix(&logs, &g);
        assert_eq!(e.support[g.locate(a)], 3);
        assert_eq!(e.row(g.locate(a)), &[1.0]);
        assert_eq!(e.support[g.locate(far)], 15);
    }
}
