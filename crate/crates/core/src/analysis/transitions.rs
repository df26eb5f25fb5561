//! Which reward path follows which.

use crate::maze::TrialSummary;

/// Reporting threshold for path-to-path edges.
pub const EDGE_THRESHOLD: f64 = 0.33;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    /// Paths numbered 1..=n; `counts[i][j]` counts path i+1 followed by path j+1.
    pub counts: Vec<Vec<u32>>,
    pub probs: Vec<Vec<f64>>,
    /// Rows with no outgoing transitions (left all zero).
    pub zero_rows: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: u8,
    pub to: u8,
    pub probability: f64,
}

pub fn transition_counts(orders: &[Vec<u8>], n_paths: usize) -> Vec<Vec<u32>> {
    let mut counts = vec![vec![0; n_paths]; n_paths];
    for order in orders {
        for w in order.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            if (1..=n_paths).contains(&a) && (1..=n_paths).contains(&b) {
                counts[a - 1][b - 1] += 1;
            }
        }
    }
    counts
}

pub fn transition_matrix_from_orders(orders: &[Vec<u8>], n_paths: usize) -> TransitionMatrix {
    let counts = transition_counts(orders, n_paths);
    let mut zero_rows = Vec::new();
    let probs = counts
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let total: u32 = row.iter().sum();
            if total == 0 {
                zero_rows.push(i as u8 + 1);
                vec![0.0; n_paths]
            } else {
                row.iter().map(|&c| c as f64 / total as f64).collect()
            }
        })
        .collect();
    TransitionMatrix {
        counts,
        probs,
        zero_rows,
    }
}

pub fn transition_matrix(summaries: &[TrialSummary], n_paths: usize) -> TransitionMatrix {
    let orders: Vec<Vec<u8>> = summaries.iter().map(|s| s.path_order()).collect();
    transition_matrix_from_orders(&orders, n_paths)
}

impl TransitionMatrix {
    pub fn edges(&self, threshold: f64) -> Vec<Edge> {
        let mut out = Vec::new();
        for (i, row) in self.probs.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if p > threshold {
                    out.push(Edge {
                        from: i as u8 + 1,
                        to: j as u8 + 1,
                        probability: p,
                    });
                }
            }
        }
        out
    }
}
