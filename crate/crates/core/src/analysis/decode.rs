//! Population decoding of location from recurrent activity.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::analysis::activity::{bin_activity_matrix, expected_matrix, BinMatrix, ExpectedActivityMatrix};
use crate::analysis::BinGrid;
use crate::error::{Error, Result};
use crate::maze::TrialLog;

/// Trials used to build templates; the rest of each agent's logs are tested.
pub const BUILD_TRIALS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinPrediction {
    pub actual: usize,
    pub predicted: usize,
    pub error_bins: f64,
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Supported expected row nearest to `v`; ties go to the lowest bin index.
pub fn nearest_row(v: &[f64], expected: &ExpectedActivityMatrix) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for b in (0..expected.n_bins).filter(|&b| expected.supported(b)) {
        let d = euclidean(v, expected.row(b));
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, b));
        }
    }
    best.map(|(_, b)| b).ok_or(Error::NoSupport)
}

pub fn decode_matrix(test: &BinMatrix, expected: &ExpectedActivityMatrix, grid: &BinGrid) -> Result<Vec<BinPrediction>> {
    test.visited_bins()
        .map(|actual| {
            let predicted = nearest_row(test.row(actual), expected)?;
            Ok(BinPrediction {
                actual,
                predicted,
                error_bins: grid.error_bins(actual, predicted),
            })
        })
        .collect()
}

/// Predict the bin of every bin the test trial visited.
pub fn decode_location(test: &TrialLog, expected: &ExpectedActivityMatrix, grid: &BinGrid) -> Result<Vec<BinPrediction>> {
    decode_matrix(&bin_activity_matrix(test, grid), expected, grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinErrorCell {
    pub bin: usize,
    pub col: usize,
    pub row: usize,
    pub mean_error: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialReport {
    pub predictions: Vec<BinPrediction>,
    pub fraction_exact: f64,
    pub mean_error: f64,
    /// Bins never tested are absent.
    pub bin_errors: Vec<BinErrorCell>,
}

pub fn summarize_predictions(predictions: Vec<BinPrediction>, grid: &BinGrid) -> SpatialReport {
    let n = predictions.len().max(1) as f64;
    let exact = predictions.iter().filter(|p| p.predicted == p.actual).count() as f64;
    let mean_error = predictions.iter().map(|p| p.error_bins).sum::<f64>() / n;
    let mut sums = vec![(0.0, 0usize); grid.len()];
    for p in &predictions {
        sums[p.actual].0 += p.error_bins;
        sums[p.actual].1 += 1;
    }
    let bin_errors = sums
        .iter()
        .enumerate()
        .filter(|(_, s)| s.1 > 0)
        .map(|(b, s)| BinErrorCell {
            bin: b,
            col: grid.bins[b].col,
            row: grid.bins[b].row,
            mean_error: s.0 / s.1 as f64,
            count: s.1,
        })
        .collect();
    SpatialReport {
        fraction_exact: exact / n,
        mean_error,
        bin_errors,
        predictions,
    }
}

/// Build on each agent's first `build` logs, test on the rest, pool everything.
pub fn spatial_decoding_report(agents: &[Vec<TrialLog>], grid: &BinGrid, build: usize) -> Result<SpatialReport> {
    let mut predictions = Vec::new();
    for logs in agents {
        if logs.len() <= build {
            return Err(Error::Invalid(format!(
                "spatial decoding needs more than {build} logs per agent, found {}",
                logs.len()
            )));
        }
        let expected = expected_matrix(&logs[..build], grid);
        for test in &logs[build..] {
            predictions.extend(decode_location(test, &expected, grid)?);
        }
    }
    Ok(summarize_predictions(predictions, grid))
}

/// Exact-prediction fraction after shuffling the true labels, once per shuffle.
pub fn label_shuffle_null<R: Rng + ?Sized>(predictions: &[BinPrediction], shuffles: usize, rng: &mut R) -> Vec<f64> {
    let mut labels: Vec<usize> = predictions.iter().map(|p| p.actual).collect();
    let n = predictions.len().max(1) as f64;
    (0..shuffles)
        .map(|_| {
            labels.shuffle(rng);
            predictions.iter().zip(&labels).filter(|(p, &l)| p.predicted == l).count() as f64 / n
        })
        .collect()
}

/// [`label_shuffle_null`] with its own seeded generator.
pub fn label_shuffle_null_seeded(predictions: &[BinPrediction], shuffles: usize, seed: u64) -> Vec<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    label_shuffle_null(predictions, shuffles, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::canonical;

    fn one_hot(n_bins: usize, n: usize) -> ExpectedActivityMatrix {
        let mut values = vec![0.0; n_bins * n];
        for b in 0..n_bins {
            values[b * n + b % n] = 1.0 + (b / n) as f64;
        }
        ExpectedActivityMatrix {
            n_bins,
            n_neurons: n,
            values,
            support: vec![1; n_bins],
        }
    }

    #[test]
    fn exact_row_is_recovered() {
        let e = one_hot(6, 6);
        for k in 0..6 {
            assert_eq!(nearest_row(e.row(k), &e).unwrap(), k);
        }
    }

    #[test]
    fn ties_pick_lowest_bin() {
        let mut e = one_hot(8, 8);
        // rows 3 and 7 both at distance 1 from the origin-shifted probe
        e.support = vec![0, 0, 0, 1, 0, 0, 0, 1];
        let v = vec![0.0; 8];
        assert_eq!(nearest_row(&v, &e).unwrap(), 3);
    }

    #[test]
    fn no_support_is_an_error() {
        let mut e = one_hot(4, 4);
        e.support = vec![0; 4];
        assert!(matches!(nearest_row(&[0.0; 4], &e), Err(Error::NoSupport)));
    }

    #[test]
    fn perfect_templates_decode_exactly() {
        let g = BinGrid::new(&canonical::triple_t(), 0.037, 0.08, 0.10);
        let preds: Vec<BinPrediction> = (0..g.len())
            .map(|b| BinPrediction {
                actual: b,
                predicted: b,
                error_bins: 0.0,
            })
            .collect();
        let r = summarize_predictions(preds, &g);
        assert_eq!(r.fraction_exact, 1.0);
        assert_eq!(r.mean_error, 0.0);
        assert_eq!(r.bin_errors.len(), 110);
    }
}
