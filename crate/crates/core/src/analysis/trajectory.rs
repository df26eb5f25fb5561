//! Path-dependent decoding on shared maze segments.
//!
//! A traversal is every logged step inside a segment that belongs to the
//! same lap. Prospective segments label it with the next path visited,
//! retrospective ones with the path the robot is coming back from.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::activity::{bin_activity_matrix_where, expected_from_matrices, BinMatrix, ExpectedActivityMatrix};
use crate::analysis::decode::euclidean;
use crate::analysis::stats::t_test_vs_chance;
use crate::analysis::BinGrid;
use crate::error::{Error, Result};
use crate::maze::{CodingDirection, SegmentRegion, TrialLog};

#[derive(Debug, Clone, PartialEq)]
pub struct Traversal {
    /// Row indices into the log.
    pub rows: Vec<usize>,
    pub label: u8,
}

/// Traversals of `seg` in `log` whose label is one of the segment's classes.
pub fn traversals(log: &TrialLog, seg: &SegmentRegion) -> Vec<Traversal> {
    let visits = &log.summary.visits;
    let mut out: Vec<(usize, Traversal)> = Vec::new();
    for (i, row) in log.rows.iter().enumerate() {
        if !seg.rect.contains(row.pose.position()) {
            continue;
        }
        let key = match seg.direction {
            CodingDirection::Prospective => visits.iter().position(|v| v.step >= row.step),
            CodingDirection::Retrospective => visits.iter().rposition(|v| v.step <= row.step),
        };
        let Some(k) = key else { continue };
        if !seg.classes.contains(&visits[k].path) {
            continue;
        }
        match out.last_mut() {
            Some((last, t)) if *last == k => t.rows.push(i),
            _ => out.push((
                k,
                Traversal {
                    rows: vec![i],
                    label: visits[k].path,
                },
            )),
        }
    }
    out.into_iter().map(|(_, t)| t).collect()
}

/// Per-bin activity of one traversal.
pub fn traversal_matrix(log: &TrialLog, t: &Traversal, seg: &SegmentRegion, grid: &BinGrid) -> Result<BinMatrix> {
    if t.rows.is_empty() {
        return Err(Error::EmptyTraversal(seg.name.clone()));
    }
    let mut keep = vec![false; log.rows.len()];
    for &i in &t.rows {
        keep[i] = true;
    }
    Ok(bin_activity_matrix_where(log, grid, |i| keep[i]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub label: u8,
    pub matrix: BinMatrix,
}

pub fn labeled_traversals(logs: &[TrialLog], seg: &SegmentRegion, grid: &BinGrid) -> Result<Vec<LabeledMatrix>> {
    let mut out = Vec::new();
    for log in logs {
        for t in traversals(log, seg) {
            out.push(LabeledMatrix {
                label: t.label,
                matrix: traversal_matrix(log, &t, seg, grid)?,
            });
        }
    }
    Ok(out)
}

/// Expected segment activity for each path class.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTemplate {
    pub segment: String,
    pub classes: Vec<u8>,
    pub expected: Vec<ExpectedActivityMatrix>,
}

impl SegmentTemplate {
    pub fn build(seg: &SegmentRegion, samples: &[LabeledMatrix]) -> Self {
        let expected = seg
            .classes
            .iter()
            .map(|&c| {
                let mats: Vec<BinMatrix> = samples.iter().filter(|s| s.label == c).map(|s| s.matrix.clone()).collect();
                let mut e = expected_from_matrices(&mats);
                if mats.is_empty() {
                    let n_bins = samples.first().map_or(0, |s| s.matrix.n_bins);
                    e.n_bins = n_bins;
                    e.support = vec![0; n_bins];
                }
                e
            })
            .collect();
        SegmentTemplate {
            segment: seg.name.clone(),
            classes: seg.classes.clone(),
            expected,
        }
    }

    pub fn chance(&self) -> f64 {
        1.0 / self.classes.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraversalPrediction {
    pub actual: u8,
    /// None when no class template covers any bin of the traversal.
    pub predicted: Option<u8>,
    pub error_bins: f64,
}

impl TraversalPrediction {
    pub fn correct(&self) -> bool {
        self.predicted == Some(self.actual)
    }
}

/// Class whose template is closest on average over the traversal's bins;
/// ties go to the first class. The bin error compares each visited bin with
/// the nearest bin of the chosen class template.
pub fn classify(test: &LabeledMatrix, template: &SegmentTemplate, grid: &BinGrid) -> TraversalPrediction {
    let m = &test.matrix;
    let mut best: Option<(f64, usize)> = None;
    for (ci, e) in template.expected.iter().enumerate() {
        let ds: Vec<f64> = m
            .visited_bins()
            .filter(|&b| e.supported(b))
            .map(|b| euclidean(m.row(b), e.row(b)))
            .collect();
        if ds.is_empty() {
            continue;
        }
        let d = ds.iter().sum::<f64>() / ds.len() as f64;
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, ci));
        }
    }
    let Some((_, ci)) = best else {
        return TraversalPrediction {
            actual: test.label,
            predicted: None,
            error_bins: f64::NAN,
        };
    };
    let e = &template.expected[ci];
    let errs: Vec<f64> = m
        .visited_bins()
        .map(|b| {
            let mut nb: Option<(f64, usize)> = None;
            for c in (0..e.n_bins).filter(|&c| e.supported(c)) {
                let d = euclidean(m.row(b), e.row(c));
                if nb.is_none_or(|(bd, _)| d < bd) {
                    nb = Some((d, c));
                }
            }
            grid.error_bins(b, nb.expect("chosen template has support").1)
        })
        .collect();
    TraversalPrediction {
        actual: test.label,
        predicted: Some(template.classes[ci]),
        error_bins: errs.iter().sum::<f64>() / errs.len() as f64,
    }
}

pub fn fraction_correct(preds: &[TraversalPrediction]) -> f64 {
    preds.iter().filter(|p| p.correct()).count() as f64 / preds.len().max(1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentResult {
    pub segment: String,
    pub direction: CodingDirection,
    pub n_classes: usize,
    pub chance: f64,
    pub tested: usize,
    pub correct: usize,
    pub fraction_correct: f64,
    pub mean_error_bins: f64,
    /// Two-sided t-test against chance; None when undefined.
    pub p_value: Option<f64>,
}

/// Decode every test traversal of `seg` against templates built from `build` logs.
pub fn trajectory_decode(
    seg: &SegmentRegion,
    build: &[TrialLog],
    test: &[TrialLog],
    grid: &BinGrid,
) -> Result<Vec<TraversalPrediction>> {
    let template = SegmentTemplate::build(seg, &labeled_traversals(build, seg, grid)?);
    Ok(labeled_traversals(test, seg, grid)?
        .iter()
        .map(|t| classify(t, &template, grid))
        .collect())
}

pub fn segment_result(seg: &SegmentRegion, preds: &[TraversalPrediction]) -> SegmentResult {
    let correct = preds.iter().filter(|p| p.correct()).count();
    let chance = 1.0 / seg.classes.len() as f64;
    let errs: Vec<f64> = preds.iter().map(|p| p.error_bins).filter(|e| e.is_finite()).collect();
    SegmentResult {
        segment: seg.name.clone(),
        direction: seg.direction,
        n_classes: seg.classes.len(),
        chance,
        tested: preds.len(),
        correct,
        fraction_correct: fraction_correct(preds),
        mean_error_bins: if errs.is_empty() {
            f64::NAN
        } else {
            errs.iter().sum::<f64>() / errs.len() as f64
        },
        p_value: t_test_vs_chance(correct, preds.len(), chance).ok(),
    }
}

/// Per-segment results pooled over agents, each split into build and test logs.
pub fn trajectory_report(
    segments: &[SegmentRegion],
    agents: &[Vec<TrialLog>],
    grid: &BinGrid,
    build: usize,
) -> Result<Vec<SegmentResult>> {
    segments
        .iter()
        .map(|seg| {
            let mut preds = Vec::new();
            for logs in agents {
                let split = build.min(logs.len());
                preds.extend(trajectory_decode(seg, &logs[..split], &logs[split..], grid)?);
            }
            Ok(segment_result(seg, &preds))
        })
        .collect()
}

/// Accuracy with build-traversal labels permuted, once per shuffle.
pub fn shuffled_template_null<R: Rng + ?Sized>(
    seg: &SegmentRegion,
    build: &[LabeledMatrix],
    test: &[LabeledMatrix],
    grid: &BinGrid,
    shuffles: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut labels: Vec<u8> = build.iter().map(|b| b.label).collect();
    let mut shuffled = build.to_vec();
    (0..shuffles)
        .map(|_| {
            labels.shuffle(rng);
            for (s, &l) in shuffled.iter_mut().zip(&labels) {
                s.label = l;
            }
            let template = SegmentTemplate::build(seg, &shuffled);
            let preds: Vec<TraversalPrediction> = test.iter().map(|t| classify(t, &template, grid)).collect();
            fraction_correct(&preds)
        })
        .collect()
}
