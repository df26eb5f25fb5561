//! CSV reports, each starting with an artifact header comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::ablation::AblationRow;
use crate::analysis::decode::SpatialReport;
use crate::analysis::trajectory::SegmentResult;
use crate::analysis::transitions::TransitionMatrix;
use crate::error::Result;
use crate::io::{write_atomic, ArtifactHeader};

pub const REPORT_KIND: &str = "tmaze-report";

fn opt(v: Option<f64>) -> String {
    v.map(|p| p.to_string()).unwrap_or_default()
}

fn start(header: &ArtifactHeader, name: &str, columns: &str) -> String {
    let mut s = header.line(&format!("{REPORT_KIND} {name}"));
    s.push_str(columns);
    s.push('\n');
    s
}

pub fn bin_error_csv(r: &SpatialReport, header: &ArtifactHeader) -> String {
    let mut s = start(header, "bin-error", "bin,col,row,mean_error,count");
    for c in &r.bin_errors {
        writeln!(s, "{},{},{},{},{}", c.bin, c.col, c.row, c.mean_error, c.count).unwrap();
    }
    s
}

pub fn spatial_summary_csv(r: &SpatialReport, null_mean: Option<f64>, header: &ArtifactHeader) -> String {
    let mut s = start(header, "spatial", "tested_bins,fraction_exact,mean_error_bins,shuffled_fraction_exact");
    writeln!(s, "{},{},{},{}", r.predictions.len(), r.fraction_exact, r.mean_error, opt(null_mean)).unwrap();
    s
}

pub fn trajectory_csv(rows: &[SegmentResult], header: &ArtifactHeader) -> String {
    let mut s = start(
        header,
        "trajectory",
        "segment,direction,classes,chance,tested,correct,fraction_correct,mean_error_bins,p_value",
    );
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.segment,
            r.direction,
            r.n_classes,
            r.chance,
            r.tested,
            r.correct,
            r.fraction_correct,
            r.mean_error_bins,
            opt(r.p_value)
        )
        .unwrap();
    }
    s
}

pub fn ablation_csv(rows: &[AblationRow], alpha: f64, header: &ArtifactHeader) -> String {
    let mut s = start(
        header,
        "ablation",
        "ablation,trials,mean_fitness,ci_fitness,mean_elapsed,ci_elapsed,p_fitness,p_elapsed,significant",
    );
    for r in rows {
        let sig = r.p_fitness.is_some_and(|p| p < alpha);
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.ablation,
            r.fitness.len(),
            r.mean_fitness,
            r.ci_fitness,
            r.mean_elapsed,
            r.ci_elapsed,
            opt(r.p_fitness),
            opt(r.p_elapsed),
            sig
        )
        .unwrap();
    }
    s
}

pub fn transition_matrix_csv(t: &TransitionMatrix, header: &ArtifactHeader) -> String {
    let n = t.probs.len();
    let cols: Vec<String> = (1..=n).map(|j| format!("p_to_{j}")).collect();
    let mut s = start(header, "transitions", &format!("from,{},outgoing,zero_row", cols.join(",")));
    for (i, row) in t.probs.iter().enumerate() {
        let total: u32 = t.counts[i].iter().sum();
        let ps: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(s, "{},{},{},{}", i + 1, ps.join(","), total, total == 0).unwrap();
    }
    s
}

pub fn edges_csv(t: &TransitionMatrix, threshold: f64, header: &ArtifactHeader) -> String {
    let mut s = start(header, "edges", "from,to,probability");
    for e in t.edges(threshold) {
        writeln!(s, "{},{},{}", e.from, e.to, e.probability).unwrap();
    }
    s
}

pub fn write_report(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::transitions::transition_matrix_from_orders;

    #[test]
    fn report_starts_with_provenance() {
        let h = ArtifactHeader::new("deadbeef", "agent 3");
        let t = transition_matrix_from_orders(&[vec![1, 4, 3, 2]], 4);
        let text = edges_csv(&t, 0.33, &h);
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("# tmaze-report edges config_hash=deadbeef"));
        assert!(first.contains("agent=agent_3"));
        assert_eq!(text.lines().count(), 2 + 3);
    }
}
