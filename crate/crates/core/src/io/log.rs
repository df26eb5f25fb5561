//! Trial logs as CSV with a TOML summary alongside.
//!
//! ```text
//! # tmaze-log v1 config_hash=<hex> code_version=<v> agent=<id> seed=<u64>
//! step,x,y,heading,in_0,...,in_90,r_0,...,r_49,motor_l,motor_r,event
//! ```
//!
//! Several events on one step are joined with `;`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_input, write_atomic, ArtifactHeader};
use crate::maze::{Event, LogRow, PathVisit, Pose, TrialLog, TrialSummary};

pub const LOG_KIND: &str = "tmaze-log v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VisitRecord {
    path: u8,
    returned_home: bool,
    step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummaryFile {
    config_hash: String,
    code_version: String,
    agent: String,
    seed: u64,
    fitness: f64,
    elapsed_steps: usize,
    rewards_obtained: Vec<u8>,
    num_repeats: u32,
    visits: Vec<VisitRecord>,
}

pub fn summary_path(log_path: &Path) -> PathBuf {
    log_path.with_extension("summary.toml")
}

pub fn log_csv(log: &TrialLog, header: &ArtifactHeader) -> String {
    let n_in = log.rows.first().map_or(0, |r| r.inputs.len());
    let n_r = log.rows.first().map_or(0, |r| r.activities.len());
    let mut cols = vec!["step".to_string(), "x".into(), "y".into(), "heading".into()];
    cols.extend((0..n_in).map(|i| format!("in_{i}")));
    cols.extend((0..n_r).map(|i| format!("r_{i}")));
    cols.extend(["motor_l".into(), "motor_r".into(), "event".into()]);

    let mut out = header.line(LOG_KIND);
    out.push_str(&cols.join(","));
    out.push('\n');
    for r in &log.rows {
        let mut f: Vec<String> = vec![r.step.to_string(), r.pose.x.to_string(), r.pose.y.to_string(), r.pose.heading.to_string()];
        f.extend(r.inputs.iter().map(f64::to_string));
        f.extend(r.activities.iter().map(f64::to_string));
        f.push(r.motor[0].to_string());
        f.push(r.motor[1].to_string());
        f.push(r.events.iter().map(Event::to_string).collect::<Vec<_>>().join(";"));
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}

pub fn summary_toml(s: &TrialSummary, header: &ArtifactHeader) -> String {
    let file = SummaryFile {
        config_hash: header.config_hash.clone(),
        code_version: header.code_version.clone(),
        agent: header.agent.clone(),
        seed: header.seed.unwrap_or(0),
        fitness: s.fitness,
        elapsed_steps: s.elapsed_steps,
        rewards_obtained: s.rewards_obtained.clone(),
        num_repeats: s.num_repeats,
        visits: s
            .visits
            .iter()
            .map(|v| VisitRecord {
                path: v.path,
                returned_home: v.returned_home,
                step: v.step,
            })
            .collect(),
    };
    toml::to_string(&file).expect("summary serialises")
}

pub fn save_trial_log(path: &Path, log: &TrialLog, header: &ArtifactHeader) -> Result<()> {
    write_atomic(path, log_csv(log, header).as_bytes())?;
    write_atomic(&summary_path(path), summary_toml(&log.summary, header).as_bytes())
}

fn parse_rows(text: &str, path: &Path) -> Result<(ArtifactHeader, Vec<LogRow>)> {
    let first = text.lines().next().unwrap_or("");
    let header = ArtifactHeader::parse(first, LOG_KIND).map_err(|m| Error::parse(path, 1, m))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(text.as_bytes());
    let cols = rdr.headers()?.clone();
    let n_in = cols.iter().filter(|c| c.starts_with("in_")).count();
    let n_r = cols.iter().filter(|c| c.starts_with("r_")).count();
    if cols.len() != 7 + n_in + n_r || &cols[0] != "step" || &cols[cols.len() - 1] != "event" {
        return Err(Error::parse(path, 2, "unexpected log columns"));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad number in column `{}`", &cols[i])))
        };
        let step = rec[0]
            .parse()
            .map_err(|_| Error::parse(path, line, "bad step"))?;
        let inputs = (4..4 + n_in).map(num).collect::<Result<Vec<_>>>()?;
        let activities = (4 + n_in..4 + n_in + n_r).map(num).collect::<Result<Vec<_>>>()?;
        let m = 4 + n_in + n_r;
        let ev = &rec[m + 2];
        let events = if ev.is_empty() {
            Vec::new()
        } else {
            ev.split(';')
                .map(|e| e.parse().map_err(|_| Error::parse(path, line, format!("bad event `{e}`"))))
                .collect::<Result<Vec<Event>>>()?
        };
        rows.push(LogRow {
            step,
            pose: Pose::new(num(1)?, num(2)?, num(3)?),
            inputs,
            activities,
            motor: [num(m)?, num(m + 1)?],
            events,
        });
    }
    Ok((header, rows))
}

pub fn parse_summary(text: &str, path: &Path) -> Result<(ArtifactHeader, TrialSummary)> {
    let f: SummaryFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1);
        Error::parse(path, line, e.message().trim().to_string())
    })?;
    let header = ArtifactHeader {
        config_hash: f.config_hash,
        code_version: f.code_version,
        agent: f.agent,
        seed: Some(f.seed),
    };
    let summary = TrialSummary {
        fitness: f.fitness,
        elapsed_steps: f.elapsed_steps,
        visits: f
            .visits
            .into_iter()
            .map(|v| PathVisit {
                path: v.path,
                returned_home: v.returned_home,
                step: v.step,
            })
            .collect(),
        rewards_obtained: f.rewards_obtained,
        num_repeats: f.num_repeats,
    };
    Ok((header, summary))
}

pub fn parse_trial_log(csv_text: &str, summary_text: &str, path: &Path) -> Result<(ArtifactHeader, TrialLog)> {
    let (header, rows) = parse_rows(csv_text, path)?;
    let (sh, summary) = parse_summary(summary_text, &summary_path(path))?;
    if sh.config_hash != header.config_hash {
        return Err(Error::MixedHash(header.config_hash, sh.config_hash));
    }
    Ok((header, TrialLog { rows, summary }))
}

pub fn load_trial_log(path: &Path) -> Result<(ArtifactHeader, TrialLog)> {
    let csv_text = read_input(path)?;
    let summary_text = read_input(&summary_path(path))?;
    parse_trial_log(&csv_text, &summary_text, path)
}

/// Only the summary, for analyses that do not need per-step rows.
pub fn load_trial_summary(path: &Path) -> Result<(ArtifactHeader, TrialSummary)> {
    let sp = summary_path(path);
    parse_summary(&read_input(&sp)?, &sp)
}
