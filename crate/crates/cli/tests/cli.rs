use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tmaze_core::io::genotype::save_genotype;
use tmaze_core::io::load_trial_summary;
use tmaze_core::Genotype;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn tmaze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmaze")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn null_genotype_demo_scores_zero_everywhere() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("null.genotype");
    save_genotype(&Genotype::zeros(), &g).unwrap();
    let run = tmp.path().join("run");
    let cfg = repo().join("configs/full.toml");
    let out = tmaze(&["demo", "--config", s(&cfg), "--out", s(&run), "--genotype", s(&g)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for k in 1..=20 {
        let (h, summary) = load_trial_summary(&run.join(format!("logs/trial_{k:02}.csv"))).unwrap();
        assert_eq!(summary.fitness, 0.0);
        assert_eq!(summary.elapsed_steps, 5000);
        assert!(summary.visits.is_empty());
        assert_eq!(h.agent, "seed1");
    }

    let out = tmaze(&["analyze", "transitions", "--config", s(&cfg), "--out", s(&run)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(run.join("reports/transitions.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ends_with(",0,true")), "{text}");
}

#[test]
fn missing_log_directory_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let nowhere = tmp.path().join("nowhere");
    let out = tmaze(&["analyze", "spatial", "--logs", s(&nowhere), "--out", s(tmp.path())]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nowhere"), "{err}");
}

#[test]
fn unknown_config_key_names_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "master_seed = 2\n[trial]\nmax_step = 10\n").unwrap();
    let out = tmaze(&["validate-layout", "--config", s(&cfg)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("max_step") && err.contains(":3"), "{err}");
}

#[test]
fn shipped_layouts_validate() {
    let out = tmaze(&["validate-layout", "--layout", s(&repo().join("layouts/triple_t.layout"))]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("corridor bins   110") && text.trim_end().ends_with("ok"), "{text}");

    let desk = repo().join("configs/desk.toml");
    assert!(tmaze(&["validate-layout", "--config", s(&desk)]).status.success());
}

#[test]
fn layout_without_rewards_fails_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(repo().join("layouts/triple_t.layout")).unwrap();
    let broken: String = text.lines().filter(|l| !l.starts_with("reward ")).map(|l| format!("{l}\n")).collect();
    let path = tmp.path().join("broken.layout");
    std::fs::write(&path, broken).unwrap();
    let out = tmaze(&["validate-layout", "--layout", s(&path)]);
    assert!(!out.status.success());
}

#[test]
fn zero_jobs_is_rejected() {
    let out = tmaze(&["--jobs", "0", "validate-layout"]);
    assert!(!out.status.success());
}
