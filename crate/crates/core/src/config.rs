//! Experiment configuration file.
//!
//! Plain TOML with one table per subsystem; unknown keys are rejected.
//! Missing keys take their defaults, which describe the full-scale
//! triple T-maze experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::BinGrid;
use crate::error::{Error, Result};
use crate::evolution::checkpoint::sha256_hex;
use crate::evolution::EvolutionConfig;
use crate::io::read_input;
use crate::maze::file::{load_layout, write_layout};
use crate::maze::{canonical, Environment, MazeLayout, RobotBody, TrialConfig};
use crate::rnn::{AvoidanceConfig, DEFAULT_LEAK, N_HIDDEN, N_OUTPUTS};
use crate::sensors::{SensorConfig, N_INPUTS};

pub const BUILTIN_PREFIX: &str = "builtin:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MazeConfig {
    /// `builtin:triple-t`, `builtin:double-t`, or a layout file path
    /// (relative paths resolve against the config file's directory).
    pub layout: String,
}

impl Default for MazeConfig {
    fn default() -> Self {
        Self {
            layout: "builtin:triple-t".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RnnConfig {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
    pub leak: f64,
}

impl Default for RnnConfig {
    fn default() -> Self {
        Self {
            inputs: N_INPUTS,
            hidden: N_HIDDEN,
            outputs: N_OUTPUTS,
            leak: DEFAULT_LEAK,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub bin_width: f64,
    pub bin_height: f64,
    /// Corridor bin count the triple-T layout must produce.
    pub expected_bins: usize,
    pub demo_trials: usize,
    /// Leading demo trials used to build templates; the rest are tested.
    pub build_trials: usize,
    pub transition_threshold: f64,
    pub ablation_trials: usize,
    pub ablation_alpha: f64,
    pub shuffles: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            bin_width: 0.08,
            bin_height: 0.10,
            expected_bins: 110,
            demo_trials: 20,
            build_trials: 15,
            transition_threshold: 0.33,
            ablation_trials: 20,
            ablation_alpha: 0.01 / 6.0,
            shuffles: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub maze: MazeConfig,
    pub robot: RobotBody,
    pub sensors: SensorConfig,
    pub avoidance: AvoidanceConfig,
    pub trial: TrialConfig,
    pub rnn: RnnConfig,
    pub evolution: EvolutionConfig,
    pub analysis: AnalysisConfig,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 1,
            output_dir: PathBuf::from("runs/run"),
            maze: MazeConfig::default(),
            robot: RobotBody::default(),
            sensors: SensorConfig::default(),
            avoidance: AvoidanceConfig::default(),
            trial: TrialConfig::default(),
            rnn: RnnConfig::default(),
            evolution: EvolutionConfig::default(),
            analysis: AnalysisConfig::default(),
            base_dir: None,
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    /// Small double-T run that finishes in minutes on a desktop.
    pub fn desk() -> Self {
        let mut c = ExperimentConfig::default();
        c.maze.layout = "builtin:double-t".into();
        c.trial.max_steps = 2000;
        c.evolution.population_size = 20;
        c.evolution.generations = 30;
        c.evolution.trials_per_genotype = 2;
        c
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| line_of(text, s.start));
            Error::parse(path, line, e.message().trim().to_string())
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_input(path)?, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let r = &self.rnn;
        if (r.inputs, r.hidden, r.outputs) != (N_INPUTS, N_HIDDEN, N_OUTPUTS) {
            return bad(format!(
                "network must be {N_INPUTS}/{N_HIDDEN}/{N_OUTPUTS}, found {}/{}/{}",
                r.inputs, r.hidden, r.outputs
            ));
        }
        if !(0.0..=1.0).contains(&r.leak) {
            return bad("rnn.leak must lie in [0, 1]".into());
        }
        self.evolution_config().validate()?;
        if self.trial.max_steps == 0 {
            return bad("trial.max_steps must be positive".into());
        }
        let b = &self.robot;
        if !(b.body_radius > 0.0 && b.wheel_radius > 0.0 && b.axle_length > 0.0 && b.control_dt > 0.0) {
            return bad("robot dimensions and control_dt must be positive".into());
        }
        if b.min_wheel_speed > b.max_wheel_speed {
            return bad("robot.min_wheel_speed exceeds max_wheel_speed".into());
        }
        let a = &self.analysis;
        if !(a.bin_width > 0.0 && a.bin_height > 0.0) {
            return bad("analysis bin sizes must be positive".into());
        }
        if a.build_trials == 0 || a.build_trials >= a.demo_trials {
            return bad("analysis.build_trials must be between 1 and demo_trials - 1".into());
        }
        if !(0.0..=1.0).contains(&a.transition_threshold) {
            return bad("analysis.transition_threshold must lie in [0, 1]".into());
        }
        Ok(())
    }

    pub fn evolution_config(&self) -> EvolutionConfig {
        EvolutionConfig {
            leak: self.rnn.leak,
            ..self.evolution.clone()
        }
    }

    pub fn layout_path(&self) -> Option<PathBuf> {
        if self.maze.layout.starts_with(BUILTIN_PREFIX) {
            return None;
        }
        let p = PathBuf::from(&self.maze.layout);
        Some(match &self.base_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p,
        })
    }

    pub fn layout(&self) -> Result<MazeLayout> {
        match self.maze.layout.strip_prefix(BUILTIN_PREFIX) {
            Some("triple-t") => Ok(canonical::triple_t()),
            Some("double-t") => Ok(canonical::double_t()),
            Some(other) => Err(Error::Config(format!("unknown built-in layout `{other}`"))),
            None => load_layout(&self.layout_path().expect("not built-in")),
        }
    }

    pub fn environment(&self) -> Result<Environment> {
        Ok(Environment {
            layout: self.layout()?,
            body: self.robot,
            sensors: self.sensors.clone(),
            avoidance: self.avoidance.clone(),
            trial: self.trial.clone(),
        })
    }

    pub fn grid(&self, layout: &MazeLayout) -> BinGrid {
        BinGrid::new(layout, self.robot.body_radius, self.analysis.bin_width, self.analysis.bin_height)
    }

    /// Hash of everything that affects results. The output directory is
    /// left out; a layout file is hashed by content rather than by path.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let mut text = c.to_toml();
        if self.layout_path().is_some() {
            c.maze.layout = String::new();
            text = c.to_toml();
            text.push_str("\n[layout-content]\n");
            text.push_str(&write_layout(&self.layout()?));
        }
        Ok(sha256_hex(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_toml() {
        for c in [ExperimentConfig::default(), ExperimentConfig::desk()] {
            let back = ExperimentConfig::parse(&c.to_toml(), Path::new("x.toml")).unwrap();
            assert_eq!(back.to_toml(), c.to_toml());
            assert_eq!(back.hash().unwrap(), c.hash().unwrap());
        }
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = "master_seed = 3\n\n[evolution]\npopulation_size = 20\nmutation_rte = 0.1\n";
        match ExperimentConfig::parse(text, Path::new("c.toml")) {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("mutation_rte"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = ExperimentConfig::desk();
        let mut b = a.clone();
        b.output_dir = "elsewhere".into();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.master_seed += 1;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn wrong_network_size_is_rejected() {
        let text = "[rnn]\nhidden = 40\n";
        assert!(matches!(ExperimentConfig::parse(text, Path::new("c.toml")), Err(Error::Config(_))));
    }

    #[test]
    fn leak_reaches_evolution() {
        let text = "[rnn]\nleak = 0.2\n";
        let c = ExperimentConfig::parse(text, Path::new("c.toml")).unwrap();
        assert_eq!(c.evolution_config().leak, 0.2);
    }
}
