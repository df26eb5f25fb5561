//! Per-step shuffle ablations of a trained controller.

use rayon::prelude::*;

use crate::analysis::stats::{ci95_half_width, mean, rank_sum_test};
use crate::error::Result;
use crate::evolution::seeds::demo_seed;
use crate::maze::{run_trial_summary, Environment, TrialSummary};
use crate::rnn::{Ablation, Genotype, RnnController};

/// Bonferroni threshold over the six ablations compared with the intact agent.
pub const ABLATION_ALPHA: f64 = 0.01 / 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub ablation: Ablation,
    pub fitness: Vec<f64>,
    pub elapsed: Vec<f64>,
    pub mean_fitness: f64,
    pub ci_fitness: f64,
    pub mean_elapsed: f64,
    pub ci_elapsed: f64,
    /// Rank-sum p-value of fitness against the unablated runs; None for the baseline.
    pub p_fitness: Option<f64>,
    pub p_elapsed: Option<f64>,
    pub significant: bool,
}

/// Trial `k` of every ablation uses the same seed, so every condition starts from
/// the same jittered poses.
pub fn ablation_trials(
    genotype: &Genotype,
    env: &Environment,
    leak: f64,
    master_seed: u64,
    ablation: Ablation,
    trials: usize,
) -> Result<Vec<TrialSummary>> {
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut ctrl = RnnController::from_genotype(genotype, leak)?;
            run_trial_summary(&mut ctrl, env, demo_seed(master_seed, k), ablation)
        })
        .collect()
}

fn p_or_one(a: &[f64], b: &[f64]) -> f64 {
    // identical constant samples cannot be told apart
    rank_sum_test(a, b).unwrap_or(1.0)
}

pub fn ablation_battery(
    genotype: &Genotype,
    env: &Environment,
    leak: f64,
    master_seed: u64,
    ablations: &[Ablation],
    trials: usize,
) -> Result<Vec<AblationRow>> {
    let runs: Vec<(Ablation, Vec<TrialSummary>)> = ablations
        .iter()
        .map(|&a| Ok((a, ablation_trials(genotype, env, leak, master_seed, a, trials)?)))
        .collect::<Result<_>>()?;
    let baseline = match runs.iter().find(|(a, _)| *a == Ablation::None) {
        Some((_, s)) => s.clone(),
        None => ablation_trials(genotype, env, leak, master_seed, Ablation::None, trials)?,
    };
    let base_fit: Vec<f64> = baseline.iter().map(|s| s.fitness).collect();
    let base_el: Vec<f64> = baseline.iter().map(|s| s.elapsed_steps as f64).collect();

    Ok(runs
        .into_iter()
        .map(|(ablation, summaries)| {
            let fitness: Vec<f64> = summaries.iter().map(|s| s.fitness).collect();
            let elapsed: Vec<f64> = summaries.iter().map(|s| s.elapsed_steps as f64).collect();
            let (p_fitness, p_elapsed) = if ablation == Ablation::None {
                (None, None)
            } else {
                (Some(p_or_one(&fitness, &base_fit)), Some(p_or_one(&elapsed, &base_el)))
            };
            AblationRow {
                ablation,
                mean_fitness: mean(&fitness),
                ci_fitness: ci95_half_width(&fitness),
                mean_elapsed: mean(&elapsed),
                ci_elapsed: ci95_half_width(&elapsed),
                significant: p_fitness.is_some_and(|p| p < ABLATION_ALPHA),
                p_fitness,
                p_elapsed,
                fitness,
                elapsed,
            }
        })
        .collect())
}
