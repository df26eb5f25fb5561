use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::operators::{elite_count, mutate, mutation_std, rank_order, two_point_crossover, RankingSelector};
use crate::evolution::seeds::{breed_seed, init_seed, trial_seed};
use crate::maze::{run_trial_summary, Environment};
use crate::rnn::{Ablation, Genotype, RnnController, DEFAULT_LEAK, GENE_COUNT, RR_LEN, XR_LEN};

/// Which genes evolution may change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreezeMask {
    #[default]
    None,
    /// Input and recurrent weights stay at one shared random draw; only
    /// output weights evolve.
    OutputOnly,
}

impl FreezeMask {
    pub fn mutable_range(self) -> std::ops::Range<usize> {
        match self {
            FreezeMask::None => 0..GENE_COUNT,
            FreezeMask::OutputOnly => XR_LEN + RR_LEN..GENE_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub trials_per_genotype: usize,
    pub elite_fraction: f64,
    pub mutation_rate: f64,
    pub mutation_std_base: f64,
    pub mutation_std_halflife: f64,
    pub init_std: f64,
    /// Re-run elites every generation instead of carrying their stored fitness.
    pub reevaluate_elites: bool,
    pub freeze_mask: FreezeMask,
    /// Number of most recent checkpoints to keep; 0 keeps all.
    pub keep_checkpoints: usize,
    /// Filled from the experiment's network settings.
    #[serde(skip)]
    pub leak: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 200,
            trials_per_genotype: 5,
            elite_fraction: 0.10,
            mutation_rate: 0.06,
            mutation_std_base: 0.3,
            mutation_std_halflife: 50.0,
            init_std: 0.3,
            reevaluate_elites: false,
            freeze_mask: FreezeMask::None,
            keep_checkpoints: 3,
            leak: DEFAULT_LEAK,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.population_size < 2 {
            return bad("population_size must be at least 2");
        }
        if self.generations == 0 || self.trials_per_genotype == 0 {
            return bad("generations and trials_per_genotype must be positive");
        }
        for (name, p) in [
            ("elite_fraction", self.elite_fraction),
            ("mutation_rate", self.mutation_rate),
            ("leak", self.leak),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if self.elites() >= self.population_size {
            return bad("elite count must leave room for children");
        }
        if !(self.mutation_std_base >= 0.0 && self.init_std >= 0.0 && self.mutation_std_halflife > 0.0) {
            return bad("mutation and initialisation scales must be non-negative");
        }
        Ok(())
    }

    pub fn elites(&self) -> usize {
        elite_count(self.population_size, self.elite_fraction)
    }

    pub fn mutation_std(&self, m: usize) -> f64 {
        mutation_std(m, self.mutation_std_base, self.mutation_std_halflife)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub fitness: f64,
    pub elapsed_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub trials: Vec<TrialRecord>,
}

impl Evaluation {
    pub fn from_trials(trials: Vec<TrialRecord>) -> Self {
        let fitness = trials.iter().map(|t| t.fitness).sum::<f64>() / trials.len() as f64;
        Evaluation { fitness, trials }
    }

    pub fn mean_elapsed(&self) -> f64 {
        self.trials.iter().map(|t| t.elapsed_steps as f64).sum::<f64>() / self.trials.len() as f64
    }
}

/// Mean fitness of `g` over `trials` seeded runs.
pub fn evaluate_genotype(
    g: &Genotype,
    env: &Environment,
    leak: f64,
    master_seed: u64,
    generation: usize,
    idx: usize,
    trials: usize,
) -> Result<Evaluation> {
    let mut ctrl = RnnController::from_genotype(g, leak)?;
    let records = (0..trials)
        .map(|t| {
            let s = run_trial_summary(&mut ctrl, env, trial_seed(master_seed, generation, idx, t), Ablation::None)?;
            Ok(TrialRecord {
                fitness: s.fitness,
                elapsed_steps: s.elapsed_steps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation::from_trials(records))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_so_far_fitness: f64,
    pub mean_fitness: f64,
    /// Mean elapsed steps of the best-so-far genotype's evaluation.
    pub best_elapsed_steps: f64,
    pub best_generation: usize,
    pub best_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestSoFar {
    pub genotype: Genotype,
    pub evaluation: Evaluation,
    pub generation: usize,
    pub index: usize,
}

pub const HISTORY_HEADER: &str = "generation,best_so_far_fitness,mean_fitness,best_elapsed_steps";

pub fn history_csv(history: &[GenerationRecord]) -> String {
    let mut s = String::from(HISTORY_HEADER);
    s.push('\n');
    for r in history {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.generation, r.best_so_far_fitness, r.mean_fitness, r.best_elapsed_steps
        ));
    }
    s
}

/// Generational run state. After each [`Evolution::step`] the current
/// population is fully evaluated; the next step breeds from it.
#[derive(Debug, Clone)]
pub struct Evolution<'a> {
    pub cfg: EvolutionConfig,
    pub master_seed: u64,
    env: &'a Environment,
    pub(crate) generation: usize,
    pub(crate) population: Vec<Genotype>,
    pub(crate) evaluations: Vec<Evaluation>,
    pub(crate) history: Vec<GenerationRecord>,
    pub(crate) best: Option<BestSoFar>,
}

impl<'a> Evolution<'a> {
    pub fn new(cfg: EvolutionConfig, master_seed: u64, env: &'a Environment) -> Result<Self> {
        cfg.validate()?;
        let population = initial_population(&cfg, master_seed);
        Ok(Evolution {
            cfg,
            master_seed,
            env,
            generation: 0,
            population,
            evaluations: Vec::new(),
            history: Vec::new(),
            best: None,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn restore(
        cfg: EvolutionConfig,
        master_seed: u64,
        env: &'a Environment,
        generation: usize,
        population: Vec<Genotype>,
        evaluations: Vec<Evaluation>,
        history: Vec<GenerationRecord>,
        best: BestSoFar,
    ) -> Self {
        Evolution {
            cfg,
            master_seed,
            env,
            generation,
            population,
            evaluations,
            history,
            best: Some(best),
        }
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> &[Genotype] {
        &self.population
    }

    pub fn evaluations(&self) -> &[Evaluation] {
        &self.evaluations
    }

    pub fn history(&self) -> &[GenerationRecord] {
        &self.history
    }

    pub fn best(&self) -> Option<&BestSoFar> {
        self.best.as_ref()
    }

    pub fn finished(&self) -> bool {
        self.history.len() >= self.cfg.generations
    }

    /// Breed (after the first generation) and evaluate one generation.
    /// Evaluation runs on the current rayon pool; results do not depend on it.
    pub fn step(&mut self) -> Result<&GenerationRecord> {
        if self.finished() {
            return Err(Error::Invalid("evolution already reached its final generation".into()));
        }
        let carried = if self.history.is_empty() {
            vec![None; self.population.len()]
        } else {
            let (pop, carried) = self.breed();
            self.population = pop;
            self.generation += 1;
            carried
        };
        let m = self.generation;
        let (env, cfg, seed) = (self.env, &self.cfg, self.master_seed);
        let evals: Vec<Evaluation> = self
            .population
            .par_iter()
            .zip(carried.into_par_iter())
            .enumerate()
            .map(|(i, (g, prior))| match prior {
                Some(e) if !cfg.reevaluate_elites => Ok(e),
                _ => evaluate_genotype(g, env, cfg.leak, seed, m, i, cfg.trials_per_genotype),
            })
            .collect::<Result<_>>()?;

        let order = rank_order(&evals.iter().map(|e| e.fitness).collect::<Vec<_>>());
        let top = *order.last().expect("non-empty population");
        if self.best.as_ref().is_none_or(|b| evals[top].fitness > b.evaluation.fitness) {
            self.best = Some(BestSoFar {
                genotype: self.population[top].clone(),
                evaluation: evals[top].clone(),
                generation: m,
                index: top,
            });
        }
        let best = self.best.as_ref().unwrap();
        let mean = evals.iter().map(|e| e.fitness).sum::<f64>() / evals.len() as f64;
        self.history.push(GenerationRecord {
            generation: m,
            best_so_far_fitness: best.evaluation.fitness,
            mean_fitness: mean,
            best_elapsed_steps: best.evaluation.mean_elapsed(),
            best_generation: best.generation,
            best_index: best.index,
        });
        self.evaluations = evals;
        Ok(self.history.last().unwrap())
    }

    /// Next population: elites first (with their stored evaluations), then children.
    fn breed(&self) -> (Vec<Genotype>, Vec<Option<Evaluation>>) {
        let n = self.cfg.population_size;
        let next = self.generation + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(breed_seed(self.master_seed, next));
        let fitness: Vec<f64> = self.evaluations.iter().map(|e| e.fitness).collect();
        let order = rank_order(&fitness);
        let selector = RankingSelector::new(&fitness);
        let std = self.cfg.mutation_std(next);
        let range = self.cfg.freeze_mask.mutable_range();

        let mut pop = Vec::with_capacity(n);
        let mut carried = Vec::with_capacity(n);
        for &i in order.iter().rev().take(self.cfg.elites()) {
            pop.push(self.population[i].clone());
            carried.push(Some(self.evaluations[i].clone()));
        }
        while pop.len() < n {
            let a = selector.sample(&mut rng);
            let b = selector.sample(&mut rng);
            let mut child = two_point_crossover(self.population[a].genes(), self.population[b].genes(), &mut rng);
            mutate(&mut child[range.clone()], self.cfg.mutation_rate, std, &mut rng);
            pop.push(Genotype::new(child).expect("operators preserve length"));
            carried.push(None);
        }
        (pop, carried)
    }
}

pub fn initial_population(cfg: &EvolutionConfig, master_seed: u64) -> Vec<Genotype> {
    let mut rng = ChaCha8Rng::seed_from_u64(init_seed(master_seed));
    let normal = Normal::new(0.0, cfg.init_std).expect("finite init_std");
    let shared: Vec<f64> = match cfg.freeze_mask {
        FreezeMask::None => Vec::new(),
        FreezeMask::OutputOnly => (0..XR_LEN + RR_LEN).map(|_| normal.sample(&mut rng)).collect(),
    };
    (0..cfg.population_size)
        .map(|_| {
            let mut genes = shared.clone();
            genes.extend((genes.len()..GENE_COUNT).map(|_| normal.sample(&mut rng)));
            Genotype::new(genes).expect("finite genes")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_checks() {
        assert!(EvolutionConfig::default().validate().is_ok());
        let c = EvolutionConfig {
            mutation_rate: 1.5,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert_eq!(EvolutionConfig::default().elites(), 5);
    }

    #[test]
    fn frozen_reservoir_is_shared() {
        let cfg = EvolutionConfig {
            population_size: 4,
            freeze_mask: FreezeMask::OutputOnly,
            ..Default::default()
        };
        let pop = initial_population(&cfg, 9);
        assert_eq!(pop[0].genes()[..XR_LEN + RR_LEN], pop[3].genes()[..XR_LEN + RR_LEN]);
        assert_ne!(pop[0].genes()[XR_LEN + RR_LEN..], pop[3].genes()[XR_LEN + RR_LEN..]);
    }
}
