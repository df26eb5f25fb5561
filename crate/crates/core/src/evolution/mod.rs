//! Generational genetic algorithm over flat weight genotypes.

pub mod checkpoint;
pub mod engine;
pub mod operators;
pub mod seeds;

pub use checkpoint::{latest_checkpoint, load_checkpoint, save_checkpoint};
pub use engine::{
    evaluate_genotype, history_csv, initial_population, BestSoFar, Evaluation, Evolution, EvolutionConfig, FreezeMask,
    GenerationRecord, TrialRecord, HISTORY_HEADER,
};
pub use operators::{
    crossover_at, elite_count, linear_ranking_select, mutate, mutation_std, two_point_crossover, RankingSelector,
};
