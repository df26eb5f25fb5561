use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Decaying mutation scale `base * halflife / (halflife + m)`.
pub fn mutation_std(m: usize, base: f64, halflife: f64) -> f64 {
    base * halflife / (halflife + m as f64)
}

/// Indices ordered worst first; equal fitness ranks the lower index higher.
pub fn rank_order(fitness: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(b.cmp(&a)));
    idx
}

/// Linear ranking: the individual of rank `r` (1 worst, N best) is drawn
/// with probability `r / (N (N + 1) / 2)`.
#[derive(Debug, Clone)]
pub struct RankingSelector {
    by_rank: Vec<usize>,
    total: u64,
}

impl RankingSelector {
    pub fn new(fitness: &[f64]) -> Self {
        let n = fitness.len() as u64;
        RankingSelector {
            by_rank: rank_order(fitness),
            total: n * (n + 1) / 2,
        }
    }

    /// Selection probability of each index.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.by_rank.len()];
        for (r, &i) in self.by_rank.iter().enumerate() {
            p[i] = (r + 1) as f64 / self.total as f64;
        }
        p
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u = rng.random_range(0..self.total);
        for (r, &i) in self.by_rank.iter().enumerate() {
            let w = r as u64 + 1;
            if u < w {
                return i;
            }
            u -= w;
        }
        unreachable!("ranking weights sum to total")
    }
}

pub fn linear_ranking_select<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> usize {
    RankingSelector::new(fitness).sample(rng)
}

/// Child `a[..i] ++ b[i..j] ++ a[j..]` for given cut points.
pub fn crossover_at(a: &[f64], b: &[f64], i: usize, j: usize) -> Vec<f64> {
    let mut c = a.to_vec();
    c[i..j].copy_from_slice(&b[i..j]);
    c
}

/// Two cut points drawn uniformly from `[0, len]` and sorted.
pub fn two_point_crossover<R: Rng + ?Sized>(a: &[f64], b: &[f64], rng: &mut R) -> Vec<f64> {
    assert_eq!(a.len(), b.len());
    let x = rng.random_range(0..=a.len());
    let y = rng.random_range(0..=a.len());
    crossover_at(a, b, x.min(y), x.max(y))
}

/// Add `N(0, std)` to each gene in `range` with probability `rate`.
pub fn mutate<R: Rng + ?Sized>(genes: &mut [f64], rate: f64, std: f64, rng: &mut R) -> usize {
    if rate <= 0.0 || std <= 0.0 {
        return 0;
    }
    let normal = Normal::new(0.0, std).expect("finite std");
    let mut count = 0;
    for g in genes.iter_mut() {
        if rng.random::<f64>() < rate {
            *g += normal.sample(rng);
            count += 1;
        }
    }
    count
}

/// Round half up, never below one.
pub fn elite_count(population: usize, fraction: f64) -> usize {
    ((fraction * population as f64 + 0.5).floor() as usize).clamp(1, population)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_schedule() {
        assert!((mutation_std(0, 0.3, 50.0) - 0.3).abs() < 1e-15);
        assert!((mutation_std(50, 0.3, 50.0) - 0.15).abs() < 1e-15);
        assert!((mutation_std(150, 0.3, 50.0) - 0.075).abs() < 1e-15);
    }

    #[test]
    fn elites() {
        assert_eq!(elite_count(50, 0.1), 5);
        assert_eq!(elite_count(20, 0.1), 2);
        assert_eq!(elite_count(5, 0.1), 1);
        assert_eq!(elite_count(25, 0.1), 3);
    }

    #[test]
    fn ties_rank_lower_index_higher() {
        assert_eq!(rank_order(&[1.0, 1.0, 0.5]), vec![2, 1, 0]);
    }

    #[test]
    fn crossover_edges() {
        let a = vec![1.0; 10];
        let b = vec![2.0; 10];
        assert_eq!(crossover_at(&a, &b, 4, 4), a);
        assert_eq!(crossover_at(&a, &b, 0, 10), b);
    }
}
