use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
pub fn sample_sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// Normal-approximation 95% half-width `1.96 sd / sqrt(n)`.
pub fn ci95_half_width(x: &[f64]) -> f64 {
    1.96 * sample_sd(x) / (x.len() as f64).sqrt()
}

/// Above this combined sample size the rank-sum test uses the normal
/// approximation; at or below it the exact permutation distribution.
pub const EXACT_RANK_SUM_MAX: usize = 20;

/// Midranks (1-based) of the pooled sample `a ++ b`.
pub fn midranks(pooled: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut s = 0;
    while s < idx.len() {
        let mut e = s + 1;
        while e < idx.len() && pooled[idx[e]] == pooled[idx[s]] {
            e += 1;
        }
        let r = (s + e + 1) as f64 / 2.0;
        for &i in &idx[s..e] {
            ranks[i] = r;
        }
        s = e;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum / Mann-Whitney test.
///
/// Small samples use the exact permutation distribution of the rank sum
/// (midranks for ties); larger ones the normal approximation with tie and
/// continuity corrections.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Degenerate("rank-sum test needs two non-empty samples"));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    if pooled.iter().all(|&v| v == pooled[0]) {
        return Err(Error::Degenerate("all values are identical"));
    }
    if pooled.len() <= EXACT_RANK_SUM_MAX {
        Ok(rank_sum_exact(a.len(), &midranks(&pooled)))
    } else {
        Ok(rank_sum_normal(a, b))
    }
}

/// Normal approximation on U with tie-corrected variance and a 0.5 continuity shift.
pub fn rank_sum_normal(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u = r1 - n * (n + 1.0) / 2.0;
    let mu = n * m / 2.0;
    let total = n + m;
    let mut ties = 0.0;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut s = 0;
    while s < sorted.len() {
        let mut e = s + 1;
        while e < sorted.len() && sorted[e] == sorted[s] {
            e += 1;
        }
        let t = (e - s) as f64;
        ties += t * t * t - t;
        s = e;
    }
    let var = n * m / 12.0 * ((total + 1.0) - ties / (total * (total - 1.0)));
    let dev = (u - mu).abs() - 0.5;
    if dev <= 0.0 || var <= 0.0 {
        return 1.0;
    }
    let z = dev / var.sqrt();
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * (1.0 - std.cdf(z))).min(1.0)
}

/// Exact two-sided p-value: share of size-`n` subsets of the pooled ranks
/// whose sum is at least as far from its mean as the observed first `n`.
fn rank_sum_exact(n: usize, ranks: &[f64]) -> f64 {
    // doubled midranks are integers
    let r2: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = r2.iter().sum();
    let obs: usize = r2[..n].iter().sum();
    // counts[k][s]: subsets of size k with doubled rank sum s
    let mut counts = vec![vec![0f64; total + 1]; n + 1];
    counts[0][0] = 1.0;
    for &r in &r2 {
        for k in (1..=n).rev() {
            for s in (r..=total).rev() {
                let c = counts[k - 1][s - r];
                if c > 0.0 {
                    counts[k][s] += c;
                }
            }
        }
    }
    let all: f64 = counts[n].iter().sum();
    // mean of the doubled rank sum, times N to keep it integral
    let big_n = ranks.len();
    let centre_scaled = (n * total) as i64;
    let dev = |s: usize| ((s * big_n) as i64 - centre_scaled).abs();
    let obs_dev = dev(obs);
    let extreme: f64 = counts[n]
        .iter()
        .enumerate()
        .filter(|&(s, &c)| c > 0.0 && dev(s) >= obs_dev)
        .map(|(_, &c)| c)
        .sum();
    (extreme / all).min(1.0)
}

/// One-sample t-test of per-trial 0/1 correctness against `chance`, two-sided.
pub fn t_test_vs_chance(correct: usize, total: usize, chance: f64) -> Result<f64> {
    if total < 2 || correct > total {
        return Err(Error::Degenerate("t-test needs at least two observations"));
    }
    let n = total as f64;
    let k = correct as f64;
    let var = k * (n - k) / (n * (n - 1.0));
    if var <= 0.0 {
        return Err(Error::Degenerate("correctness has zero variance"));
    }
    let t = (k / n - chance) / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("positive degrees of freedom");
    Ok((2.0 * (1.0 - dist.cdf(t.abs()))).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn identical_samples_are_not_separated() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!(rank_sum_test(&a, &a).unwrap() >= 0.99);
        let big: Vec<f64> = (0..30).map(|i| i as f64).collect();
        assert!(rank_sum_test(&big, &big).unwrap() >= 0.99);
    }

    #[test]
    fn constant_input_is_degenerate() {
        assert!(matches!(rank_sum_test(&[1.0, 1.0], &[1.0]), Err(Error::Degenerate(_))));
        assert!(matches!(t_test_vs_chance(5, 5, 0.5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn separated_fives() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [10.0, 11.0, 12.0, 13.0, 14.0];
        // two of the 252 equally likely splits are this extreme
        assert!((rank_sum_test(&a, &b).unwrap() - 2.0 / 252.0).abs() < 1e-12);
    }

    #[test]
    fn at_chance_is_insignificant() {
        assert!(t_test_vs_chance(10, 20, 0.5).unwrap() > 0.99);
        assert!(t_test_vs_chance(770, 1000, 0.5).unwrap() < 1e-4);
    }

    #[test]
    fn ci_half_width() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((ci95_half_width(&x) - 1.96 * (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-12);
    }
}
