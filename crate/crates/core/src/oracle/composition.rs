//! Sums over column sequences grouped by multiplicity vectors.
//!
//! A sequence of `W` column ranks only matters through how many times each
//! distinct column count appears. With count classes `N_d` of multiplicity
//! `a_d`, a multiplicity vector `k` stands for
//! `W!/(Π k_d!) · Π a_d^{k_d}` sequences, each with `log Π N = Σ k_d log N_d`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::carpet::Carpet;

/// Column-count classes of a carpet.
#[derive(Debug, Clone)]
pub struct CountClasses {
    counts: Vec<u64>,
    mults: Vec<u64>,
    log_counts: Vec<f64>,
    log_mults: Vec<f64>,
}

impl CountClasses {
    pub fn of(carpet: &Carpet) -> Self {
        let classes = carpet.count_classes();
        Self {
            counts: classes.iter().map(|c| c.0).collect(),
            mults: classes.iter().map(|c| c.1).collect(),
            log_counts: classes.iter().map(|c| (c.0 as f64).ln()).collect(),
            log_mults: classes.iter().map(|c| (c.1 as f64).ln()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Calls `visit(k, log_multiplicity, log_product)` for every
    /// multiplicity vector `k` of total `len`.
    pub fn for_each<F: FnMut(&[usize], f64, f64)>(&self, len: usize, mut visit: F) {
        let log_fact = log_factorials(len);
        let mut k = vec![0usize; self.len()];
        self.descend(0, len, 0.0, 0.0, &log_fact, &mut k, &mut visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn descend<F: FnMut(&[usize], f64, f64)>(
        &self,
        pos: usize,
        remaining: usize,
        log_mult: f64,
        log_prod: f64,
        log_fact: &[f64],
        k: &mut Vec<usize>,
        visit: &mut F,
    ) {
        let last = pos + 1 == k.len();
        let range = if last { remaining..=remaining } else { 0..=remaining };
        for kj in range {
            k[pos] = kj;
            let lm = log_mult + kj as f64 * self.log_mults[pos] - log_fact[kj];
            let lp = log_prod + kj as f64 * self.log_counts[pos];
            if last {
                visit(k, log_fact[log_fact.len() - 1] + lm, lp);
            } else {
                self.descend(pos + 1, remaining - kj, lm, lp, log_fact, k, visit);
            }
        }
    }

    /// Exact number of sequences represented by `k`.
    pub fn exact_multiplicity(&self, k: &[usize]) -> BigUint {
        let mut total = BigUint::one();
        let mut remaining: usize = k.iter().sum();
        for (j, &kj) in k.iter().enumerate() {
            total *= binomial(remaining, kj) * BigUint::from(self.mults[j]).pow(kj as u32);
            remaining -= kj;
        }
        total
    }

    /// Exact `Π N` for a sequence with multiplicity vector `k`.
    pub fn exact_product(&self, k: &[usize]) -> BigUint {
        k.iter().zip(&self.counts).fold(BigUint::one(), |acc, (&kj, &c)| acc * BigUint::from(c).pow(kj as u32))
    }
}

pub fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Streaming `log Σ exp(x_i)`.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self { max: f64::NEG_INFINITY, scaled: 0.0 }
    }
}

impl LogSumExp {
    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    /// `-∞` when nothing was added.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

pub fn log_add(a: f64, b: f64) -> f64 {
    let mut acc = LogSumExp::default();
    acc.add(a);
    acc.add(b);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::CarpetSpec;

    fn compositions(len: usize, parts: usize) -> Vec<Vec<usize>> {
        let counts: Vec<i64> = (1..=parts as i64).collect();
        let carpet = Carpet::new(CarpetSpec::from_column_counts(parts as i64, 20, &counts)).unwrap();
        let mut out = Vec::new();
        CountClasses::of(&carpet).for_each(len, |k, _, _| out.push(k.to_vec()));
        out
    }

    #[test]
    fn enumerates_all_compositions_once() {
        for parts in 2..=4 {
            for len in 0..=7 {
                let all = compositions(len, parts);
                let mut sorted = all.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), all.len());
                assert_eq!(BigUint::from(all.len()), binomial(len + parts - 1, parts - 1));
                assert!(all.iter().all(|k| k.iter().sum::<usize>() == len));
            }
        }
    }

    #[test]
    fn multiplicities_sum_to_all_sequences() {
        let carpet = Carpet::new(CarpetSpec::from_column_counts(5, 9, &[3, 1, 3, 2])).unwrap();
        let classes = CountClasses::of(&carpet);
        for len in 0..=6 {
            let mut exact = BigUint::zero();
            let mut log_total = LogSumExp::default();
            classes.for_each(len, |k, lm, _| {
                exact += classes.exact_multiplicity(k);
                log_total.add(lm);
            });
            assert_eq!(exact, BigUint::from(4u32).pow(len as u32));
            assert!((log_total.value() - len as f64 * 4f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn log_sum_exp_basics() {
        let mut acc = LogSumExp::default();
        assert_eq!(acc.value(), f64::NEG_INFINITY);
        for x in [1.0f64, 2.0, 3.0] {
            acc.add(x.ln());
        }
        assert!((acc.value() - 6f64.ln()).abs() < 1e-15);
        assert!((log_add(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
