//! Cramér rate function of a uniform pick from `{log N_1, …, log N_M}`.
//!
//! `I(x) = sup_{λ≥0} (λx − Λ(λ))` with `Λ(λ) = log((1/M) Σ N_j^λ)`, evaluated
//! on `[mean log N, log N_max]` by bisection on `Λ'(λ) = x`.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;

use crate::carpet::Carpet;
use crate::error::{Error, Result};

/// Points this far below the mean are clamped onto it.
const MEAN_CLAMP: f64 = 1e-12;
const LAMBDA_REL_TOL: f64 = 1e-13;
const MAX_BISECTIONS: usize = 200;
const MAX_DOUBLINGS: usize = 1100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEval {
    pub x: f64,
    pub value: f64,
    /// Maximizing `λ`; `+∞` at `x = log N_max`, where the supremum is not attained.
    pub lambda_star: f64,
}

/// `log((1/M) Σ_j N_j^λ)`.
pub fn cumulant(carpet: &Carpet, lambda: f64) -> f64 {
    log_mean_exp(carpet.log_counts(), lambda)
}

/// One-shot evaluation of `I(x)`; see [`RateFunction`] for repeated use.
pub fn rate(carpet: &Carpet, x: f64) -> Result<RateEval> {
    RateFunction::new(carpet).eval(x)
}

fn log_mean_exp(logs: &[f64], lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let pivot = if lambda > 0.0 {
        logs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        logs.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let sum: f64 = logs.iter().map(|&l| (lambda * (l - pivot)).exp()).sum();
    lambda * pivot + sum.ln() - (logs.len() as f64).ln()
}

/// `Λ'(λ)`, the mean of `log N_j` under the tilted weights `N_j^λ`.
fn tilted_mean(logs: &[f64], lambda: f64) -> f64 {
    let pivot = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (num, den) = logs.iter().fold((0.0, 0.0), |(num, den), &l| {
        let w = (lambda * (l - pivot)).exp();
        (num + w * l, den + w)
    });
    num / den
}

/// Memoizing evaluator of `I` for one carpet.
///
/// The cache only stores results of the pure computation, so concurrent use
/// returns the same values as a fresh evaluator would.
#[derive(Debug)]
pub struct RateFunction {
    carpet: Carpet,
    cache: Mutex<HashMap<u64, RateEval>>,
}

impl Clone for RateFunction {
    fn clone(&self) -> Self {
        Self::new(&self.carpet)
    }
}

impl RateFunction {
    pub fn new(carpet: &Carpet) -> Self {
        Self { carpet: carpet.clone(), cache: Mutex::new(HashMap::new()) }
    }

    pub fn carpet(&self) -> &Carpet {
        &self.carpet
    }

    /// `[mean log N, log N_max]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.carpet.mean_log_n(), self.carpet.log_max_count())
    }

    pub fn cumulant(&self, lambda: f64) -> f64 {
        log_mean_exp(self.carpet.log_counts(), lambda)
    }

    pub fn cumulant_derivative(&self, lambda: f64) -> f64 {
        tilted_mean(self.carpet.log_counts(), lambda)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.eval(x).map(|e| e.value)
    }

    pub fn eval(&self, x: f64) -> Result<RateEval> {
        let (lo, hi) = self.domain();
        if x.is_nan() || x < lo - MEAN_CLAMP || x > hi {
            return Err(Error::Domain { x, lo, hi });
        }
        let x = x.max(lo);
        if let Some(hit) = self.cache.lock().unwrap().get(&x.to_bits()) {
            return Ok(*hit);
        }
        let result = self.compute(x);
        self.cache.lock().unwrap().insert(x.to_bits(), result);
        Ok(result)
    }

    fn compute(&self, x: f64) -> RateEval {
        let (lo, hi) = self.domain();
        if x >= hi {
            let m = self.carpet.n_cols() as f64;
            let top = self.carpet.max_count_multiplicity() as f64;
            let lambda_star = if hi > lo { f64::INFINITY } else { 0.0 };
            return RateEval { x, value: m.ln() - top.ln(), lambda_star };
        }
        if x <= lo {
            return RateEval { x, value: 0.0, lambda_star: 0.0 };
        }

        let mut upper = 1.0;
        for _ in 0..MAX_DOUBLINGS {
            if self.cumulant_derivative(upper) >= x {
                break;
            }
            upper *= 2.0;
        }
        let mut lower = 0.0;
        for _ in 0..MAX_BISECTIONS {
            if upper - lower <= LAMBDA_REL_TOL * upper {
                break;
            }
            let mid = 0.5 * (lower + upper);
            if self.cumulant_derivative(mid) < x {
                lower = mid;
            } else {
                upper = mid;
            }
        }
        let lambda = 0.5 * (lower + upper);
        let value = (lambda * x - self.cumulant(lambda)).max(0.0);
        RateEval { x, value, lambda_star: lambda }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::CarpetSpec;

    fn l_shape() -> Carpet {
        Carpet::new(CarpetSpec::new(2, 3, vec![(0, 0), (0, 1), (1, 0)])).unwrap()
    }

    /// Relative entropy of Bernoulli(p) against Bernoulli(1/2), which is the
    /// rate function of a uniform pick from `{0, log 2}` at `x = p log 2`.
    fn two_atom_rate(x: f64) -> f64 {
        let p = x / 2f64.ln();
        let term = |q: f64| if q > 0.0 { q * (2.0 * q).ln() } else { 0.0 };
        term(p) + term(1.0 - p)
    }

    #[test]
    fn cumulant_examples() {
        let c = l_shape();
        assert_eq!(cumulant(&c, 0.0), 0.0);
        assert!((cumulant(&c, 1.0) - 1.5f64.ln()).abs() < 1e-15);
        assert!((cumulant(&c, 2.0) - 2.5f64.ln()).abs() < 1e-15);
        assert!((cumulant(&c, -1.0) - 0.75f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rate_at_mean_is_zero() {
        let c = l_shape();
        let e = rate(&c, c.mean_log_n()).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.lambda_star, 0.0);
        let e = rate(&c, c.mean_log_n() - 5e-13).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn rate_endpoint_closed_form() {
        let c = l_shape();
        let e = rate(&c, 2f64.ln()).unwrap();
        assert!((e.value - 2f64.ln()).abs() < 1e-15);
        assert!(e.lambda_star.is_infinite());
    }

    #[test]
    fn rate_matches_two_atom_oracle() {
        let c = l_shape();
        let e = rate(&c, 0.355465).unwrap();
        assert!((e.value - two_atom_rate(0.355465)).abs() < 1e-12);
        assert!((e.value - 3.30e-4).abs() < 5e-6);
        let (lo, hi) = (c.mean_log_n(), 2f64.ln());
        for i in 0..=100 {
            let x = lo + (hi - lo) * i as f64 / 100.0;
            let got = rate(&c, x).unwrap().value;
            assert!((got - two_atom_rate(x)).abs() < 1e-10, "x = {x}: {got}");
        }
    }

    #[test]
    fn rate_domain_errors() {
        let c = l_shape();
        assert!(matches!(rate(&c, 0.2), Err(Error::Domain { .. })));
        assert!(matches!(rate(&c, 0.7), Err(Error::Domain { .. })));
        assert!(matches!(rate(&c, f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn memo_is_transparent() {
        let c = l_shape();
        let f = RateFunction::new(&c);
        let a = f.eval(0.37).unwrap();
        let b = f.eval(0.37).unwrap();
        let fresh = rate(&c, 0.37).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, fresh);
    }

    #[test]
    fn uniform_fibres_have_degenerate_domain() {
        let c = Carpet::new(CarpetSpec::from_column_counts(3, 4, &[2, 2])).unwrap();
        let e = rate(&c, 2f64.ln()).unwrap();
        assert_eq!(e.value, 0.0);
    }
}
