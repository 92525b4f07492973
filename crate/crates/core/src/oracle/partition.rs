//! Good/Bad partition of level-`K` approximate squares and the two-scale
//! cover cost.
//!
//! A level-`K` square is Good when the mean of `log N_{î_ℓ}` over its window
//! of positions `L(K)+1..=L(⌊K/θ⌋)` is at most `log(N/M) − Δ₀`, and Bad
//! otherwise. Bad squares are kept at level `K`; Good squares are replaced by
//! the level-`⌊K/θ⌋` squares inside them. The universal diameter constant of
//! approximate squares is omitted, so costs are exact only up to a bounded
//! factor.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::composition::{CountClasses, LogSumExp};
use super::level::{carpet_level, Theta};
use crate::carpet::{has_uniform_fibres, Carpet};
use crate::dimension::box_dim;
use crate::error::{Error, Result};
use crate::rate::RateFunction;
use crate::upper::{solve_delta0, upper_bound};

/// Windows up to this length also get exact big-integer counts.
pub const EXACT_WINDOW_MAX: u64 = 30;

/// Default `Δ₀` for carpets with uniform fibres, where `Δ₀(θ)` is undefined.
/// Any positive value makes every square Bad.
pub const UNIFORM_DEFAULT_DELTA0: f64 = 1e-9;

const LN10: f64 = std::f64::consts::LN_10;

/// Scale and window data shared by the counting and cost computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Scales {
    #[serde(rename = "K")]
    pub k: u64,
    pub level_k: u64,
    /// `⌊K/θ⌋`
    pub k2: u64,
    pub level_k2: u64,
    /// `W = L(k2) − L(K)`
    pub window: u64,
}

pub fn scales(carpet: &Carpet, k: u64, theta: Theta) -> Result<Scales> {
    let t = theta.value();
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    if !(t < 1.0) || t.is_nan() {
        return Err(Error::ThetaOutOfRange { theta: t, lo: carpet.r(), hi: 1.0 });
    }
    if t < carpet.r() {
        return Err(Error::Regime(format!(
            "theta = {t} is below log_n m = {}; level floor(K/theta) squares no longer \
             share the map prefix of their level-K parent",
            carpet.r()
        )));
    }
    let k2 = theta.scale_level(k);
    let (level_k, level_k2) = (carpet_level(carpet, k), carpet_level(carpet, k2));
    if level_k2 > k {
        return Err(Error::Regime(format!("L({k2}) = {level_k2} exceeds K = {k}; the window leaves the column part")));
    }
    let window = level_k2 - level_k;
    if window == 0 {
        return Err(Error::Regime(format!("empty window at K = {k}: L({k2}) = L({k}) = {level_k}; increase K")));
    }
    Ok(Scales { k, level_k, k2, level_k2, window })
}

/// Sums over all `M^W` window sequences, split by the Good/Bad rule.
#[derive(Debug, Clone)]
struct WindowSums {
    log_good: f64,
    log_bad: f64,
    /// `log Σ_{good} Π N`
    log_good_product: f64,
    exact: Option<(BigUint, BigUint)>,
}

fn window_sums(carpet: &Carpet, window: u64, delta0: f64) -> WindowSums {
    let classes = CountClasses::of(carpet);
    let limit = window as f64 * (carpet.c() - delta0);
    let exact = window <= EXACT_WINDOW_MAX;
    let (mut good, mut bad, mut good_prod) = (LogSumExp::default(), LogSumExp::default(), LogSumExp::default());
    let (mut exact_good, mut exact_bad) = (BigUint::zero(), BigUint::zero());
    classes.for_each(window as usize, |k, log_mult, log_prod| {
        let is_good = log_prod <= limit;
        if is_good {
            good.add(log_mult);
            good_prod.add(log_mult + log_prod);
        } else {
            bad.add(log_mult);
        }
        if exact {
            let count = classes.exact_multiplicity(k);
            if is_good {
                exact_good += count;
            } else {
                exact_bad += count;
            }
        }
    });
    WindowSums {
        log_good: good.value(),
        log_bad: bad.value(),
        log_good_product: good_prod.value(),
        exact: exact.then_some((exact_good, exact_bad)),
    }
}

fn check_delta0(delta0: f64) -> Result<()> {
    if !delta0.is_finite() || delta0 < 0.0 {
        return Err(Error::InvalidParameter(format!("delta0 = {delta0} must be finite and non-negative")));
    }
    Ok(())
}

/// Counting part of an [`OracleReport`]. Logarithms are base 10.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionCounts {
    #[serde(flatten)]
    pub scales: Scales,
    pub delta0: f64,
    /// `log10 #𝓓`, the Bad window sequences.
    pub log10_bad_windows: f64,
    pub log10_good_count: f64,
    pub log10_bad_count: f64,
    /// `log10 (N^{L(K)} M^{K−L(K)})`
    pub log10_total_count: f64,
    #[serde(serialize_with = "opt_big")]
    pub exact_bad_windows: Option<BigUint>,
    #[serde(serialize_with = "opt_big")]
    pub exact_good_count: Option<BigUint>,
    #[serde(serialize_with = "opt_big")]
    pub exact_bad_count: Option<BigUint>,
    #[serde(serialize_with = "opt_big")]
    pub exact_total_count: Option<BigUint>,
}

fn opt_big<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

/// Counts of Good and Bad level-`K` squares.
///
/// `#Bad = N^{L(K)} · M^{K−L(⌊K/θ⌋)} · #𝓓`, and `#Good` uses the same prefix
/// factor with the Good window sequences. Both are summed independently, so
/// their total is a genuine check against `N^{L(K)} M^{K−L(K)}`.
pub fn good_bad_counts(carpet: &Carpet, k: u64, theta: Theta, delta0: f64) -> Result<PartitionCounts> {
    check_delta0(delta0)?;
    let sc = scales(carpet, k, theta)?;
    let sums = window_sums(carpet, sc.window, delta0);
    let (log_n_maps, log_cols) = ((carpet.n_maps() as f64).ln(), (carpet.n_cols() as f64).ln());
    let prefix = sc.level_k as f64 * log_n_maps + (sc.k - sc.level_k2) as f64 * log_cols;
    let total = sc.level_k as f64 * log_n_maps + (sc.k - sc.level_k) as f64 * log_cols;
    let prefix_exact = || {
        BigUint::from(carpet.n_maps()).pow(sc.level_k as u32)
            * BigUint::from(carpet.n_cols()).pow((sc.k - sc.level_k2) as u32)
    };
    let (exact_bad_windows, exact_good_count, exact_bad_count, exact_total_count) = match sums.exact {
        Some((good, bad)) => {
            let p = prefix_exact();
            let total = BigUint::from(carpet.n_maps()).pow(sc.level_k as u32)
                * BigUint::from(carpet.n_cols()).pow((sc.k - sc.level_k) as u32);
            (Some(bad.clone()), Some(&p * good), Some(&p * bad), Some(total))
        }
        None => (None, None, None, None),
    };
    Ok(PartitionCounts {
        scales: sc,
        delta0,
        log10_bad_windows: sums.log_bad / LN10,
        log10_good_count: (prefix + sums.log_good) / LN10,
        log10_bad_count: (prefix + sums.log_bad) / LN10,
        log10_total_count: total / LN10,
        exact_bad_windows,
        exact_good_count,
        exact_bad_count,
        exact_total_count,
    })
}

/// Cost part of an [`OracleReport`], base-10 logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverCost {
    pub s: f64,
    /// `log10(#Bad · m^{−Ks})`
    pub log10_cost_bad: f64,
    /// `log10 Σ_{Good} M^{k2−K} Π N · m^{−s·k2}`
    pub log10_cost_good: f64,
    pub log10_cost_total: f64,
}

/// `Σ |U|^s` over the two-scale cover.
pub fn cover_cost_log(carpet: &Carpet, k: u64, theta: Theta, delta0: f64, s: f64) -> Result<CoverCost> {
    check_delta0(delta0)?;
    let sc = scales(carpet, k, theta)?;
    let sums = window_sums(carpet, sc.window, delta0);
    Ok(cost_from_sums(carpet, &sc, &sums, s))
}

fn cost_from_sums(carpet: &Carpet, sc: &Scales, sums: &WindowSums, s: f64) -> CoverCost {
    let (log_n_maps, log_cols) = ((carpet.n_maps() as f64).ln(), (carpet.n_cols() as f64).ln());
    let prefix = sc.level_k as f64 * log_n_maps + (sc.k - sc.level_k2) as f64 * log_cols;
    let bad = prefix + sums.log_bad - sc.k as f64 * s * carpet.log_m();
    let good = prefix + (sc.k2 - sc.k) as f64 * log_cols + sums.log_good_product - sc.k2 as f64 * s * carpet.log_m();
    let mut total = LogSumExp::default();
    total.add(bad);
    total.add(good);
    CoverCost { s, log10_cost_bad: bad / LN10, log10_cost_good: good / LN10, log10_cost_total: total.value() / LN10 }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    /// `θ` as supplied, with its exact form when it has one.
    pub theta: String,
    pub theta_value: f64,
    #[serde(flatten)]
    pub counts: PartitionCounts,
    #[serde(flatten)]
    pub cost: CoverCost,
    /// `log #Bad / (K log m)`
    pub bad_exponent: f64,
    /// `dim_B − I(log(N/M) − Δ₀)(1/θ − 1)/log n`, the large-`K` limit of
    /// `bad_exponent`.
    pub asymptotic_bad_exponent: f64,
}

/// Full oracle report. `delta0` defaults to `Δ₀(θ)` and `s` to the
/// two-scale upper bound at `θ`.
pub fn oracle_report(
    rate: &RateFunction,
    k: u64,
    theta: Theta,
    s: Option<f64>,
    delta0: Option<f64>,
) -> Result<OracleReport> {
    let carpet = rate.carpet();
    scales(carpet, k, theta)?;
    let t = theta.value();
    let delta0 = match delta0 {
        Some(d) => d,
        None if has_uniform_fibres(carpet) => UNIFORM_DEFAULT_DELTA0,
        None => solve_delta0(rate, t)?.delta0,
    };
    let s = match s {
        Some(s) => s,
        None => upper_bound(rate, t)?,
    };
    let counts = good_bad_counts(carpet, k, theta, delta0)?;
    let sums = window_sums(carpet, counts.scales.window, delta0);
    let cost = cost_from_sums(carpet, &counts.scales, &sums, s);
    let bad_exponent = counts.log10_bad_count * LN10 / (k as f64 * carpet.log_m());
    Ok(OracleReport {
        theta: theta.to_string(),
        theta_value: t,
        bad_exponent,
        asymptotic_bad_exponent: asymptotic_bad_exponent(rate, t, delta0)?,
        counts,
        cost,
    })
}

/// `dim_B − I(c − Δ₀)(1/θ − 1)/log n`, with the tail rate taken as zero when
/// `c − Δ₀` lies below the mean (the Bad event then has probability → 1).
pub fn asymptotic_bad_exponent(rate: &RateFunction, theta: f64, delta0: f64) -> Result<f64> {
    let carpet = rate.carpet();
    let x = carpet.c() - delta0;
    let i = if x <= carpet.mean_log_n() { 0.0 } else { rate.value(x)? };
    Ok(box_dim(carpet) - i * (1.0 / theta - 1.0) / carpet.log_n())
}

/// `−log P(X̄_ℓ > x)/ℓ` for the mean of `ℓ` uniform picks from
/// `{log N_1, …, log N_M}`, computed exactly over multiplicity vectors.
///
/// At `x = log N_max` the strict tail is empty, so the event `X̄_ℓ ≥ x` is used
/// there; it is the limit of the strict tails from the left.
pub fn empirical_rate(carpet: &Carpet, ell: u64, x: f64) -> Result<f64> {
    let (lo, hi) = (carpet.mean_log_n(), carpet.log_max_count());
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    if !(x > lo && x <= hi) {
        return Err(Error::Domain { x, lo, hi });
    }
    let at_max = x == hi;
    let limit = ell as f64 * x;
    let slack = 1e-12 * limit.abs().max(1.0);
    let mut tail = LogSumExp::default();
    CountClasses::of(carpet).for_each(ell as usize, |_, log_mult, log_prod| {
        let hit = if at_max { log_prod >= limit - slack } else { log_prod > limit };
        if hit {
            tail.add(log_mult);
        }
    });
    let log_p = tail.value() - ell as f64 * (carpet.n_cols() as f64).ln();
    Ok(-log_p / ell as f64)
}
