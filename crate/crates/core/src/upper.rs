//! Upper bounds on the upper intermediate dimensions.
//!
//! The two-scale bound covers level-`K` approximate squares whose column
//! window average is large ("bad") at level `K` and subdivides the rest to
//! level `⌊K/θ⌋`. The threshold `Δ₀(θ)` balances the two costs:
//! `θ·Δ₀ = I(log(N/M) − Δ₀)`. The three-scale bound refines both parts with
//! two extra thresholds and an intermediate scale `η`.

use serde::Serialize;

use crate::carpet::has_uniform_fibres;
use crate::dimension::box_dim;
use crate::error::{Error, Result};
use crate::rate::RateFunction;

const DELTA_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Delta0Solution {
    pub theta: f64,
    pub delta0: f64,
    /// `(1−θ)Δ₀ − (1/θ−1)I(c−Δ₀)`, or `Δ₀ − I(c−Δ₀)` at `θ = 1`.
    pub residual: f64,
}

/// Solves for `Δ₀(θ)` on `θ ∈ [log_n m, 1]`.
pub fn solve_delta0(rate: &RateFunction, theta: f64) -> Result<Delta0Solution> {
    let carpet = rate.carpet();
    if has_uniform_fibres(carpet) {
        return Err(Error::UniformFibres);
    }
    let r = carpet.r();
    if !(r..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange { theta, lo: r, hi: 1.0 });
    }
    let c = carpet.c();
    // h(Δ) = θΔ − I(c − Δ) increases from −I(c) < 0 to θ(c − mean) > 0.
    let h = |delta: f64| -> Result<f64> { Ok(theta * delta - rate.value(c - delta)?) };
    let (mut lo, mut hi) = (0.0, c - carpet.mean_log_n());
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= DELTA_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if h(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta0 = 0.5 * (lo + hi);
    let i = rate.value(c - delta0)?;
    let residual = if theta < 1.0 { (1.0 - theta) * delta0 - (1.0 / theta - 1.0) * i } else { delta0 - i };
    Ok(Delta0Solution { theta, delta0, residual })
}

/// Two-scale upper bound for `θ ∈ [0, 1]`, constant on `[0, log_n m)`.
pub fn upper_bound(rate: &RateFunction, theta: f64) -> Result<f64> {
    let carpet = rate.carpet();
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange { theta, lo: 0.0, hi: 1.0 });
    }
    let bdim = box_dim(carpet);
    if theta >= 1.0 || has_uniform_fibres(carpet) {
        return Ok(bdim);
    }
    let theta = theta.max(carpet.r());
    let sol = solve_delta0(rate, theta)?;
    Ok(bdim - sol.delta0 * (1.0 - theta) / carpet.log_n())
}

/// `lim_{θ→1} d/dθ` of the two-scale bound, `Δ₀(1)/log n`.
pub fn upper_slope_at_one(rate: &RateFunction) -> Result<f64> {
    Ok(solve_delta0(rate, 1.0)?.delta0 / rate.carpet().log_n())
}

/// Search grid for [`improved_upper`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Log-uniform interior points per parameter.
    pub points: usize,
    /// Number of zoom-in passes around the best point.
    pub refinements: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points: 24, refinements: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeScaleParams {
    pub theta: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub eta: f64,
    pub exponents: [f64; 4],
    /// `max(exponents)`.
    pub bound: f64,
    /// The two-scale bound at the same `θ`, for comparison.
    pub two_scale: f64,
}

/// The four cover exponents of the three-scale construction:
///
/// * `e1 = dim_B − Δ₁(1−θ)/log n` (finely covered good squares),
/// * `e2 = dim_B − (Δ₀ + I(c−Δ₁))(1−θ)/log n` (remaining good squares),
/// * `e3 = dim_B − I(c−Δ₂)(1/θ−1)/log n` (very bad squares kept at level `K`),
/// * `e4 = dim_B − Δ₂(1−η)/log n − I(c−Δ₀)(1/θ−1)η/log n` (bad squares moved to level `⌊K/η⌋`).
pub fn three_scale_exponents(
    rate: &RateFunction,
    theta: f64,
    delta0: f64,
    delta1: f64,
    delta2: f64,
    eta: f64,
) -> Result<[f64; 4]> {
    let carpet = rate.carpet();
    let (bdim, c, log_n) = (box_dim(carpet), carpet.c(), carpet.log_n());
    let i0 = rate.value(c - delta0)?;
    let i1 = rate.value(c - delta1)?;
    let i2 = rate.value(c - delta2)?;
    Ok(exponents_from_rates(bdim, log_n, theta, [delta0, delta1, delta2], [i0, i1, i2], eta))
}

fn exponents_from_rates(
    bdim: f64,
    log_n: f64,
    theta: f64,
    [delta0, delta1, delta2]: [f64; 3],
    [i0, i1, i2]: [f64; 3],
    eta: f64,
) -> [f64; 4] {
    let inv = 1.0 / theta - 1.0;
    [
        bdim - delta1 * (1.0 - theta) / log_n,
        bdim - (delta0 + i1) * (1.0 - theta) / log_n,
        bdim - i2 * inv / log_n,
        bdim - delta2 * (1.0 - eta) / log_n - i0 * inv * eta / log_n,
    ]
}

/// Interior points of `(lo, hi)`, spaced uniformly in `log`.
fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..points).map(|i| lo * (ratio * (i + 1) as f64 / (points + 1) as f64).exp()).collect()
}

/// Shrinks `(lo, hi)` to a cell of one grid step, centred on `best` in log space.
fn zoom(lo: f64, hi: f64, points: usize, best: f64) -> (f64, f64) {
    let half_step = 0.5 * (hi / lo).ln() / (points + 1) as f64;
    ((best * (-half_step).exp()).max(lo), (best * half_step.exp()).min(hi))
}

#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    delta1: f64,
    delta2: f64,
    eta: f64,
    exponents: [f64; 4],
}

/// Three-scale bound minimized over a deterministic grid of `(Δ₁, Δ₂, η)`.
///
/// Ties go to the lexicographically smallest `(Δ₁, Δ₂, η)`.
pub fn improved_upper(rate: &RateFunction, theta: f64, search: &GridSpec) -> Result<ThreeScaleParams> {
    let carpet = rate.carpet();
    if has_uniform_fibres(carpet) {
        return Err(Error::UniformFibres);
    }
    let r = carpet.r();
    if !(r..1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange { theta, lo: r, hi: 1.0 });
    }
    let delta0 = solve_delta0(rate, theta)?.delta0;
    let (bdim, c, log_n) = (box_dim(carpet), carpet.c(), carpet.log_n());
    let two_scale = bdim - delta0 * (1.0 - theta) / log_n;
    let i0 = rate.value(c - delta0)?;

    let mut box1 = (delta0, c - carpet.mean_log_n());
    let mut box2 = ((1.0 - theta) * delta0, delta0);
    let mut box3 = (theta, 1.0);
    let points = search.points.max(1);
    let mut best: Option<Candidate> = None;

    for pass in 0..=search.refinements {
        if pass > 0 {
            let b = best.expect("first pass always yields a candidate");
            box1 = zoom(box1.0, box1.1, points, b.delta1);
            box2 = zoom(box2.0, box2.1, points, b.delta2);
            box3 = zoom(box3.0, box3.1, points, b.eta);
        }
        let d1s = log_grid(box1.0, box1.1, points);
        let d2s = log_grid(box2.0, box2.1, points);
        let etas = log_grid(box3.0, box3.1, points);
        let i1s = d1s.iter().map(|d| rate.value(c - d)).collect::<Result<Vec<_>>>()?;
        let i2s = d2s.iter().map(|d| rate.value(c - d)).collect::<Result<Vec<_>>>()?;

        let mut pass_best: Option<Candidate> = None;
        for (&d1, &i1) in d1s.iter().zip(&i1s) {
            for (&d2, &i2) in d2s.iter().zip(&i2s) {
                for &eta in &etas {
                    let e = exponents_from_rates(bdim, log_n, theta, [delta0, d1, d2], [i0, i1, i2], eta);
                    let value = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if pass_best.is_none_or(|b| value < b.value) {
                        pass_best = Some(Candidate { value, delta1: d1, delta2: d2, eta, exponents: e });
                    }
                }
            }
        }
        // The zoomed grid need not contain the previous best point.
        if let Some(cand) = pass_best {
            if best.is_none_or(|b| cand.value < b.value) {
                best = Some(cand);
            }
        }
    }

    let best = best.ok_or(Error::SearchFailed(theta))?;
    if !(best.value < two_scale) {
        return Err(Error::SearchFailed(theta));
    }
    Ok(ThreeScaleParams {
        theta,
        delta0,
        delta1: best.delta1,
        delta2: best.delta2,
        eta: best.eta,
        exponents: best.exponents,
        bound: best.value,
        two_scale,
    })
}
