//! Lower bounds on the lower intermediate dimensions.
//!
//! All bounds come from product measures that use a vector `p` on the first
//! `L(K)` symbols and a column-constant vector `q` afterwards. The main bound
//! mixes the uniform and McMullen vectors with weight `u = θ^t` and takes the
//! supremum over `t > 0`, which is a supremum over `u ∈ (0, 1)`.

use serde::Serialize;

use crate::carpet::{entropy, log_geometric_mean, mcmullen_vectors, uniform_vectors, Carpet, ProbVector};
use crate::dimension::{box_dim, hausdorff_dim};
use crate::error::{Error, Result};

const U_GRID: usize = 257;
const GOLDEN_WIDTH: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MixedVectors {
    pub u: f64,
    /// `u·p̃ + (1−u)·p̂`
    pub p: ProbVector,
    /// `u·q̃^M + (1−u)·q̂^M`
    pub q_cols: ProbVector,
    /// `u·q̃/N + (1−u)·p̂`
    pub q: ProbVector,
}

pub fn mixed_vectors(carpet: &Carpet, u: f64) -> Result<MixedVectors> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::UOutOfRange(u));
    }
    let (p_hat, q_hat) = mcmullen_vectors(carpet);
    let uni = uniform_vectors(carpet);
    Ok(MixedVectors {
        u,
        p: ProbVector::mix(u, &uni.maps, &p_hat)?,
        q_cols: ProbVector::mix(u, &uni.columns, &q_hat)?,
        q: ProbVector::mix(u, &uni.coordinate, &p_hat)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiEval {
    pub theta: f64,
    pub u: f64,
    pub dim_t: f64,
    pub psi: f64,
}

/// `dim^t` at mixing weight `u`: `H(P)/log n + (1 − log m/log n)·H(Q^M)/log m`.
pub fn dim_t(carpet: &Carpet, u: f64) -> Result<f64> {
    let mv = mixed_vectors(carpet, u)?;
    Ok(dim_t_of(carpet, &mv))
}

fn dim_t_of(carpet: &Carpet, mv: &MixedVectors) -> f64 {
    entropy(&mv.p) / carpet.log_n() + (1.0 - carpet.r()) * entropy(&mv.q_cols) / carpet.log_m()
}

/// `ψ = dim^t − (1−θ)(H(P) − H(Q))/log n` at mixing weight `u`.
///
/// The weight is `u = θ^t`, so `θ = 0` admits only `u = 0` and `θ = 1` only
/// `u = 1`; at those endpoints the supplied `u` is replaced accordingly.
pub fn psi(carpet: &Carpet, theta: f64, u: f64) -> Result<PsiEval> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange { theta, lo: 0.0, hi: 1.0 });
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::UOutOfRange(u));
    }
    let u = if theta == 0.0 || theta == 1.0 { theta } else { u };
    let mv = mixed_vectors(carpet, u)?;
    let dt = dim_t_of(carpet, &mv);
    // H(Q) = H(Q^M) + log⟨N⟩_Q
    let h_q = entropy(&mv.q_cols) + log_geometric_mean(&carpet.fibre_vector(), &mv.q)?;
    let value = dt - (1.0 - theta) * (entropy(&mv.p) - h_q) / carpet.log_n();
    Ok(PsiEval { theta, u, dim_t: dt, psi: value })
}

/// `ψ(t, θ)` in the original parametrization, `u = θ^t`.
pub fn psi_t(carpet: &Carpet, t: f64, theta: f64) -> Result<PsiEval> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    psi(carpet, theta, theta.powf(t))
}

/// `sup_{t>0} ψ(t, θ)`, searched over `u ∈ [0, 1]`.
///
/// A uniform grid locates the best bracket, then golden-section search
/// refines inside it. Ties go to the smallest `u`.
pub fn lower_thm(carpet: &Carpet, theta: f64) -> Result<PsiEval> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange { theta, lo: 0.0, hi: 1.0 });
    }
    if theta == 0.0 || theta == 1.0 {
        return psi(carpet, theta, theta);
    }
    let eval = |u: f64| psi(carpet, theta, u);
    let mut best = eval(0.0)?;
    let mut best_idx = 0;
    for i in 1..U_GRID {
        let e = eval(i as f64 / (U_GRID - 1) as f64)?;
        if e.psi > best.psi {
            best = e;
            best_idx = i;
        }
    }
    let step = 1.0 / (U_GRID - 1) as f64;
    let mut a = (best_idx.saturating_sub(1)) as f64 * step;
    let mut b = ((best_idx + 1).min(U_GRID - 1)) as f64 * step;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > GOLDEN_WIDTH {
        if f1.psi >= f2.psi {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        }
    }
    for cand in [f1, f2] {
        if cand.psi > best.psi {
            best = cand;
        }
    }
    Ok(best)
}

/// Straight line from `dim_B − (c − mean log N)/log n` at `θ = 0` to `dim_B` at `θ = 1`.
pub fn lower_linear_box(carpet: &Carpet, theta: f64) -> f64 {
    box_dim(carpet) - (1.0 - theta) * (carpet.c() - carpet.mean_log_n()) / carpet.log_n()
}

/// `dim_H + θ(log N − H(p̂))/log n`.
pub fn lower_ffk(carpet: &Carpet, theta: f64) -> f64 {
    let (p_hat, _) = mcmullen_vectors(carpet);
    hausdorff_dim(carpet) + theta * ((carpet.n_maps() as f64).ln() - entropy(&p_hat)) / carpet.log_n()
}

/// Pointwise maximum of the three lower bounds.
pub fn lower_envelope(carpet: &Carpet, theta: f64) -> Result<f64> {
    let main = lower_thm(carpet, theta)?.psi;
    Ok(main.max(lower_linear_box(carpet, theta)).max(lower_ffk(carpet, theta)))
}
