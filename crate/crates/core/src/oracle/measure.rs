//! The product measures `ν_K` behind the lower bounds.
//!
//! `ν_K` gives a level-`k` cylinder `[i_1 … i_k]` (`k ≥ K`) the mass
//! `Π_{ℓ≤L(K)} p_{i_ℓ} · Π_{L(K)<ℓ≤k} q_{i_ℓ}`. With `p` and `q` constant on
//! columns, every cylinder inside an approximate square has the same mass.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::level::carpet_level;
use super::square::{fibre_count, SquareId};
use crate::carpet::{entropy, Carpet, ProbVector};
use crate::error::{Error, Result};

const COLUMN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    carpet: Carpet,
    k: u64,
    level: u64,
    p: ProbVector,
    q: ProbVector,
}

fn check_column_constant<T: PartialEq + Clone>(
    carpet: &Carpet,
    v: &[T],
    name: &str,
    same: impl Fn(&T, &T) -> bool,
) -> Result<()> {
    if v.len() != carpet.n_maps() {
        return Err(Error::DimensionMismatch { expected: carpet.n_maps(), got: v.len() });
    }
    let mut first: Vec<Option<&T>> = vec![None; carpet.n_cols()];
    for (i, x) in v.iter().enumerate() {
        let j = carpet.column_of(i);
        match first[j] {
            None => first[j] = Some(x),
            Some(y) if !same(x, y) => {
                return Err(Error::InvalidMeasure(format!("{name} is not constant on column {j} (map {i})")))
            }
            _ => {}
        }
    }
    Ok(())
}

impl MeasureSpec {
    pub fn new(carpet: &Carpet, k: u64, p: ProbVector, q: ProbVector) -> Result<Self> {
        let same = |a: &f64, b: &f64| (a - b).abs() <= COLUMN_TOL * a.abs().max(b.abs()).max(1.0);
        check_column_constant(carpet, p.entries(), "p", same)?;
        check_column_constant(carpet, q.entries(), "q", same)?;
        Ok(Self { carpet: carpet.clone(), k, level: carpet_level(carpet, k), p, q })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `L(K)`
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn p(&self) -> &ProbVector {
        &self.p
    }

    pub fn q(&self) -> &ProbVector {
        &self.q
    }

    fn check_word(&self, len: usize) -> Result<()> {
        if len < self.k as usize {
            return Err(Error::WordTooShort { len, level: self.k as usize });
        }
        Ok(())
    }

    fn weight(&self, pos: usize, i: usize) -> f64 {
        if pos < self.level as usize {
            self.p[i]
        } else {
            self.q[i]
        }
    }
}

pub fn nu_cylinder(spec: &MeasureSpec, word: &[usize]) -> Result<f64> {
    spec.check_word(word.len())?;
    Ok(word.iter().enumerate().map(|(pos, &i)| spec.weight(pos, i)).product())
}

/// `log ν_K` of a cylinder; `−∞` for null cylinders.
pub fn log_nu_cylinder(spec: &MeasureSpec, word: &[usize]) -> Result<f64> {
    spec.check_word(word.len())?;
    Ok(word.iter().enumerate().map(|(pos, &i)| spec.weight(pos, i).ln()).sum())
}

/// First map of every column, used to pick representative words.
fn column_representatives(carpet: &Carpet) -> Vec<usize> {
    let mut reps = vec![usize::MAX; carpet.n_cols()];
    for (i, &j) in carpet.columns_of_maps().iter().enumerate() {
        reps[j] = reps[j].min(i);
    }
    reps
}

/// A word whose cylinder lies in `sq`.
pub fn representative_word(carpet: &Carpet, sq: &SquareId) -> Vec<usize> {
    let reps = column_representatives(carpet);
    sq.prefix().iter().copied().chain(sq.columns().iter().map(|&j| reps[j])).collect()
}

/// `ν_K(B_k) = #B_k · ν_K(C_k)` for any cylinder `C_k` in the square.
pub fn nu_square(spec: &MeasureSpec, sq: &SquareId) -> Result<f64> {
    let word = representative_word(&spec.carpet, sq);
    let count = fibre_count(&spec.carpet, sq).to_f64().unwrap_or(f64::INFINITY);
    Ok(count * nu_cylinder(spec, &word)?)
}

/// `E_{ν_K}[−log ν_K(B_k)] = L(K)H(p) + (k−L(K))H(q) − (k−L(k))Σ q_i log N_{φ(i)}`.
pub fn expected_log_nu(spec: &MeasureSpec, k: u64) -> Result<f64> {
    spec.check_word(k as usize)?;
    let lk = carpet_level(&spec.carpet, k);
    let q_log_n: f64 = spec.q.entries().iter().zip(spec.carpet.fibre_vector()).map(|(&w, n)| w * n.ln()).sum();
    Ok(spec.level as f64 * entropy(&spec.p) + (k - spec.level) as f64 * entropy(&spec.q) - (k - lk) as f64 * q_log_n)
}

/// [`MeasureSpec`] with exact rational weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMeasure {
    carpet: Carpet,
    k: u64,
    level: u64,
    p: Vec<BigRational>,
    q: Vec<BigRational>,
}

impl ExactMeasure {
    pub fn new(carpet: &Carpet, k: u64, p: Vec<BigRational>, q: Vec<BigRational>) -> Result<Self> {
        for (name, v) in [("p", &p), ("q", &q)] {
            if v.iter().any(|x| x < &BigRational::zero()) {
                return Err(Error::InvalidProbVector(format!("{name} has a negative entry")));
            }
            let total: BigRational = v.iter().sum();
            if total != BigRational::one() {
                return Err(Error::InvalidProbVector(format!("{name} sums to {total}, not 1")));
            }
            check_column_constant(carpet, v, name, |a, b| a == b)?;
        }
        Ok(Self { carpet: carpet.clone(), k, level: carpet_level(carpet, k), p, q })
    }

    /// Builds weights `num_i / den`.
    pub fn from_ratios(carpet: &Carpet, k: u64, p: (&[i64], i64), q: (&[i64], i64)) -> Result<Self> {
        let conv = |(nums, den): (&[i64], i64)| -> Vec<BigRational> {
            nums.iter().map(|&x| BigRational::new(BigInt::from(x), BigInt::from(den))).collect()
        };
        Self::new(carpet, k, conv(p), conv(q))
    }

    pub fn nu_cylinder(&self, word: &[usize]) -> Result<BigRational> {
        if word.len() < self.k as usize {
            return Err(Error::WordTooShort { len: word.len(), level: self.k as usize });
        }
        Ok(word.iter().enumerate().fold(BigRational::one(), |acc, (pos, &i)| {
            acc * if pos < self.level as usize { &self.p[i] } else { &self.q[i] }
        }))
    }

    pub fn nu_square(&self, sq: &SquareId) -> Result<BigRational> {
        let word = representative_word(&self.carpet, sq);
        let count = BigRational::from_integer(BigInt::from(fibre_count(&self.carpet, sq)));
        Ok(count * self.nu_cylinder(&word)?)
    }
}
