//! Approximate squares as symbolic identifiers.
//!
//! A level-`k` approximate square is named by `L(k)` map indices followed by
//! `k − L(k)` column ranks. All indices are zero-based.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::level::carpet_level;
use crate::carpet::Carpet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SquareId {
    level: u64,
    prefix: Vec<usize>,
    columns: Vec<usize>,
}

impl SquareId {
    pub fn new(carpet: &Carpet, level: u64, prefix: Vec<usize>, columns: Vec<usize>) -> Result<Self> {
        let l = carpet_level(carpet, level) as usize;
        if prefix.len() != l || columns.len() != level as usize - l {
            return Err(Error::InvalidParameter(format!(
                "level {level} needs {l} map symbols and {} column symbols, got {} and {}",
                level as usize - l,
                prefix.len(),
                columns.len()
            )));
        }
        if let Some(&i) = prefix.iter().find(|&&i| i >= carpet.n_maps()) {
            return Err(Error::InvalidParameter(format!("map index {i} out of range")));
        }
        if let Some(&j) = columns.iter().find(|&&j| j >= carpet.n_cols()) {
            return Err(Error::InvalidParameter(format!("column rank {j} out of range")));
        }
        Ok(Self { level, prefix, columns })
    }

    /// The square containing the cylinder of `word` (length ≥ `level`).
    pub fn of_word(carpet: &Carpet, level: u64, word: &[usize]) -> Result<Self> {
        if word.len() < level as usize {
            return Err(Error::WordTooShort { len: word.len(), level: level as usize });
        }
        let l = carpet_level(carpet, level) as usize;
        let columns = word[l..level as usize].iter().map(|&i| carpet.column_of(i)).collect();
        Self::new(carpet, level, word[..l].to_vec(), columns)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    /// The level-`k1` square containing this one.
    pub fn ancestor(&self, carpet: &Carpet, k1: u64) -> Result<Self> {
        if k1 > self.level {
            return Err(Error::InvalidParameter(format!("ancestor level {k1} exceeds square level {}", self.level)));
        }
        let l1 = carpet_level(carpet, k1) as usize;
        let l = self.prefix.len();
        let columns = (l1..k1 as usize)
            .map(|pos| if pos < l { carpet.column_of(self.prefix[pos]) } else { self.columns[pos - l] })
            .collect();
        Self::new(carpet, k1, self.prefix[..l1].to_vec(), columns)
    }
}

/// `#B_K(i) = Π N_{î_ℓ}` over the column part: the number of level-`K`
/// cylinders inside the square.
pub fn fibre_count(carpet: &Carpet, sq: &SquareId) -> BigUint {
    sq.columns.iter().fold(BigUint::one(), |acc, &j| acc * BigUint::from(carpet.col_counts()[j]))
}

/// Number of level-`k2` squares inside a level-`k1` square.
///
/// When `L(k2) ≤ k1` the count is `M^{k2−k1} · Π N_{î_ℓ}` over positions
/// `L(k1)+1..=L(k2)`; otherwise it is `N^{L(k2)−k1} · M^{k2−L(k2)} · Π N_{î_ℓ}`
/// over positions `L(k1)+1..=k1`. `window` holds exactly those column ranks.
pub fn squares_within(carpet: &Carpet, k1: u64, k2: u64, window: &[usize]) -> Result<BigUint> {
    if k1 > k2 {
        return Err(Error::InvalidParameter(format!("k1 = {k1} exceeds k2 = {k2}")));
    }
    let (l1, l2) = (carpet_level(carpet, k1), carpet_level(carpet, k2));
    let (expected, base) = if l2 <= k1 {
        (l2 - l1, BigUint::from(carpet.n_cols()).pow((k2 - k1) as u32))
    } else {
        (
            k1 - l1,
            BigUint::from(carpet.n_maps()).pow((l2 - k1) as u32) * BigUint::from(carpet.n_cols()).pow((k2 - l2) as u32),
        )
    };
    if window.len() != expected as usize {
        return Err(Error::RegimeMismatch { expected: expected as usize, got: window.len() });
    }
    if let Some(&j) = window.iter().find(|&&j| j >= carpet.n_cols()) {
        return Err(Error::InvalidParameter(format!("column rank {j} out of range")));
    }
    Ok(window.iter().fold(base, |acc, &j| acc * BigUint::from(carpet.col_counts()[j])))
}

/// Every level-`k` square, in lexicographic order. Exponential in `k`.
pub fn enumerate_squares(carpet: &Carpet, k: u64) -> Vec<SquareId> {
    let l = carpet_level(carpet, k) as usize;
    let radices: Vec<usize> =
        (0..k as usize).map(|pos| if pos < l { carpet.n_maps() } else { carpet.n_cols() }).collect();
    let mut digits = vec![0usize; radices.len()];
    let mut out = Vec::new();
    loop {
        out.push(SquareId { level: k, prefix: digits[..l].to_vec(), columns: digits[l..].to_vec() });
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}
