//! Carpet descriptions and probability-vector primitives.
//!
//! A carpet is given by an `m × n` grid (`n > m ≥ 2`) and the set of selected
//! cells. Maps are indexed `0..N` in ascending `(column, row)` order, so the
//! maps of each non-empty column form a contiguous block and column ranks
//! `0..M` follow ascending column index.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `Σ p_i = 1`.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Raw carpet description as read from a spec file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarpetSpec {
    pub m: i64,
    pub n: i64,
    /// Zero-based `(column, row)` pairs.
    pub digits: Vec<(i64, i64)>,
}

impl CarpetSpec {
    pub fn new(m: i64, n: i64, digits: Vec<(i64, i64)>) -> Self {
        Self { m, n, digits }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// A carpet with the given column counts, filling each column from row 0.
    ///
    /// Column `j` of the grid receives `counts[j]` maps.
    pub fn from_column_counts(m: i64, n: i64, counts: &[i64]) -> Self {
        let digits = counts.iter().enumerate().flat_map(|(col, &k)| (0..k).map(move |row| (col as i64, row))).collect();
        Self { m, n, digits }
    }
}

/// A validated carpet together with its derived constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Carpet {
    spec: CarpetSpec,
    n_maps: usize,
    col_counts: Vec<u64>,
    /// Column rank of every map (the map `φ`).
    col_of_map: Vec<usize>,
    log_m: f64,
    log_n: f64,
    r: f64,
    c: f64,
    mean_log_n: f64,
    log_counts: Vec<f64>,
}

impl Carpet {
    pub fn new(spec: CarpetSpec) -> Result<Self> {
        parse_carpet(spec)
    }

    pub fn spec(&self) -> &CarpetSpec {
        &self.spec
    }

    pub fn m(&self) -> u64 {
        self.spec.m as u64
    }

    pub fn n(&self) -> u64 {
        self.spec.n as u64
    }

    /// Total number of maps `N`.
    pub fn n_maps(&self) -> usize {
        self.n_maps
    }

    /// Number of non-empty columns `M`.
    pub fn n_cols(&self) -> usize {
        self.col_counts.len()
    }

    /// `N_1, …, N_M` in ascending column order.
    pub fn col_counts(&self) -> &[u64] {
        &self.col_counts
    }

    /// Column rank `φ(i)` of map `i`.
    pub fn column_of(&self, map: usize) -> usize {
        self.col_of_map[map]
    }

    pub fn columns_of_maps(&self) -> &[usize] {
        &self.col_of_map
    }

    /// `N_{φ(i)}` for every map, i.e. the vector **N**.
    pub fn fibre_vector(&self) -> Vec<f64> {
        self.col_of_map.iter().map(|&j| self.col_counts[j] as f64).collect()
    }

    pub fn log_m(&self) -> f64 {
        self.log_m
    }

    pub fn log_n(&self) -> f64 {
        self.log_n
    }

    /// `log m / log n`, the breakpoint `log_n m`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// `log(N/M)`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `(1/M) Σ log N_j`.
    pub fn mean_log_n(&self) -> f64 {
        self.mean_log_n
    }

    /// `log N_j` per column.
    pub fn log_counts(&self) -> &[f64] {
        &self.log_counts
    }

    pub fn max_count(&self) -> u64 {
        self.col_counts.iter().copied().max().unwrap_or(1)
    }

    pub fn log_max_count(&self) -> f64 {
        (self.max_count() as f64).ln()
    }

    /// Number of columns attaining the maximal count.
    pub fn max_count_multiplicity(&self) -> usize {
        let max = self.max_count();
        self.col_counts.iter().filter(|&&k| k == max).count()
    }

    /// Distinct column counts with their multiplicities, ascending by count.
    pub fn count_classes(&self) -> Vec<(u64, u64)> {
        let mut classes: BTreeMap<u64, u64> = BTreeMap::new();
        for &k in &self.col_counts {
            *classes.entry(k).or_default() += 1;
        }
        classes.into_iter().collect()
    }
}

pub fn parse_carpet(spec: CarpetSpec) -> Result<Carpet> {
    let (m, n) = (spec.m, spec.n);
    if m < 2 {
        return Err(Error::InvalidSpec(format!("m = {m} must be at least 2")));
    }
    if n <= m {
        return Err(Error::InvalidSpec(format!("n = {n} must be strictly greater than m = {m}")));
    }
    if spec.digits.is_empty() {
        return Err(Error::InvalidSpec("digit list is empty".into()));
    }
    let mut cells = spec.digits.clone();
    for &(col, row) in &cells {
        if !(0..m).contains(&col) || !(0..n).contains(&row) {
            return Err(Error::InvalidSpec(format!("digit ({col}, {row}) outside [0, {m}) x [0, {n})")));
        }
    }
    cells.sort_unstable();
    if let Some(w) = cells.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidSpec(format!("duplicate digit ({}, {})", w[0].0, w[0].1)));
    }

    let mut col_counts: Vec<u64> = Vec::new();
    let mut col_of_map = Vec::with_capacity(cells.len());
    let mut last_col = None;
    for &(col, _) in &cells {
        if last_col != Some(col) {
            col_counts.push(0);
            last_col = Some(col);
        }
        *col_counts.last_mut().unwrap() += 1;
        col_of_map.push(col_counts.len() - 1);
    }

    let n_maps = cells.len();
    let n_cols = col_counts.len();
    let log_m = (m as f64).ln();
    let log_n = (n as f64).ln();
    let log_counts: Vec<f64> = col_counts.iter().map(|&k| (k as f64).ln()).collect();
    let mean_log_n = log_counts.iter().sum::<f64>() / n_cols as f64;
    Ok(Carpet {
        spec,
        n_maps,
        col_counts,
        col_of_map,
        log_m,
        log_n,
        r: log_m / log_n,
        c: (n_maps as f64 / n_cols as f64).ln(),
        mean_log_n,
        log_counts,
    })
}

/// A probability vector; entries are non-negative and sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Validates and renormalizes `entries` if their sum is within
    /// [`PROB_TOLERANCE`] of one.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProbVector("empty vector".into()));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidProbVector(format!("entry {bad} is not a probability")));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidProbVector(format!("entries sum to {total}")));
        }
        Ok(Self(entries.into_iter().map(|x| x / total).collect()))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    /// Convex combination `w·a + (1−w)·b`.
    pub fn mix(w: f64, a: &ProbVector, b: &ProbVector) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        Self::new(a.0.iter().zip(&b.0).map(|(x, y)| w * x + (1.0 - w) * y).collect())
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Shannon entropy in nats, with `0·log 0 = 0`.
pub fn entropy(p: &ProbVector) -> f64 {
    -p.0.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// `Σ p_i log c_i`, the logarithm of the `p`-weighted geometric mean of `c`.
/// Terms with `p_i = 0` are skipped.
pub fn log_geometric_mean(c: &[f64], p: &ProbVector) -> Result<f64> {
    if c.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: c.len() });
    }
    Ok(c.iter().zip(&p.0).filter(|(_, &w)| w > 0.0).map(|(&x, &w)| w * x.ln()).sum())
}

/// The vectors `(p̂, q̂^M)` attaining the Hausdorff dimension.
pub fn mcmullen_vectors(carpet: &Carpet) -> (ProbVector, ProbVector) {
    let r = carpet.r();
    let weights: Vec<f64> = carpet.col_counts().iter().map(|&k| (k as f64).powf(r)).collect();
    let total: f64 = weights.iter().sum();
    let q_cols: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let p_maps: Vec<f64> =
        carpet.columns_of_maps().iter().map(|&j| q_cols[j] / carpet.col_counts()[j] as f64).collect();
    (
        ProbVector::new(p_maps).expect("p̂ is a probability vector"),
        ProbVector::new(q_cols).expect("q̂^M is a probability vector"),
    )
}

/// The uniform vectors of a carpet.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformVectors {
    /// `p̃`, uniform on maps.
    pub maps: ProbVector,
    /// `q̃^M`, uniform on columns.
    pub columns: ProbVector,
    /// `q̃/N`, uniform on columns, spread evenly within each column.
    pub coordinate: ProbVector,
}

pub fn uniform_vectors(carpet: &Carpet) -> UniformVectors {
    let cols = carpet.n_cols() as f64;
    let coordinate = carpet.columns_of_maps().iter().map(|&j| 1.0 / (cols * carpet.col_counts()[j] as f64)).collect();
    UniformVectors {
        maps: ProbVector::uniform(carpet.n_maps()),
        columns: ProbVector::uniform(carpet.n_cols()),
        coordinate: ProbVector::new(coordinate).expect("q̃/N is a probability vector"),
    }
}

/// Spreads a column distribution evenly over the maps of each column.
pub fn spread_over_columns(carpet: &Carpet, q_cols: &ProbVector) -> Result<ProbVector> {
    if q_cols.len() != carpet.n_cols() {
        return Err(Error::DimensionMismatch { expected: carpet.n_cols(), got: q_cols.len() });
    }
    ProbVector::new(carpet.columns_of_maps().iter().map(|&j| q_cols[j] / carpet.col_counts()[j] as f64).collect())
}

pub fn has_uniform_fibres(carpet: &Carpet) -> bool {
    carpet.col_counts().windows(2).all(|w| w[0] == w[1])
}
