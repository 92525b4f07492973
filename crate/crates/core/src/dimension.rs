//! Hausdorff and box dimensions of a carpet.
//!
//! The public values use the entropy form, which interpolates naturally
//! between the two dimensions. The usual closed forms are kept alongside as
//! an independent cross-check.

use serde::Serialize;

use crate::carpet::{entropy, mcmullen_vectors, uniform_vectors, Carpet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimPair {
    pub hausdorff: f64,
    pub box_dim: f64,
}

impl DimPair {
    pub fn of(carpet: &Carpet) -> Self {
        Self { hausdorff: hausdorff_dim(carpet), box_dim: box_dim(carpet) }
    }

    pub fn gap(&self) -> f64 {
        self.box_dim - self.hausdorff
    }
}

/// `H(p̂)/log n + (1 − log m/log n)·H(q̂^M)/log m`.
pub fn hausdorff_dim(carpet: &Carpet) -> f64 {
    let (p_hat, q_hat) = mcmullen_vectors(carpet);
    entropy(&p_hat) / carpet.log_n() + (1.0 - carpet.r()) * entropy(&q_hat) / carpet.log_m()
}

/// `H(p̃)/log n + (1 − log m/log n)·H(q̃^M)/log m`.
pub fn box_dim(carpet: &Carpet) -> f64 {
    let u = uniform_vectors(carpet);
    entropy(&u.maps) / carpet.log_n() + (1.0 - carpet.r()) * entropy(&u.columns) / carpet.log_m()
}

/// `log_m Σ_j N_j^{log_n m}`.
pub fn hausdorff_dim_closed_form(carpet: &Carpet) -> f64 {
    let r = carpet.r();
    let total: f64 = carpet.col_counts().iter().map(|&k| (k as f64).powf(r)).sum();
    total.ln() / carpet.log_m()
}

/// `log_m M + log_n (N/M)`.
pub fn box_dim_closed_form(carpet: &Carpet) -> f64 {
    (carpet.n_cols() as f64).ln() / carpet.log_m() + carpet.c() / carpet.log_n()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::{has_uniform_fibres, CarpetSpec};

    fn l_shape() -> Carpet {
        Carpet::new(CarpetSpec::new(2, 3, vec![(0, 0), (0, 1), (1, 0)])).unwrap()
    }

    #[test]
    fn l_shape_dimensions() {
        let c = l_shape();
        let oracle_h = (1.0 + 2f64.powf(2f64.ln() / 3f64.ln())).log2();
        let oracle_b = 1.0 + 1.5f64.ln() / 3f64.ln();
        assert!((hausdorff_dim(&c) - oracle_h).abs() < 1e-12);
        assert!((box_dim(&c) - oracle_b).abs() < 1e-12);
        assert!((hausdorff_dim(&c) - 1.349684).abs() < 1e-6);
        assert!((box_dim(&c) - 1.369070).abs() < 1e-6);
        assert!((DimPair::of(&c).gap() - 0.019386).abs() < 1e-6);
    }

    #[test]
    fn uniform_fibres_give_equal_dims() {
        let c = Carpet::new(CarpetSpec::new(2, 3, vec![(0, 0), (1, 1)])).unwrap();
        assert!((hausdorff_dim(&c) - 1.0).abs() < 1e-12);
        assert!((box_dim(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_map_is_a_point() {
        let c = Carpet::new(CarpetSpec::new(2, 3, vec![(1, 2)])).unwrap();
        assert!(has_uniform_fibres(&c));
        assert_eq!(hausdorff_dim(&c), 0.0);
        assert_eq!(box_dim(&c), 0.0);
    }

    #[test]
    fn full_grid_has_dimension_two() {
        let digits = (0..3).flat_map(|c| (0..5).map(move |r| (c, r))).collect();
        let c = Carpet::new(CarpetSpec::new(3, 5, digits)).unwrap();
        assert!((hausdorff_dim(&c) - 2.0).abs() < 1e-12);
        assert!((box_dim(&c) - 2.0).abs() < 1e-12);
    }
}
