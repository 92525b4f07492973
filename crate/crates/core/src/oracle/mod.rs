//! Exact finite-depth computations over the symbolic space.

pub mod composition;
pub mod level;
pub mod measure;
pub mod partition;
pub mod square;

pub use level::{carpet_level, level_l, Theta};
pub use measure::{expected_log_nu, log_nu_cylinder, nu_cylinder, nu_square, ExactMeasure, MeasureSpec};
pub use partition::{
    asymptotic_bad_exponent, cover_cost_log, empirical_rate, good_bad_counts, oracle_report, CoverCost, OracleReport,
    PartitionCounts, Scales,
};
pub use square::{enumerate_squares, fibre_count, squares_within, SquareId};
