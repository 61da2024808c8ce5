//! Numerical kernel: one-way ANOVA, Pearson correlation, chi-square
//! independence, and the distribution tails their p-values come from.
//!
//! Everything here is a pure function over immutable inputs. Values are
//! carried at full precision; rounding for display lives in
//! [`crate::report`].

mod anova;
mod chi_square;
mod correlation;
mod distribution;
pub mod special;

use thiserror::Error;

pub use anova::{one_way_anova, AnovaTable, Group, GroupedSample};
pub use chi_square::{chi_square_independence, ChiSquareResult};
pub use correlation::{correlation_p_value, pearson, CorrelationResult};
pub use distribution::{chi_square_sf, f_sf, t_sf_two_tailed};
pub use special::regularized_incomplete_beta;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{function} did not converge within {iterations} iterations")]
    NonConvergence { function: &'static str, iterations: usize },
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("within-groups sum of squares is zero while group means differ (infinite F)")]
    DegenerateAnova,
    #[error("correlation is undefined for a constant series")]
    ConstantSeries,
    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("contingency table has a zero marginal in {0}")]
    ZeroMarginal(String),
    #[error("contingency table is empty")]
    EmptyTable,
}
