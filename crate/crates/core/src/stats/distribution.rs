//! Right tails of the F, Student t and chi-square distributions.

use super::special::{regularized_gamma_q, regularized_incomplete_beta};
use super::StatsError;

/// `P(F(d1, d2) > f)`, the "Sig." column of an ANOVA table.
pub fn f_sf(f: f64, d1: u32, d2: u32) -> Result<f64, StatsError> {
    if d1 == 0 || d2 == 0 {
        return Err(StatsError::Domain(format!(
            "degrees of freedom must be at least 1, got ({d1}, {d2})"
        )));
    }
    if !(f >= 0.0) {
        return Err(StatsError::Domain(format!("F statistic must be non-negative, got {f}")));
    }
    if f == 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    let (d1, d2) = (f64::from(d1), f64::from(d2));
    regularized_incomplete_beta(d2 / (d2 + d1 * f), d2 / 2.0, d1 / 2.0)
}

/// Two-tailed `2 P(T(df) > |t|)`.
pub fn t_sf_two_tailed(t: f64, df: u32) -> Result<f64, StatsError> {
    if df == 0 {
        return Err(StatsError::Domain("t distribution needs df >= 1".into()));
    }
    if t.is_nan() {
        return Err(StatsError::Domain("t statistic is NaN".into()));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let df = f64::from(df);
    regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5)
}

/// `P(χ²(df) > x)` via the upper regularized incomplete gamma `Q(df/2, x/2)`.
pub fn chi_square_sf(x: f64, df: u32) -> Result<f64, StatsError> {
    if df == 0 {
        return Err(StatsError::Domain("chi-square distribution needs df >= 1".into()));
    }
    if !(x >= 0.0) {
        return Err(StatsError::Domain(format!("chi-square statistic must be non-negative, got {x}")));
    }
    regularized_gamma_q(f64::from(df) / 2.0, x / 2.0)
}
