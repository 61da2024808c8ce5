use serde::{Deserialize, Serialize};

use super::distribution::t_sf_two_tailed;
use super::StatsError;

/// Pearson correlation with its two-tailed t-test significance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub n_pairs: usize,
    pub df: u32,
    /// Infinite when `|r| = 1`.
    #[serde(with = "crate::serde_float")]
    pub t_stat: f64,
    pub p_two_tailed: f64,
}

impl CorrelationResult {
    /// Significance of a known coefficient over `n_pairs` observations.
    pub fn from_r(r: f64, n_pairs: usize) -> Result<Self, StatsError> {
        if n_pairs < 3 {
            return Err(StatsError::TooFewPoints { needed: 3, got: n_pairs });
        }
        if !(-1.0..=1.0).contains(&r) {
            return Err(StatsError::Domain(format!("correlation must lie in [-1, 1], got {r}")));
        }
        let df = u32::try_from(n_pairs - 2)
            .map_err(|_| StatsError::Domain(format!("too many pairs: {n_pairs}")))?;
        let (t_stat, p_two_tailed) = if r.abs() == 1.0 {
            (f64::INFINITY.copysign(r), 0.0)
        } else {
            let t = r * f64::from(df).sqrt() / (1.0 - r * r).sqrt();
            (t, t_sf_two_tailed(t, df)?)
        };
        Ok(Self { r, n_pairs, df, t_stat, p_two_tailed })
    }
}

/// Two-tailed p-value of a Pearson coefficient `r` over `n` pairs.
pub fn correlation_p_value(r: f64, n: usize) -> Result<f64, StatsError> {
    CorrelationResult::from_r(r, n).map(|c| c.p_two_tailed)
}

/// Pearson product-moment correlation of two aligned series.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewPoints { needed: 3, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::Domain("correlation input contains a non-finite value".into()));
    }
    if x.iter().all(|&v| v == x[0]) || y.iter().all(|&v| v == y[0]) {
        return Err(StatsError::ConstantSeries);
    }

    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    CorrelationResult::from_r(r, x.len())
}
