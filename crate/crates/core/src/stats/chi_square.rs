use serde::{Deserialize, Serialize};

use super::distribution::chi_square_sf;
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

/// Pearson chi-square test of independence on an `r x c` table of counts.
///
/// Expected counts come from the row and column marginals. The p-value is
/// the chi-square right tail evaluated through the upper regularized
/// incomplete gamma function. No continuity correction is applied.
pub fn chi_square_independence(table: &[Vec<f64>]) -> Result<ChiSquareResult, StatsError> {
    if table.is_empty() || table.iter().all(|row| row.is_empty()) {
        return Err(StatsError::EmptyTable);
    }
    let cols = table[0].len();
    if table.iter().any(|row| row.len() != cols) {
        return Err(StatsError::Domain("contingency table rows differ in length".into()));
    }
    if table.len() < 2 || cols < 2 {
        return Err(StatsError::Domain(format!(
            "contingency table needs at least 2 rows and 2 columns, got {}x{}",
            table.len(),
            cols
        )));
    }
    if table.iter().flatten().any(|&c| !(c >= 0.0) || !c.is_finite()) {
        return Err(StatsError::Domain("counts must be finite and non-negative".into()));
    }

    let row_sums: Vec<f64> = table.iter().map(|row| row.iter().sum()).collect();
    let col_sums: Vec<f64> = (0..cols).map(|j| table.iter().map(|row| row[j]).sum()).collect();
    if let Some(i) = row_sums.iter().position(|&s| s == 0.0) {
        return Err(StatsError::ZeroMarginal(format!("row {i}")));
    }
    if let Some(j) = col_sums.iter().position(|&s| s == 0.0) {
        return Err(StatsError::ZeroMarginal(format!("column {j}")));
    }
    let total: f64 = row_sums.iter().sum();

    let mut statistic = 0.0;
    for (row, &rs) in table.iter().zip(&row_sums) {
        for (&obs, &cs) in row.iter().zip(&col_sums) {
            let expected = rs * cs / total;
            statistic += (obs - expected).powi(2) / expected;
        }
    }
    let df = ((table.len() - 1) * (cols - 1)) as u32;
    let p_value = chi_square_sf(statistic, df)?;
    Ok(ChiSquareResult { statistic, df, p_value })
}
