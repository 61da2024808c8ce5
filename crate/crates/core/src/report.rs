//! SPSS-style rendering of verdicts.
//!
//! Everything upstream keeps full precision; this is the only place numbers
//! get rounded. Values are shown to three decimals, rounded half away from
//! zero, with the leading zero dropped (`.871`, `-.550`, `12.860`).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kpi::{Registry, TestDetail, TestVerdict, VerdictOutcome};
use crate::stats::{AnovaTable, ChiSquareResult, CorrelationResult};

pub const CORRELATION_FOOTNOTE: &str = "Correlation is significant at the 0.01 level (2-tailed).";

/// Correlations below this p-value get the `**` marker.
pub const MARKER_LEVEL: f64 = 0.01;

/// Three decimals, half away from zero, no leading zero.
pub fn format_decimal(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    // f64::round already rounds half away from zero
    let scaled = (x * 1000.0).round();
    if scaled == 0.0 {
        return ".000".to_owned();
    }
    let s = format!("{:.3}", scaled / 1000.0);
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

/// A significance value. Anything below .0005 shows as `.000`.
pub fn format_sig(p: f64) -> String {
    format_decimal(p)
}

/// A correlation coefficient with `**` appended when `p < .01`.
pub fn format_r(r: f64, p: f64) -> String {
    let mut s = format_decimal(r);
    if p < MARKER_LEVEL {
        s.push_str("**");
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown report format '{other}' (expected text, json or csv)")),
        }
    }
}

/// One rendered table. Cells are display strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportTable {
    pub test_id: String,
    pub title: String,
    /// Dependent variable line shown under the title, ANOVA only.
    pub subtitle: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footnotes: Vec<String>,
}

fn column_label(registry: Option<&Registry>, kpi: &str) -> String {
    registry.and_then(|r| r.get(kpi).ok()).map_or_else(|| kpi.to_owned(), |k| k.column.clone())
}

fn strings<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|&s| s.to_owned()).collect()
}

pub fn anova_table(test_id: &str, dependent: &str, t: &AnovaTable) -> ReportTable {
    ReportTable {
        test_id: test_id.to_owned(),
        title: "ANOVA".into(),
        subtitle: Some(dependent.to_owned()),
        header: strings(["", "Sum of Squares", "df", "Mean Square", "F", "Sig."]),
        rows: vec![
            vec![
                "Between Groups".into(),
                format_decimal(t.ss_between),
                t.df_between.to_string(),
                format_decimal(t.ms_between),
                format_decimal(t.f_stat),
                format_sig(t.p_value),
            ],
            vec![
                "Within Groups".into(),
                format_decimal(t.ss_within),
                t.df_within.to_string(),
                format_decimal(t.ms_within),
                String::new(),
                String::new(),
            ],
            vec!["Total".into(), format_decimal(t.ss_total), t.df_total.to_string(), String::new(), String::new(), String::new()],
        ],
        footnotes: Vec::new(),
    }
}

/// The symmetric two-variable matrix SPSS prints for a bivariate correlation.
pub fn correlation_table(test_id: &str, a: &str, b: &str, c: &CorrelationResult) -> ReportTable {
    let r = format_r(c.r, c.p_two_tailed);
    let sig = format_sig(c.p_two_tailed);
    let n = c.n_pairs.to_string();
    let block = |name: &str, own_first: bool| {
        let (first, second) = if own_first { ("1".to_owned(), r.clone()) } else { (r.clone(), "1".to_owned()) };
        let (sig_first, sig_second) = if own_first { (String::new(), sig.clone()) } else { (sig.clone(), String::new()) };
        vec![
            vec![name.to_owned(), "Pearson Correlation".into(), first, second],
            vec![String::new(), "Sig. (2-tailed)".into(), sig_first, sig_second],
            vec![String::new(), "N".into(), n.clone(), n.clone()],
        ]
    };
    let mut rows = block(a, true);
    rows.extend(block(b, false));
    let footnotes = if c.p_two_tailed < MARKER_LEVEL { vec![format!("** {CORRELATION_FOOTNOTE}")] } else { Vec::new() };
    ReportTable {
        test_id: test_id.to_owned(),
        title: "Correlations".into(),
        subtitle: None,
        header: vec![String::new(), String::new(), a.to_owned(), b.to_owned()],
        rows,
        footnotes,
    }
}

pub fn chi_square_table(test_id: &str, c: &ChiSquareResult) -> ReportTable {
    ReportTable {
        test_id: test_id.to_owned(),
        title: "Chi-Square Tests".into(),
        subtitle: None,
        header: strings(["", "Value", "df", "Asymp. Sig. (2-sided)"]),
        rows: vec![vec![
            "Pearson Chi-Square".into(),
            format_decimal(c.statistic),
            c.df.to_string(),
            format_sig(c.p_value),
        ]],
        footnotes: Vec::new(),
    }
}

/// Table for one verdict. With a registry, variables are labelled by their
/// dataset column, as SPSS would; otherwise by KPI name.
pub fn verdict_table(v: &TestVerdict, registry: Option<&Registry>) -> ReportTable {
    let a = column_label(registry, &v.factor_a);
    let b = column_label(registry, &v.factor_b);
    match &v.outcome {
        VerdictOutcome::Completed { detail: TestDetail::Anova(t), .. } => anova_table(&v.test_id, &b, t),
        VerdictOutcome::Completed { detail: TestDetail::Correlation(c), .. } => correlation_table(&v.test_id, &a, &b, c),
        VerdictOutcome::Completed { detail: TestDetail::ChiSquare(c), .. } => chi_square_table(&v.test_id, c),
        VerdictOutcome::Error { message } => ReportTable {
            test_id: v.test_id.clone(),
            title: "Error".into(),
            subtitle: None,
            header: vec![String::new(), String::new()],
            rows: vec![vec!["Message".into(), message.clone()]],
            footnotes: Vec::new(),
        },
    }
}

pub fn render_text(tables: &[ReportTable]) -> String {
    let mut out = String::new();
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "[{}] {}", t.test_id, t.title);
        if let Some(sub) = &t.subtitle {
            let _ = writeln!(out, "{sub}");
        }
        let width = t.header.len();
        let mut widths = vec![0usize; width];
        for row in std::iter::once(&t.header).chain(&t.rows) {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        for row in std::iter::once(&t.header).chain(&t.rows) {
            let mut line = String::new();
            for (j, (cell, w)) in row.iter().zip(&widths).enumerate() {
                if j > 0 {
                    line.push_str("  ");
                }
                // text columns on the left, numbers right-aligned
                if j == 0 || (t.title == "Correlations" && j == 1) {
                    let _ = write!(line, "{cell:<w$}");
                } else {
                    let _ = write!(line, "{cell:>w$}");
                }
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        for f in &t.footnotes {
            let _ = writeln!(out, "{f}");
        }
    }
    out
}

/// One CSV record per table row, prefixed with the test id and title.
pub fn render_csv(tables: &[ReportTable]) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for t in tables {
        let mut header = vec![t.test_id.clone(), t.title.clone()];
        header.extend(t.header.iter().cloned());
        w.write_record(&header).expect("in-memory CSV write");
        for row in &t.rows {
            let mut rec = vec![t.test_id.clone(), t.title.clone()];
            rec.extend(row.iter().cloned());
            w.write_record(&rec).expect("in-memory CSV write");
        }
        for f in &t.footnotes {
            w.write_record([t.test_id.as_str(), "footnote", f.as_str()]).expect("in-memory CSV write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV of UTF-8 strings")
}

pub fn render(verdicts: &[TestVerdict], registry: Option<&Registry>, format: ReportFormat) -> String {
    let tables: Vec<ReportTable> = verdicts.iter().map(|v| verdict_table(v, registry)).collect();
    match format {
        ReportFormat::Text => render_text(&tables),
        ReportFormat::Csv => render_csv(&tables),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&tables).expect("report tables serialize");
            s.push('\n');
            s
        }
    }
}
