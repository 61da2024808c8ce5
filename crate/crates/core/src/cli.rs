//! Command-line front end. Every command reads and writes the same data
//! directory as the HTTP service and accepts `--format text|json|csv`.

use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::api::{ADDR_ENV, DATA_DIR_ENV, DEFAULT_ADDR};
use crate::bundled::default_plan;
use crate::dataset::{ColumnKind, ColumnSchema};
use crate::kpi::{Plan, TestVerdict, VerdictOutcome};
use crate::olap::{build_cube, AggregateResult, SliceSpec};
use crate::report::{self, format_decimal, ReportFormat};
use crate::workspace::{AnalysisRun, CubeInfo, Workspace, WorkspaceError};

#[derive(Debug, Parser)]
#[command(name = "kpiforge", version, about = "Statistically validated KPI selection and OLAP slicing")]
pub struct Cli {
    /// Directory holding datasets, analyses and cubes.
    #[arg(long, global = true, env = DATA_DIR_ENV, default_value = "kpiforge-data")]
    pub data_dir: PathBuf,

    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    pub format: ReportFormat,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a CSV file into the store.
    Ingest {
        csv: PathBuf,
        /// Display name; defaults to the file stem.
        #[arg(long)]
        name: Option<String>,
    },
    /// Run a test plan against a stored dataset and store the run.
    Analyze {
        #[arg(long)]
        dataset: String,
        /// Plan JSON file; the bundled default plan when omitted.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Show the condensed KPI list of a stored run.
    Condense {
        #[arg(long)]
        analysis: String,
    },
    /// Render every verdict of a stored run as an SPSS-style table.
    Report {
        #[arg(long)]
        analysis: String,
    },
    /// Define and store a cube over a dataset.
    Cube {
        #[arg(long)]
        dataset: String,
        #[arg(long, value_delimiter = ',', required = true)]
        dimensions: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        measures: Vec<String>,
    },
    /// Aggregate a stored cube, optionally diced first.
    Aggregate {
        #[arg(long)]
        cube: String,
        #[arg(long)]
        measure: String,
        #[command(flatten)]
        query: Query,
    },
    /// One-off cube over a dataset: dice, then aggregate every measure.
    Slice {
        #[arg(long)]
        dataset: String,
        #[arg(long, value_delimiter = ',', required = true)]
        dimensions: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        measures: Vec<String>,
        #[command(flatten)]
        query: Query,
    },
    /// Run the HTTP service until interrupted.
    Serve {
        #[arg(long, env = ADDR_ENV, default_value = DEFAULT_ADDR)]
        addr: SocketAddr,
    },
}

#[derive(Debug, Args)]
pub struct Query {
    /// `dim=level`; repeat to dice on several dimensions.
    #[arg(long = "filter", value_parser = parse_filter)]
    pub filters: Vec<(String, String)>,
    #[arg(long)]
    pub group_by: Option<String>,
}

fn parse_filter(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((d, l)) if !d.is_empty() => Ok((d.to_owned(), l.to_owned())),
        _ => Err(format!("expected dim=level, got '{s}'")),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Workspace(#[from] WorkspaceError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Columns whose cells are all numbers are right-aligned, the rest left.
fn grid(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    let mut numeric = vec![true; header.len()];
    for row in rows {
        for ((w, cell), num) in widths.iter_mut().zip(row).zip(&mut numeric) {
            *w = (*w).max(cell.chars().count());
            *num &= cell.is_empty() || cell.parse::<f64>().is_ok();
        }
    }
    let header: Vec<String> = header.iter().map(|h| (*h).to_owned()).collect();
    let mut out = String::new();
    for row in std::iter::once(&header).chain(rows) {
        let mut line = String::new();
        for (j, ((cell, w), num)) in row.iter().zip(&widths).zip(&numeric).enumerate() {
            if j > 0 {
                line.push_str("  ");
            }
            if *num {
                let _ = write!(line, "{cell:>w$}");
            } else {
                let _ = write!(line, "{cell:<w$}");
            }
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    out
}

fn csv_of(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV write");
    for r in rows {
        w.write_record(r).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV of UTF-8 strings")
}

fn json_of<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn tabular<T: Serialize>(format: ReportFormat, value: &T, preamble: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        ReportFormat::Json => json_of(value),
        ReportFormat::Csv => csv_of(header, rows),
        ReportFormat::Text => format!("{preamble}{}", grid(header, rows)),
    }
}

fn schema_rows(schema: &[ColumnSchema]) -> Vec<Vec<String>> {
    schema
        .iter()
        .map(|c| {
            let kind = match c.kind {
                ColumnKind::Numeric => "numeric",
                ColumnKind::Categorical => "categorical",
            };
            vec![c.name.clone(), kind.into(), c.distinct_count.to_string(), c.missing_count.to_string()]
        })
        .collect()
}

fn verdict_rows(verdicts: &[TestVerdict]) -> Vec<Vec<String>> {
    verdicts
        .iter()
        .map(|v| {
            let method = serde_json::to_value(v.method).ok().and_then(|m| m.as_str().map(str::to_owned)).unwrap_or_default();
            let (stat, p, decision) = match &v.outcome {
                VerdictOutcome::Completed { statistic, p_value, decision, .. } => {
                    let d = serde_json::to_value(decision).ok().and_then(|d| d.as_str().map(str::to_owned));
                    (format_decimal(*statistic), format_decimal(*p_value), d.unwrap_or_default())
                }
                VerdictOutcome::Error { message } => (String::new(), String::new(), format!("error: {message}")),
            };
            vec![v.test_id.clone(), method, v.factor_a.clone(), v.factor_b.clone(), stat, p, decision]
        })
        .collect()
}

fn aggregate_rows(results: &[AggregateResult]) -> Vec<Vec<String>> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    results
        .iter()
        .flat_map(|r| &r.rows)
        .map(|row| {
            vec![
                row.group.clone().unwrap_or_else(|| "(all)".into()),
                row.measure.clone(),
                row.count.to_string(),
                opt(row.sum),
                opt(row.mean),
                opt(row.min),
                opt(row.max),
            ]
        })
        .collect()
}

const AGGREGATE_HEADER: [&str; 7] = ["group", "measure", "count", "sum", "mean", "min", "max"];

fn render_condensed(run: &AnalysisRun, format: ReportFormat) -> String {
    let c = &run.condensed;
    let mut rows: Vec<Vec<String>> =
        c.retained.iter().map(|k| vec![k.name.clone(), k.category_label(), "retained".into()]).collect();
    rows.extend(c.dropped.iter().map(|d| vec![d.kpi.name.clone(), d.kpi.category_label(), format!("dropped ({})", d.reason)]));
    tabular(format, c, "", &["kpi", "category", "status"], &rows)
}

fn render_cube(info: &CubeInfo, format: ReportFormat) -> String {
    let rows: Vec<Vec<String>> =
        info.dimensions.iter().map(|d| vec![d.name.clone(), d.levels.join(", ")]).collect();
    let preamble = format!("cube {} ({} facts; measures: {})\n", info.cube_id, info.fact_count, info.measures.join(", "));
    tabular(format, info, &preamble, &["dimension", "levels"], &rows)
}

/// Runs one parsed command and returns what it prints on stdout.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    let format = cli.format;
    if let Command::Serve { addr } = cli.command {
        let runtime = tokio::runtime::Runtime::new()?;
        runtime.block_on(crate::api::serve(addr, cli.data_dir))?;
        return Ok(String::new());
    }
    let ws = Workspace::open(&cli.data_dir)?;

    let out = match cli.command {
        Command::Ingest { csv, name } => {
            let bytes = std::fs::read(&csv).map_err(|e| CliError::Input(format!("{}: {e}", csv.display())))?;
            let name = name.unwrap_or_else(|| csv.file_stem().map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned()));
            let ds = ws.ingest(&bytes, &name)?;
            let schema = ds.schema();
            let value = serde_json::json!({ "id": ds.id(), "name": ds.name(), "row_count": ds.row_count(), "schema": schema });
            let preamble = format!("dataset {} ({} rows)\n", ds.id(), ds.row_count());
            tabular(format, &value, &preamble, &["column", "kind", "distinct", "missing"], &schema_rows(&schema))
        }
        Command::Analyze { dataset, plan } => {
            let plan = match plan {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    Plan::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
                }
                None => default_plan(),
            };
            let run = ws.analyze(&dataset, plan)?;
            let mut preamble = format!("analysis {}\n", run.id);
            let _ = writeln!(preamble, "retained: {}", run.condensed.retained_names().join(", "));
            tabular(
                format,
                &run,
                &preamble,
                &["test", "method", "factor_a", "factor_b", "statistic", "p", "decision"],
                &verdict_rows(&run.verdicts),
            )
        }
        Command::Condense { analysis } => render_condensed(&ws.analysis(&analysis)?, format),
        Command::Report { analysis } => {
            let run = ws.analysis(&analysis)?;
            report::render(&run.verdicts, Some(&run.plan.registry), format)
        }
        Command::Cube { dataset, dimensions, measures } => render_cube(&ws.create_cube(&dataset, &dimensions, &measures)?, format),
        Command::Aggregate { cube, measure, query } => {
            let result = ws.aggregate(&cube, &measure, query.group_by.as_deref(), query.filters)?;
            tabular(format, &result, "", &AGGREGATE_HEADER, &aggregate_rows(std::slice::from_ref(&result)))
        }
        Command::Slice { dataset, dimensions, measures, query } => {
            let ds = ws.dataset(&dataset)?;
            let mut cube = build_cube(ds, &dimensions, &measures).map_err(WorkspaceError::from)?;
            if !query.filters.is_empty() {
                let spec = SliceSpec::new(query.filters).map_err(WorkspaceError::from)?;
                cube = cube.dice(&spec).map_err(WorkspaceError::from)?;
            }
            let results = measures
                .iter()
                .map(|m| cube.aggregate(m, query.group_by.as_deref()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(WorkspaceError::from)?;
            tabular(format, &results, "", &AGGREGATE_HEADER, &aggregate_rows(&results))
        }
        Command::Serve { .. } => unreachable!("handled above"),
    };
    Ok(out)
}

/// Entry point for the binary: 0 on success, 1 on a command error, 2 on a
/// usage error.
pub fn main_with_args<I, T>(args: I) -> std::process::ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return std::process::ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            std::process::ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}
