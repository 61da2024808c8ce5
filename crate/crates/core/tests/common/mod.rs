//! Checks shared by the property suite and the acceptance runner. Each
//! returns `Err(description)` on the first violation.

#![allow(dead_code)]

use kpiforge::dataset::{load_csv, Cell, Dataset};
use kpiforge::olap::{build_cube, SliceSpec};
use kpiforge::stats::special::regularized_incomplete_beta;
use kpiforge::stats::{one_way_anova, Group, GroupedSample, StatsError};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

pub type Check = Result<(), String>;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

/// Groups with exactly the requested sums of squares: each group is its
/// mean plus alternating +s/-s deviations, so sizes must be even.
pub fn engineered_sample(sizes: &[usize], ss_between: f64, ss_within: f64) -> GroupedSample {
    assert!(sizes.iter().all(|n| n % 2 == 0 && *n > 0));
    let n: usize = sizes.iter().sum();
    let k = sizes.len() as f64;
    // evenly spaced offsets, re-centred on their weighted mean
    let raw: Vec<f64> = (0..sizes.len()).map(|i| i as f64 - (k - 1.0) / 2.0).collect();
    let centre = raw.iter().zip(sizes).map(|(d, &m)| d * m as f64).sum::<f64>() / n as f64;
    let centred: Vec<f64> = raw.iter().map(|d| d - centre).collect();
    let spread: f64 = centred.iter().zip(sizes).map(|(d, &m)| m as f64 * d * d).sum();
    let scale = (ss_between / spread).sqrt();
    let s = (ss_within / n as f64).sqrt();
    let groups = sizes
        .iter()
        .zip(&centred)
        .enumerate()
        .map(|(i, (&m, &d))| {
            let mean = 10.0 + d * scale;
            let values = (0..m).map(|j| if j % 2 == 0 { mean + s } else { mean - s }).collect();
            Group { label: format!("g{i}"), values }
        })
        .collect();
    GroupedSample::new(groups).expect("engineered sample is valid")
}

fn group_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0e3..1.0e3f64, 1..12), 2..6)
        .prop_filter("needs N > k", |g| g.iter().map(Vec::len).sum::<usize>() > g.len())
}

fn sample_of(groups: &[Vec<f64>]) -> GroupedSample {
    GroupedSample::new(
        groups.iter().enumerate().map(|(i, v)| Group { label: i.to_string(), values: v.clone() }).collect(),
    )
    .expect("valid generated sample")
}

/// ss_total = ss_between + ss_within, and F and p survive `x -> k x + c`.
pub fn anova_additivity_and_invariance(cases: u32) -> Check {
    let strategy = (group_strategy(), -1.0e3..1.0e3f64, prop_oneof![-100.0..-0.01f64, 0.01..100.0f64]);
    runner(cases)
        .run(&strategy, |(groups, c, k)| {
            let base = one_way_anova(&sample_of(&groups)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(
                rel_close(base.ss_total, base.ss_between + base.ss_within, 1e-9),
                "additivity: {} vs {}",
                base.ss_total,
                base.ss_between + base.ss_within
            );
            for transformed in [
                groups.iter().map(|g| g.iter().map(|x| x + c).collect()).collect::<Vec<Vec<f64>>>(),
                groups.iter().map(|g| g.iter().map(|x| x * k).collect()).collect(),
            ] {
                let t = one_way_anova(&sample_of(&transformed)).map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert!(rel_close(t.f_stat, base.f_stat, 1e-9), "F {} vs {}", t.f_stat, base.f_stat);
                prop_assert!(rel_close(t.p_value, base.p_value, 1e-9), "p {} vs {}", t.p_value, base.p_value);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// I_x(a,b) + I_{1-x}(b,a) = 1 for a, b in {0.5, 1.0, ..., 25.0}.
pub fn beta_complement_grid() -> Check {
    let params: Vec<f64> = (1..=50).map(|i| i as f64 * 0.5).collect();
    let xs = [0.001, 0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95, 0.999];
    for &a in &params {
        for &b in &params {
            for &x in &xs {
                let lhs = regularized_incomplete_beta(x, a, b).map_err(|e| e.to_string())?;
                let rhs = regularized_incomplete_beta(1.0 - x, b, a).map_err(|e| e.to_string())?;
                if ((lhs + rhs) - 1.0).abs() > 1e-10 {
                    return Err(format!("I_{x}({a},{b}) + I_{}({b},{a}) = {}", 1.0 - x, lhs + rhs));
                }
            }
        }
    }
    Ok(())
}

/// Textbook one-way ANOVA straight from the definitions, with the F tail
/// taken from statrs.
struct NaiveAnova {
    ss_between: f64,
    ss_within: f64,
    f: Option<f64>,
    p: Option<f64>,
}

fn naive_anova(groups: &[Vec<f64>]) -> NaiveAnova {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let grand = all.iter().sum::<f64>() / n;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        ss_between += g.len() as f64 * (mean - grand).powi(2);
        ss_within += g.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    }
    let dfb = (groups.len() - 1) as f64;
    let dfw = n - groups.len() as f64;
    let (f, p) = if ss_within == 0.0 {
        (None, None)
    } else {
        let f = (ss_between / dfb) / (ss_within / dfw);
        let p = FisherSnedecor::new(dfb, dfw).expect("valid df").sf(f);
        (Some(f), Some(p))
    };
    NaiveAnova { ss_between, ss_within, f, p }
}

/// Every split of `n` into `k` positive parts, in order.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    (1..=n - (k - 1))
        .flat_map(|first| {
            compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// All samples of at most 8 values from `grid` in 2 or 3 groups, compared
/// with [`naive_anova`]. Returns the number of instances checked.
pub fn anova_brute_force(grid: &[f64]) -> Result<usize, String> {
    let mut checked = 0;
    for k in 2..=3 {
        for n in (k + 1)..=8 {
            for sizes in compositions(n, k) {
                let total = grid.len().pow(n as u32);
                for mut code in 0..total {
                    let mut values = Vec::with_capacity(n);
                    for _ in 0..n {
                        values.push(grid[code % grid.len()]);
                        code /= grid.len();
                    }
                    let mut groups = Vec::with_capacity(k);
                    let mut rest = values.as_slice();
                    for &size in &sizes {
                        let (head, tail) = rest.split_at(size);
                        groups.push(head.to_vec());
                        rest = tail;
                    }
                    compare_with_naive(&groups)?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

fn compare_with_naive(groups: &[Vec<f64>]) -> Check {
    let naive = naive_anova(groups);
    let got = one_way_anova(&sample_of(groups));
    let ctx = || format!("{groups:?}");
    match (got, naive.f, naive.p) {
        (Ok(t), Some(f), Some(p)) => {
            let ok = (t.ss_between - naive.ss_between).abs() <= 1e-9 * naive.ss_between.max(1.0)
                && (t.ss_within - naive.ss_within).abs() <= 1e-9 * naive.ss_within.max(1.0)
                && (t.f_stat - f).abs() <= 1e-9 * f.max(1.0)
                && (t.p_value - p).abs() <= 1e-9;
            if ok {
                Ok(())
            } else {
                Err(format!("{}: got F {} p {}, naive F {f} p {p}", ctx(), t.f_stat, t.p_value))
            }
        }
        // no within-group spread at all
        (Ok(t), None, None) if naive.ss_between == 0.0 => {
            if t.f_stat == 0.0 && t.p_value == 1.0 {
                Ok(())
            } else {
                Err(format!("{}: all-identical input gave F {} p {}", ctx(), t.f_stat, t.p_value))
            }
        }
        (Err(StatsError::DegenerateAnova), None, None) if naive.ss_between > 0.0 => Ok(()),
        (got, f, p) => Err(format!("{}: got {got:?}, naive F {f:?} p {p:?}", ctx())),
    }
}

fn fixture_strategy() -> impl Strategy<Value = Vec<(Option<u8>, Option<u8>, Option<u8>, Option<i16>)>> {
    let level = |n: u8| prop::option::weighted(0.9, 0..n);
    prop::collection::vec((level(3), level(4), level(2), prop::option::weighted(0.9, -500i16..500)), 0..=200)
}

fn fixture_csv(rows: &[(Option<u8>, Option<u8>, Option<u8>, Option<i16>)]) -> Dataset {
    let mut text = String::from("Course,State,Shift,Score\n");
    let cell = |v: Option<u8>, prefix: &str| v.map(|x| format!("{prefix}{x}")).unwrap_or_default();
    for (a, b, c, m) in rows {
        text.push_str(&format!(
            "{},{},{},{}\n",
            cell(*a, "C"),
            cell(*b, "S"),
            cell(*c, "H"),
            m.map(|x| (f64::from(x) / 4.0).to_string()).unwrap_or_default()
        ));
    }
    load_csv(text.as_bytes(), "fixture").expect("fixture CSV loads")
}

fn text_cell(ds: &Dataset, column: &str, row: usize) -> Option<String> {
    match ds.column(column).expect("fixture column").cell(row) {
        Cell::Text(s) => Some(s.to_owned()),
        Cell::Number(x) => Some(x.to_string()),
        Cell::Missing => None,
    }
}

/// Every single-filter slice and every two- and three-filter dice over
/// random fixtures of up to 200 rows matches a plain row filter; dice order
/// is irrelevant; group aggregates add up to the ungrouped one; the parent
/// cube is untouched.
pub fn slice_dice_oracle(cases: u32) -> Check {
    runner(cases)
        .run(&fixture_strategy(), |rows| {
            let ds = fixture_csv(&rows);
            let dims = ["Course", "State", "Shift"];
            let cube = build_cube(ds.clone(), &dims, &["Score"]).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let facts_before = cube.facts().to_vec();

            let mut specs: Vec<Vec<(String, String)>> = vec![];
            let levels: Vec<Vec<String>> =
                dims.iter().map(|d| cube.dimension(d).unwrap().levels().to_vec()).collect();
            for (i, di) in dims.iter().enumerate() {
                for li in &levels[i] {
                    specs.push(vec![(di.to_string(), li.clone())]);
                    for (j, dj) in dims.iter().enumerate().skip(i + 1) {
                        for lj in &levels[j] {
                            specs.push(vec![(di.to_string(), li.clone()), (dj.to_string(), lj.clone())]);
                            for (m, dm) in dims.iter().enumerate().skip(j + 1) {
                                for lm in &levels[m] {
                                    specs.push(vec![
                                        (di.to_string(), li.clone()),
                                        (dj.to_string(), lj.clone()),
                                        (dm.to_string(), lm.clone()),
                                    ]);
                                }
                            }
                        }
                    }
                }
            }

            for filters in specs {
                let expected: Vec<usize> = (0..ds.row_count())
                    .filter(|&r| filters.iter().all(|(d, l)| text_cell(&ds, d, r).as_deref() == Some(l.as_str())))
                    .collect();
                let spec = SliceSpec::new(filters.clone()).unwrap();
                let diced = cube.dice(&spec).unwrap();
                prop_assert_eq!(diced.facts(), expected.as_slice(), "{:?}", filters);
                if filters.len() == 1 {
                    let sliced = cube.slice(&spec).unwrap();
                    prop_assert_eq!(sliced.facts(), expected.as_slice());
                }
                let mut reversed = filters.clone();
                reversed.reverse();
                let rediced = cube.dice(&SliceSpec::new(reversed).unwrap()).unwrap();
                prop_assert_eq!(rediced.facts(), diced.facts());

                // conservation over the first dimension not filtered on
                let total = diced.aggregate("Score", None).unwrap();
                if let Some(free) = dims.iter().find(|d| !filters.iter().any(|(f, _)| f == *d)) {
                    let grouped = diced.aggregate("Score", Some(free)).unwrap();
                    let ungrouped_count = total.rows.first().map_or(0, |r| r.count);
                    let group_count: usize = grouped.rows.iter().map(|r| r.count).sum();
                    // facts missing the grouping dimension fall outside every group
                    let missing_dim = diced
                        .facts()
                        .iter()
                        .filter(|&&r| text_cell(&ds, free, r).is_none() && text_cell(&ds, "Score", r).is_some())
                        .count();
                    prop_assert_eq!(group_count + missing_dim, ungrouped_count);
                    let group_sum: f64 = grouped.rows.iter().filter_map(|r| r.sum).sum();
                    let missing_sum: f64 = diced
                        .facts()
                        .iter()
                        .filter(|&&r| text_cell(&ds, free, r).is_none())
                        .filter_map(|&r| ds.column("Score").unwrap().as_numeric().unwrap()[r])
                        .sum();
                    let total_sum = total.rows.first().and_then(|r| r.sum).unwrap_or(0.0);
                    prop_assert!((group_sum + missing_sum - total_sum).abs() < 1e-6);
                }
            }
            prop_assert_eq!(cube.facts(), facts_before.as_slice());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub struct CliOutput {
    pub code: Option<i32>,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli(data_dir: &std::path::Path, args: &[&str]) -> CliOutput {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_kpiforge"))
        .arg("--data-dir")
        .arg(data_dir)
        .args(args)
        .env_remove("KPIFORGE_DATA_DIR")
        .output()
        .expect("kpiforge binary runs");
    CliOutput {
        code: out.status.code(),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn cli_json(data_dir: &std::path::Path, args: &[&str]) -> Result<serde_json::Value, String> {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run_cli(data_dir, &full);
    if out.code != Some(0) {
        return Err(format!("`kpiforge {}` exited {:?}: {}", args.join(" "), out.code, out.stderr));
    }
    serde_json::from_str(&out.stdout).map_err(|e| format!("`kpiforge {}` printed non-JSON: {e}", args.join(" ")))
}

pub fn fixture_path() -> String {
    format!("{}/data/academic_synthetic.csv", env!("CARGO_MANIFEST_DIR"))
}

/// Rows of the bundled CSV where `column == level`, read with the csv crate
/// directly rather than through the library's loader.
fn naive_filtered(column: &str, level: &str, measure: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(fixture_path()).expect("fixture readable");
    let headers = reader.headers().expect("header").clone();
    let ci = headers.iter().position(|h| h == column).expect("dimension column");
    let mi = headers.iter().position(|h| h == measure).expect("measure column");
    reader
        .records()
        .map(|r| r.expect("record"))
        .filter(|r| &r[ci] == level)
        .filter_map(|r| r[mi].trim().parse::<f64>().ok())
        .collect()
}

/// ingest -> analyze (default plan) -> condense -> cube -> aggregate with
/// Course=M.Tech, all through the binary, compared with a plain filter of
/// the CSV.
pub fn cli_end_to_end(expected_retained: &[&str]) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path();
    let fixture = fixture_path();

    let ingested = cli_json(data, &["ingest", &fixture, "--name", "academic"])?;
    let dataset = ingested["id"].as_str().ok_or("ingest printed no id")?.to_owned();
    if ingested["row_count"] != 50 {
        return Err(format!("ingest saw {} rows", ingested["row_count"]));
    }

    let run = cli_json(data, &["analyze", "--dataset", &dataset])?;
    let analysis = run["id"].as_str().ok_or("analyze printed no id")?.to_owned();

    let condensed = cli_json(data, &["condense", "--analysis", &analysis])?;
    let retained: Vec<&str> = condensed["retained"]
        .as_array()
        .ok_or("no retained list")?
        .iter()
        .filter_map(|k| k["name"].as_str())
        .collect();
    if retained != expected_retained {
        return Err(format!("condensed to {retained:?}"));
    }

    let measures = ["CGPA", "Backlogs", "Projects"];
    let cube = cli_json(data, &["cube", "--dataset", &dataset, "--dimensions", "Course,State", "--measures", &measures.join(",")])?;
    let cube_id = cube["cube_id"].as_str().ok_or("cube printed no id")?.to_owned();

    for measure in measures {
        let agg = cli_json(data, &["aggregate", "--cube", &cube_id, "--measure", measure, "--filter", "Course=M.Tech"])?;
        let row = &agg["rows"][0];
        let naive = naive_filtered("Course", "M.Tech", measure);
        let sum: f64 = naive.iter().sum();
        let min = naive.iter().copied().fold(f64::INFINITY, f64::min);
        let max = naive.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let got = |k: &str| row[k].as_f64().unwrap_or(f64::NAN);
        if row["count"].as_u64() != Some(naive.len() as u64)
            || (got("sum") - sum).abs() > 1e-9
            || (got("mean") - sum / naive.len() as f64).abs() > 1e-9
            || got("min") != min
            || got("max") != max
        {
            return Err(format!("{measure} for Course=M.Tech: got {row}, naive n={} sum={sum}", naive.len()));
        }
    }

    let report = run_cli(data, &["report", "--analysis", &analysis]);
    if report.code != Some(0) || !report.stdout.contains("Sum of Squares") {
        return Err(format!("report exited {:?}: {}", report.code, report.stderr));
    }
    Ok(())
}
