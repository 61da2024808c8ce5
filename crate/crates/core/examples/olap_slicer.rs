// Slice, dice, roll up and aggregate a cube over the bundled dataset.

use std::error::Error;

use kpiforge::bundled::academic_dataset;
use kpiforge::olap::{build_cube, AggregateResult, SliceSpec};

fn show(title: &str, result: &AggregateResult) {
    println!("{title}");
    for row in &result.rows {
        let label = row.group.as_deref().unwrap_or("(all)");
        println!("  {label:<18} n={:<3} mean={:.3}", row.count, row.mean.unwrap_or(f64::NAN));
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cube = build_cube(academic_dataset(), &["Course", "State"], &["CGPA", "Backlogs"])?;
    show("CGPA by course", &cube.aggregate("CGPA", Some("Course"))?);

    let mtech = cube.slice(&SliceSpec::single("Course", "M.Tech"))?;
    show("M.Tech CGPA by state", &mtech.aggregate("CGPA", Some("State"))?);

    let diced = cube.dice(&SliceSpec::new([("Course", "B.Tech"), ("State", "Punjab")])?)?;
    show("B.Tech in Punjab, backlogs", &diced.aggregate("Backlogs", None)?);

    let rolled = mtech.roll_up("State")?;
    println!("after roll-up: {} dimension(s), {} facts", rolled.dimensions().len(), rolled.fact_count());
    // the parent cube is untouched by any of this
    assert_eq!(cube.fact_count(), 50);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
