// One-way ANOVA on the bundled dataset, printed as an SPSS-style table.

use std::error::Error;

use kpiforge::bundled::academic_dataset;
use kpiforge::dataset::group_by_factor;
use kpiforge::report::{anova_table, render_text};
use kpiforge::stats::{one_way_anova, AnovaTable};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ds = academic_dataset();

    // CGPA (dependent) grouped by Regularity level
    let sample = group_by_factor(&ds, "CGPA", "Regularity")?;
    for g in sample.groups() {
        println!("Regularity {}: {} students", g.label, g.values.len());
    }
    let table = one_way_anova(&sample)?;
    print!("{}", render_text(&[anova_table("cgpa-by-regularity", "CGPA", &table)]));

    // the same table from published sums of squares alone
    let published = AnovaTable::from_sums_of_squares(0.220, 2, 37.463, 47)?;
    println!();
    print!("{}", render_text(&[anova_table("cgpa-by-semesters", "CGPA", &published)]));
    Ok(())
}

fn main() {
    run_example().unwrap();
}
