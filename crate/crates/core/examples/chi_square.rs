// Chi-square test of independence between two categorical columns.

use std::error::Error;

use kpiforge::bundled::academic_dataset;
use kpiforge::dataset::contingency_table;
use kpiforge::report::{chi_square_table, render_text};
use kpiforge::stats::chi_square_independence;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ds = academic_dataset();
    let table = contingency_table(&ds, "State", "Extra_Curriculum_activities")?;
    println!("{:>18} {:?}", "", table.column_labels);
    for (label, counts) in table.row_labels.iter().zip(&table.counts) {
        println!("{label:>18} {counts:?}");
    }
    let result = chi_square_independence(&table.counts)?;
    print!("{}", render_text(&[chi_square_table("state-activities", &result)]));

    let textbook = chi_square_independence(&[vec![20.0, 10.0], vec![10.0, 20.0]])?;
    println!("[[20,10],[10,20]]: chi2 = {:.3}, p = {:.4}", textbook.statistic, textbook.p_value);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
