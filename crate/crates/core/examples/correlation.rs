// Pearson correlation with its two-tailed significance.

use std::error::Error;

use kpiforge::bundled::academic_dataset;
use kpiforge::dataset::pairwise_complete;
use kpiforge::kpi::correlation_sign_report;
use kpiforge::report::{correlation_table, render_text};
use kpiforge::stats::{pearson, CorrelationResult};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ds = academic_dataset();
    let (x, y) = pairwise_complete(&ds, "Extra_Curriculum_activities", "Regularity")?;
    let c = pearson(&x, &y)?;
    println!("r = {:.4}, t = {:.3}, p = {:.2e} -> {:?}", c.r, c.t_stat, c.p_two_tailed, correlation_sign_report(&c, 0.05));
    print!("{}", render_text(&[correlation_table("activities-regularity", "Extra_Curriculum_activities", "Regularity", &c)]));

    // significance depends only on r and the number of pairs
    for r in [0.075, 0.3, 0.639] {
        let c = CorrelationResult::from_r(r, 50)?;
        println!("r = {r}, n = 50: p = {:.4}", c.p_two_tailed);
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
