// Runs the default test plan and condenses the candidate KPI list.

use std::error::Error;

use kpiforge::bundled::{academic_dataset, default_plan};
use kpiforge::kpi::{condense, run_plan, CandidateKpi, HypothesisTest, KpiCategory, Method, Plan, Registry};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let plan = default_plan();
    let verdicts = run_plan(&plan.tests, &academic_dataset(), &plan.registry)?;
    for v in &verdicts {
        println!("{:<36} p = {:<10.3e} {:?}", v.test_id, v.p_value().unwrap_or(f64::NAN), v.decision());
    }
    let condensed = condense(&plan.registry, &verdicts)?;
    println!("retained: {}", condensed.retained_names().join(", "));
    for d in &condensed.dropped {
        println!("dropped:  {} ({})", d.kpi.name, d.reason);
    }

    // a plan can also be built in code; hypotheses are generated when left empty
    let registry = Registry::new(vec![
        CandidateKpi::new("Regularity", &[KpiCategory::Actionable], "Regularity"),
        CandidateKpi::new("CGPA", &[KpiCategory::Outcome], "CGPA").outcome(),
    ])?;
    let custom = Plan::new(registry, vec![HypothesisTest::new("reg-cgpa", Method::Anova, "Regularity", "CGPA").with_alpha(0.01)])?;
    println!("H0: {}", custom.tests[0].h0);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
