// Regularized incomplete beta and the distribution tails built on it.

use std::error::Error;

use kpiforge::stats::special::regularized_incomplete_beta;
use kpiforge::stats::{chi_square_sf, f_sf, t_sf_two_tailed};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // I_x(2,3) is the polynomial 6x^2 - 8x^3 + 3x^4
    for x in [0.1, 0.25, 0.5, 0.9] {
        let i = regularized_incomplete_beta(x, 2.0, 3.0)?;
        let poly = 6.0 * x * x - 8.0 * x.powi(3) + 3.0 * x.powi(4);
        println!("I_{x}(2, 3) = {i:.12}   polynomial {poly:.12}");
    }

    println!("P(F(3, 46) > 12.86)  = {:.3e}", f_sf(12.86, 3, 46)?);
    println!("P(F(2, 47) > 0.138)  = {:.4}", f_sf(0.138, 2, 47)?);
    println!("P(|T(48)| > 0.5206)  = {:.4}", t_sf_two_tailed(0.5206, 48)?);
    println!("P(chi2(1) > 3.8415)  = {:.4}", chi_square_sf(3.841_458_820_694_124, 1)?);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
