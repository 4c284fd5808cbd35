//! Parameter counts and the lower/upper bounds on the marginal fraction.

use qmarginals::bounds::{alpha_upper_table, bounds_table, solve_alpha_lower};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for d in [2, 3, 4, 10, 1000] {
        let s = solve_alpha_lower(d, 1e-13)?;
        println!("d = {d:>4}: alpha_L = {:.8} (residual {:.1e})", s.alpha, s.residual);
    }

    println!("\n n  k  reduced-state params  pure-state params");
    for row in bounds_table(1..=5, 2)? {
        println!(
            "{:>2} {:>2} {:>21} {:>18}",
            row.n, row.k, row.reduced_param_count, row.pure_param_count
        );
    }

    println!();
    for row in alpha_upper_table(5, 2)? {
        println!(
            "m = {}: {}/{} parties = {:.4}",
            row.m, row.marginal_order, row.total_parties, row.fraction
        );
    }
    Ok(())
}
