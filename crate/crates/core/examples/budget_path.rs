//! Optimize how a total covertness budget is split between the two users
//! along the boundary, starting from a deliberately poor allocation.

use twoway_covert::budget::{area_of_budget_path, optimize_from, BudgetPath};

fn main() -> twoway_covert::Result<()> {
    let delta = 1.0;
    let start = BudgetPath::from_fn(delta, 101, |l| delta * l * l)?;
    println!("start     area {:.6}", area_of_budget_path(&start).area);

    let best = optimize_from(start)?;
    println!(
        "optimized area {:.6} after {} sweeps",
        best.area, best.sweeps
    );
    println!(
        "max |delta1 - lambda delta| = {:.2e}",
        best.path.max_deviation_from_linear()
    );

    let linear = BudgetPath::linear(delta, 101)?;
    println!("linear    area {:.6}", area_of_budget_path(&linear).area);
    Ok(())
}
