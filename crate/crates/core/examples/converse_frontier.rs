//! Sweep the outer bound over the weight simplex on a channel with an alarm
//! symbol and print its Pareto frontier.

use twoway_covert::parse_channel;
use twoway_covert::regions::{capacity_sweep, converse_frontier, hausdorff};

fn main() -> twoway_covert::Result<()> {
    let ch = parse_channel(include_str!("../channels/example_alarm.toml"))?;
    let frontier = converse_frontier(&ch, 100)?;
    for p in frontier.iter().step_by((frontier.len() / 12).max(1)) {
        println!(
            "rho = ({:.2}, {:.2}, {:.2})  ->  ({:.5}, {:.5})",
            p.rho.rho01, p.rho.rho10, p.rho.rho11, p.r1, p.r2
        );
    }

    let outer: Vec<_> = frontier.iter().map(|p| (p.r1, p.r2)).collect();
    let inner: Vec<_> = capacity_sweep(&ch, 201)?
        .iter()
        .map(|p| (p.r1, p.r2))
        .collect();
    println!(
        "{} frontier points, Hausdorff distance to capacity boundary {:.2e}",
        outer.len(),
        hausdorff(&outer, &inner)
    );
    Ok(())
}
