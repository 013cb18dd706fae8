//! Compare public time sharing against the coordinated capacity region.
//!
//! Coordination mixes the two users' footprints at the eavesdropper, so the
//! capacity boundary lies outside the time-sharing line everywhere between
//! the endpoints.

use twoway_covert::parse_channel;
use twoway_covert::regions::{capacity_region_point, pts_region_point};

fn main() -> twoway_covert::Result<()> {
    let ch = parse_channel(include_str!("../channels/example.toml"))?;

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "lambda", "pts r1", "pts r2", "cap r1", "cap r2"
    );
    for k in 0..=10 {
        let lambda = k as f64 / 10.0;
        let pts = pts_region_point(&ch, lambda, lambda)?;
        let cap = capacity_region_point(&ch, lambda)?;
        println!(
            "{lambda:>6.1} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            pts.r1, pts.r2, cap.r1, cap.r2
        );
    }
    Ok(())
}
