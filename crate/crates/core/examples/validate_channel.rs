//! Load a channel description and check which structural assumptions hold.
//!
//! ```bash
//! cargo run --example validate_channel -- channels/example_alarm.toml
//! ```

use twoway_covert::{check_assumptions, parse_channel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "channels/example.toml".into());
    let ch = parse_channel(&std::fs::read_to_string(&path)?)?;
    let report = check_assumptions(&ch);

    println!(
        "{path}: |Y1| = {}, |Y2| = {}, |Z| = {}",
        ch.y1_size(),
        ch.y2_size(),
        ch.z_size()
    );
    println!("alarm symbols        {:?}", report.alarm_symbols);
    println!("absolutely continuous {}", report.abs_continuity_ok);
    println!("Q00 in pair hull      {}", report.q00_in_hull_pair);
    println!("degraded (1 -> 2)     {}", report.degraded_dir1);
    println!("degraded (2 -> 1)     {}", report.degraded_dir2);

    let d = &report.divergences;
    println!("D(P2_10 || P2_00) = {:.6}", d.user2_link);
    println!("D(P1_01 || P1_00) = {:.6}", d.user1_link);
    println!("D(Q10 || Q00)     = {:.6}", d.eve_from_user1);
    println!("D(Q01 || Q00)     = {:.6}", d.eve_from_user2);
    Ok(())
}
