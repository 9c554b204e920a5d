//! Decimals of π and the first occurrences of a few digit patterns.
//!
//! `cargo run --example pi_digits -- [horizon]`

use brouwer::fleeing::{critical_number, pattern_property, pi_digits, run_property};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let horizon: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(100_000);

    println!("pi = 3.{}...", pi_digits(60)?);

    let searches = [
        run_property(9, 6)?,
        pattern_property("999999")?,
        pattern_property("0123456789")?,
        pattern_property("314159")?,
    ];
    for p in &searches {
        let s = critical_number(p, horizon)?;
        println!("{:<22} {s}", s.property);
    }
    Ok(())
}
