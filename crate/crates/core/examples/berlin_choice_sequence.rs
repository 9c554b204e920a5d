//! A point that sits on 0 until an assertion is decided, then steps to
//! `±2^-k`. Under an undecided trace it is neither shown above nor below 0,
//! yet every decided trace separates it from 0.

use brouwer::drift::berlin_s;
use brouwer::fleeing::{berlin_r, pattern_property};
use brouwer::reals::{apart_at, lt_at, zero};
use brouwer::spreads::EventTrace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let horizon = 100;
    let z = zero();
    for trace in EventTrace::all_up_to(4) {
        let s = berlin_s(&trace);
        println!(
            "{:<8} s<0: {:<26} 0<s: {:<26} s#0: {}",
            trace.to_string(),
            lt_at(&s, &z, horizon)?.to_string(),
            lt_at(&z, &s, horizon)?.to_string(),
            apart_at(&s, &z, horizon)?
        );
    }

    // the same shape driven by π instead of a trace
    let r = berlin_r(&pattern_property("0123456789")?);
    println!("{}: first terms {:?}", r.name(), r.prefix(10)?.iter().map(|a| a.to_string()).collect::<Vec<_>>());
    println!("r#0 at horizon 60: {}", apart_at(&r, &z, 60)?);
    Ok(())
}
