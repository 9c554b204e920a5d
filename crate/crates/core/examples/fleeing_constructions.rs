//! Points steered by the least witness of a decidable property.

use brouwer::fleeing::{
    berlin_r, cambridge_c, critical_number, halving_family, run_property, veldman_f2, DecidableProperty,
};
use brouwer::reals::Point;

fn show(p: &Point, n: usize) -> Result<(), Box<dyn std::error::Error>> {
    println!("{}", p.name());
    for k in [1, 2, 4, n] {
        println!("  lambda^{k:<3} {}", p.interval(k)?);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = halving_family();
    let properties = [DecidableProperty::from_threshold(3), DecidableProperty::never(), run_property(9, 6)?];
    for p in &properties {
        println!("== {} (least witness up to 1000: {})", p.name(), critical_number(p, 1000)?);
        show(&berlin_r(p), 16)?;
        show(&veldman_f2(&family, p), 16)?;
        show(&cambridge_c(&family, p), 16)?;
    }
    Ok(())
}
