//! Brute-force check of the virtual-order conditions on a lawlike sample,
//! then the same check after corrupting one entry.

use brouwer::dyadic::Dyadic;
use brouwer::reals::{dyadic_point, one, virtual_order_check, zero, OrderTable, PairRelation, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample: Vec<Point> = vec![
        dyadic_point(Dyadic::from_int(-1)).renamed("-1"),
        zero(),
        dyadic_point(Dyadic::new(1, 2)).renamed("1/4"),
        dyadic_point(Dyadic::new(2, 3)).renamed("2/8"),
        dyadic_point(Dyadic::new(3, 2)).renamed("3/4"),
        one(),
    ];
    // 1/4 and 2/8 are the same number under two names
    let mut table = OrderTable::from_points(&sample, &[(2, 3)], 40)?;
    let report = virtual_order_check(&table);
    println!("sample {:?}: conditions {:?}", table.names(), report.passed);

    table.set(0, 5, PairRelation::Greater);
    let broken = virtual_order_check(&table);
    println!("after claiming -1 > 1: conditions {:?}", broken.passed);
    for v in broken.violations.iter().take(5) {
        println!("  condition {} fails on {:?}", v.condition, v.witness);
    }
    Ok(())
}
