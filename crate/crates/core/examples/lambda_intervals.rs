//! The interval attached to each term of an RNG element, and how the
//! admissible successors nest inside it.

use brouwer::dyadic::{admissible_successor, interval_relate, lambda_interval};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::cmp::Ordering;

fn main() {
    let third = BigRational::new(1.into(), 3.into());
    // a walk that keeps choosing the middle successor towards 1/3
    let mut a = BigInt::from(0);
    for n in 1..=8u32 {
        let here = lambda_interval(n, &a).unwrap();
        println!("n={n:<2} a={a:<4} {here}  length {}", here.length());
        let kids: Vec<BigInt> = (0..=2).map(|d| &a * 2 + d).collect();
        for z in &kids {
            assert!(admissible_successor(&a, z));
            let child = lambda_interval(n + 1, z).unwrap();
            println!("       {z:<4} {child}  {:?}", interval_relate(&here, &child));
        }
        a = [1, 0, 2]
            .into_iter()
            .map(|d| &a * 2 + d)
            .find(|z| {
                let i = lambda_interval(n + 1, z).unwrap();
                i.lo().cmp_rational(&third) == Ordering::Less && i.hi().cmp_rational(&third) == Ordering::Greater
            })
            .unwrap();
    }
    assert!(!admissible_successor(&BigInt::from(3), &BigInt::from(9)));
}
