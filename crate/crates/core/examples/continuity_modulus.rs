//! Continuity moduli of the bundled prefix maps, each with a sampled
//! soundness check.

use brouwer::dyadic::Dyadic;
use brouwer::reals::{bundled_maps, continuity_modulus, continuity_soundness, dyadic_point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 2024;
    let at = dyadic_point(Dyadic::new(3, 3));
    for f in bundled_maps() {
        for m0 in 2..=4 {
            let m = continuity_modulus(f.as_ref(), &at, m0, 64)?;
            let report = continuity_soundness(f.as_ref(), &at, m0, 100, seed)?;
            println!(
                "{:<9} m0={m0} n0={:<2} q={:<8} samples within q: {:>3}/{}  failures: {}",
                f.name(),
                m.n0,
                m.q.to_string(),
                report.premise_checked,
                report.samples,
                report.failures.len()
            );
        }
    }
    Ok(())
}
