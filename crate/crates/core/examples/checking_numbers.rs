//! Checking sequences of every bundled drift and kind, across all traces
//! resolving by stage 3.

use brouwer::drift::{bundled_drift, checking_sequence, rationality_descriptor, CheckingKind};
use brouwer::spreads::EventTrace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["rational-right", "two-winged-mixed", "berlin"] {
        let drift = bundled_drift(name)?;
        for kind in [CheckingKind::Direct, CheckingKind::Oscillatory, CheckingKind::Conditional] {
            println!("{name} / {kind}");
            for trace in EventTrace::all_up_to(3) {
                match checking_sequence(&drift, kind, &trace, 6) {
                    Ok(run) => {
                        let terms: Vec<String> = run.terms.iter().map(|t| t.to_string()).collect();
                        let class = rationality_descriptor(&drift, kind, &trace)?;
                        println!("  {:<8} {:<40} -> {:<7} {class:?}", trace.to_string(), terms.join(" "), run.limit.to_string());
                    }
                    Err(e) => {
                        println!("  {e}");
                        break;
                    }
                }
            }
        }
    }
    Ok(())
}
