//! Checks the bundled proof scripts, corrupts one of them step by step, and
//! prints the annotated derivation of Kripke's schema.

use brouwer::derivation::{bundled_scripts, check, check_text, conditional_ks_literal, ks_prerequisite_report, mutations};

const TOY: &str = "\
assert alpha lawlike
1: alpha ; Premise
2: <*>alpha ; IC3(1)
3: assume ~<*>alpha
4: _|_ ; MP(2, 3)
5: ~~<*>alpha ; Discharge(3)
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for b in bundled_scripts().into_iter().chain([conditional_ks_literal()]) {
        let script = b.script();
        println!("{:<24} {}", b.name, check(&script).to_string().lines().next().unwrap_or(""));
    }

    let (_, outcome) = check_text("toy", TOY)?;
    println!("toy: {outcome}");

    let script = bundled_scripts()[2].script();
    let all = mutations(&script);
    let rejected = all.iter().filter(|(_, m)| !check(m).is_verified()).count();
    println!("{}: {rejected}/{} single-step corruptions rejected", script.name, all.len());
    if let Some((what, m)) = all.first() {
        println!("  e.g. {what}: {}", check(m));
    }

    println!("{}", ks_prerequisite_report()?);
    Ok(())
}
