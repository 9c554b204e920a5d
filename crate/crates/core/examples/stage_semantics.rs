//! Forcing on a small stage tree, and the sweeps that certify or refute the
//! stage principles.

use brouwer::logic::{parse, principle_suite, validity_sweep, Schema, StageTree, SweepBounds};

const MODEL: &str = r#"{"nodes": [
  {"id": "now"},
  {"id": "a", "parent": "now"},
  {"id": "a1", "parent": "a", "atoms": ["p"]},
  {"id": "b", "parent": "now", "atoms": ["p"]},
  {"id": "b1", "parent": "b", "atoms": ["p", "q"]}
]}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = StageTree::from_json(MODEL)?;
    println!("tree: {tree}");
    for text in ["p", "<*>p", "[1]p | ~[1]p", "<*>p -> p", "~p -> ~<*>p", "[1]p -> [2]p", "<*>(p | ~p)"] {
        let f = parse(text)?;
        let at: Vec<&str> = (0..tree.len()).filter(|&w| tree.forces(w, &f)).map(|w| tree.id(w)).collect();
        println!("  {:<16} forced at {at:?}", f.to_string());
    }

    let cs5 = validity_sweep(Schema::Cs5, SweepBounds::new(3, 1, 2))?;
    println!("{cs5}");
    println!("{}", principle_suite(SweepBounds::new(3, 1, 2))?);
    Ok(())
}
