//! Stage-modal propositional logic: formulas, stage-tree forcing and
//! exhaustive sweeps over small models.
//!
//! `[n]φ` reads "φ holds at the n-th stage from now" and is forced at a node
//! when φ is forced at every node exactly n successor steps ahead (leaves
//! succeed themselves). `<*>φ` is `[n]φ` for some n.

mod formula;
mod model;
mod sweep;

pub use formula::{parse, Atom, Formula, FormulaError};
pub use model::{check_monotone, Frame, ModelError, MonotonicityViolation, StageTree, MAX_NODES};
pub use sweep::{
    instances, monotone_valuations, principle_suite, tree_shapes, validity_sweep, Countermodel, Instantiation, PrincipleReport, Schema,
    SweepBounds, SweepError, SweepOutcome, SweepReport, ATOM_NAMES, MAX_MODELS, RESTRICTED_CS5_NOTE,
};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn arb_box_free() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![Just(Formula::Bottom), Just(Formula::atom("p")), Just(Formula::atom("q"))];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let modal = prop_oneof![
            arb_box_free(),
            (1u32..5, arb_box_free()).prop_map(|(n, f)| Formula::boxed(n, f)),
            arb_box_free().prop_map(Formula::some_stage),
        ];
        modal.prop_recursive(2, 10, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
    }

    /// A random tree with up to 6 nodes and a monotone valuation of p, q.
    fn arb_model() -> impl Strategy<Value = (Vec<usize>, u64, u64)> {
        (0usize..6)
            .prop_flat_map(|extra| proptest::collection::vec(any::<prop::sample::Index>(), extra))
            .prop_flat_map(|picks| {
                let parents: Vec<usize> = picks.iter().enumerate().map(|(i, ix)| ix.index(i + 1)).collect();
                let ups = Frame::new(&parents).up_sets();
                (Just(parents), prop::sample::select(ups.clone()), prop::sample::select(ups))
            })
    }

    fn valuation(p: u64, q: u64) -> BTreeMap<String, u64> {
        [("p".to_string(), p), ("q".to_string(), q)].into_iter().collect()
    }

    proptest! {
        #[test]
        fn forcing_is_persistent((parents, p, q) in arb_model(), f in arb_formula()) {
            let frame = Frame::new(&parents);
            let set = frame.eval(&f, &valuation(p, q), None);
            prop_assert!(frame.is_up_set(set), "{} on {:?}", f, parents);
        }

        #[test]
        fn boxes_persist((parents, p, q) in arb_model(), n in 1u32..6, f in arb_box_free()) {
            let frame = Frame::new(&parents);
            let val = valuation(p, q);
            let set = frame.eval(&Formula::boxed(n, f), &val, None);
            for w in 1..frame.len() {
                let parent = frame.parent(w).unwrap();
                prop_assert!(set >> parent & 1 == 0 || set >> w & 1 == 1);
            }
        }

        #[test]
        fn some_stage_bound_is_complete((parents, p, q) in arb_model(), f in arb_box_free()) {
            let frame = Frame::new(&parents);
            let val = valuation(p, q);
            let g = Formula::some_stage(f);
            let d = frame.depth();
            prop_assert_eq!(frame.eval(&g, &val, None), frame.eval(&g, &val, Some(2 * d + 2)));
        }
    }
}
