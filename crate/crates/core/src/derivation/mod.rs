//! A checker for small natural-deduction scripts over the stage-modal
//! language, with a bundled corpus of reconstructed arguments.
//!
//! The rule set is fixed: modus ponens, conjunction and disjunction
//! introduction/elimination, contraposition, assumption blocks, and instances
//! of MD, IC1–IC3, DNE and the lawlike-restricted CS5R. CS4 and unrestricted
//! CS5 are known by name only so they can be refused with a reason.

mod script;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::logic::{
    monotone_valuations, tree_shapes, validity_sweep, Formula, Frame, Schema, StageTree, SweepBounds, SweepError,
};

pub use script::{DefAxiom, Declaration, Rule, Script, ScriptError, Step};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub conclusion: Formula,
    pub premises: Vec<Formula>,
    /// Defining axioms cited by some step.
    pub axioms_used: Vec<Formula>,
    /// Instances of CS5R, as implications; assumed rather than validated.
    pub restricted: Vec<Formula>,
    pub warnings: Vec<String>,
    pub rules_used: BTreeSet<String>,
}

impl Verification {
    pub fn uses_rule(&self, name: &str) -> bool {
        self.rules_used.contains(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Verified(Verification),
    Rejected { step: usize, reason: String },
}

impl CheckOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, CheckOutcome::Verified(_))
    }

    pub fn verification(&self) -> Option<&Verification> {
        match self {
            CheckOutcome::Verified(v) => Some(v),
            CheckOutcome::Rejected { .. } => None,
        }
    }

    pub fn to_json_value(&self, script: &Script) -> serde_json::Value {
        match self {
            CheckOutcome::Verified(v) => serde_json::json!({
                "script": script.name,
                "result": "verified",
                "steps": script.steps.len(),
                "conclusion": v.conclusion.to_string(),
                "premises": v.premises.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "axioms_used": v.axioms_used.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "restricted_cs5": v.restricted.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "rules_used": v.rules_used,
                "warnings": v.warnings,
            }),
            CheckOutcome::Rejected { step, reason } => serde_json::json!({
                "script": script.name,
                "result": "rejected",
                "step": step,
                "reason": reason,
            }),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckOutcome::Verified(v) => {
                write!(f, "verified: {}", v.conclusion)?;
                for p in &v.premises {
                    write!(f, "\n  premise: {p}")?;
                }
                for w in &v.warnings {
                    write!(f, "\n  warning: {w}")?;
                }
                Ok(())
            }
            CheckOutcome::Rejected { step, reason } => write!(f, "rejected at step {step}: {reason}"),
        }
    }
}

fn arity(rule: &Rule, refs: &[&Formula], allowed: &[usize]) -> Result<(), String> {
    if allowed.contains(&refs.len()) {
        Ok(())
    } else {
        let want: Vec<String> = allowed.iter().map(|n| n.to_string()).collect();
        Err(format!("{rule} takes {} reference(s), found {}", want.join(" or "), refs.len()))
    }
}

fn mismatch(rule: &Rule, expected: &Formula) -> String {
    format!("{rule} yields `{expected}` here")
}

fn claimed<'a>(claim: Option<&'a Formula>, rule: &Rule) -> Result<&'a Formula, String> {
    claim.ok_or_else(|| format!("{rule} needs an explicit formula"))
}

fn implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Implies(a, b) => Some((a, b)),
        _ => None,
    }
}

fn some_stage(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::SomeStage(a) => Some(a),
        _ => None,
    }
}

/// Axiom form (`refs` empty, the claim must be an instance) or rule form
/// (one premise of the instance's antecedent shape).
fn principle(
    rule: &Rule,
    claim: Option<&Formula>,
    refs: &[&Formula],
    antecedent: impl Fn(&Formula) -> Option<Formula>,
    from_claim: impl Fn(&Formula) -> Option<Formula>,
) -> Result<Formula, String> {
    arity(rule, refs, &[0, 1])?;
    match refs {
        [] => {
            let c = claimed(claim, rule)?;
            let (a, b) = implication(c).ok_or_else(|| format!("`{c}` is not an instance of {rule}"))?;
            match from_claim(b) {
                Some(op) if antecedent(&op).as_ref() == Some(a) => Ok(c.clone()),
                _ => Err(format!("`{c}` is not an instance of {rule}")),
            }
        }
        [r] => {
            let c = claimed(claim, rule)?;
            match from_claim(c) {
                Some(op) if antecedent(&op).as_ref() == Some(*r) => Ok(c.clone()),
                _ => Err(format!("{rule} does not take `{r}` to `{c}`")),
            }
        }
        _ => unreachable!(),
    }
}

struct Checker<'a> {
    script: &'a Script,
    proved: Vec<Formula>,
    scope: Vec<Vec<usize>>,
    open: Vec<usize>,
    v: Verification,
}

impl Checker<'_> {
    fn step(&mut self, step: &Step) -> Result<Formula, String> {
        let n = step.number;
        let mut refs = Vec::new();
        for &r in &step.refs {
            if r == 0 || r >= n {
                return Err(format!("reference to step {r}, which is not an earlier step"));
            }
            let ctx = &self.scope[r - 1];
            if !self.open.starts_with(ctx) {
                return Err(format!("step {r} lies inside a closed assumption block"));
            }
            refs.push(&self.proved[r - 1]);
        }
        let claim = step.formula.as_ref();
        let rule = &step.rule;
        let derived = match rule {
            Rule::Premise => {
                arity(rule, &refs, &[0])?;
                let c = claimed(claim, rule)?.clone();
                self.v.premises.push(c.clone());
                c
            }
            Rule::DefAx => {
                arity(rule, &refs, &[0])?;
                let c = claimed(claim, rule)?;
                if !self.script.axioms.iter().any(|a| &a.formula == c) {
                    return Err(format!("`{c}` is not a declared defining axiom"));
                }
                if !self.v.axioms_used.contains(c) {
                    self.v.axioms_used.push(c.clone());
                }
                c.clone()
            }
            Rule::Mp => {
                arity(rule, &refs, &[2])?;
                let (a, b) = (refs[0], refs[1]);
                match (implication(b), implication(a)) {
                    (Some((x, y)), _) if x == a => y.clone(),
                    (_, Some((x, y))) if x == b => y.clone(),
                    _ => return Err(format!("MP needs `φ` and `φ -> ψ`, found `{a}` and `{b}`")),
                }
            }
            Rule::AndIntro => {
                arity(rule, &refs, &[2])?;
                Formula::and(refs[0].clone(), refs[1].clone())
            }
            Rule::AndElim => {
                arity(rule, &refs, &[1])?;
                let c = claimed(claim, rule)?;
                match refs[0] {
                    Formula::And(l, r) if **l == *c || **r == *c => c.clone(),
                    Formula::And(..) => return Err(format!("`{c}` is not a conjunct of `{}`", refs[0])),
                    other => return Err(format!("AndElim needs a conjunction, found `{other}`")),
                }
            }
            Rule::OrIntro => {
                arity(rule, &refs, &[1])?;
                let c = claimed(claim, rule)?;
                match c {
                    Formula::Or(l, r) if **l == *refs[0] || **r == *refs[0] => c.clone(),
                    _ => return Err(format!("`{c}` is not a disjunction with disjunct `{}`", refs[0])),
                }
            }
            Rule::ContraPos => {
                arity(rule, &refs, &[1])?;
                let (a, b) = implication(refs[0])
                    .ok_or_else(|| format!("ContraPos needs an implication, found `{}`", refs[0]))?;
                Formula::implies(Formula::not(b.clone()), Formula::not(a.clone()))
            }
            Rule::Md => principle(
                rule,
                claim,
                &refs,
                |op| Some(Formula::not(Formula::SomeStage(Box::new(op.clone())))),
                |c| c.negated().filter(|op| op.is_box_free()).cloned(),
            )?,
            Rule::Ic2 => principle(
                rule,
                claim,
                &refs,
                |op| Some(Formula::not(op.clone())),
                |c| c.negated().and_then(some_stage).cloned(),
            )?,
            Rule::Ic3 => principle(rule, claim, &refs, |op| Some(op.clone()), |c| some_stage(c).cloned())?,
            Rule::Dne => principle(
                rule,
                claim,
                &refs,
                |op| Some(Formula::not(Formula::not(Formula::not(op.clone())))),
                |c| c.negated().cloned(),
            )?,
            Rule::Cs5r => {
                let f = principle(
                    rule,
                    claim,
                    &refs,
                    |op| op.is_box_free().then(|| Formula::SomeStage(Box::new(op.clone()))),
                    |c| Some(c.clone()),
                )?;
                let operand = if refs.is_empty() { implication(&f).unwrap().1.clone() } else { f.clone() };
                if let Some(a) = operand.atoms().into_iter().find(|a| !a.lawlike) {
                    return Err(format!(
                        "testability gate: CS5R applies only to operands whose assertions are all lawlike; \
                         `{}` is not declared lawlike",
                        a.name
                    ));
                }
                let instance = Formula::implies(Formula::some_stage(operand.clone()), operand.clone());
                self.v.warnings.push(format!(
                    "step {n}: restricted CS5 on lawlike `{operand}` is assumed, not semantically validated"
                ));
                self.v.restricted.push(instance);
                f
            }
            Rule::Ic1 => {
                arity(rule, &refs, &[0, 1])?;
                let c = claimed(claim, rule)?;
                let (from, to) = match refs.as_slice() {
                    [] => implication(c).ok_or_else(|| format!("`{c}` is not an instance of IC1"))?,
                    [r] => (*r, c),
                    _ => unreachable!(),
                };
                match (from, to) {
                    (Formula::Box(n1, a), Formula::Box(n2, b)) if a == b && n2 >= n1 => c.clone(),
                    _ => return Err(format!("IC1 takes `[n]φ` to `[n+m]φ`, not `{from}` to `{to}`")),
                }
            }
            Rule::Assume => {
                arity(rule, &refs, &[0])?;
                self.open.push(n);
                claimed(claim, rule)?.clone()
            }
            Rule::Discharge => {
                arity(rule, &refs, &[1])?;
                let m = step.refs[0];
                if self.open.last() != Some(&m) {
                    return Err(format!("step {m} is not the innermost open assumption"));
                }
                let last = n - 1;
                let body = if last == m {
                    self.proved[m - 1].clone()
                } else if self.scope[last - 1] == self.open {
                    self.proved[last - 1].clone()
                } else {
                    return Err(format!("step {last} does not close the block opened at step {m}"));
                };
                self.open.pop();
                Formula::implies(self.proved[m - 1].clone(), body)
            }
            Rule::Cs4 | Rule::Cs5 => {
                return Err(format!(
                    "{rule} is not a rule of this system: stage trees refute it (see `logic sweep --schema {}`)",
                    rule.name().to_ascii_lowercase()
                ))
            }
            Rule::Unknown(name) => return Err(format!("unknown rule `{name}`")),
        };
        if let Some(c) = claim {
            if *c != derived {
                return Err(mismatch(rule, &derived));
            }
        }
        if !matches!(rule, Rule::Assume) {
            self.v.rules_used.insert(rule.name().to_string());
        }
        Ok(derived)
    }
}

pub fn check(script: &Script) -> CheckOutcome {
    let mut c = Checker {
        script,
        proved: Vec::new(),
        scope: Vec::new(),
        open: Vec::new(),
        v: Verification {
            conclusion: Formula::Bottom,
            premises: Vec::new(),
            axioms_used: Vec::new(),
            restricted: Vec::new(),
            warnings: Vec::new(),
            rules_used: BTreeSet::new(),
        },
    };
    for step in &script.steps {
        match c.step(step) {
            Ok(f) => {
                c.proved.push(f);
                c.scope.push(c.open.clone());
            }
            Err(reason) => return CheckOutcome::Rejected { step: step.number, reason },
        }
    }
    if let Some(m) = c.open.last() {
        return CheckOutcome::Rejected {
            step: script.steps.len(),
            reason: format!("assumption at step {m} is never discharged"),
        };
    }
    c.v.conclusion = c.proved.last().cloned().expect("scripts have steps");
    CheckOutcome::Verified(c.v)
}

/// Parses and checks in one go.
pub fn check_text(name: &str, text: &str) -> Result<(Script, CheckOutcome), ScriptError> {
    let script = Script::parse(name, text)?;
    let outcome = check(&script);
    Ok((script, outcome))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
    /// Whether the script is expected to verify.
    pub expect_verified: bool,
}

impl Bundled {
    pub fn script(&self) -> Script {
        Script::parse(self.name, self.text).expect("bundled scripts parse")
    }
}

const VIENNA_DENSE: &str = include_str!("../../scripts/vienna_dense.proof");
const DRIFT_DIRECT: &str = include_str!("../../scripts/drift_direct.proof");
const CONDITIONAL_KS: &str = include_str!("../../scripts/conditional_ks.proof");
const CONDITIONAL_KS_LITERAL: &str = include_str!("../../scripts/conditional_ks_literal.proof");
const CAMBRIDGE_REDUCED: &str = include_str!("../../scripts/cambridge_reduced.proof");

pub fn bundled_scripts() -> Vec<Bundled> {
    vec![
        Bundled { name: "vienna_dense", text: VIENNA_DENSE, expect_verified: true },
        Bundled { name: "drift_direct", text: DRIFT_DIRECT, expect_verified: true },
        Bundled { name: "conditional_ks", text: CONDITIONAL_KS, expect_verified: true },
        Bundled { name: "cambridge_reduced", text: CAMBRIDGE_REDUCED, expect_verified: true },
    ]
}

/// The conditional argument read through `rat_f <-> alpha`; rejected.
pub fn conditional_ks_literal() -> Bundled {
    Bundled { name: "conditional_ks_literal", text: CONDITIONAL_KS_LITERAL, expect_verified: false }
}

pub fn bundled(name: &str) -> Option<Bundled> {
    bundled_scripts().into_iter().chain([conditional_ks_literal()]).find(|b| b.name == name)
}

/// Single-step corruptions: each step's formula negated, and each step's
/// first reference moved to another earlier step.
pub fn mutations(script: &Script) -> Vec<(String, Script)> {
    let mut out = Vec::new();
    for (i, step) in script.steps.iter().enumerate() {
        if let Some(f) = &step.formula {
            let mut s = script.clone();
            s.steps[i].formula = Some(Formula::not(f.clone()));
            out.push((format!("step {} formula negated", step.number), s));
        }
        if let Some(&r) = step.refs.first() {
            let moved = if r > 1 { r - 1 } else { r + 1 };
            if moved < step.number && !step.refs.contains(&moved) {
                let mut s = script.clone();
                s.steps[i].refs[0] = moved;
                out.push((format!("step {} reference {r} -> {moved}", step.number), s));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticCheck {
    pub max_nodes: usize,
    pub atoms: Vec<String>,
    pub models: u64,
    /// Models whose root forces every hypothesis.
    pub premise_models: u64,
    pub failure: Option<StageTree>,
}

impl SemanticCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.premise_models > 0
    }
}

/// Checks that the conclusion is forced at the root of every stage tree with
/// at most `max_nodes` nodes whose root forces the defining axioms, the
/// premises and the assumed CS5R instances.
pub fn semantic_check(script: &Script, v: &Verification, max_nodes: usize) -> SemanticCheck {
    let hypotheses: Vec<&Formula> =
        script.axioms.iter().map(|a| &a.formula).chain(&v.premises).chain(&v.restricted).collect();
    let atoms: Vec<String> = hypotheses
        .iter()
        .copied()
        .chain([&v.conclusion])
        .flat_map(|f| f.atom_names())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = SemanticCheck { max_nodes, atoms: atoms.clone(), models: 0, premise_models: 0, failure: None };
    for k in 1..=max_nodes {
        for parents in tree_shapes(k) {
            let frame = Frame::new(&parents);
            for masks in monotone_valuations(&frame.up_sets(), atoms.len()) {
                out.models += 1;
                let val: BTreeMap<String, u64> = atoms.iter().cloned().zip(masks.iter().copied()).collect();
                if hypotheses.iter().all(|h| frame.eval(h, &val, None) & 1 == 1) {
                    out.premise_models += 1;
                    if frame.eval(&v.conclusion, &val, None) & 1 == 0 {
                        let named: Vec<(String, u64)> = val.into_iter().collect();
                        out.failure = Some(StageTree::from_masks(&parents, &named));
                        return out;
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KsStatus {
    Available,
    Blocked { countermodel: String },
    /// Rests on blocked steps.
    Unsupported { needs: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KsStep {
    pub number: usize,
    pub claim: &'static str,
    pub principle: &'static str,
    #[serde(flatten)]
    pub status: KsStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsReport {
    pub steps: Vec<KsStep>,
    pub cs4: crate::logic::Countermodel,
    pub cs5: crate::logic::Countermodel,
}

impl KsReport {
    pub fn blocked(&self) -> Vec<&KsStep> {
        self.steps.iter().filter(|s| matches!(s.status, KsStatus::Blocked { .. })).collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "exists a (alpha <-> exists n a(n) = 1)",
            "steps": self.steps,
            "blocked": self.blocked().iter().map(|s| s.principle).collect::<Vec<_>>(),
            "countermodels": [self.cs4.to_json_value(), self.cs5.to_json_value()],
        })
    }
}

impl fmt::Display for KsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Kripke's schema: exists a (alpha <-> exists n a(n) = 1)")?;
        for s in &self.steps {
            let status = match &s.status {
                KsStatus::Available => "available".to_string(),
                KsStatus::Blocked { countermodel } => format!("BLOCKED, countermodel {countermodel}"),
                KsStatus::Unsupported { needs } => {
                    let needs: Vec<String> = needs.iter().map(|n| n.to_string()).collect();
                    format!("unsupported, needs blocked step(s) {}", needs.join(", "))
                }
            };
            writeln!(f, "  {}. {:<44} [{}] {}", s.number, s.claim, s.principle, status)?;
        }
        writeln!(f, "  {}", self.cs4)?;
        write!(f, "  {}", self.cs5)
    }
}

/// The derivation of Kripke's schema, annotated with the principle each step
/// needs; the CS4 and CS5 steps are linked to live countermodels.
pub fn ks_prerequisite_report() -> Result<KsReport, SweepError> {
    let bounds = SweepBounds::new(3, 1, 1);
    let cs4 = validity_sweep(Schema::Cs4, bounds)?;
    let cs5 = validity_sweep(Schema::Cs5, bounds)?;
    let cs4 = cs4.countermodel().expect("cs4 is refuted on three nodes").clone();
    let cs5 = cs5.countermodel().expect("cs5 is refuted on two nodes").clone();
    let steps = vec![
        KsStep {
            number: 1,
            claim: "[n]alpha | ~[n]alpha, for every n",
            principle: "CS4",
            status: KsStatus::Blocked { countermodel: cs4.id.clone() },
        },
        KsStep {
            number: 2,
            claim: "a(n) = 1 <-> [n]alpha defines a sequence a",
            principle: "definition by cases on 1",
            status: KsStatus::Unsupported { needs: vec![1] },
        },
        KsStep {
            number: 3,
            claim: "exists n a(n) = 1 <-> <*>alpha",
            principle: "definition of <*>",
            status: KsStatus::Unsupported { needs: vec![1] },
        },
        KsStep { number: 4, claim: "alpha -> <*>alpha", principle: "IC3", status: KsStatus::Available },
        KsStep {
            number: 5,
            claim: "<*>alpha -> alpha",
            principle: "CS5",
            status: KsStatus::Blocked { countermodel: cs5.id.clone() },
        },
        KsStep {
            number: 6,
            claim: "alpha <-> exists n a(n) = 1",
            principle: "from 3, 4, 5",
            status: KsStatus::Unsupported { needs: vec![1, 5] },
        },
    ];
    Ok(KsReport { steps, cs4, cs5 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    fn run(text: &str) -> CheckOutcome {
        check_text("t", text).unwrap().1
    }

    #[test]
    fn one_rule_application() {
        let out = run("assert alpha\n1: alpha ; Premise\n2: <*>alpha ; IC3(1)\n");
        assert_eq!(out.verification().unwrap().conclusion, parse("<*>alpha").unwrap());
    }

    #[test]
    fn gate_refuses_choice_parameters() {
        let out = run("assert alpha\n1: <*>alpha ; Premise\n2: alpha ; CS5R(1)\n");
        match out {
            CheckOutcome::Rejected { step: 2, reason } => assert!(reason.contains("testability gate"), "{reason}"),
            other => panic!("{other:?}"),
        }
        let ok = run("assert alpha lawlike\n1: <*>alpha ; Premise\n2: alpha ; CS5R(1)\n");
        let v = ok.verification().unwrap();
        assert_eq!(v.restricted, vec![parse("<*>alpha! -> alpha!").unwrap()]);
        assert_eq!(v.warnings.len(), 1);
    }

    #[test]
    fn axiom_and_rule_forms() {
        let good = [
            "assert p\n1: ~<*>p -> ~p ; MD",
            "assert p\n1: ~<*>p ; Premise\n2: ~p ; MD(1)",
            "assert p\n1: [1]p -> [3]p ; IC1",
            "assert p\n1: [2]p ; Premise\n2: [2]p ; IC1(1)",
            "assert p\n1: ~p -> ~<*>p ; IC2",
            "assert p\n1: p -> <*>p ; IC3",
            "assert p\n1: ~~~p -> ~p ; DNE",
            "assert p\n1: ~~~p ; Premise\n2: ~p ; DNE(1)",
            "assert p\nassert q\n1: p -> q ; Premise\n2: ~q -> ~p ; ContraPos(1)",
            "assert p\n1: assume p\n2: p -> p ; Discharge(1)",
            "assert p\n1: assume p\n2: discharge 1",
        ];
        for text in good {
            assert!(run(text).is_verified(), "{text}: {}", run(text));
        }
        let bad = [
            ("assert p\n1: [3]p -> [1]p ; IC1", "IC1"),
            ("assert p\n1: <*>p -> ~p ; MD", "not an instance"),
            ("assert p\n1: p -> <*>p ; CS5", "not a rule of this system"),
            ("assert p\n1: [1]p | ~[1]p ; CS4", "not a rule of this system"),
            ("assert p\n1: p ; Magic", "unknown rule"),
            ("assert p\n1: p ; MP(1, 1)", "not an earlier step"),
            ("assert p\n1: assume p\n2: p ; AndElim(1)", "conjunction"),
            ("assert p\n1: assume p", "never discharged"),
            ("assert p\n1: assume p\n2: p -> p ; Discharge(1)\n3: p ; AndIntro(1, 1)", "closed assumption"),
            ("assert p\n1: p ; Premise\n2: p -> p ; Discharge(1)", "innermost"),
        ];
        for (text, needle) in bad {
            match run(text) {
                CheckOutcome::Rejected { reason, .. } => assert!(reason.contains(needle), "{text}: {reason}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn bundled_corpus() {
        for b in bundled_scripts() {
            let out = check(&b.script());
            assert!(out.is_verified(), "{}: {out}", b.name);
        }
        match check(&conditional_ks_literal().script()) {
            CheckOutcome::Rejected { step: 3, reason } => assert!(reason.contains("testability gate")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cs5r_only_where_lawlike() {
        for b in bundled_scripts() {
            let v = check(&b.script()).verification().unwrap().clone();
            let expected = matches!(b.name, "vienna_dense" | "cambridge_reduced");
            assert_eq!(v.uses_rule("CS5R"), expected, "{}", b.name);
            assert!(!v.uses_rule("CS5") && !v.uses_rule("CS4"));
        }
        let ks = check(&bundled("conditional_ks").unwrap().script());
        assert!(ks.verification().unwrap().uses_rule("MD"));
    }

    #[test]
    fn bundled_conclusions() {
        let concl = |name: &str| check(&bundled(name).unwrap().script()).verification().unwrap().conclusion.clone();
        assert_eq!(concl("vienna_dense"), parse("~e_half & (e_below -> alpha! | ~alpha!)").unwrap());
        assert_eq!(
            concl("conditional_ks"),
            parse("(~~rat_f -> ~~alpha) & (<*>~~alpha -> ~~rat_f) & (rat_f -> <*>alpha)").unwrap()
        );
        assert_eq!(concl("cambridge_reduced"), parse("~c_zero & ~c_neg & (c_prec_a -> alpha!)").unwrap());
    }

    #[test]
    fn every_single_step_corruption_is_rejected() {
        for b in bundled_scripts() {
            let script = b.script();
            let ms = mutations(&script);
            assert!(ms.len() >= script.steps.len());
            for (label, m) in ms {
                assert!(!check(&m).is_verified(), "{}: {label} still verifies", b.name);
            }
        }
    }

    #[test]
    fn bundled_conclusions_are_forced() {
        for b in bundled_scripts() {
            let script = b.script();
            let v = check(&script).verification().unwrap().clone();
            let s = semantic_check(&script, &v, 3);
            assert!(s.passed(), "{}: {:?}", b.name, s.failure);
        }
    }

    #[test]
    fn render_round_trips_bundled() {
        for b in bundled_scripts().into_iter().chain([conditional_ks_literal()]) {
            let strip = |mut s: Script| {
                s.steps.iter_mut().for_each(|st| st.line = 0);
                s
            };
            let s = b.script();
            assert_eq!(strip(Script::parse(b.name, &s.render()).unwrap()), strip(s));
        }
    }

    #[test]
    fn ks_report_blocks_exactly_cs4_and_cs5() {
        let r = ks_prerequisite_report().unwrap();
        let blocked: Vec<&str> = r.blocked().iter().map(|s| s.principle).collect();
        assert_eq!(blocked, vec!["CS4", "CS5"]);
        assert!(r.cs4.reverify() && r.cs5.reverify());
        assert_eq!(r.cs4.model.len(), 3);
        assert_eq!(r.cs5.model.len(), 2);
        let text = r.to_json_value().to_string();
        assert!(text.contains(&r.cs4.id) && text.contains(&r.cs5.id));
    }
}
