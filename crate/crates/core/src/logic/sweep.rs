//! Exhaustive validity sweeps over small stage trees.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::formula::{Atom, Formula};
use super::model::{Frame, StageTree};

/// Name of the schema variable when it ranges over raw node sets. Not a
/// valid surface atom, so it never clashes with a model's atoms.
const META: &str = "$phi";

/// Refuse sweeps whose model count could exceed this.
pub const MAX_MODELS: u128 = 20_000_000;

pub const ATOM_NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SweepError {
    #[error("bounds must be positive")]
    ZeroBound,
    #[error("at most {max} atoms are supported, {requested} requested")]
    TooManyAtoms { requested: usize, max: usize },
    #[error("sweep refused: up to {size} models to enumerate (limit {limit})")]
    ResourceRefusal { size: u128, limit: u128 },
    #[error("unknown schema `{0}` (expected ic1, ic2, ic3, md, cs4 or cs5)")]
    UnknownSchema(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Schema {
    Ic1,
    Ic2,
    Ic3,
    Md,
    Cs4,
    Cs5,
}

impl Schema {
    pub const ALL: [Schema; 6] = [Schema::Ic1, Schema::Ic2, Schema::Ic3, Schema::Md, Schema::Cs4, Schema::Cs5];

    pub fn key(self) -> &'static str {
        match self {
            Schema::Ic1 => "ic1",
            Schema::Ic2 => "ic2",
            Schema::Ic3 => "ic3",
            Schema::Md => "md",
            Schema::Cs4 => "cs4",
            Schema::Cs5 => "cs5",
        }
    }

    pub fn template(self) -> &'static str {
        match self {
            Schema::Ic1 => "[n]phi -> [n+m]phi",
            Schema::Ic2 => "~phi -> ~<*>phi",
            Schema::Ic3 => "phi -> <*>phi",
            Schema::Md => "~<*>phi -> ~phi",
            Schema::Cs4 => "[n]phi | ~[n]phi",
            Schema::Cs5 => "<*>phi -> phi",
        }
    }

    /// Whether the principle is expected to hold on every stage tree.
    pub fn expected_valid(self) -> bool {
        !matches!(self, Schema::Cs4 | Schema::Cs5)
    }

    /// Stage indices to try: `(n, n + m)` for IC1, `(n, n)` for CS4.
    pub fn indices(self, max_box: u32) -> Vec<(u32, u32)> {
        match self {
            Schema::Ic1 => (1..=max_box).flat_map(|n| (n..=max_box).map(move |k| (n, k))).collect(),
            Schema::Cs4 => (1..=max_box).map(|n| (n, n)).collect(),
            _ => vec![(0, 0)],
        }
    }

    pub fn instantiate(self, phi: &Formula, (n, k): (u32, u32)) -> Formula {
        let p = phi.clone();
        match self {
            Schema::Ic1 => Formula::implies(Formula::boxed(n, p.clone()), Formula::boxed(k, p)),
            Schema::Ic2 => Formula::implies(Formula::not(p.clone()), Formula::not(Formula::some_stage(p))),
            Schema::Ic3 => Formula::implies(p.clone(), Formula::some_stage(p)),
            Schema::Md => Formula::implies(Formula::not(Formula::some_stage(p.clone())), Formula::not(p)),
            Schema::Cs4 => Formula::or(Formula::boxed(n, p.clone()), Formula::not(Formula::boxed(n, p))),
            Schema::Cs5 => Formula::implies(Formula::some_stage(p.clone()), p),
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Schema {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::ALL
            .into_iter()
            .find(|x| x.key() == s.to_ascii_lowercase())
            .ok_or_else(|| SweepError::UnknownSchema(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepBounds {
    pub max_nodes: usize,
    pub max_atoms: usize,
    pub max_box_index: u32,
    /// Largest syntactic instance tried for the schema variable.
    pub max_instance_size: usize,
}

impl Default for SweepBounds {
    fn default() -> Self {
        SweepBounds { max_nodes: 5, max_atoms: 2, max_box_index: 3, max_instance_size: 3 }
    }
}

impl SweepBounds {
    pub fn new(max_nodes: usize, max_atoms: usize, max_box_index: u32) -> SweepBounds {
        SweepBounds { max_nodes, max_atoms, max_box_index, ..SweepBounds::default() }
    }

    /// Upper bound on the number of (tree, valuation) pairs.
    pub fn model_bound(&self) -> u128 {
        (1..=self.max_nodes as u32)
            .map(|k| {
                let trees: u128 = (1..k as u128).product();
                trees.saturating_mul(1u128 << (k * self.max_atoms as u32).min(127))
            })
            .fold(0u128, |a, b| a.saturating_add(b))
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.max_nodes == 0 || self.max_atoms == 0 || self.max_box_index == 0 || self.max_instance_size == 0 {
            return Err(SweepError::ZeroBound);
        }
        if self.max_atoms > ATOM_NAMES.len() {
            return Err(SweepError::TooManyAtoms { requested: self.max_atoms, max: ATOM_NAMES.len() });
        }
        let size = self.model_bound();
        if size > MAX_MODELS || self.max_nodes > 12 {
            return Err(SweepError::ResourceRefusal { size, limit: MAX_MODELS });
        }
        Ok(())
    }
}

/// Box-free formulas over `atoms` and `_|_`, ordered by size and then by a
/// fixed construction order.
pub fn instances(atoms: &[&str], max_size: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new()];
    let mut base: Vec<Formula> = atoms.iter().map(|a| Formula::atom(a)).collect();
    base.push(Formula::Bottom);
    by_size.push(base);
    for size in 2..=max_size {
        let mut out: Vec<Formula> = by_size[size - 1].iter().cloned().map(Formula::not).collect();
        let ctors: [fn(Formula, Formula) -> Formula; 3] = [Formula::and, Formula::or, Formula::implies];
        for ctor in ctors {
            for left in 1..size - 1 {
                let right = size - 1 - left;
                for a in &by_size[left] {
                    for b in &by_size[right] {
                        out.push(ctor(a.clone(), b.clone()));
                    }
                }
            }
        }
        by_size.push(out);
    }
    by_size.into_iter().flatten().collect()
}

/// What the schema variable was bound to in a countermodel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instantiation {
    Formula { phi: String },
    /// A node set not named by any tried formula.
    NodeSet { mask: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub id: String,
    pub schema: Schema,
    pub model: StageTree,
    pub node: usize,
    pub instantiation: Instantiation,
    pub indices: (u32, u32),
    /// The refuted instance, when the variable is bound to a formula.
    pub instance: Option<Formula>,
}

impl Countermodel {
    /// Re-evaluates the instance from scratch.
    pub fn reverify(&self) -> bool {
        match (&self.instance, &self.instantiation) {
            (Some(f), _) => !self.model.forces(self.node, f),
            (None, Instantiation::NodeSet { mask }) => {
                let frame = self.model.frame();
                let val: BTreeMap<String, u64> = [(META.to_string(), *mask)].into_iter().collect();
                let f = self.schema.instantiate(&meta_atom(), self.indices);
                frame.is_up_set(*mask) && frame.eval(&f, &val, None) >> self.node & 1 == 0
            }
            _ => false,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let (n, k) = self.indices;
        serde_json::json!({
            "id": self.id,
            "schema": self.schema.key(),
            "template": self.schema.template(),
            "model": self.model.to_json_value(),
            "node": self.model.id(self.node),
            "instantiation": self.instantiation,
            "n": if self.schema.indices(1)[0].0 == 0 { None } else { Some(n) },
            "n_plus_m": if self.schema == Schema::Ic1 { Some(k) } else { None },
            "instance": self.instance.as_ref().map(|f| f.to_string()),
        })
    }
}

impl fmt::Display for Countermodel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at node {} of [{}]", self.id, self.model.id(self.node), self.model)?;
        match &self.instance {
            Some(i) => write!(f, ", instance {i}"),
            None => write!(f, ", variable bound to node set {:#b}", match self.instantiation {
                Instantiation::NodeSet { mask } => mask,
                _ => 0,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepOutcome {
    ValidUpToBounds,
    Countermodel(Box<Countermodel>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub schema: Schema,
    pub bounds: SweepBounds,
    pub models: u64,
    pub evaluations: u64,
    /// Successor edges checked for forcing persistence.
    pub persistence_checks: u64,
    pub persistence_failures: u64,
    pub outcome: SweepOutcome,
}

impl SweepReport {
    pub fn countermodel(&self) -> Option<&Countermodel> {
        match &self.outcome {
            SweepOutcome::Countermodel(c) => Some(c),
            SweepOutcome::ValidUpToBounds => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.outcome == SweepOutcome::ValidUpToBounds
    }

    pub fn as_expected(&self) -> bool {
        self.persistence_failures == 0
            && self.is_valid() == self.schema.expected_valid()
            && self.countermodel().is_none_or(|c| c.reverify())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": self.schema.key(),
            "template": self.schema.template(),
            "bounds": self.bounds,
            "models": self.models,
            "evaluations": self.evaluations,
            "persistence_checks": self.persistence_checks,
            "persistence_failures": self.persistence_failures,
            "result": match &self.outcome {
                SweepOutcome::ValidUpToBounds => serde_json::json!({"kind": "valid_up_to_bounds"}),
                SweepOutcome::Countermodel(c) => {
                    let mut v = c.to_json_value();
                    v["kind"] = "countermodel".into();
                    v
                }
            },
        })
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}): {} models, {} evaluations: ",
            self.schema,
            self.schema.template(),
            self.models,
            self.evaluations
        )?;
        match &self.outcome {
            SweepOutcome::ValidUpToBounds => write!(
                f,
                "valid up to {} nodes, {} atoms, box index {}",
                self.bounds.max_nodes, self.bounds.max_atoms, self.bounds.max_box_index
            ),
            SweepOutcome::Countermodel(c) => write!(f, "countermodel {c}"),
        }
    }
}

fn meta_atom() -> Formula {
    Formula::Atom(Atom { name: META.to_string(), lawlike: false })
}

/// Parent arrays of trees with `k` nodes (`parents[i] <= i`), lexicographic.
pub fn tree_shapes(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 0..k.saturating_sub(1) {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=i).map(move |p| {
                    let mut next = prefix.clone();
                    next.push(p);
                    next
                })
            })
            .collect();
    }
    out
}

/// Every assignment of an up-set from `up` to each of `atoms` atoms.
pub fn monotone_valuations(up: &[u64], atoms: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..atoms {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                up.iter().map(move |&m| {
                    let mut next = prefix.clone();
                    next.push(m);
                    next
                })
            })
            .collect();
    }
    // First atom varies fastest.
    out.iter_mut().for_each(|v| v.reverse());
    out
}

fn encode(parents: &[usize]) -> String {
    if parents.is_empty() {
        "-".to_string()
    } else {
        parents.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Checks the schema on every tree with at most `max_nodes` nodes, every
/// monotone valuation of the first `max_atoms` atoms, every stage index up
/// to `max_box_index`, and every instance of the schema variable: each
/// box-free formula up to `max_instance_size`, then every up-closed node set
/// (which covers the denotation of any box-free formula). Returns the first
/// failure in that order.
pub fn validity_sweep(schema: Schema, bounds: SweepBounds) -> Result<SweepReport, SweepError> {
    bounds.validate()?;
    let atoms: Vec<&str> = ATOM_NAMES[..bounds.max_atoms].to_vec();
    let syntactic: Vec<(Formula, Vec<(u32, u32)>)> = instances(&atoms, bounds.max_instance_size)
        .into_iter()
        .map(|phi| (phi, schema.indices(bounds.max_box_index)))
        .collect();
    let meta_instances: Vec<((u32, u32), Formula)> = schema
        .indices(bounds.max_box_index)
        .into_iter()
        .map(|ix| (ix, schema.instantiate(&meta_atom(), ix)))
        .collect();
    let mut report = SweepReport {
        schema,
        bounds,
        models: 0,
        evaluations: 0,
        persistence_checks: 0,
        persistence_failures: 0,
        outcome: SweepOutcome::ValidUpToBounds,
    };
    for k in 1..=bounds.max_nodes {
        for parents in tree_shapes(k) {
            let frame = Frame::new(&parents);
            let ups = frame.up_sets();
            let full = frame.full();
            for masks in monotone_valuations(&ups, atoms.len()) {
                report.models += 1;
                let val: BTreeMap<String, u64> =
                    atoms.iter().zip(&masks).map(|(a, m)| (a.to_string(), *m)).collect();
                let check = |f: &Formula, val: &BTreeMap<String, u64>, report: &mut SweepReport| {
                    let set = frame.eval(f, val, None);
                    report.evaluations += 1;
                    report.persistence_checks += (k - 1) as u64;
                    if !frame.is_up_set(set) {
                        report.persistence_failures += 1;
                    }
                    set
                };
                for (phi, indices) in &syntactic {
                    for &ix in indices {
                        let f = schema.instantiate(phi, ix);
                        let set = check(&f, &val, &mut report);
                        if set != full {
                            let node = (!set & full).trailing_zeros() as usize;
                            let named: Vec<(String, u64)> =
                                val.iter().map(|(a, m)| (a.clone(), *m)).collect();
                            let model = StageTree::from_masks(&parents, &named);
                            let mask_code: Vec<String> = masks.iter().map(|m| m.to_string()).collect();
                            report.outcome = SweepOutcome::Countermodel(Box::new(Countermodel {
                                id: format!(
                                    "cm-{}-{}n-p{}-v{}-i{}",
                                    schema.key(),
                                    k,
                                    encode(&parents),
                                    mask_code.join("."),
                                    ix.0
                                ),
                                schema,
                                model,
                                node,
                                instantiation: Instantiation::Formula { phi: phi.to_string() },
                                indices: ix,
                                instance: Some(f),
                            }));
                            return Ok(report);
                        }
                    }
                }
            }
            let mut val: BTreeMap<String, u64> = BTreeMap::new();
            for &up in &ups {
                val.insert(META.to_string(), up);
                for (ix, f) in &meta_instances {
                    let set = frame.eval(f, &val, None);
                    report.evaluations += 1;
                    report.persistence_checks += (k - 1) as u64;
                    if !frame.is_up_set(set) {
                        report.persistence_failures += 1;
                    }
                    if set != full {
                        let node = (!set & full).trailing_zeros() as usize;
                        report.outcome = SweepOutcome::Countermodel(Box::new(Countermodel {
                            id: format!("cm-{}-{}n-p{}-u{}-i{}", schema.key(), k, encode(&parents), up, ix.0),
                            schema,
                            model: StageTree::from_masks(&parents, &[]),
                            node,
                            instantiation: Instantiation::NodeSet { mask: up },
                            indices: *ix,
                            instance: None,
                        }));
                        return Ok(report);
                    }
                }
            }
        }
    }
    Ok(report)
}

pub const RESTRICTED_CS5_NOTE: &str = "restricted cs5 (operand built from lawlike atoms only): \
assumed at derivation level, no semantic validation; branch-invariant valuations in this model class still refute it";

#[derive(Debug, Clone)]
pub struct PrincipleReport {
    pub bounds: SweepBounds,
    pub sweeps: Vec<SweepReport>,
    pub notes: Vec<String>,
}

impl PrincipleReport {
    pub fn sweep(&self, schema: Schema) -> Option<&SweepReport> {
        self.sweeps.iter().find(|s| s.schema == schema)
    }

    pub fn all_as_expected(&self) -> bool {
        self.sweeps.iter().all(SweepReport::as_expected)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "bounds": self.bounds,
            "sweeps": self.sweeps.iter().map(|s| {
                let mut v = s.to_json_value();
                v["expected"] = if s.schema.expected_valid() { "valid" } else { "countermodel" }.into();
                v["as_expected"] = s.as_expected().into();
                v
            }).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

impl fmt::Display for PrincipleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sweeps {
            writeln!(f, "[{}] {s}", if s.as_expected() { "ok" } else { "UNEXPECTED" })?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

pub fn principle_suite(bounds: SweepBounds) -> Result<PrincipleReport, SweepError> {
    let sweeps = Schema::ALL.iter().map(|&s| validity_sweep(s, bounds)).collect::<Result<Vec<_>, _>>()?;
    Ok(PrincipleReport { bounds, sweeps, notes: vec![RESTRICTED_CS5_NOTE.to_string()] })
}
