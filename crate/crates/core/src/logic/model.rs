//! Finite stage trees with stationary leaves, and forcing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::Formula;

pub const MAX_NODES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("malformed model file: {0}")]
    Json(String),
    #[error("model has no nodes")]
    Empty,
    #[error("model has {0} nodes; at most {MAX_NODES} are supported")]
    TooLarge(usize),
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("node `{node}` names unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },
    #[error("model must have exactly one root, found {0}")]
    Roots(usize),
    #[error("node `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error(transparent)]
    NotMonotone(#[from] MonotonicityViolation),
}

/// An atom true at `parent` but not at its successor `node`.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("atom `{atom}` holds at `{parent}` but is dropped at its successor `{node}`")]
pub struct MonotonicityViolation {
    pub node: String,
    pub parent: String,
    pub atom: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum NodeId {
    Num(u64),
    Text(String),
}

impl NodeId {
    fn text(&self) -> String {
        match self {
            NodeId::Num(n) => n.to_string(),
            NodeId::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: NodeId,
    #[serde(default)]
    parent: Option<NodeId>,
    #[serde(default)]
    atoms: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    nodes: Vec<NodeRecord>,
}

/// A finite tree of stages. Node 0 is the root and every parent index is
/// smaller than its child's; each leaf implicitly succeeds itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTree {
    ids: Vec<String>,
    parent: Vec<Option<usize>>,
    atoms: Vec<BTreeSet<String>>,
}

impl StageTree {
    /// Nodes are `(id, parent id, atoms)` in any order. Monotonicity is not
    /// checked here; see [`check_monotone`].
    pub fn build<I, S>(nodes: I) -> Result<StageTree, ModelError>
    where
        I: IntoIterator<Item = (String, Option<String>, S)>,
        S: IntoIterator<Item = String>,
    {
        let raw: Vec<(String, Option<String>, BTreeSet<String>)> =
            nodes.into_iter().map(|(id, p, a)| (id, p, a.into_iter().collect())).collect();
        if raw.is_empty() {
            return Err(ModelError::Empty);
        }
        if raw.len() > MAX_NODES {
            return Err(ModelError::TooLarge(raw.len()));
        }
        let mut position = BTreeMap::new();
        for (i, (id, _, _)) in raw.iter().enumerate() {
            if position.insert(id.clone(), i).is_some() {
                return Err(ModelError::DuplicateId(id.clone()));
            }
        }
        let mut roots = Vec::new();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); raw.len()];
        for (i, (id, parent, _)) in raw.iter().enumerate() {
            match parent {
                None => roots.push(i),
                Some(p) => match position.get(p) {
                    Some(&j) => children[j].push(i),
                    None => return Err(ModelError::UnknownParent { node: id.clone(), parent: p.clone() }),
                },
            }
        }
        if roots.len() != 1 {
            return Err(ModelError::Roots(roots.len()));
        }
        // Breadth-first renumbering puts parents before children.
        let mut order = vec![roots[0]];
        let mut k = 0;
        while k < order.len() {
            order.extend(children[order[k]].iter().copied());
            k += 1;
        }
        if order.len() != raw.len() {
            let seen: BTreeSet<usize> = order.iter().copied().collect();
            let missing = (0..raw.len()).find(|i| !seen.contains(i)).unwrap();
            return Err(ModelError::Unreachable(raw[missing].0.clone()));
        }
        let mut new_index = vec![0; raw.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let ids = order.iter().map(|&o| raw[o].0.clone()).collect();
        let parent = order.iter().map(|&o| raw[o].1.as_ref().map(|p| new_index[position[p]])).collect();
        let atoms = order.iter().map(|&o| raw[o].2.clone()).collect();
        Ok(StageTree { ids, parent, atoms })
    }

    /// A tree from a parent array (`parents[i]` is the parent of node `i + 1`)
    /// and per-atom node masks. Node ids are `0`, `1`, ...
    pub fn from_masks(parents: &[usize], valuation: &[(String, u64)]) -> StageTree {
        let n = parents.len() + 1;
        assert!(n <= MAX_NODES);
        assert!(parents.iter().enumerate().all(|(i, &p)| p <= i), "parents must precede children");
        let parent = std::iter::once(None).chain(parents.iter().map(|&p| Some(p))).collect();
        let atoms = (0..n)
            .map(|w| valuation.iter().filter(|(_, m)| m >> w & 1 == 1).map(|(a, _)| a.clone()).collect())
            .collect();
        StageTree { ids: (0..n).map(|i| i.to_string()).collect(), parent, atoms }
    }

    /// Parses the JSON model format and validates monotonicity.
    pub fn from_json(text: &str) -> Result<StageTree, ModelError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let tree = StageTree::build(
            file.nodes.into_iter().map(|n| (n.id.text(), n.parent.map(|p| p.text()), n.atoms)),
        )?;
        check_monotone(&tree)?;
        Ok(tree)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = (0..self.len())
            .map(|w| {
                serde_json::json!({
                    "id": self.ids[w],
                    "parent": self.parent[w].map(|p| self.ids[p].clone()),
                    "atoms": self.atoms[w].iter().collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "nodes": nodes })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, w: usize) -> &str {
        &self.ids[w]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, ModelError> {
        self.ids.iter().position(|x| x == id).ok_or_else(|| ModelError::UnknownNode(id.to_string()))
    }

    pub fn parent(&self, w: usize) -> Option<usize> {
        self.parent[w]
    }

    pub fn children(&self, w: usize) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.parent[v] == Some(w)).collect()
    }

    pub fn atoms_at(&self, w: usize) -> &BTreeSet<String> {
        &self.atoms[w]
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> u32 {
        let mut d = vec![0u32; self.len()];
        for w in 1..self.len() {
            d[w] = d[self.parent[w].unwrap()] + 1;
        }
        d.into_iter().max().unwrap_or(0)
    }

    /// Nodes as a parent array, the sweep's encoding.
    pub fn parent_array(&self) -> Vec<usize> {
        self.parent[1..].iter().map(|p| p.unwrap()).collect()
    }

    pub fn atom_mask(&self, atom: &str) -> u64 {
        (0..self.len()).filter(|&w| self.atoms[w].contains(atom)).fold(0, |m, w| m | 1 << w)
    }

    pub fn frame(&self) -> Frame {
        Frame::new(&self.parent_array())
    }

    fn valuation(&self) -> BTreeMap<String, u64> {
        let names: BTreeSet<&String> = self.atoms.iter().flatten().collect();
        names.into_iter().map(|a| (a.clone(), self.atom_mask(a))).collect()
    }

    pub fn forces(&self, w: usize, f: &Formula) -> bool {
        self.forcing_set(f) >> w & 1 == 1
    }

    /// The set of nodes forcing `f`, as a bitmask.
    pub fn forcing_set(&self, f: &Formula) -> u64 {
        self.frame().eval(f, &self.valuation(), None)
    }

    /// Like [`forcing_set`](Self::forcing_set), with `<*>` searching stages `1..=bound`.
    pub fn forcing_set_bounded(&self, f: &Formula, bound: u32) -> u64 {
        self.frame().eval(f, &self.valuation(), Some(bound))
    }
}

impl fmt::Display for StageTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in 0..self.len() {
            if w > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", self.ids[w])?;
            if let Some(p) = self.parent[w] {
                write!(f, "<-{}", self.ids[p])?;
            }
            let atoms: Vec<&str> = self.atoms[w].iter().map(String::as_str).collect();
            write!(f, " {{{}}}", atoms.join(","))?;
        }
        Ok(())
    }
}

pub fn check_monotone(m: &StageTree) -> Result<(), MonotonicityViolation> {
    for w in 1..m.len() {
        let p = m.parent[w].unwrap();
        if let Some(atom) = m.atoms[p].difference(&m.atoms[w]).next() {
            return Err(MonotonicityViolation {
                node: m.ids[w].clone(),
                parent: m.ids[p].clone(),
                atom: atom.clone(),
            });
        }
    }
    Ok(())
}

/// The shape of a stage tree, with reachability precomputed.
#[derive(Debug, Clone)]
pub struct Frame {
    n: usize,
    parent: Vec<usize>,
    /// Descendants including the node itself.
    below: Vec<u64>,
    /// `steps[k - 1][w]`: nodes exactly k successor steps from w, for k up to depth + 1.
    steps: Vec<Vec<u64>>,
    depth: u32,
}

impl Frame {
    pub fn new(parents: &[usize]) -> Frame {
        let n = parents.len() + 1;
        assert!(n <= MAX_NODES);
        let mut parent = vec![0];
        parent.extend_from_slice(parents);
        let mut children = vec![0u64; n];
        let mut depth_of = vec![0u32; n];
        for w in 1..n {
            children[parent[w]] |= 1 << w;
            depth_of[w] = depth_of[parent[w]] + 1;
        }
        let mut below: Vec<u64> = (0..n).map(|w| 1 << w).collect();
        for w in (1..n).rev() {
            below[parent[w]] |= below[w];
        }
        let depth = depth_of.iter().copied().max().unwrap_or(0);
        let one: Vec<u64> = (0..n).map(|w| if children[w] == 0 { 1 << w } else { children[w] }).collect();
        let mut steps = vec![one.clone()];
        for _ in 1..=depth {
            let prev = steps.last().unwrap();
            let next = prev.iter().map(|&set| image(&one, set)).collect();
            steps.push(next);
        }
        Frame { n, parent, below, steps, depth }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn full(&self) -> u64 {
        if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 }
    }

    pub fn parent(&self, w: usize) -> Option<usize> {
        (w > 0).then(|| self.parent[w])
    }

    /// Nodes exactly `k` steps from `w`; stationary from `depth + 1` on.
    pub fn step_set(&self, w: usize, k: u32) -> u64 {
        let k = k.min(self.depth + 1) as usize;
        self.steps[k - 1][w]
    }

    pub fn is_up_set(&self, mask: u64) -> bool {
        (1..self.n).all(|w| mask >> self.parent[w] & 1 == 0 || mask >> w & 1 == 1)
    }

    /// Every up-closed node set, in increasing numeric order.
    pub fn up_sets(&self) -> Vec<u64> {
        (0..=self.full()).filter(|&m| self.is_up_set(m)).collect()
    }

    /// Forcing set of `f`; atoms are looked up in `valuation` (absent means
    /// nowhere). `<*>` searches stages `1..=bound`, by default `1..=depth + 1`.
    pub fn eval(&self, f: &Formula, valuation: &BTreeMap<String, u64>, bound: Option<u32>) -> u64 {
        match f {
            Formula::Atom(a) => valuation.get(&a.name).copied().unwrap_or(0) & self.full(),
            Formula::Bottom => 0,
            Formula::And(a, b) => self.eval(a, valuation, bound) & self.eval(b, valuation, bound),
            Formula::Or(a, b) => self.eval(a, valuation, bound) | self.eval(b, valuation, bound),
            Formula::Implies(a, b) => {
                let bad = self.eval(a, valuation, bound) & !self.eval(b, valuation, bound);
                self.select(|w| self.below[w] & bad == 0)
            }
            Formula::Box(k, a) => {
                let inner = self.eval(a, valuation, bound);
                self.select(|w| self.step_set(w, *k) & !inner == 0)
            }
            Formula::SomeStage(a) => {
                let inner = self.eval(a, valuation, bound);
                let top = bound.unwrap_or(self.depth + 1);
                (1..=top).fold(0, |acc, k| acc | self.select(|w| self.step_set(w, k) & !inner == 0))
            }
        }
    }

    fn select(&self, pred: impl Fn(usize) -> bool) -> u64 {
        (0..self.n).filter(|&w| pred(w)).fold(0, |m, w| m | 1 << w)
    }
}

fn image(one: &[u64], set: u64) -> u64 {
    (0..one.len()).filter(|&v| set >> v & 1 == 1).fold(0, |m, v| m | one[v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::parse;

    fn tree(parents: &[usize], p: u64) -> StageTree {
        StageTree::from_masks(parents, &[("p".to_string(), p)])
    }

    fn forces(m: &StageTree, w: usize, text: &str) -> bool {
        m.forces(w, &parse(text).unwrap())
    }

    #[test]
    fn single_node_is_stationary() {
        let m = tree(&[], 1);
        assert!(forces(&m, 0, "[3]p"));
        assert!(forces(&m, 0, "<*>p"));
        assert!(forces(&m, 0, "p | ~p"));
    }

    #[test]
    fn three_node_star() {
        // root p-false, child 1 p-true, child 2 p-false
        let m = tree(&[0, 0], 0b010);
        assert!(!forces(&m, 0, "[1]p"));
        assert!(!forces(&m, 0, "~[1]p"));
        assert!(forces(&m, 1, "[1]p"));
        assert!(!forces(&m, 0, "[1]p | ~[1]p"));
        assert!(forces(&m, 2, "~[1]p"));
    }

    #[test]
    fn two_node_chain_refutes_cs5_instance() {
        let m = tree(&[0], 0b10);
        assert!(forces(&m, 0, "<*>p"));
        assert!(!forces(&m, 0, "p"));
        assert!(!forces(&m, 0, "<*>p -> p"));
    }

    #[test]
    fn exact_step_sets() {
        // 0 -> 1 -> 2, 0 -> 3
        let f = Frame::new(&[0, 1, 0]);
        assert_eq!(f.depth(), 2);
        assert_eq!(f.step_set(0, 1), 0b1010);
        assert_eq!(f.step_set(0, 2), 0b1100);
        assert_eq!(f.step_set(0, 3), 0b1100);
        assert_eq!(f.step_set(0, 40), 0b1100);
        assert_eq!(f.step_set(3, 1), 0b1000);
    }

    #[test]
    fn monotonicity_check() {
        assert!(check_monotone(&tree(&[0, 0], 0b111)).is_ok());
        assert!(check_monotone(&tree(&[], 1)).is_ok());
        let bad = tree(&[0, 0], 0b011);
        let v = check_monotone(&bad).unwrap_err();
        assert_eq!((v.node.as_str(), v.parent.as_str(), v.atom.as_str()), ("2", "0", "p"));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let text = r#"{"nodes":[{"id":"c","parent":"r","atoms":["p"]},{"id":"r","atoms":[]}]}"#;
        let m = StageTree::from_json(text).unwrap();
        assert_eq!(m.id(0), "r");
        assert!(m.forces(0, &parse("<*>p").unwrap()));
        let again = StageTree::from_json(&m.to_json_value().to_string()).unwrap();
        assert_eq!(again, m);

        let numeric = r#"{"nodes":[{"id":0},{"id":1,"parent":0,"atoms":["p"]}]}"#;
        assert_eq!(StageTree::from_json(numeric).unwrap().atom_mask("p"), 0b10);

        let dropped = r#"{"nodes":[{"id":"r","atoms":["p"]},{"id":"c","parent":"r"}]}"#;
        assert!(matches!(StageTree::from_json(dropped), Err(ModelError::NotMonotone(_))));
        let two_roots = r#"{"nodes":[{"id":"a"},{"id":"b"}]}"#;
        assert_eq!(StageTree::from_json(two_roots), Err(ModelError::Roots(2)));
        let cycle = r#"{"nodes":[{"id":"r"},{"id":"a","parent":"b"},{"id":"b","parent":"a"}]}"#;
        assert!(matches!(StageTree::from_json(cycle), Err(ModelError::Unreachable(_))));
    }
}
