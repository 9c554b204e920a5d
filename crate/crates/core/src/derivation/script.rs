//! Proof-script text format.
//!
//! ```text
//! # comment
//! assert alpha lawlike
//! defax rat <-> <*>alpha # where the equivalence comes from
//! 1: alpha ; Premise
//! 2: <*>alpha ; IC3(1)
//! 3: assume ~alpha
//! 4: _|_ ; MP(1, 3)
//! 5: ~~alpha ; Discharge(3)
//! ```
//!
//! `n: discharge m` is accepted as shorthand for a discharge step whose
//! formula is inferred.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::logic::{parse, Atom, Formula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ScriptError {
    ScriptError { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Premise,
    DefAx,
    Mp,
    AndIntro,
    AndElim,
    OrIntro,
    ContraPos,
    Md,
    Ic1,
    Ic2,
    Ic3,
    Cs5r,
    Dne,
    Assume,
    Discharge,
    /// Refuted on stage trees; named so it can be refused with a reason.
    Cs4,
    Cs5,
    Unknown(String),
}

impl Rule {
    pub fn from_name(name: &str) -> Rule {
        match name.to_ascii_lowercase().as_str() {
            "premise" => Rule::Premise,
            "defax" => Rule::DefAx,
            "mp" => Rule::Mp,
            "andintro" => Rule::AndIntro,
            "andelim" => Rule::AndElim,
            "orintro" => Rule::OrIntro,
            "contrapos" => Rule::ContraPos,
            "md" | "md-inst" => Rule::Md,
            "ic1" | "ic1-inst" => Rule::Ic1,
            "ic2" | "ic2-inst" => Rule::Ic2,
            "ic3" | "ic3-inst" => Rule::Ic3,
            "cs5r" | "cs5r-inst" => Rule::Cs5r,
            "dne" => Rule::Dne,
            "assume" => Rule::Assume,
            "discharge" => Rule::Discharge,
            "cs4" => Rule::Cs4,
            "cs5" => Rule::Cs5,
            _ => Rule::Unknown(name.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Rule::Premise => "Premise",
            Rule::DefAx => "DefAx",
            Rule::Mp => "MP",
            Rule::AndIntro => "AndIntro",
            Rule::AndElim => "AndElim",
            Rule::OrIntro => "OrIntro",
            Rule::ContraPos => "ContraPos",
            Rule::Md => "MD",
            Rule::Ic1 => "IC1",
            Rule::Ic2 => "IC2",
            Rule::Ic3 => "IC3",
            Rule::Cs5r => "CS5R",
            Rule::Dne => "DNE",
            Rule::Assume => "assume",
            Rule::Discharge => "Discharge",
            Rule::Cs4 => "CS4",
            Rule::Cs5 => "CS5",
            Rule::Unknown(s) => s,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub id: String,
    pub lawlike: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefAxiom {
    pub formula: Formula,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub number: usize,
    /// `None` only for `discharge m` shorthand.
    pub formula: Option<Formula>,
    pub rule: Rule,
    pub refs: Vec<usize>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub name: String,
    pub declarations: Vec<Declaration>,
    pub axioms: Vec<DefAxiom>,
    pub steps: Vec<Step>,
}

impl Script {
    pub fn parse(name: &str, text: &str) -> Result<Script, ScriptError> {
        let mut script = Script { name: name.to_string(), declarations: Vec::new(), axioms: Vec::new(), steps: Vec::new() };
        let mut lawlike: BTreeMap<String, bool> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("assert ") {
                let words: Vec<&str> = rest.split_whitespace().collect();
                let (id, flag) = match words.as_slice() {
                    [id] => (*id, false),
                    [id, "lawlike"] => (*id, true),
                    _ => return Err(err(line, "expected `assert <id> [lawlike]`")),
                };
                let valid = parse(id).ok().and_then(|f| match f {
                    Formula::Atom(a) if !a.lawlike => Some(()),
                    _ => None,
                });
                if valid.is_none() {
                    return Err(err(line, format!("`{id}` is not an assertion id")));
                }
                if lawlike.insert(id.to_string(), flag).is_some() {
                    return Err(err(line, format!("`{id}` declared twice")));
                }
                script.declarations.push(Declaration { id: id.to_string(), lawlike: flag });
            } else if let Some(rest) = trimmed.strip_prefix("defax ") {
                let (body, source) = rest
                    .split_once('#')
                    .ok_or_else(|| err(line, "a defining axiom needs a `# <source>` comment"))?;
                let source = source.trim();
                if source.is_empty() {
                    return Err(err(line, "empty source comment"));
                }
                let formula = formula_at(body, line, &lawlike)?;
                script.axioms.push(DefAxiom { formula, source: source.to_string() });
            } else {
                let step = parse_step(trimmed, line, &lawlike)?;
                if step.number != script.steps.len() + 1 {
                    return Err(err(line, format!("expected step {}, found {}", script.steps.len() + 1, step.number)));
                }
                script.steps.push(step);
            }
        }
        if script.steps.is_empty() {
            return Err(err(text.lines().count().max(1), "script has no steps"));
        }
        Ok(script)
    }

    pub fn lawlike(&self, id: &str) -> Option<bool> {
        self.declarations.iter().find(|d| d.id == id).map(|d| d.lawlike)
    }

    /// Canonical text; parses back to the same script.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.declarations {
            out.push_str(&format!("assert {}{}\n", d.id, if d.lawlike { " lawlike" } else { "" }));
        }
        for a in &self.axioms {
            out.push_str(&format!("defax {} # {}\n", a.formula, a.source));
        }
        for s in &self.steps {
            out.push_str(&s.render());
            out.push('\n');
        }
        out
    }
}

impl Step {
    pub fn render(&self) -> String {
        match (&self.rule, &self.formula) {
            (Rule::Assume, Some(f)) => format!("{}: assume {f}", self.number),
            (Rule::Discharge, None) => format!("{}: discharge {}", self.number, self.refs[0]),
            (rule, f) => {
                let f = f.as_ref().map(|f| f.to_string()).unwrap_or_default();
                if self.refs.is_empty() {
                    format!("{}: {f} ; {rule}", self.number)
                } else {
                    let refs: Vec<String> = self.refs.iter().map(|r| r.to_string()).collect();
                    format!("{}: {f} ; {rule}({})", self.number, refs.join(", "))
                }
            }
        }
    }
}

fn formula_at(text: &str, line: usize, lawlike: &BTreeMap<String, bool>) -> Result<Formula, ScriptError> {
    let f = parse(text.trim()).map_err(|e| err(line, e.to_string()))?;
    for atom in f.atoms() {
        match lawlike.get(&atom.name) {
            None => return Err(err(line, format!("undeclared assertion `{}`", atom.name))),
            Some(false) if atom.lawlike => {
                return Err(err(line, format!("`{}!` marks an assertion declared without `lawlike`", atom.name)))
            }
            _ => {}
        }
    }
    Ok(f.map_atoms(&|a: &Atom| Formula::Atom(Atom { name: a.name.clone(), lawlike: lawlike[&a.name] })))
}

fn parse_step(text: &str, line: usize, lawlike: &BTreeMap<String, bool>) -> Result<Step, ScriptError> {
    let (number, body) = text.split_once(':').ok_or_else(|| err(line, "expected `<n>: ...`"))?;
    let number: usize = number.trim().parse().map_err(|_| err(line, format!("bad step number `{}`", number.trim())))?;
    let body = body.trim();
    let body = body.split_once('#').map_or(body, |(b, _)| b.trim());
    if let Some(rest) = body.strip_prefix("assume ") {
        let formula = formula_at(rest, line, lawlike)?;
        return Ok(Step { number, formula: Some(formula), rule: Rule::Assume, refs: Vec::new(), line });
    }
    if let Some(rest) = body.strip_prefix("discharge ") {
        let m = rest.trim().parse().map_err(|_| err(line, format!("bad step reference `{}`", rest.trim())))?;
        return Ok(Step { number, formula: None, rule: Rule::Discharge, refs: vec![m], line });
    }
    let (formula, just) = body.rsplit_once(';').ok_or_else(|| err(line, "expected `<formula> ; <rule>(<refs>)`"))?;
    let formula = formula_at(formula, line, lawlike)?;
    let just = just.trim();
    let (name, refs) = match just.split_once('(') {
        None => (just, Vec::new()),
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| err(line, "unclosed `(` in justification"))?;
            let refs = inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| err(line, format!("bad step reference `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            (name.trim(), refs)
        }
    };
    if name.is_empty() {
        return Err(err(line, "missing rule name"));
    }
    Ok(Step { number, formula: Some(formula), rule: Rule::from_name(name), refs, line })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "assert alpha lawlike\nassert r\ndefax r <-> <*>alpha # toy\n1: alpha ; Premise\n2: <*>alpha ; IC3(1)\n3: assume ~alpha\n4: _|_ ; MP(1, 3)\n5: discharge 3\n";

    #[test]
    fn parses_and_normalizes_lawlike_flags() {
        let s = Script::parse("t", SMALL).unwrap();
        assert_eq!(s.declarations.len(), 2);
        assert_eq!(s.steps[0].formula, Some(Formula::lawlike_atom("alpha")));
        assert_eq!(s.steps[1].refs, vec![1]);
        assert_eq!(s.steps[4].formula, None);
        assert_eq!(s.axioms[0].source, "toy");
        let again = Script::parse("t", &s.render()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            ("1: p ; Premise", "undeclared"),
            ("assert p\n2: p ; Premise", "expected step 1"),
            ("assert p\ndefax p", "source"),
            ("assert p\n1: p! ; Premise", "without `lawlike`"),
            ("assert p\n1: p ; MP(x)", "bad step reference"),
            ("assert p\n1: p Premise", "expected"),
            ("assert p extra", "assert <id>"),
            ("assert p", "no steps"),
        ];
        for (text, needle) in cases {
            let e = Script::parse("t", text).unwrap_err();
            assert!(e.message.contains(needle), "{text}: {e}");
        }
    }

    #[test]
    fn unknown_rules_survive_parsing() {
        let s = Script::parse("t", "assert p\n1: p ; Magic(2)").unwrap();
        assert_eq!(s.steps[0].rule, Rule::Unknown("Magic".to_string()));
    }
}
