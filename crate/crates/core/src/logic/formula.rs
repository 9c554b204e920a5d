//! Stage-modal formulas, their canonical printing and the surface parser.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("nesting error at column {column}: the operand of {operator} must not contain [n] or <*>")]
    Nesting { column: usize, operator: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub name: String,
    /// Mentions no choice parameter.
    pub lawlike: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Bottom,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `[n]φ`: φ holds at the n-th stage from now.
    Box(u32, Box<Formula>),
    /// `<*>φ`: `[n]φ` for some n.
    SomeStage(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom { name: name.to_string(), lawlike: false })
    }

    pub fn lawlike_atom(name: &str) -> Formula {
        Formula::Atom(Atom { name: name.to_string(), lawlike: true })
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bottom)
    }

    /// `[n]φ`; panics on a modal operand or `n = 0` (use the parser for checked input).
    pub fn boxed(n: u32, a: Formula) -> Formula {
        assert!(n >= 1 && a.is_box_free(), "[n] needs n >= 1 and a box-free operand");
        Formula::Box(n, Box::new(a))
    }

    /// `<*>φ`; panics on a modal operand.
    pub fn some_stage(a: Formula) -> Formula {
        assert!(a.is_box_free(), "<*> needs a box-free operand");
        Formula::SomeStage(Box::new(a))
    }

    /// `~φ | ~~φ`.
    pub fn tested_now(a: Formula) -> Formula {
        Formula::or(Formula::not(a.clone()), Formula::not(Formula::not(a)))
    }

    /// `<*>(~φ | ~~φ)`.
    pub fn tested_later(a: Formula) -> Formula {
        Formula::some_stage(Formula::tested_now(a))
    }

    /// The operand of a negation `φ -> _|_`.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(a, b) if **b == Formula::Bottom => Some(a),
            _ => None,
        }
    }

    pub fn is_box_free(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bottom => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_box_free() && b.is_box_free(),
            Formula::Box(..) | Formula::SomeStage(_) => false,
        }
    }

    /// Boxes only ever apply to box-free operands.
    pub fn is_well_formed(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bottom => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_well_formed() && b.is_well_formed(),
            Formula::Box(n, a) => *n >= 1 && a.is_box_free(),
            Formula::SomeStage(a) => a.is_box_free(),
        }
    }

    /// Connective count, with `~` counted once.
    pub fn size(&self) -> usize {
        if let Some(a) = self.negated() {
            return 1 + a.size();
        }
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Box(_, a) | Formula::SomeStage(a) => 1 + a.size(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<&Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a);
            }
            Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Box(_, a) | Formula::SomeStage(a) => a.collect_atoms(out),
        }
    }

    pub fn atom_names(&self) -> BTreeSet<String> {
        self.atoms().into_iter().map(|a| a.name.clone()).collect()
    }

    /// Rewrites every atom.
    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Formula) -> Formula {
        let go = |x: &Formula| Box::new(x.map_atoms(f));
        match self {
            Formula::Atom(a) => f(a),
            Formula::Bottom => Formula::Bottom,
            Formula::And(a, b) => Formula::And(go(a), go(b)),
            Formula::Or(a, b) => Formula::Or(go(a), go(b)),
            Formula::Implies(a, b) => Formula::Implies(go(a), go(b)),
            Formula::Box(n, a) => Formula::Box(*n, go(a)),
            Formula::SomeStage(a) => Formula::SomeStage(go(a)),
        }
    }

    /// Replaces the atom `name` by `by`.
    pub fn substitute(&self, name: &str, by: &Formula) -> Formula {
        self.map_atoms(&|a| if a.name == name { by.clone() } else { Formula::Atom(a.clone()) })
    }

    fn is_unary_like(&self) -> bool {
        matches!(self, Formula::Atom(_) | Formula::Bottom | Formula::Box(..) | Formula::SomeStage(_))
            || self.negated().is_some()
    }
}

struct Operand<'a>(&'a Formula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_unary_like() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

/// Binary operand printed with parentheses unless it binds tighter than `level`
/// (1: `->`, 2: `|`, 3: `&`).
struct At<'a>(&'a Formula, u8);

impl fmt::Display for At<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let own = if self.0.is_unary_like() {
            4
        } else {
            match self.0 {
                Formula::Implies(..) => 1,
                Formula::Or(..) => 2,
                _ => 3,
            }
        };
        if own >= self.1 {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.negated() {
            return write!(f, "~{}", Operand(a));
        }
        match self {
            Formula::Atom(a) => write!(f, "{}{}", a.name, if a.lawlike { "!" } else { "" }),
            Formula::Bottom => write!(f, "_|_"),
            Formula::And(a, b) => write!(f, "{} & {}", At(a, 3), At(b, 4)),
            Formula::Or(a, b) => write!(f, "{} | {}", At(a, 2), At(b, 3)),
            Formula::Implies(a, b) => write!(f, "{} -> {}", At(a, 2), At(b, 1)),
            Formula::Box(n, a) => write!(f, "[{n}]{}", Operand(a)),
            Formula::SomeStage(a) => write!(f, "<*>{}", Operand(a)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bang,
    Bottom,
    Tilde,
    And,
    Bar,
    Arrow,
    Iff,
    LBracket,
    Num(String),
    RBracket,
    Diamond,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn starts_operand(&self) -> bool {
        matches!(
            self,
            Tok::Ident(_) | Tok::Bottom | Tok::Tilde | Tok::LBracket | Tok::Diamond | Tok::LParen | Tok::Bar
        )
    }

    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("atom `{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::End => "end of input".to_string(),
            other => format!("`{}`", match other {
                Tok::Bang => "!",
                Tok::Bottom => "_|_",
                Tok::Tilde => "~",
                Tok::And => "&",
                Tok::Bar => "|",
                Tok::Arrow => "->",
                Tok::Iff => "<->",
                Tok::LBracket => "[",
                Tok::RBracket => "]",
                Tok::Diamond => "<*>",
                Tok::LParen => "(",
                Tok::RParen => ")",
                _ => unreachable!(),
            }),
        }
    }
}

fn syntax(column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax { column, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let rest = |i: usize, s: &str| chars[i..].iter().take(s.chars().count()).copied().eq(s.chars());
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = if rest(i, "_|_") {
            (Tok::Bottom, 3)
        } else if rest(i, "<->") {
            (Tok::Iff, 3)
        } else if rest(i, "<*>") {
            (Tok::Diamond, 3)
        } else if rest(i, "->") {
            (Tok::Arrow, 2)
        } else if c.is_ascii_lowercase() {
            let len = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || **c == '_')
                .count();
            (Tok::Ident(chars[i..i + len].iter().collect()), len)
        } else if c.is_ascii_digit() {
            let len = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            (Tok::Num(chars[i..i + len].iter().collect()), len)
        } else {
            let tok = match c {
                '!' => Tok::Bang,
                '~' => Tok::Tilde,
                '&' => Tok::And,
                '|' => Tok::Bar,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => return Err(syntax(col, format!("unexpected character `{other}`"))),
            };
            (tok, 1)
        };
        out.push((tok, col));
        i += len;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.column(), format!("expected {}, found {}", want.describe(), self.peek().describe())))
        }
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let left = self.imp()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let right = self.imp()?;
            if *self.peek() == Tok::Iff {
                return Err(syntax(self.column(), "chained `<->` needs parentheses"));
            }
            return Ok(Formula::iff(left, right));
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula, FormulaError> {
        let left = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.imp()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn modal(&mut self, operator: String, column: usize) -> Result<Formula, FormulaError> {
        let operand = self.unary()?;
        if !operand.is_box_free() {
            return Err(FormulaError::Nesting { column, operator });
        }
        Ok(operand)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let column = self.column();
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBracket => {
                self.bump();
                let n = match self.bump() {
                    (Tok::Num(s), col) => match s.parse::<u32>() {
                        Ok(n) if n >= 1 => n,
                        _ => return Err(syntax(col, format!("stage index `{s}` must be a positive integer"))),
                    },
                    (other, col) => return Err(syntax(col, format!("expected stage index, found {}", other.describe()))),
                };
                self.expect(Tok::RBracket)?;
                let operand = self.modal(format!("[{n}]"), column)?;
                Ok(Formula::Box(n, Box::new(operand)))
            }
            Tok::Diamond => {
                self.bump();
                let operand = self.modal("<*>".to_string(), column)?;
                Ok(Formula::SomeStage(Box::new(operand)))
            }
            Tok::Bar => {
                self.bump();
                Ok(Formula::tested_now(self.unary()?))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Formula, FormulaError> {
        let column = self.column();
        let base = self.primary()?;
        if *self.peek() == Tok::Bar && !self.peek_at(1).starts_operand() {
            self.bump();
            if !base.is_box_free() {
                return Err(FormulaError::Nesting { column, operator: "postfix |".to_string() });
            }
            return Ok(Formula::tested_later(base));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        match self.bump() {
            (Tok::Ident(name), _) => {
                let lawlike = *self.peek() == Tok::Bang;
                if lawlike {
                    self.bump();
                }
                Ok(Formula::Atom(Atom { name, lawlike }))
            }
            (Tok::Bottom, _) => Ok(Formula::Bottom),
            (Tok::LParen, _) => {
                let inner = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            (other, col) => Err(syntax(col, format!("expected a formula, found {}", other.describe()))),
        }
    }
}

/// Parses the surface syntax. `a <-> b` abbreviates `(a -> b) & (b -> a)`;
/// `|a` and `a|` abbreviate `~a | ~~a` and `<*>(~a | ~~a)`.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let f = p.iff()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.column(), format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn spec_examples() {
        assert_eq!(parse("[2](p | ~p)").unwrap(), Formula::boxed(2, Formula::or(p(), Formula::not(p()))));
        assert_eq!(parse("<*>p -> p").unwrap(), Formula::implies(Formula::some_stage(p()), p()));
        assert!(matches!(parse("[1][1]p"), Err(FormulaError::Nesting { column: 1, .. })));
        assert!(matches!(parse("<*>[2]p"), Err(FormulaError::Nesting { .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        let q = Formula::atom("q");
        let r = Formula::atom("r");
        assert_eq!(
            parse("p & q | r -> p").unwrap(),
            Formula::implies(Formula::or(Formula::and(p(), q.clone()), r.clone()), p())
        );
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::implies(p(), Formula::implies(q.clone(), r.clone()))
        );
        assert_eq!(parse("~p & q").unwrap(), Formula::and(Formula::not(p()), q.clone()));
        assert_eq!(parse("[1]p & q").unwrap(), Formula::and(Formula::boxed(1, p()), q));
        assert_eq!(parse("alpha!").unwrap(), Formula::lawlike_atom("alpha"));
    }

    #[test]
    fn sugar() {
        assert_eq!(parse("|p").unwrap(), Formula::tested_now(p()));
        assert_eq!(parse("p|").unwrap(), Formula::tested_later(p()));
        assert_eq!(parse("(p|) -> q").unwrap(), Formula::implies(Formula::tested_later(p()), Formula::atom("q")));
        assert_eq!(parse("p | |q").unwrap(), Formula::or(p(), Formula::tested_now(Formula::atom("q"))));
        assert_eq!(parse("p <-> q").unwrap(), Formula::iff(p(), Formula::atom("q")));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        for (text, col) in [("p &", 4), ("p q", 3), ("[0]p", 2), ("(p", 3), ("p # q", 3), ("[x]p", 2), ("P", 1)] {
            match parse(text) {
                Err(FormulaError::Syntax { column, .. }) => assert_eq!(column, col, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    const CORPUS: &[&str] = &[
        "p", "_|_", "~p", "~~p", "~~~p", "p!", "p & q", "p | q", "p -> q", "p -> q -> r",
        "(p -> q) -> r", "p & q & r", "p & (q & r)", "p | q | r", "p | (q | r)", "p & q | r",
        "p & (q | r)", "(p | q) & r", "~(p & q)", "~(p -> q)", "~_|_", "[1]p", "[3](p | ~p)",
        "[2]~p", "~[2]p", "<*>p", "<*>p -> p", "~<*>p -> ~p", "~p -> ~<*>p", "p -> <*>p",
        "[1]p -> [4]p", "[1]p | ~[1]p", "<*>(~p | ~~p)", "~p | ~~p", "<*>(p | ~p) -> p | ~p",
        "(p -> q) & (q -> p)", "rat_d -> <*>(alpha | ~alpha)", "~~rat_d", "alpha! | ~alpha!",
        "~(alpha | ~alpha)", "~~~alpha -> ~alpha", "e_half & (e_below -> alpha)", "[10]q",
        "<*>~~alpha", "~<*>(alpha | ~alpha)", "(p -> q) -> ~q -> ~p", "p & q -> q & p",
        "~(p | q) -> ~p & ~q", "[1](p & q) -> [1]p", "x1 | x_2 | x3",
    ];

    #[test]
    fn round_trip_corpus() {
        assert_eq!(CORPUS.len(), 50);
        for text in CORPUS {
            let f = parse(text).unwrap();
            assert_eq!(f.to_string(), *text);
        }
    }

    fn arb_box_free() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Bottom),
            "[a-c]".prop_map(|s| Formula::atom(&s)),
            "[a-c]".prop_map(|s| Formula::lawlike_atom(&s)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let modal = prop_oneof![
            arb_box_free(),
            (1u32..5, arb_box_free()).prop_map(|(n, f)| Formula::boxed(n, f)),
            arb_box_free().prop_map(Formula::some_stage),
        ];
        modal.prop_recursive(2, 12, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse(f in arb_formula()) {
            let text = f.to_string();
            prop_assert_eq!(parse(&text).unwrap(), f);
        }
    }
}
