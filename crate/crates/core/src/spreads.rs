//! Spread laws and the generators that emit their elements.
//!
//! A [`Generator`] is either lawlike (every term fixed by a rule) or a
//! process whose terms may depend on a scripted [`EventTrace`]. Emission is a
//! pure function of `(generator, trace, n)`; the trace is only revealed to a
//! process up to the stage being chosen, so a strategy can never look ahead.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::dyadic::{admissible_successor, lambda_interval, Dyadic};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpreadError {
    #[error("generator `{generator}` emitted {value} at stage {stage}, which `{law}` does not admit")]
    Inadmissible { generator: String, law: String, stage: usize, value: BigInt },
    #[error("generator `{generator}` is a process and needs an event trace")]
    MissingTrace { generator: String },
    #[error("generator `{generator}` failed at stage {stage}: {message}")]
    RuleFault { generator: String, stage: usize, message: String },
    #[error("malformed event trace {0:?}")]
    MalformedTrace(String),
}

/// Failure raised from inside a rule or strategy; emission attaches the stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleFault(pub String);

impl<E: std::error::Error> From<E> for RuleFault {
    fn from(e: E) -> Self {
        RuleFault(e.to_string())
    }
}

/// A building rule for infinitely proceeding sequences of integers.
pub trait Spread: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn admits_first(&self, value: &BigInt) -> bool;
    fn admits_next(&self, prefix: &[BigInt], value: &BigInt) -> bool;
    /// Witness that every admitted prefix can be continued.
    fn some_successor(&self, prefix: &[BigInt]) -> BigInt;

    fn admits(&self, prefix: &[BigInt], value: &BigInt) -> bool {
        if prefix.is_empty() {
            self.admits_first(value)
        } else {
            self.admits_next(prefix, value)
        }
    }

    fn admits_prefix(&self, prefix: &[BigInt]) -> bool {
        (0..prefix.len()).all(|i| self.admits(&prefix[..i], &prefix[i]))
    }
}

/// Every natural number is admissible everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniversalSpread;

impl Spread for UniversalSpread {
    fn name(&self) -> &str {
        "universal"
    }
    fn admits_first(&self, value: &BigInt) -> bool {
        !value.is_negative()
    }
    fn admits_next(&self, _prefix: &[BigInt], value: &BigInt) -> bool {
        !value.is_negative()
    }
    fn some_successor(&self, _prefix: &[BigInt]) -> BigInt {
        BigInt::zero()
    }
}

/// Any integer first; afterwards `z ∈ {2a, 2a+1, 2a+2}` for the previous term `a`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RngSpread;

impl Spread for RngSpread {
    fn name(&self) -> &str {
        "rng"
    }
    fn admits_first(&self, _value: &BigInt) -> bool {
        true
    }
    fn admits_next(&self, prefix: &[BigInt], value: &BigInt) -> bool {
        match prefix.last() {
            Some(a) => admissible_successor(a, value),
            None => true,
        }
    }
    fn some_successor(&self, prefix: &[BigInt]) -> BigInt {
        prefix.last().map(|a| a * 2).unwrap_or_default()
    }
}

/// Index (1-based) of the first term the law rejects, if any.
pub fn admissible_prefix(law: &dyn Spread, prefix: &[BigInt]) -> Option<usize> {
    (0..prefix.len()).find(|&i| !law.admits(&prefix[..i], &prefix[i])).map(|i| i + 1)
}

pub fn universal_spread() -> Arc<dyn Spread> {
    Arc::new(UniversalSpread)
}

pub fn rng_spread() -> Arc<dyn Spread> {
    Arc::new(RngSpread)
}

/// How (and whether) the tracked assertion gets settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(tag = "kind", content = "stage", rename_all = "snake_case")]
pub enum Resolution {
    Never,
    Proved(u32),
    Refuted(u32),
}

impl Resolution {
    pub fn stage(&self) -> Option<u32> {
        match self {
            Resolution::Never => None,
            Resolution::Proved(k) | Resolution::Refuted(k) => Some(*k),
        }
    }
}

/// A scripted future: when the assertion `assertion_id` is proved or refuted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct EventTrace {
    pub resolution: Resolution,
    pub assertion_id: String,
    /// The assertion mentions no choice parameter.
    pub lawlike: bool,
}

/// What a strategy is allowed to know when choosing the term at a given stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    Pending,
    Proved { at: u32 },
    Refuted { at: u32 },
}

impl EventTrace {
    pub fn new(resolution: Resolution) -> Self {
        EventTrace { resolution, assertion_id: "alpha".to_string(), lawlike: false }
    }

    pub fn never() -> Self {
        EventTrace::new(Resolution::Never)
    }

    pub fn proved(stage: u32) -> Self {
        EventTrace::new(Resolution::Proved(stage))
    }

    pub fn refuted(stage: u32) -> Self {
        EventTrace::new(Resolution::Refuted(stage))
    }

    pub fn with_lawlike(mut self, lawlike: bool) -> Self {
        self.lawlike = lawlike;
        self
    }

    pub fn with_assertion(mut self, id: impl Into<String>) -> Self {
        self.assertion_id = id.into();
        self
    }

    /// The resolution is visible from its own stage onward.
    pub fn observe(&self, stage: usize) -> Observation {
        match self.resolution {
            Resolution::Proved(k) if (k as usize) <= stage => Observation::Proved { at: k },
            Resolution::Refuted(k) if (k as usize) <= stage => Observation::Refuted { at: k },
            _ => Observation::Pending,
        }
    }

    /// Every trace with resolution stage at most `max_stage`, `Never` first.
    pub fn all_up_to(max_stage: u32) -> Vec<EventTrace> {
        let mut out = vec![EventTrace::never()];
        out.extend((1..=max_stage).map(EventTrace::proved));
        out.extend((1..=max_stage).map(EventTrace::refuted));
        out
    }
}

impl fmt::Display for EventTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.resolution {
            Resolution::Never => write!(f, "never")?,
            Resolution::Proved(k) => write!(f, "true:{k}")?,
            Resolution::Refuted(k) => write!(f, "false:{k}")?,
        }
        if self.lawlike {
            write!(f, " lawlike")?;
        }
        Ok(())
    }
}

impl FromStr for EventTrace {
    type Err = SpreadError;

    /// `never` | `true:<k>` | `false:<k>`, optionally followed by ` lawlike`.
    /// A single trailing newline is tolerated.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SpreadError::MalformedTrace(s.to_string());
        let line = s.strip_suffix('\n').unwrap_or(s);
        let (head, lawlike) = match line.strip_suffix(" lawlike") {
            Some(h) => (h, true),
            None => (line, false),
        };
        let stage = |digits: &str| -> Result<u32, SpreadError> {
            let ok = !digits.is_empty()
                && digits.bytes().all(|b| b.is_ascii_digit())
                && !digits.starts_with('0');
            if !ok {
                return Err(bad());
            }
            digits.parse().map_err(|_| bad())
        };
        let resolution = if head == "never" {
            Resolution::Never
        } else if let Some(k) = head.strip_prefix("true:") {
            Resolution::Proved(stage(k)?)
        } else if let Some(k) = head.strip_prefix("false:") {
            Resolution::Refuted(stage(k)?)
        } else {
            return Err(bad());
        };
        Ok(EventTrace::new(resolution).with_lawlike(lawlike))
    }
}

/// A lawlike real handed out as dyadic approximations: `approx(p)` is within `2^-p`.
#[derive(Clone)]
pub struct RealValue {
    name: String,
    exact: Option<Dyadic>,
    approx: Arc<dyn Fn(u32) -> Dyadic + Send + Sync>,
}

impl RealValue {
    pub fn exact(value: Dyadic) -> Self {
        let v = value.clone();
        RealValue { name: value.to_string(), exact: Some(value), approx: Arc::new(move |_| v.clone()) }
    }

    pub fn from_approx(
        name: impl Into<String>,
        approx: impl Fn(u32) -> Dyadic + Send + Sync + 'static,
    ) -> Self {
        RealValue { name: name.into(), exact: None, approx: Arc::new(approx) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn as_exact(&self) -> Option<&Dyadic> {
        self.exact.as_ref()
    }

    pub fn approx(&self, precision: u32) -> Dyadic {
        match &self.exact {
            Some(d) => d.clone(),
            None => (self.approx)(precision),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl fmt::Debug for RealValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealValue({})", self.name)
    }
}

/// A lawlike family `v ↦ x_v` (v ≥ 1) together with its limit.
#[derive(Clone)]
pub struct ConvergentFamily {
    name: String,
    limit: RealValue,
    member: Arc<dyn Fn(u32) -> RealValue + Send + Sync>,
}

impl ConvergentFamily {
    pub fn new(
        name: impl Into<String>,
        limit: RealValue,
        member: impl Fn(u32) -> RealValue + Send + Sync + 'static,
    ) -> Self {
        ConvergentFamily { name: name.into(), limit, member: Arc::new(member) }
    }

    /// `v ↦ limit + offset(v)` with exact dyadic members.
    pub fn dyadic(
        name: impl Into<String>,
        limit: Dyadic,
        offset: impl Fn(u32) -> Dyadic + Send + Sync + 'static,
    ) -> Self {
        let base = limit.clone();
        ConvergentFamily::new(name, RealValue::exact(limit), move |v| {
            RealValue::exact(&base + &offset(v))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn limit(&self) -> &RealValue {
        &self.limit
    }

    pub fn member(&self, v: u32) -> RealValue {
        (self.member)(v)
    }
}

impl fmt::Debug for ConvergentFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvergentFamily({})", self.name)
    }
}

/// Extra bits of precision asked of a target when choosing a term.
const STEER_GUARD_BITS: u32 = 8;

/// The admissible term at stage `n` whose λⁿ-interval has its midpoint nearest
/// `target`; ties go to the smaller term.
pub fn centering_term(previous: Option<&BigInt>, n: u32, target: &Dyadic) -> BigInt {
    assert!(n >= 1, "stages are 1-based");
    let distance = |a: &BigInt| {
        let mid = Dyadic::new(a + 1, n);
        (&mid - target).abs()
    };
    let candidates: Vec<BigInt> = match previous {
        Some(p) => (0..=2).map(|k| p * 2 + k).collect(),
        None => {
            // midpoint (a+1)/2 nearest target: a+1 = round(2t), halves round down
            let doubled_minus_half = target * &Dyadic::from_int(2) - Dyadic::new(1, 1);
            let ceil = -(-doubled_minus_half).floor_scaled(0);
            let a: BigInt = ceil - 1;
            vec![&a - 1, a.clone(), &a + 1]
        }
    };
    let mut best = candidates[0].clone();
    let mut best_d = distance(&best);
    for c in &candidates[1..] {
        let d = distance(c);
        if d < best_d {
            best = c.clone();
            best_d = d;
        }
    }
    best
}

/// One centering step toward `target`, failing if the target is left outside
/// the chosen interval (the point would no longer denote it).
pub fn steer(previous: Option<&BigInt>, n: u32, target: &RealValue) -> Result<BigInt, RuleFault> {
    let t = target.approx(n + STEER_GUARD_BITS);
    let a = centering_term(previous, n, &t);
    let interval = lambda_interval(n, &a).map_err(RuleFault::from)?;
    if !interval.contains_point(&t) {
        return Err(RuleFault(format!(
            "target {} escaped λ-interval {} at stage {n}",
            target.name(),
            interval
        )));
    }
    Ok(a)
}

pub type RuleFn = dyn Fn(&[BigInt]) -> Result<BigInt, RuleFault> + Send + Sync;
pub type StrategyFn = dyn Fn(&[BigInt], Observation) -> Result<BigInt, RuleFault> + Send + Sync;

#[derive(Clone)]
pub enum GeneratorKind {
    /// Next term from the prefix alone.
    Lawlike(Arc<RuleFn>),
    /// Next term from the prefix and what is known about the trace at this stage.
    Process(Arc<StrategyFn>),
}

/// A description of how to produce an element of a spread.
#[derive(Clone)]
pub struct Generator {
    name: String,
    law: Arc<dyn Spread>,
    kind: GeneratorKind,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            GeneratorKind::Lawlike(_) => "lawlike",
            GeneratorKind::Process(_) => "process",
        };
        write!(f, "Generator({}, {}, {kind})", self.name, self.law.name())
    }
}

impl Generator {
    pub fn lawlike(
        name: impl Into<String>,
        law: Arc<dyn Spread>,
        rule: impl Fn(&[BigInt]) -> Result<BigInt, RuleFault> + Send + Sync + 'static,
    ) -> Self {
        Generator { name: name.into(), law, kind: GeneratorKind::Lawlike(Arc::new(rule)) }
    }

    /// A lawlike generator given as a total function of the 1-based index.
    pub fn lawlike_indexed(
        name: impl Into<String>,
        law: Arc<dyn Spread>,
        rule: impl Fn(usize) -> BigInt + Send + Sync + 'static,
    ) -> Self {
        Generator::lawlike(name, law, move |prefix| Ok(rule(prefix.len() + 1)))
    }

    pub fn process(
        name: impl Into<String>,
        law: Arc<dyn Spread>,
        strategy: impl Fn(&[BigInt], Observation) -> Result<BigInt, RuleFault> + Send + Sync + 'static,
    ) -> Self {
        Generator { name: name.into(), law, kind: GeneratorKind::Process(Arc::new(strategy)) }
    }

    /// Lawlike RNG generator centering every term on `value`.
    pub fn centered(name: impl Into<String>, value: RealValue) -> Self {
        Generator::lawlike(name, rng_spread(), move |prefix| {
            steer(prefix.last(), prefix.len() as u32 + 1, &value)
        })
    }

    /// Lawlike RNG generator centering term `n` on `target(n)`.
    pub fn steered(
        name: impl Into<String>,
        target: impl Fn(u32) -> Result<RealValue, RuleFault> + Send + Sync + 'static,
    ) -> Self {
        Generator::lawlike(name, rng_spread(), move |prefix| {
            let n = prefix.len() as u32 + 1;
            steer(prefix.last(), n, &target(n)?)
        })
    }

    /// RNG process centering term `n` on `target(n, observation)`.
    pub fn steered_process(
        name: impl Into<String>,
        target: impl Fn(u32, Observation) -> Result<RealValue, RuleFault> + Send + Sync + 'static,
    ) -> Self {
        Generator::process(name, rng_spread(), move |prefix, obs| {
            let n = prefix.len() as u32 + 1;
            steer(prefix.last(), n, &target(n, obs)?)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn law(&self) -> &Arc<dyn Spread> {
        &self.law
    }

    pub fn is_lawlike(&self) -> bool {
        matches!(self.kind, GeneratorKind::Lawlike(_))
    }

    /// The lawlike sequence this process follows when nothing is ever resolved.
    pub fn specialize_never(&self) -> Generator {
        match &self.kind {
            GeneratorKind::Lawlike(_) => self.clone(),
            GeneratorKind::Process(strategy) => {
                let strategy = Arc::clone(strategy);
                Generator::lawlike(format!("{}|never", self.name), Arc::clone(&self.law), move |p| {
                    strategy(p, Observation::Pending)
                })
            }
        }
    }

    pub fn emit_prefix(&self, n: usize, trace: Option<&EventTrace>) -> Result<Vec<BigInt>, SpreadError> {
        emit_prefix(self, n, trace)
    }
}

/// First `n` terms. Lawlike generators ignore the trace.
pub fn emit_prefix(g: &Generator, n: usize, trace: Option<&EventTrace>) -> Result<Vec<BigInt>, SpreadError> {
    if let (GeneratorKind::Process(_), None) = (&g.kind, trace) {
        return Err(SpreadError::MissingTrace { generator: g.name.clone() });
    }
    let mut prefix: Vec<BigInt> = Vec::with_capacity(n);
    for stage in 1..=n {
        let next = match &g.kind {
            GeneratorKind::Lawlike(rule) => rule(&prefix),
            GeneratorKind::Process(strategy) => {
                let obs = trace.map(|t| t.observe(stage)).unwrap_or(Observation::Pending);
                strategy(&prefix, obs)
            }
        }
        .map_err(|RuleFault(message)| SpreadError::RuleFault {
            generator: g.name.clone(),
            stage,
            message,
        })?;
        if !g.law.admits(&prefix, &next) {
            return Err(SpreadError::Inadmissible {
                generator: g.name.clone(),
                law: g.law.name().to_string(),
                stage,
                value: next,
            });
        }
        prefix.push(next);
    }
    Ok(prefix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn berlin_like() -> Generator {
        Generator::steered_process("berlin-s", |_, obs| {
            Ok(RealValue::exact(match obs {
                Observation::Pending => Dyadic::zero(),
                Observation::Proved { at } => Dyadic::pow2_neg(at),
                Observation::Refuted { at } => -Dyadic::pow2_neg(at),
            }))
        })
    }

    #[test]
    fn universal_examples() {
        let u = universal_spread();
        assert!(u.admits_next(&ints(&[5, 0, 7]), &999.into()));
        assert!(u.admits_first(&0.into()));
        assert!(!u.admits_first(&(-1).into()));
        assert_eq!(u.some_successor(&ints(&[1, 2])), BigInt::zero());
    }

    #[test]
    fn rng_examples() {
        let r = rng_spread();
        assert!(r.admits_first(&(-17).into()));
        assert!(r.admits_next(&ints(&[0]), &2.into()));
        assert!(!r.admits_next(&ints(&[0]), &5.into()));
    }

    #[test]
    fn lawlike_zero_rule() {
        let g = Generator::lawlike_indexed("zero", rng_spread(), |_| BigInt::zero());
        assert_eq!(g.emit_prefix(4, None).unwrap(), ints(&[0, 0, 0, 0]));
    }

    #[test]
    fn berlin_strategy_examples() {
        let g = berlin_like();
        // centering 0 at level n is the interval [-2^-n, 2^-n], i.e. term -1
        assert_eq!(g.emit_prefix(3, Some(&EventTrace::never())).unwrap(), ints(&[-1, -1, -1]));
        // from stage 2 the midpoint is 1/4: (a+1)/2^n = 2^-2
        let p = g.emit_prefix(4, Some(&EventTrace::proved(2))).unwrap();
        assert_eq!(p, ints(&[-1, 0, 1, 3]));
        for (i, a) in p.iter().enumerate().skip(1) {
            let n = i as u32 + 1;
            assert_eq!(lambda_interval(n, a).unwrap().midpoint(), Dyadic::pow2_neg(2));
        }
    }

    #[test]
    fn process_needs_trace() {
        assert!(matches!(berlin_like().emit_prefix(2, None), Err(SpreadError::MissingTrace { .. })));
    }

    #[test]
    fn inadmissible_strategy_names_stage() {
        let g = Generator::lawlike_indexed("jumpy", rng_spread(), |n| BigInt::from(if n < 3 { 0 } else { 7 }));
        match g.emit_prefix(5, None) {
            Err(SpreadError::Inadmissible { stage, value, .. }) => {
                assert_eq!(stage, 3);
                assert_eq!(value, BigInt::from(7));
            }
            other => panic!("expected inadmissible, got {other:?}"),
        }
    }

    #[test]
    fn escaping_target_is_a_fault() {
        // 3/4 cannot be reached once the intervals have closed in around 0
        let g = Generator::steered("escape", |n| {
            Ok(RealValue::exact(if n < 4 { Dyadic::zero() } else { Dyadic::new(3, 2) }))
        });
        assert!(matches!(g.emit_prefix(6, None), Err(SpreadError::RuleFault { stage: 4, .. })));
    }

    #[test]
    fn trace_text_format() {
        for (text, res, lawlike) in [
            ("never", Resolution::Never, false),
            ("true:3", Resolution::Proved(3), false),
            ("false:12 lawlike", Resolution::Refuted(12), true),
        ] {
            let t: EventTrace = text.parse().unwrap();
            assert_eq!(t.resolution, res);
            assert_eq!(t.lawlike, lawlike);
            assert_eq!(t.to_string(), text);
        }
        assert_eq!("never\n".parse::<EventTrace>().unwrap(), EventTrace::never());
        for bad in ["true:0", "true:", "true:01", "maybe:3", "never lawlike ", "TRUE:3", "true: 3", "never\n\n"] {
            assert!(bad.parse::<EventTrace>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn observation_hides_the_future() {
        let t = EventTrace::proved(3);
        assert_eq!(t.observe(2), Observation::Pending);
        assert_eq!(t.observe(3), Observation::Proved { at: 3 });
        assert_eq!(t.observe(9), Observation::Proved { at: 3 });
    }

    #[test]
    fn centering_first_term_ties_down() {
        // midpoints (a+1)/2: target 1/4 is equidistant from 0 (a=-1) and 1/2 (a=0)
        assert_eq!(centering_term(None, 1, &Dyadic::new(1, 2)), BigInt::from(-1));
        assert_eq!(centering_term(None, 1, &Dyadic::new(3, 1)), BigInt::from(2));
        assert_eq!(centering_term(None, 1, &Dyadic::new(-7, 2)), BigInt::from(-5));
    }

    fn arb_trace() -> impl Strategy<Value = EventTrace> {
        prop_oneof![
            Just(EventTrace::never()),
            (1u32..20).prop_map(EventTrace::proved),
            (1u32..20).prop_map(EventTrace::refuted),
        ]
    }

    fn arb_rng_prefix() -> impl Strategy<Value = Vec<BigInt>> {
        (-1000i64..1000, proptest::collection::vec(0i64..3, 0..40)).prop_map(|(first, steps)| {
            let mut v = vec![BigInt::from(first)];
            for s in steps {
                let next = v.last().unwrap() * 2 + s;
                v.push(next);
            }
            v
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn productivity(prefix in arb_rng_prefix(), nat in proptest::collection::vec(0u64..1_000_000, 0..20)) {
            let r = rng_spread();
            prop_assert!(r.admits_prefix(&prefix));
            prop_assert!(r.admits_next(&prefix, &r.some_successor(&prefix)));
            let u = universal_spread();
            let nat: Vec<BigInt> = nat.into_iter().map(BigInt::from).collect();
            prop_assert!(u.admits(&nat, &u.some_successor(&nat)));
        }
    }

    proptest! {
        #[test]
        fn replay_determinism(t in arb_trace(), n in 0usize..30, m in 0usize..30) {
            let g = berlin_like();
            let short = g.emit_prefix(n, Some(&t)).unwrap();
            let long = g.emit_prefix(n + m, Some(&t)).unwrap();
            prop_assert_eq!(&long[..n], &short[..]);
        }

        #[test]
        fn never_matches_lawlike_specialization(n in 0usize..40) {
            let g = berlin_like();
            let lawlike = g.specialize_never();
            prop_assert!(lawlike.is_lawlike());
            prop_assert_eq!(
                g.emit_prefix(n, Some(&EventTrace::never())).unwrap(),
                lawlike.emit_prefix(n, None).unwrap()
            );
        }
    }
}
