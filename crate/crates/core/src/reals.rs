//! Points of the RNG spread and the comparisons that can be settled at a
//! finite horizon.
//!
//! Every relation here is existential: `x < y` holds once some stage shows
//! disjoint intervals in the right order. A search that runs out of stages
//! reports [`VerdictValue::UnknownAtHorizon`], which is not a refutation.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dyadic::{lambda_interval, Dyadic, Interval};
use crate::spreads::{
    admissible_prefix, rng_spread, EventTrace, Generator, RealValue, SpreadError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealsError {
    #[error(transparent)]
    Spread(#[from] SpreadError),
    #[error("generator `{0}` does not build on the RNG spread")]
    NotRng(String),
    #[error("prefix is not RNG-admissible at index {0}")]
    Inadmissible(usize),
    #[error("index {index} outside the prefix of length {len}")]
    BadIndex { index: usize, len: usize },
    #[error("no answer within horizon {horizon}")]
    UnknownAtHorizon { horizon: usize },
    #[error("pair ({first}, {second}) is neither apart nor declared coincident")]
    UndecidedPair { first: String, second: String },
    #[error("pair ({first}, {second}) was declared coincident but separates at stage {stage}")]
    CoincidenceRefuted { first: String, second: String, stage: usize },
}

/// A point of the RNG spread: a generator plus the trace driving it, if any.
#[derive(Clone, Debug)]
pub struct Point {
    name: String,
    generator: Generator,
    trace: Option<EventTrace>,
}

impl Point {
    pub fn new(generator: Generator) -> Result<Self, RealsError> {
        Point::build(generator, None)
    }

    pub fn with_trace(generator: Generator, trace: EventTrace) -> Result<Self, RealsError> {
        Point::build(generator, Some(trace))
    }

    fn build(generator: Generator, trace: Option<EventTrace>) -> Result<Self, RealsError> {
        if generator.law().name() != "rng" {
            return Err(RealsError::NotRng(generator.name().to_string()));
        }
        let name = match &trace {
            Some(t) if !generator.is_lawlike() => format!("{}[{}]", generator.name(), t),
            _ => generator.name().to_string(),
        };
        Ok(Point { name, generator, trace })
    }

    /// Centers every term on a fixed lawlike value.
    pub fn centered(name: impl Into<String>, value: RealValue) -> Self {
        Point::new(Generator::centered(name, value)).expect("centering emits on the RNG spread")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn trace(&self) -> Option<&EventTrace> {
        self.trace.as_ref()
    }

    pub fn prefix(&self, n: usize) -> Result<Vec<BigInt>, RealsError> {
        Ok(self.generator.emit_prefix(n, self.trace.as_ref())?)
    }

    /// λⁿ-interval of the n-th term.
    pub fn interval(&self, n: usize) -> Result<Interval, RealsError> {
        let p = self.prefix(n)?;
        let a = p.last().ok_or(RealsError::BadIndex { index: n, len: 0 })?;
        Ok(lambda_interval(n as u32, a).expect("n >= 1"))
    }
}

/// `k ↦ 0`: intervals `[0, 2^{1-k}]` shrinking onto 0 from the right.
pub fn zero() -> Point {
    Point::new(Generator::lawlike_indexed("zero", rng_spread(), |_| BigInt::zero())).unwrap()
}

/// `k ↦ 2^k − 2`: intervals `[1 − 2^{1-k}, 1]` shrinking onto 1 from the left.
pub fn one() -> Point {
    Point::new(Generator::lawlike_indexed("one", rng_spread(), |k| (BigInt::one() << k) - 2)).unwrap()
}

/// A point centered on an exact dyadic value.
pub fn dyadic_point(value: Dyadic) -> Point {
    let name = value.to_string();
    Point::centered(name, RealValue::exact(value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictValue {
    Holds,
    Fails,
    UnknownAtHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    FirstBelowSecond,
    SecondBelowFirst,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::FirstBelowSecond => Direction::SecondBelowFirst,
            Direction::SecondBelowFirst => Direction::FirstBelowSecond,
        }
    }
}

/// Outcome of a semi-decidable comparison searched up to `horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub value: VerdictValue,
    pub horizon: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
}

impl Verdict {
    fn found(value: VerdictValue, horizon: usize, witness: usize) -> Self {
        Verdict { value, horizon, witness: Some(witness), direction: None }
    }

    fn unknown(horizon: usize) -> Self {
        Verdict { value: VerdictValue::UnknownAtHorizon, horizon, witness: None, direction: None }
    }

    pub fn holds(&self) -> bool {
        self.value == VerdictValue::Holds
    }

    pub fn fails(&self) -> bool {
        self.value == VerdictValue::Fails
    }

    pub fn is_unknown(&self) -> bool {
        self.value == VerdictValue::UnknownAtHorizon
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.value, self.witness) {
            (VerdictValue::Holds, Some(n)) => write!(f, "holds (witness n={n})")?,
            (VerdictValue::Fails, Some(n)) => write!(f, "fails (witness n={n})")?,
            _ => write!(f, "unknown at horizon {}", self.horizon)?,
        }
        match self.direction {
            Some(Direction::FirstBelowSecond) => write!(f, ", first < second"),
            Some(Direction::SecondBelowFirst) => write!(f, ", second < first"),
            None => Ok(()),
        }
    }
}

fn horizon_ok(h: usize) -> usize {
    assert!(h >= 1, "horizon must be positive");
    h
}

/// Least `n ≤ H` with `a_n + 2 < b_n`, on raw prefixes of length ≥ H.
pub fn lt_prefixes(a: &[BigInt], b: &[BigInt], horizon: usize) -> Verdict {
    let h = horizon_ok(horizon);
    (0..h)
        .find(|&i| &a[i] + 2 < b[i])
        .map(|i| Verdict::found(VerdictValue::Holds, h, i + 1))
        .unwrap_or_else(|| Verdict::unknown(h))
}

/// `x < y` searched up to the horizon. Never `Fails`.
pub fn lt_at(a: &Point, b: &Point, horizon: usize) -> Result<Verdict, RealsError> {
    let h = horizon_ok(horizon);
    Ok(lt_prefixes(&a.prefix(h)?, &b.prefix(h)?, h))
}

/// `x < r` for a rational `r`: least `n` with `(a_n + 2)/2^n < r`.
pub fn lt_rational(a: &Point, r: &BigRational, horizon: usize) -> Result<Verdict, RealsError> {
    let h = horizon_ok(horizon);
    let p = a.prefix(h)?;
    let (num, den) = (r.numer(), r.denom());
    let hit = (0..h).find(|&i| (&p[i] + 2) * den < num << (i + 1));
    Ok(hit.map(|i| Verdict::found(VerdictValue::Holds, h, i + 1)).unwrap_or_else(|| Verdict::unknown(h)))
}

/// `r < x` for a rational `r`: least `n` with `r < a_n/2^n`.
pub fn gt_rational(a: &Point, r: &BigRational, horizon: usize) -> Result<Verdict, RealsError> {
    let h = horizon_ok(horizon);
    let p = a.prefix(h)?;
    let (num, den) = (r.numer(), r.denom());
    let hit = (0..h).find(|&i| num << (i + 1) < &p[i] * den);
    Ok(hit.map(|i| Verdict::found(VerdictValue::Holds, h, i + 1)).unwrap_or_else(|| Verdict::unknown(h)))
}

pub fn apart_prefixes(a: &[BigInt], b: &[BigInt], horizon: usize) -> Verdict {
    let h = horizon_ok(horizon);
    for i in 0..h {
        let dir = if &a[i] + 2 < b[i] {
            Direction::FirstBelowSecond
        } else if &b[i] + 2 < a[i] {
            Direction::SecondBelowFirst
        } else {
            continue;
        };
        let mut v = Verdict::found(VerdictValue::Holds, h, i + 1);
        v.direction = Some(dir);
        return v;
    }
    Verdict::unknown(h)
}

/// `x # y`: either strict order holds within the horizon.
pub fn apart_at(a: &Point, b: &Point, horizon: usize) -> Result<Verdict, RealsError> {
    let h = horizon_ok(horizon);
    Ok(apart_prefixes(&a.prefix(h)?, &b.prefix(h)?, h))
}

/// `Fails` at the first stage whose intervals are disjoint.
///
/// Intervals nest, so a disjoint pair at stages (i, j) forces the pair at
/// stage max(i, j) apart too; checking equal stages is therefore enough.
pub fn coincide_refute_prefixes(a: &[BigInt], b: &[BigInt], horizon: usize) -> Verdict {
    let h = horizon_ok(horizon);
    (0..h)
        .find(|&i| &a[i] + 2 < b[i] || &b[i] + 2 < a[i])
        .map(|i| Verdict::found(VerdictValue::Fails, h, i + 1))
        .unwrap_or_else(|| Verdict::unknown(h))
}

pub fn coincide_refute(a: &Point, b: &Point, horizon: usize) -> Result<Verdict, RealsError> {
    let h = horizon_ok(horizon);
    Ok(coincide_refute_prefixes(&a.prefix(h)?, &b.prefix(h)?, h))
}

/// Rewrites the terms below index `n` by `a'_k = floor((a'_{k+1} − 1)/2)`.
///
/// Each rewritten interval strictly contains the next one, so λ^k ⊇ λ^{k+2}
/// holds with room on both sides.
pub fn center(prefix: &[BigInt], n: usize) -> Result<Vec<BigInt>, RealsError> {
    if n == 0 || n > prefix.len() {
        return Err(RealsError::BadIndex { index: n, len: prefix.len() });
    }
    if let Some(bad) = admissible_prefix(&*rng_spread(), prefix) {
        return Err(RealsError::Inadmissible(bad));
    }
    let mut out = prefix.to_vec();
    for k in (0..n - 1).rev() {
        out[k] = center_step(&out[k + 1]);
    }
    Ok(out)
}

fn center_step(next: &BigInt) -> BigInt {
    let shifted: BigInt = next - 1;
    shifted.div_floor(&BigInt::from(2))
}

/// A neighborhood-function style map from RNG prefixes to RNG prefixes.
pub trait PrefixMap: Send + Sync {
    fn name(&self) -> &str;
    fn apply(&self, input: &[BigInt]) -> Vec<BigInt>;
    /// An input length guaranteeing output length at least `m`.
    fn totality(&self, m: usize) -> usize;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap;

impl PrefixMap for IdentityMap {
    fn name(&self) -> &str {
        "identity"
    }
    fn apply(&self, input: &[BigInt]) -> Vec<BigInt> {
        input.to_vec()
    }
    fn totality(&self, m: usize) -> usize {
        m
    }
}

/// `a ↦ −a − 2`: mirrors every interval through 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct NegationMap;

impl PrefixMap for NegationMap {
    fn name(&self) -> &str {
        "negation"
    }
    fn apply(&self, input: &[BigInt]) -> Vec<BigInt> {
        input.iter().map(|a| -a - 2).collect()
    }
    fn totality(&self, m: usize) -> usize {
        m
    }
}

/// The identity function, emitting output term `j` only once input term
/// `2j` is known: `b_j = floor(a_{2j} / 2^j)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DelayMap;

impl PrefixMap for DelayMap {
    fn name(&self) -> &str {
        "delay"
    }
    fn apply(&self, input: &[BigInt]) -> Vec<BigInt> {
        (1..=input.len() / 2)
            .map(|j| input[2 * j - 1].div_floor(&(BigInt::one() << j)))
            .collect()
    }
    fn totality(&self, m: usize) -> usize {
        2 * m
    }
}

pub fn bundled_maps() -> Vec<Arc<dyn PrefixMap>> {
    vec![Arc::new(IdentityMap), Arc::new(NegationMap), Arc::new(DelayMap)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulus {
    Found(usize),
    UnknownAtHorizon(usize),
}

/// Least input length `n ≤ H` after which `f` has emitted at least `m` terms.
pub fn cpf_modulus_prefix(f: &dyn PrefixMap, prefix: &[BigInt], m: usize, horizon: usize) -> Modulus {
    assert!(m >= 1, "output precision must be positive");
    let h = horizon.min(prefix.len());
    if f.totality(m) > h {
        return Modulus::UnknownAtHorizon(horizon);
    }
    (1..=h)
        .find(|&n| f.apply(&prefix[..n]).len() >= m)
        .map(Modulus::Found)
        .unwrap_or(Modulus::UnknownAtHorizon(horizon))
}

pub fn cpf_modulus(f: &dyn PrefixMap, a: &Point, m: usize, horizon: usize) -> Result<Modulus, RealsError> {
    let p = a.prefix(horizon_ok(horizon))?;
    Ok(cpf_modulus_prefix(f, &p, m, horizon))
}

/// `n0` and `q = 2^{−n0−2}` for output precision `2^{−m0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuityModulus {
    pub n0: usize,
    pub q: Dyadic,
}

/// The point is centered up to the horizon before its modulus is read off.
pub fn continuity_modulus(
    f: &dyn PrefixMap,
    a: &Point,
    m0: usize,
    horizon: usize,
) -> Result<ContinuityModulus, RealsError> {
    let h = horizon_ok(horizon);
    let centered = center(&a.prefix(h)?, h)?;
    match cpf_modulus_prefix(f, &centered, m0 + 2, h) {
        Modulus::Found(n0) => Ok(ContinuityModulus { n0, q: Dyadic::pow2_neg(n0 as u32 + 2) }),
        Modulus::UnknownAtHorizon(h) => Err(RealsError::UnknownAtHorizon { horizon: h }),
    }
}

/// Does some index `j ≤ len` show the two prefixes within `bound`, i.e.
/// `(|a_j − b_j| + 2) / 2^j < bound`? Sound for the distance of the limits.
pub fn within(a: &[BigInt], b: &[BigInt], bound: &Dyadic) -> Option<usize> {
    let len = a.len().min(b.len());
    (0..len).find(|&i| {
        let gap = Dyadic::new((&a[i] - &b[i]).abs() + 2, i as u32 + 1);
        &gap < bound
    }).map(|i| i + 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessReport {
    pub map: String,
    pub m0: usize,
    pub n0: usize,
    pub q: Dyadic,
    pub seed: u64,
    pub samples: usize,
    pub premise_checked: usize,
    pub failures: Vec<usize>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.premise_checked == self.samples
    }
}

/// Samples points `y` with `|x − y| < q` and checks `|f(x) − f(y)| < 2^{−m0}`.
///
/// Each sample fixes a term at stage `K = n0 + 6` close to the centered `a`,
/// fills the stages below by the centering recursion and continues above at
/// random.
pub fn continuity_soundness(
    f: &dyn PrefixMap,
    a: &Point,
    m0: usize,
    samples: usize,
    seed: u64,
) -> Result<SoundnessReport, RealsError> {
    let horizon = f.totality(m0 + 2) + 8;
    let modulus = continuity_modulus(f, a, m0, horizon)?;
    let n0 = modulus.n0;
    let k = n0 + 6;
    let len = 4 * (k + m0 + 8);
    let x = center(&a.prefix(len)?, horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach: i64 = (1i64 << (k - n0 - 2)) - 3;
    let target = Dyadic::pow2_neg(m0 as u32);
    let mut premise_checked = 0;
    let mut failures = Vec::new();
    for s in 0..samples {
        let mut y = vec![BigInt::zero(); len];
        y[k - 1] = &x[k - 1] + rng.gen_range(-reach..=reach);
        for i in (0..k - 1).rev() {
            y[i] = center_step(&y[i + 1]);
        }
        for i in k..len {
            y[i] = &y[i - 1] * 2 + rng.gen_range(0..=2);
        }
        if within(&x, &y, &modulus.q).is_some() {
            premise_checked += 1;
        }
        if within(&f.apply(&x), &f.apply(&y), &target).is_none() {
            failures.push(s);
        }
    }
    Ok(SoundnessReport {
        map: f.name().to_string(),
        m0,
        n0,
        q: modulus.q,
        seed,
        samples,
        premise_checked,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRelation {
    Less,
    Greater,
    Coincident,
}

impl PairRelation {
    fn flip(self) -> Self {
        match self {
            PairRelation::Less => PairRelation::Greater,
            PairRelation::Greater => PairRelation::Less,
            PairRelation::Coincident => PairRelation::Coincident,
        }
    }
}

/// Decided pairwise relations on a finite sample.
#[derive(Debug, Clone, Serialize)]
pub struct OrderTable {
    names: Vec<String>,
    relation: Vec<Vec<PairRelation>>,
}

impl OrderTable {
    /// `relate(i, j)` is consulted for `i < j` only; the table is filled symmetrically.
    pub fn from_fn(
        names: Vec<String>,
        mut relate: impl FnMut(usize, usize) -> Option<PairRelation>,
    ) -> Result<Self, RealsError> {
        let n = names.len();
        let mut relation = vec![vec![PairRelation::Coincident; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let r = relate(i, j).ok_or_else(|| RealsError::UndecidedPair {
                    first: names[i].clone(),
                    second: names[j].clone(),
                })?;
                relation[i][j] = r;
                relation[j][i] = r.flip();
            }
        }
        Ok(OrderTable { names, relation })
    }

    /// Decides every pair by apartness at the horizon; pairs listed in
    /// `coincident` are taken as equal unless the horizon separates them.
    pub fn from_points(
        points: &[Point],
        coincident: &[(usize, usize)],
        horizon: usize,
    ) -> Result<Self, RealsError> {
        let prefixes = points.iter().map(|p| p.prefix(horizon)).collect::<Result<Vec<_>, _>>()?;
        let names: Vec<String> = points.iter().map(|p| p.name().to_string()).collect();
        let declared = |i, j| coincident.iter().any(|&(a, b)| (a, b) == (i, j) || (b, a) == (i, j));
        let mut err = None;
        let table = OrderTable::from_fn(names.clone(), |i, j| {
            if declared(i, j) {
                let v = coincide_refute_prefixes(&prefixes[i], &prefixes[j], horizon);
                if let Some(stage) = v.witness {
                    err = Some(RealsError::CoincidenceRefuted {
                        first: names[i].clone(),
                        second: names[j].clone(),
                        stage,
                    });
                }
                return Some(PairRelation::Coincident);
            }
            let v = apart_prefixes(&prefixes[i], &prefixes[j], horizon);
            match v.direction {
                Some(Direction::FirstBelowSecond) => Some(PairRelation::Less),
                Some(Direction::SecondBelowFirst) => Some(PairRelation::Greater),
                None => None,
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(table),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Overwrites one entry (and its mirror).
    pub fn set(&mut self, i: usize, j: usize, r: PairRelation) {
        self.relation[i][j] = r;
        self.relation[j][i] = r.flip();
    }

    fn lt(&self, i: usize, j: usize) -> bool {
        self.relation[i][j] == PairRelation::Less
    }

    fn eq(&self, i: usize, j: usize) -> bool {
        i == j || self.relation[i][j] == PairRelation::Coincident
    }

    /// `x ≺ y ⇔ x ≠ y ∧ ¬(y < x)`.
    fn prec(&self, i: usize, j: usize) -> bool {
        !self.eq(i, j) && !self.lt(j, i)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderViolation {
    pub condition: u8,
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VirtualOrderReport {
    /// Indexed by condition number minus one.
    pub passed: [bool; 5],
    pub violations: Vec<OrderViolation>,
}

impl VirtualOrderReport {
    pub fn all_passed(&self) -> bool {
        self.passed.iter().all(|&p| p)
    }
}

/// Brute-force check of the five virtual-order conditions on the table.
///
/// 1. `=`, `≺`, `≻` exclude each other.
/// 2. `r = u`, `s = v`, `r ≺ s` give `u ≺ v`.
/// 3. neither `r ≻ s` nor `r = s` gives `r ≺ s`.
/// 4. neither `r ≻ s` nor `r ≺ s` gives `r = s`.
/// 5. `r ≺ s ≺ t` gives `r ≺ t`.
pub fn virtual_order_check(table: &OrderTable) -> VirtualOrderReport {
    let n = table.len();
    let mut violations = Vec::new();
    let name = |ix: &[usize]| ix.iter().map(|&i| table.names[i].clone()).collect::<Vec<_>>();
    let mut report = |condition: u8, ix: &[usize]| {
        violations.push(OrderViolation { condition, witness: name(ix) });
    };
    for r in 0..n {
        for s in 0..n {
            let (eq, prec, succ) = (table.eq(r, s), table.prec(r, s), table.prec(s, r));
            if [eq, prec, succ].iter().filter(|&&b| b).count() > 1 {
                report(1, &[r, s]);
            }
            if !succ && !eq && !prec {
                report(3, &[r, s]);
            }
            if !succ && !prec && !eq {
                report(4, &[r, s]);
            }
            for t in 0..n {
                if prec && table.prec(s, t) && !table.prec(r, t) {
                    report(5, &[r, s, t]);
                }
            }
            if !prec {
                continue;
            }
            for u in 0..n {
                for v in 0..n {
                    if table.eq(r, u) && table.eq(s, v) && !table.prec(u, v) {
                        report(2, &[r, s, u, v]);
                    }
                }
            }
        }
    }
    let mut passed = [true; 5];
    for v in &violations {
        passed[v.condition as usize - 1] = false;
    }
    VirtualOrderReport { passed, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Interval endpoints as rationals, compared directly.
    fn oracle_lt(a: &[BigInt], b: &[BigInt]) -> Option<usize> {
        (0..a.len()).find(|&i| {
            let scale = BigRational::from_integer(BigInt::one() << (i + 1));
            let a_hi = BigRational::from_integer(&a[i] + 2) / &scale;
            let b_lo = BigRational::from_integer(b[i].clone()) / &scale;
            a_hi < b_lo
        }).map(|i| i + 1)
    }

    fn oracle_disjoint_any_pair(a: &[BigInt], b: &[BigInt]) -> bool {
        let iv = |p: &[BigInt], i: usize| lambda_interval(i as u32 + 1, &p[i]).unwrap();
        (0..a.len()).any(|i| (0..b.len()).any(|j| !iv(a, i).intersects(&iv(b, j))))
    }

    #[test]
    fn zero_below_one() {
        let v = lt_at(&zero(), &one(), 4).unwrap();
        assert!(v.holds());
        assert_eq!(v.witness, Some(3));
        assert_eq!(oracle_lt(&zero().prefix(4).unwrap(), &one().prefix(4).unwrap()), Some(3));
    }

    #[test]
    fn self_comparison_is_unknown() {
        for h in [1, 5, 40] {
            assert!(lt_at(&one(), &one(), h).unwrap().is_unknown());
            assert!(apart_at(&zero(), &zero(), h).unwrap().is_unknown());
            assert!(coincide_refute(&one(), &one(), h).unwrap().is_unknown());
        }
    }

    #[test]
    fn rational_comparisons() {
        let v = lt_rational(&zero(), &rat(1, 3), 8).unwrap();
        assert_eq!((v.value, v.witness), (VerdictValue::Holds, Some(3)));
        let centered_zero = dyadic_point(Dyadic::zero());
        for h in [1, 10, 60] {
            assert!(lt_rational(&zero(), &rat(0, 1), h).unwrap().is_unknown());
            assert!(lt_rational(&centered_zero, &rat(0, 1), h).unwrap().is_unknown());
        }
        assert!(lt_rational(&dyadic_point(Dyadic::from_int(-1)), &rat(0, 1), 8).unwrap().holds());
        assert!(gt_rational(&one(), &rat(1, 2), 8).unwrap().holds());
    }

    #[test]
    fn apartness_records_direction() {
        let v = apart_at(&zero(), &one(), 4).unwrap();
        assert_eq!(v.direction, Some(Direction::FirstBelowSecond));
        let w = apart_at(&one(), &zero(), 4).unwrap();
        assert_eq!(w.direction, Some(Direction::SecondBelowFirst));
    }

    #[test]
    fn zero_and_one_do_not_coincide() {
        let v = coincide_refute(&zero(), &one(), 3).unwrap();
        assert_eq!((v.value, v.witness), (VerdictValue::Fails, Some(3)));
        assert!(coincide_refute(&zero(), &one(), 2).unwrap().is_unknown());
    }

    #[test]
    fn center_examples() {
        assert_eq!(center(&ints(&[0, 0, 0]), 3).unwrap(), ints(&[-1, -1, 0]));
        assert_eq!(center(&ints(&[5]), 1).unwrap(), ints(&[5]));
        let p = ints(&[1, 3, 7, 14]);
        assert_eq!(center(&p, 4).unwrap()[3], p[3]);
        assert!(center(&ints(&[0, 5]), 2).is_err());
        assert!(center(&ints(&[0]), 2).is_err());
    }

    #[test]
    fn modulus_examples() {
        let z = zero();
        assert_eq!(cpf_modulus(&IdentityMap, &z, 5, 20).unwrap(), Modulus::Found(5));
        assert_eq!(cpf_modulus(&NegationMap, &z, 4, 20).unwrap(), Modulus::Found(4));
        assert_eq!(cpf_modulus(&DelayMap, &z, 3, 20).unwrap(), Modulus::Found(6));
        assert_eq!(cpf_modulus(&DelayMap, &z, 3, 5).unwrap(), Modulus::UnknownAtHorizon(5));
        let q = |f: &dyn PrefixMap, m0| continuity_modulus(f, &z, m0, 32).unwrap().q;
        assert_eq!(q(&IdentityMap, 3), Dyadic::pow2_neg(7));
        assert_eq!(q(&NegationMap, 3), Dyadic::pow2_neg(7));
        assert_eq!(q(&DelayMap, 2), Dyadic::pow2_neg(10));
    }

    #[test]
    fn soundness_sampling() {
        for f in bundled_maps() {
            for m0 in 2..=4 {
                let r = continuity_soundness(&*f, &one(), m0, 100, 7).unwrap();
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn virtual_order_examples() {
        let sample = vec![zero(), one(), dyadic_point(Dyadic::new(1, 1))];
        let table = OrderTable::from_points(&sample, &[], 12).unwrap();
        assert!(virtual_order_check(&table).all_passed());

        let copies = vec![zero(), zero().renamed("zero-copy")];
        let table = OrderTable::from_points(&copies, &[(0, 1)], 12).unwrap();
        assert!(virtual_order_check(&table).all_passed());

        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let cyclic = OrderTable::from_fn(names, |i, j| {
            Some(match (i, j) {
                (0, 1) | (1, 2) => PairRelation::Less,
                _ => PairRelation::Greater,
            })
        })
        .unwrap();
        let report = virtual_order_check(&cyclic);
        assert!(!report.passed[4]);
        assert!(report.violations.iter().any(|v| v.condition == 5 && v.witness.len() == 3));
    }

    #[test]
    fn undecided_and_refuted_pairs() {
        let sample = vec![zero(), zero().renamed("again")];
        assert!(matches!(
            OrderTable::from_points(&sample, &[], 10),
            Err(RealsError::UndecidedPair { .. })
        ));
        let sample = vec![zero(), one()];
        assert!(matches!(
            OrderTable::from_points(&sample, &[(0, 1)], 10),
            Err(RealsError::CoincidenceRefuted { stage: 3, .. })
        ));
    }

    fn arb_prefix(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<BigInt>> {
        (-300i64..300, proptest::collection::vec(0i64..3, len)).prop_map(|(first, steps)| {
            let mut v = vec![BigInt::from(first)];
            for s in steps {
                let next = v.last().unwrap() * 2 + s;
                v.push(next);
            }
            v
        })
    }

    proptest! {
        #[test]
        fn center_preserves_point(p in arb_prefix(1..40), cut in 0usize..40) {
            let n = cut % p.len() + 1;
            let c = center(&p, n).unwrap();
            prop_assert!(admissible_prefix(&*rng_spread(), &c).is_none());
            prop_assert_eq!(&c[n - 1..], &p[n - 1..]);
            let at_n = lambda_interval(n as u32, &p[n - 1]).unwrap();
            for (k, a) in c.iter().enumerate().take(n) {
                prop_assert!(lambda_interval(k as u32 + 1, a).unwrap().contains(&at_n));
            }
            for h in 1..=p.len() {
                prop_assert!(!coincide_refute_prefixes(&p, &c, h).fails());
            }
        }

        #[test]
        fn verdicts_are_monotone(a in arb_prefix(30..31), b in arb_prefix(30..31), h in 1usize..31) {
            let short = lt_prefixes(&a, &b, h);
            for h2 in h..=31 {
                let long = lt_prefixes(&a, &b, h2);
                if short.holds() {
                    prop_assert_eq!(long.witness, short.witness);
                }
            }
            prop_assert_eq!(lt_prefixes(&a, &b, 31).witness, oracle_lt(&a, &b));
        }

        #[test]
        fn apartness_is_symmetric(a in arb_prefix(20..21), b in arb_prefix(20..21), h in 1usize..21) {
            let ab = apart_prefixes(&a, &b, h);
            let ba = apart_prefixes(&b, &a, h);
            prop_assert_eq!(ab.value, ba.value);
            prop_assert_eq!(ab.witness, ba.witness);
            prop_assert_eq!(ab.direction.map(Direction::flip), ba.direction);
        }

        #[test]
        fn diagonal_refutation_matches_all_pairs(a in arb_prefix(0..12), b in arb_prefix(0..12)) {
            let len = a.len().min(b.len());
            let v = coincide_refute_prefixes(&a, &b, len);
            prop_assert_eq!(v.fails(), oracle_disjoint_any_pair(&a[..len], &b[..len]));
        }

        #[test]
        fn prefix_maps_are_monotone(p in arb_prefix(0..30), cut in 0usize..30) {
            let short = &p[..cut.min(p.len())];
            for f in bundled_maps() {
                let out_short = f.apply(short);
                let out_long = f.apply(&p);
                prop_assert_eq!(&out_long[..out_short.len()], &out_short[..]);
                prop_assert!(admissible_prefix(&*rng_spread(), &out_long).is_none());
                prop_assert!(f.apply(&p[..f.totality(out_short.len()).min(p.len())]).len() >= out_short.len());
            }
        }
    }
}
