//! Decidable properties of natural numbers whose least witness nobody knows,
//! and the lawlike points built by switching on that witness.

pub mod pi;

use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::reals::Point;
use crate::spreads::{ConvergentFamily, Generator, RealValue, RuleFault};

/// Default cap on computed digits; `BW_DIGIT_LIMIT` overrides it.
pub const DEFAULT_DIGIT_LIMIT: usize = 2_000_000;
const SELF_TEST_DIGITS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FleeingError {
    #[error("{requested} digits requested, the oracle is capped at {limit} (set BW_DIGIT_LIMIT to raise it)")]
    ResourceBound { requested: usize, limit: usize },
    #[error("digit self-test failed: {0}")]
    SelfTest(String),
    #[error("pattern {0:?} must be a non-empty string of decimal digits")]
    BadPattern(String),
    #[error("positions are 1-based")]
    ZeroPosition,
}

/// Decimals of π after the point, computed on demand and cached.
///
/// Readers share the cached prefix; a longer request takes the write lock,
/// recomputes, and checks the new digits extend the old ones.
#[derive(Debug)]
pub struct DigitOracle {
    limit: usize,
    cache: RwLock<Arc<String>>,
}

impl DigitOracle {
    /// Runs the three-way self-test before accepting any request.
    pub fn new(limit: usize) -> Result<Self, FleeingError> {
        let bulk = pi::chudnovsky(SELF_TEST_DIGITS);
        let arctan = pi::machin(SELF_TEST_DIGITS);
        let spigot = pi::spigot(SELF_TEST_DIGITS);
        if bulk != arctan || bulk != spigot {
            let at = bulk
                .bytes()
                .zip(arctan.bytes().zip(spigot.bytes()))
                .position(|(a, (b, c))| a != b || a != c)
                .map_or(0, |i| i + 1);
            return Err(FleeingError::SelfTest(format!("methods disagree at position {at}")));
        }
        Ok(DigitOracle { limit, cache: RwLock::new(Arc::new(bulk)) })
    }

    /// Shared oracle, limit from `BW_DIGIT_LIMIT` when set.
    pub fn global() -> Arc<DigitOracle> {
        static GLOBAL: OnceLock<Arc<DigitOracle>> = OnceLock::new();
        GLOBAL
            .get_or_init(|| {
                let limit = std::env::var("BW_DIGIT_LIMIT")
                    .ok()
                    .and_then(|v| v.trim().parse().ok())
                    .unwrap_or(DEFAULT_DIGIT_LIMIT);
                Arc::new(DigitOracle::new(limit).expect("π digit self-test"))
            })
            .clone()
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// A cached prefix of length at least `n`.
    pub fn prefix(&self, n: usize) -> Result<Arc<String>, FleeingError> {
        if n > self.limit {
            return Err(FleeingError::ResourceBound { requested: n, limit: self.limit });
        }
        {
            let cached = self.cache.read().expect("digit cache poisoned");
            if cached.len() >= n {
                return Ok(Arc::clone(&cached));
            }
        }
        let mut cached = self.cache.write().expect("digit cache poisoned");
        if cached.len() < n {
            let target = n.max(2 * cached.len()).min(self.limit);
            let fresh = pi::chudnovsky(target);
            if !fresh.starts_with(cached.as_str()) {
                return Err(FleeingError::SelfTest(format!(
                    "recomputation to {target} digits changed the cached prefix"
                )));
            }
            *cached = Arc::new(fresh);
        }
        Ok(Arc::clone(&cached))
    }

    pub fn digits(&self, n: usize) -> Result<String, FleeingError> {
        Ok(self.prefix(n)?[..n].to_string())
    }

    /// The digit at 1-based position `i`.
    pub fn digit(&self, i: usize) -> Result<u8, FleeingError> {
        if i == 0 {
            return Err(FleeingError::ZeroPosition);
        }
        Ok(self.prefix(i)?.as_bytes()[i - 1] - b'0')
    }
}

/// The first `n` decimals of π.
pub fn pi_digits(n: usize) -> Result<String, FleeingError> {
    DigitOracle::global().digits(n)
}

type HoldsFn = dyn Fn(u64) -> Result<bool, FleeingError> + Send + Sync;
type PrepareFn = dyn Fn(u64) -> Result<(), FleeingError> + Send + Sync;

/// A total decidable predicate on positive integers.
#[derive(Clone)]
pub struct DecidableProperty {
    name: String,
    holds: Arc<HoldsFn>,
    prepare: Option<Arc<PrepareFn>>,
}

impl fmt::Debug for DecidableProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DecidableProperty({})", self.name)
    }
}

impl DecidableProperty {
    pub fn new(
        name: impl Into<String>,
        holds: impl Fn(u64) -> Result<bool, FleeingError> + Send + Sync + 'static,
    ) -> Self {
        DecidableProperty { name: name.into(), holds: Arc::new(holds), prepare: None }
    }

    /// A property that can be evaluated without failing.
    pub fn pure(name: impl Into<String>, holds: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        DecidableProperty::new(name, move |n| Ok(holds(n)))
    }

    /// Holds exactly from `k` on.
    pub fn from_threshold(k: u64) -> Self {
        DecidableProperty::pure(format!("n>={k}"), move |n| n >= k)
    }

    /// Holds nowhere.
    pub fn never() -> Self {
        DecidableProperty::pure("never", |_| false)
    }

    /// Called once with the search horizon before a scan, e.g. to fetch digits in bulk.
    pub fn with_prepare(
        mut self,
        prepare: impl Fn(u64) -> Result<(), FleeingError> + Send + Sync + 'static,
    ) -> Self {
        self.prepare = Some(Arc::new(prepare));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn holds(&self, n: u64) -> Result<bool, FleeingError> {
        if n == 0 {
            return Err(FleeingError::ZeroPosition);
        }
        (self.holds)(n)
    }

    /// Least `k ≤ bound` with `holds(k)`.
    pub fn least_witness(&self, bound: u64) -> Result<Option<u64>, FleeingError> {
        if let Some(prepare) = &self.prepare {
            prepare(bound)?;
        }
        for k in 1..=bound {
            if self.holds(k)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

/// Holds at `n` when the π decimals at positions `n .. n+len−1` spell `pattern`.
pub fn pattern_property(pattern: &str) -> Result<DecidableProperty, FleeingError> {
    if pattern.is_empty() || !pattern.bytes().all(|b| b.is_ascii_digit()) {
        return Err(FleeingError::BadPattern(pattern.to_string()));
    }
    let oracle = DigitOracle::global();
    let want = pattern.as_bytes().to_vec();
    let len = want.len();
    let ahead = Arc::clone(&oracle);
    Ok(DecidableProperty::new(format!("pattern({pattern})"), move |n| {
        let start = n as usize - 1;
        let digits = oracle.prefix(start + len)?;
        Ok(digits.as_bytes()[start..start + len] == want[..])
    })
    .with_prepare(move |bound| ahead.prefix(bound as usize + len - 1).map(|_| ())))
}

/// Holds at `n` when `run_length` consecutive decimals starting at `n` all equal `digit`.
pub fn run_property(digit: u8, run_length: usize) -> Result<DecidableProperty, FleeingError> {
    if digit > 9 || run_length == 0 {
        return Err(FleeingError::BadPattern(format!("{digit} x {run_length}")));
    }
    let pattern = char::from(b'0' + digit).to_string().repeat(run_length);
    let mut p = pattern_property(&pattern)?;
    p.name = format!("run({digit},{run_length})");
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "at", rename_all = "snake_case")]
pub enum SearchResult {
    FoundAt(u64),
    NoWitnessBelow(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalSearch {
    pub property: String,
    pub horizon: u64,
    pub result: SearchResult,
}

impl fmt::Display for CriticalSearch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.result {
            SearchResult::FoundAt(k) => write!(f, "{k}"),
            SearchResult::NoWitnessBelow(h) => write!(f, "none-below:{h}"),
        }
    }
}

/// The least witness up to the horizon.
pub fn critical_number(p: &DecidableProperty, horizon: u64) -> Result<CriticalSearch, FleeingError> {
    let result = match p.least_witness(horizon)? {
        Some(k) => SearchResult::FoundAt(k),
        None => SearchResult::NoWitnessBelow(horizon),
    };
    Ok(CriticalSearch { property: p.name.clone(), horizon, result })
}

/// Centers `before(n)` until the least witness `k` of `p` is visible at
/// stage `n`, then `after(k, n)`.
fn switch_on_witness(
    name: String,
    p: DecidableProperty,
    before: impl Fn(u32) -> RealValue + Send + Sync + 'static,
    after: impl Fn(u32, u32) -> RealValue + Send + Sync + 'static,
) -> Point {
    let g = Generator::steered(name, move |n| {
        let witness = p.least_witness(n as u64).map_err(RuleFault::from)?;
        Ok(match witness {
            Some(k) => after(k as u32, n),
            None => before(n),
        })
    });
    Point::new(g).expect("steering emits on the RNG spread")
}

/// Centers 0 until the least witness `K` shows up, then `(−2)^{−K}` forever.
///
/// Apart from 0 exactly when `p` has a witness; its sign is the parity of `K`.
pub fn berlin_r(p: &DecidableProperty) -> Point {
    switch_on_witness(
        format!("berlin-r[{}]", p.name()),
        p.clone(),
        |_| RealValue::exact(Dyadic::zero()),
        |k, _| {
            let magnitude = Dyadic::pow2_neg(k);
            RealValue::exact(if k % 2 == 0 { magnitude } else { -magnitude })
        },
    )
}

/// Follows the limit `ξ_0` of the family until the least witness `k` of `p`
/// is visible, then follows `ξ_k`.
pub fn veldman_f2(family: &ConvergentFamily, p: &DecidableProperty) -> Point {
    let limit = family.limit().clone();
    let fam = family.clone();
    switch_on_witness(
        format!("veldman-f2[{},{}]", family.name(), p.name()),
        p.clone(),
        move |_| limit.clone(),
        move |k, _| fam.member(k),
    )
}

/// `c_i = a_i` before the least witness `k`, `c_j = a_k` from `k` on.
pub fn cambridge_c(family: &ConvergentFamily, p: &DecidableProperty) -> Point {
    let before = family.clone();
    let after = family.clone();
    switch_on_witness(
        format!("cambridge-c[{},{}]", family.name(), p.name()),
        p.clone(),
        move |n| before.member(n),
        move |k, _| after.member(k),
    )
}

/// `ξ_v = 2^{−v}` with limit 0.
pub fn halving_family() -> ConvergentFamily {
    ConvergentFamily::dyadic("halving", Dyadic::zero(), Dyadic::pow2_neg)
}

/// `ξ_v = ξ_0 = 0` for every `v`.
pub fn constant_family() -> ConvergentFamily {
    ConvergentFamily::dyadic("constant", Dyadic::zero(), |_| Dyadic::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::dyadic::lambda_interval;
    use crate::spreads::{admissible_prefix, rng_spread};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn midpoints(p: &Point, n: usize) -> Vec<Dyadic> {
        p.prefix(n)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, a)| lambda_interval(i as u32 + 1, a).unwrap().midpoint())
            .collect()
    }

    #[test]
    fn digits_examples() {
        assert_eq!(pi_digits(5).unwrap(), "14159");
        assert_eq!(pi_digits(1).unwrap(), "1");
        assert!(pi_digits(10).unwrap().starts_with(&pi_digits(5).unwrap()));
    }

    #[test]
    fn resource_bound_is_reported() {
        let small = DigitOracle::new(1200).unwrap();
        assert!(small.digits(1200).is_ok());
        assert_eq!(
            small.digits(1201),
            Err(FleeingError::ResourceBound { requested: 1201, limit: 1200 })
        );
    }

    #[test]
    fn growth_keeps_prefix() {
        let o = DigitOracle::new(10_000).unwrap();
        let short = o.digits(1000).unwrap();
        let long = o.digits(5000).unwrap();
        assert!(long.starts_with(&short));
        assert_eq!(long, pi::machin(5000));
    }

    #[test]
    fn single_digit_run() {
        // scan of 1415926535...: the first 3 sits at position 9
        let digits = pi_digits(20).unwrap();
        let scanned = digits.find('3').unwrap() as u64 + 1;
        let search = critical_number(&run_property(3, 1).unwrap(), 100).unwrap();
        assert_eq!(search.result, SearchResult::FoundAt(scanned));
        assert_eq!(scanned, 9);
    }

    #[test]
    fn six_nines_within_a_thousand() {
        let digits = pi_digits(1000).unwrap();
        let scanned = digits.find("999999").map(|i| i as u64 + 1).unwrap();
        let search = critical_number(&run_property(9, 6).unwrap(), 1000).unwrap();
        assert_eq!(search.result, SearchResult::FoundAt(scanned));
        let p = run_property(9, 6).unwrap();
        for j in 1..scanned {
            assert!(!p.holds(j).unwrap());
        }
    }

    #[test]
    fn threshold_property() {
        let s = critical_number(&DecidableProperty::from_threshold(5), 100).unwrap();
        assert_eq!(s.result, SearchResult::FoundAt(5));
        let s = critical_number(&DecidableProperty::from_threshold(5), 4).unwrap();
        assert_eq!(s.result, SearchResult::NoWitnessBelow(4));
        assert_eq!(s.to_string(), "none-below:4");
    }

    #[test]
    fn bad_patterns() {
        assert!(pattern_property("").is_err());
        assert!(pattern_property("12a").is_err());
        assert!(run_property(10, 2).is_err());
    }

    #[test]
    fn berlin_r_examples() {
        let none = berlin_r(&DecidableProperty::never());
        assert!(midpoints(&none, 12).iter().all(|m| m.is_zero()));

        let odd = berlin_r(&DecidableProperty::from_threshold(3));
        let m = midpoints(&odd, 10);
        assert!(m[..2].iter().all(|x| x.is_zero()));
        assert!(m[2..].iter().all(|x| *x == Dyadic::new(-1, 3)));
        // hand-run: centered 0 is term −1; the child with midpoint −1/8 at stage 3 is −2
        assert_eq!(odd.prefix(5).unwrap(), [-1, -1, -2, -3, -5].map(BigInt::from));

        let even = berlin_r(&DecidableProperty::from_threshold(2));
        let m = midpoints(&even, 10);
        assert!(m[0].is_zero());
        assert!(m[1..].iter().all(|x| *x == Dyadic::new(1, 2)));
    }

    #[test]
    fn veldman_examples() {
        let f1 = Point::centered("xi0", halving_family().limit().clone());
        let quiet = veldman_f2(&halving_family(), &DecidableProperty::never());
        assert_eq!(quiet.prefix(20).unwrap(), f1.prefix(20).unwrap());

        let toy = veldman_f2(&halving_family(), &DecidableProperty::from_threshold(4));
        assert_eq!(toy.prefix(7).unwrap(), [-1, -1, -1, 0, 1, 3, 7].map(BigInt::from));
        assert!(midpoints(&toy, 12)[3..].iter().all(|x| *x == Dyadic::pow2_neg(4)));

        let flat = veldman_f2(&constant_family(), &DecidableProperty::from_threshold(2));
        assert_eq!(flat.prefix(15).unwrap(), f1.prefix(15).unwrap());
    }

    #[test]
    fn cambridge_examples() {
        let follow = cambridge_c(&halving_family(), &DecidableProperty::never());
        // midpoint 2^-n at every stage n: all terms 0
        assert!(follow.prefix(12).unwrap().iter().all(|a| a.is_zero()));

        let frozen = cambridge_c(&halving_family(), &DecidableProperty::from_threshold(3));
        let m = midpoints(&frozen, 10);
        assert_eq!(m[0], Dyadic::pow2_neg(1));
        assert_eq!(m[1], Dyadic::pow2_neg(2));
        assert!(m[2..].iter().all(|x| *x == Dyadic::pow2_neg(3)));

        let flat = cambridge_c(&constant_family(), &DecidableProperty::from_threshold(3));
        assert!(midpoints(&flat, 10).iter().all(|x| x.is_zero()));
    }

    proptest! {
        #[test]
        fn switching_is_admissible_and_prefix_stable(k in 1u64..40, n in 1usize..50, extra in 0usize..10) {
            let p = DecidableProperty::pure("toy", move |x| x >= k && x % 3 == k % 3);
            for point in [
                berlin_r(&p),
                veldman_f2(&halving_family(), &p),
                cambridge_c(&halving_family(), &p),
            ] {
                let short = point.prefix(n).unwrap();
                let long = point.prefix(n + extra).unwrap();
                prop_assert!(admissible_prefix(&*rng_spread(), &long).is_none());
                prop_assert_eq!(&long[..n], &short[..]);
            }
        }
    }
}
