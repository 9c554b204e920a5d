//! Exact dyadic rationals and the λ-intervals they bound.
//!
//! Every real-number computation in the crate bottoms out here. There is no
//! floating point anywhere: a [`Dyadic`] is `numerator / 2^exponent` with an
//! arbitrary-precision numerator, kept in canonical form so that structural
//! equality is numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DyadicError {
    #[error("generation indices are 1-based; got n = 0")]
    ZeroIndex,
    #[error("malformed dyadic {0:?}: expected \"m/2^k\"")]
    MalformedDyadic(String),
    #[error("malformed interval {0:?}: expected \"[lo,hi]\"")]
    MalformedInterval(String),
    #[error("interval endpoints out of order: {lo} > {hi}")]
    Inverted { lo: Dyadic, hi: Dyadic },
}

/// `numerator / 2^exponent`, canonical: the numerator is odd or the exponent is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        let mut numerator = numerator.into();
        let mut exponent = exponent;
        if numerator.is_zero() {
            return Dyadic { numerator, exponent: 0 };
        }
        while exponent > 0 && numerator.is_even() {
            numerator >>= 1;
            exponent -= 1;
        }
        Dyadic { numerator, exponent }
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn from_int(value: impl Into<BigInt>) -> Self {
        Dyadic::new(value, 0)
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic::new(1, k)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn abs(&self) -> Self {
        Dyadic { numerator: self.numerator.abs(), exponent: self.exponent }
    }

    /// Multiply by `2^-k`.
    pub fn shr(&self, k: u32) -> Self {
        Dyadic::new(self.numerator.clone(), self.exponent + k)
    }

    /// Numerator over the common denominator `2^exponent` (not canonical).
    pub fn scaled_to(&self, exponent: u32) -> BigInt {
        assert!(exponent >= self.exponent, "cannot scale {self} down to 2^{exponent}");
        &self.numerator << (exponent - self.exponent)
    }

    /// `floor(self * 2^k)`.
    pub fn floor_scaled(&self, k: u32) -> BigInt {
        if k >= self.exponent {
            &self.numerator << (k - self.exponent)
        } else {
            self.numerator.div_floor(&(BigInt::one() << (self.exponent - k)))
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::one() << self.exponent)
    }

    /// Exact comparison against `p/q` (`q` may be negative, must be non-zero).
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        self.to_rational().cmp(q)
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let e = self.exponent.max(other.exponent);
        (self.scaled_to(e), other.scaled_to(e), e)
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        (self + other).shr(1)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.numerator * &rhs.numerator, self.exponent + rhs.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { numerator: -&self.numerator, exponent: self.exponent }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = DyadicError;

    /// Parses `m/2^k`; non-canonical input is normalized.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DyadicError::MalformedDyadic(s.to_string());
        let (num, den) = s.split_once("/2^").ok_or_else(bad)?;
        if den.is_empty() || !den.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let numerator: BigInt = num.parse().map_err(|_| bad())?;
        let exponent: u32 = den.parse().map_err(|_| bad())?;
        Ok(Dyadic::new(numerator, exponent))
    }
}

impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

/// Position of one closed interval relative to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Relation {
    Disjoint,
    Overlap,
    /// The first interval contains the second (equal intervals land here).
    Contains,
    ContainedIn,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self, DyadicError> {
        if lo > hi {
            return Err(DyadicError::Inverted { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn length(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.midpoint(&self.hi)
    }

    pub fn contains_point(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals: touching endpoints intersect.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn relate(&self, other: &Interval) -> Relation {
        interval_relate(self, other)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Interval {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DyadicError::MalformedInterval(s.to_string());
        let inner = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
        Interval::new(lo.parse()?, hi.parse()?)
    }
}

impl serde::Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `[a/2^n, (a+2)/2^n]`, the interval attached to the n-th term `a` of an RNG element.
pub fn lambda_interval(n: u32, a: &BigInt) -> Result<Interval, DyadicError> {
    if n == 0 {
        return Err(DyadicError::ZeroIndex);
    }
    Ok(Interval {
        lo: Dyadic::new(a.clone(), n),
        hi: Dyadic::new(a + 2, n),
    })
}

/// `z` may follow `a` in an RNG element iff `z ∈ {2a, 2a+1, 2a+2}`.
pub fn admissible_successor(a: &BigInt, z: &BigInt) -> bool {
    let base: BigInt = a * 2;
    z >= &base && z <= &(base + 2)
}

pub fn interval_relate(p: &Interval, q: &Interval) -> Relation {
    if !p.intersects(q) {
        Relation::Disjoint
    } else if p.contains(q) {
        Relation::Contains
    } else if q.contains(p) {
        Relation::ContainedIn
    } else {
        Relation::Overlap
    }
}
