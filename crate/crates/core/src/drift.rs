//! Drifts and checking numbers.
//!
//! A drift is a kernel `c` with counting numbers `c_v → c` lying apart from
//! it. A checking number sits at the kernel until the trace resolves the
//! tracked assertion and then jumps to a counting number; which one depends
//! on the [`CheckingKind`].

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::reals::{apart_prefixes, lt_prefixes, Point, RealsError};
use crate::spreads::{ConvergentFamily, EventTrace, Generator, Observation, RealValue, Resolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DriftError {
    #[error("{kind} checking numbers need a two-winged drift, `{drift}` is {wing}")]
    WingMismatch { kind: CheckingKind, drift: String, wing: WingKind },
    #[error("resolution stages are 1-based, got 0")]
    ZeroStage,
    #[error("drift `{drift}`: {what} not verified at horizon {horizon}")]
    IllFormed { drift: String, what: String, horizon: usize },
    #[error("unknown drift `{0}` (expected rational-right, two-winged-mixed or berlin)")]
    UnknownDrift(String),
    #[error(transparent)]
    Reals(#[from] RealsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationality {
    Rational,
    Irrational,
}

#[derive(Debug, Clone)]
pub struct CountingNumber {
    pub value: RealValue,
    pub rationality: Rationality,
}

pub type CountingFamily = Arc<dyn Fn(u32) -> CountingNumber + Send + Sync>;

#[derive(Clone)]
pub enum Wing {
    Left(CountingFamily),
    Right(CountingFamily),
    Two { left: CountingFamily, right: CountingFamily },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WingKind {
    Left,
    Right,
    Two,
}

impl fmt::Display for WingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WingKind::Left => "left-winged",
            WingKind::Right => "right-winged",
            WingKind::Two => "two-winged",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckingKind {
    Direct,
    Oscillatory,
    Conditional,
}

impl fmt::Display for CheckingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckingKind::Direct => "direct",
            CheckingKind::Oscillatory => "oscillatory",
            CheckingKind::Conditional => "conditional",
        })
    }
}

impl std::str::FromStr for CheckingKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" => Ok(CheckingKind::Direct),
            "osc" | "oscillatory" => Ok(CheckingKind::Oscillatory),
            "cond" | "conditional" => Ok(CheckingKind::Conditional),
            other => Err(format!("unknown checking kind `{other}` (direct, osc, cond)")),
        }
    }
}

/// A symbolic term of a checking sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermRef {
    Kernel,
    /// `c_v`; on a two-winged drift `r_v` for odd `v` and `l_v` for even `v`.
    Counting(u32),
    Left(u32),
    Right(u32),
}

impl fmt::Display for TermRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermRef::Kernel => write!(f, "kernel"),
            TermRef::Counting(v) => write!(f, "c_{v}"),
            TermRef::Left(v) => write!(f, "l_{v}"),
            TermRef::Right(v) => write!(f, "r_{v}"),
        }
    }
}

impl Serialize for TermRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// How far construction-time validation looks.
#[derive(Debug, Clone, Copy)]
pub struct DriftCheck {
    pub upto: u32,
    pub horizon: usize,
}

impl Default for DriftCheck {
    fn default() -> Self {
        DriftCheck { upto: 8, horizon: 48 }
    }
}

#[derive(Clone)]
pub struct Drift {
    name: String,
    kernel: RealValue,
    kernel_rationality: Rationality,
    wing: Wing,
    /// For `ε = 2^{-k}`, the index from which `|c_v − c| < ε`.
    modulus: Arc<dyn Fn(u32) -> u32 + Send + Sync>,
}

impl fmt::Debug for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Drift({}, {})", self.name, self.wing_kind())
    }
}

impl Drift {
    /// Builds and validates: wing directions, pairwise apartness and the
    /// convergence modulus are checked up to `check.upto`.
    pub fn new(
        name: impl Into<String>,
        kernel: RealValue,
        kernel_rationality: Rationality,
        wing: Wing,
        modulus: impl Fn(u32) -> u32 + Send + Sync + 'static,
        check: DriftCheck,
    ) -> Result<Self, DriftError> {
        let drift = Drift { name: name.into(), kernel, kernel_rationality, wing, modulus: Arc::new(modulus) };
        drift.validate(check)?;
        Ok(drift)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kernel(&self) -> &RealValue {
        &self.kernel
    }

    pub fn kernel_rationality(&self) -> Rationality {
        self.kernel_rationality
    }

    pub fn wing_kind(&self) -> WingKind {
        match self.wing {
            Wing::Left(_) => WingKind::Left,
            Wing::Right(_) => WingKind::Right,
            Wing::Two { .. } => WingKind::Two,
        }
    }

    pub fn modulus(&self, k: u32) -> u32 {
        (self.modulus)(k)
    }

    /// The counting number `c_v`.
    pub fn counting(&self, v: u32) -> CountingNumber {
        match &self.wing {
            Wing::Left(f) | Wing::Right(f) => f(v),
            Wing::Two { left, right } => {
                if v % 2 == 1 {
                    right(v)
                } else {
                    left(v)
                }
            }
        }
    }

    /// Resolves a term reference; `Left`/`Right` need the matching wing.
    pub fn resolve(&self, term: TermRef) -> Option<(RealValue, Rationality)> {
        let pick = |c: CountingNumber| Some((c.value, c.rationality));
        match (term, &self.wing) {
            (TermRef::Kernel, _) => Some((self.kernel.clone(), self.kernel_rationality)),
            (TermRef::Counting(v), _) => pick(self.counting(v)),
            (TermRef::Left(v), Wing::Left(f)) | (TermRef::Left(v), Wing::Two { left: f, .. }) => pick(f(v)),
            (TermRef::Right(v), Wing::Right(f)) | (TermRef::Right(v), Wing::Two { right: f, .. }) => {
                pick(f(v))
            }
            _ => None,
        }
    }

    /// Counting numbers with the side of the kernel they must lie on
    /// (`true` for above).
    fn members(&self, upto: u32) -> Vec<(TermRef, RealValue, bool)> {
        (1..=upto).flat_map(|v| self.members_at(v)).collect()
    }

    fn members_at(&self, v: u32) -> Vec<(TermRef, RealValue, bool)> {
        match &self.wing {
            Wing::Left(f) => vec![(TermRef::Counting(v), f(v).value, false)],
            Wing::Right(f) => vec![(TermRef::Counting(v), f(v).value, true)],
            Wing::Two { left, right } => vec![
                (TermRef::Left(v), left(v).value, false),
                (TermRef::Right(v), right(v).value, true),
            ],
        }
    }

    fn validate(&self, check: DriftCheck) -> Result<(), DriftError> {
        let h = check.horizon;
        let ill = |what: String| DriftError::IllFormed { drift: self.name.clone(), what, horizon: h };
        let kernel = Point::centered("kernel", self.kernel.clone()).prefix(h)?;
        let members = self.members(check.upto);
        let prefixes = members
            .iter()
            .map(|(t, v, _)| Point::centered(t.to_string(), v.clone()).prefix(h))
            .collect::<Result<Vec<_>, _>>()?;
        for ((term, _, above), p) in members.iter().zip(&prefixes) {
            let side = if *above { lt_prefixes(&kernel, p, h) } else { lt_prefixes(p, &kernel, h) };
            if !side.holds() {
                let rel = if *above { ">" } else { "<" };
                return Err(ill(format!("{term} {rel} kernel")));
            }
        }
        for i in 0..prefixes.len() {
            for j in i + 1..prefixes.len() {
                if !apart_prefixes(&prefixes[i], &prefixes[j], h).holds() {
                    return Err(ill(format!("{} # {}", members[i].0, members[j].0)));
                }
            }
        }
        for k in 1..=check.upto {
            let start = self.modulus(k);
            let bound = Dyadic::pow2_neg(k);
            let precision = k + 4;
            let c = self.kernel.approx(precision);
            for v in start..start + check.upto {
                for (term, value, _) in self.members_at(v) {
                    let slack = Dyadic::pow2_neg(precision - 1);
                    if &(&value.approx(precision) - &c).abs() + &slack >= bound {
                        return Err(ill(format!("|{term} - kernel| < 2^-{k}")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn sqrt2_minus_one(scale: u32) -> BigInt {
    let s = BigInt::one() << scale;
    (&s * &s * 2u32).sqrt() - s
}

/// `(√2 − 1) · 2^{−shift}`, approximated from below.
fn scaled_sqrt2_minus_one(shift: u32) -> RealValue {
    RealValue::from_approx(format!("(sqrt2-1)/2^{shift}"), move |p| {
        Dyadic::new(sqrt2_minus_one(p + shift), p + 2 * shift)
    })
}

/// Kernel `√2 − 1` (irrational) approached from above by rationals
/// `c_v = (⌈c·2^{v+2}⌉ + 1) / 2^{v+2}`.
pub fn rational_right() -> Drift {
    let right: CountingFamily = Arc::new(|v| {
        let e = v + 2;
        // c is irrational, so the ceiling is floor + 1
        let numerator = sqrt2_minus_one(e) + 2;
        CountingNumber { value: RealValue::exact(Dyadic::new(numerator, e)), rationality: Rationality::Rational }
    });
    Drift::new(
        "rational-right",
        scaled_sqrt2_minus_one(0).renamed("sqrt2-1"),
        Rationality::Irrational,
        Wing::Right(right),
        |k| k,
        DriftCheck::default(),
    )
    .expect("bundled drift is well formed")
}

/// Kernel 0; rational right wing `r_v = 2^{−(v+1)}`, irrational left wing
/// `l_v = −(√2 − 1)·2^{−v}`.
pub fn two_winged_mixed() -> Drift {
    let right: CountingFamily = Arc::new(|v| CountingNumber {
        value: RealValue::exact(Dyadic::pow2_neg(v + 1)),
        rationality: Rationality::Rational,
    });
    let left: CountingFamily = Arc::new(|v| {
        let magnitude = scaled_sqrt2_minus_one(v);
        let name = format!("-{}", magnitude.name());
        CountingNumber {
            value: RealValue::from_approx(name, move |p| -magnitude.approx(p)),
            rationality: Rationality::Irrational,
        }
    });
    Drift::new(
        "two-winged-mixed",
        RealValue::exact(Dyadic::zero()),
        Rationality::Rational,
        Wing::Two { left, right },
        |k| k,
        DriftCheck::default(),
    )
    .expect("bundled drift is well formed")
}

/// Kernel 0 with `r_v = 2^{−v}` and `l_v = −2^{−v}`.
pub fn berlin() -> Drift {
    let side = |sign: i32| -> CountingFamily {
        Arc::new(move |v| {
            let m = Dyadic::pow2_neg(v);
            CountingNumber {
                value: RealValue::exact(if sign > 0 { m } else { -m }),
                rationality: Rationality::Rational,
            }
        })
    };
    Drift::new(
        "berlin",
        RealValue::exact(Dyadic::zero()),
        Rationality::Rational,
        Wing::Two { left: side(-1), right: side(1) },
        |k| k + 1,
        DriftCheck::default(),
    )
    .expect("bundled drift is well formed")
}

pub fn bundled_drift(name: &str) -> Result<Drift, DriftError> {
    match name {
        "rational-right" => Ok(rational_right()),
        "two-winged-mixed" => Ok(two_winged_mixed()),
        "berlin" => Ok(berlin()),
        other => Err(DriftError::UnknownDrift(other.to_string())),
    }
}

fn check_kind(drift: &Drift, kind: CheckingKind, trace: &EventTrace) -> Result<(), DriftError> {
    if trace.resolution.stage() == Some(0) {
        return Err(DriftError::ZeroStage);
    }
    if kind == CheckingKind::Oscillatory && drift.wing_kind() != WingKind::Two {
        return Err(DriftError::WingMismatch {
            kind,
            drift: drift.name.clone(),
            wing: drift.wing_kind(),
        });
    }
    Ok(())
}

/// The term chosen once `obs` is known.
fn term_for(kind: CheckingKind, obs: Observation) -> TermRef {
    match (kind, obs) {
        (_, Observation::Pending) => TermRef::Kernel,
        (CheckingKind::Direct, Observation::Proved { at } | Observation::Refuted { at }) => TermRef::Counting(at),
        (CheckingKind::Oscillatory, Observation::Proved { at }) => TermRef::Right(at),
        (CheckingKind::Oscillatory, Observation::Refuted { at }) => TermRef::Left(at),
        (CheckingKind::Conditional, Observation::Proved { at }) => TermRef::Counting(at),
        (CheckingKind::Conditional, Observation::Refuted { .. }) => TermRef::Kernel,
    }
}

fn final_observation(trace: &EventTrace) -> Observation {
    match trace.resolution {
        Resolution::Never => Observation::Pending,
        Resolution::Proved(k) => Observation::Proved { at: k },
        Resolution::Refuted(k) => Observation::Refuted { at: k },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckingRun {
    pub drift: String,
    pub kind: CheckingKind,
    pub trace: String,
    pub terms: Vec<TermRef>,
    pub limit: TermRef,
}

/// The first `n` terms of the checking sequence, plus the term it settles on.
pub fn checking_sequence(
    drift: &Drift,
    kind: CheckingKind,
    trace: &EventTrace,
    n: usize,
) -> Result<CheckingRun, DriftError> {
    check_kind(drift, kind, trace)?;
    let terms = (1..=n).map(|stage| term_for(kind, trace.observe(stage))).collect();
    Ok(CheckingRun {
        drift: drift.name.clone(),
        kind,
        trace: trace.to_string(),
        terms,
        limit: term_for(kind, final_observation(trace)),
    })
}

/// The checking number as a point: stage `n` contributes its λⁿ-interval
/// centered on the value of the `n`-th term.
pub fn checking_point(drift: &Drift, kind: CheckingKind, trace: &EventTrace) -> Result<Point, DriftError> {
    check_kind(drift, kind, trace)?;
    let d = drift.clone();
    let g = Generator::steered_process(format!("{kind}[{}]", drift.name), move |_, obs| {
        let (value, _) = d.resolve(term_for(kind, obs)).expect("kind was checked against the wing");
        Ok(value)
    });
    Ok(Point::with_trace(g, trace.clone())?)
}

/// Oscillatory checking number of the `berlin` drift: centered on 0 until
/// the resolution at stage `m`, then on `2^{−m}` (proved) or `−2^{−m}` (refuted).
pub fn berlin_s(trace: &EventTrace) -> Point {
    checking_point(&berlin(), CheckingKind::Oscillatory, trace)
        .expect("berlin is two-winged")
        .renamed(format!("berlin-s[{trace}]"))
}

/// `a_v = 1/2 − 2^{−(v+4)}`, increasing towards `1/2`.
pub fn vienna_family() -> ConvergentFamily {
    ConvergentFamily::dyadic("vienna", Dyadic::new(1, 1), |v| -Dyadic::pow2_neg(v + 4))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViennaLimit {
    /// The family's limit, reached only when nothing is ever resolved.
    FamilyLimit,
    Member(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViennaRun {
    pub family: String,
    pub trace: String,
    /// Term `n` equals `a_{terms[n-1]}`.
    pub terms: Vec<u32>,
    pub limit: ViennaLimit,
    pub limit_value: String,
}

fn vienna_index(obs: Observation, n: u32) -> u32 {
    match obs {
        Observation::Pending => n,
        Observation::Proved { at } | Observation::Refuted { at } => at,
    }
}

/// `e_n = a_n` until the resolution at stage `v`, then `a_v` forever.
pub fn vienna_sequence(family: &ConvergentFamily, trace: &EventTrace, n: usize) -> Result<ViennaRun, DriftError> {
    if trace.resolution.stage() == Some(0) {
        return Err(DriftError::ZeroStage);
    }
    let terms = (1..=n).map(|stage| vienna_index(trace.observe(stage), stage as u32)).collect();
    let limit = match trace.resolution.stage() {
        None => ViennaLimit::FamilyLimit,
        Some(k) => ViennaLimit::Member(k),
    };
    let limit_value = match limit {
        ViennaLimit::FamilyLimit => family.limit().name().to_string(),
        ViennaLimit::Member(k) => family.member(k).name().to_string(),
    };
    Ok(ViennaRun { family: family.name().to_string(), trace: trace.to_string(), terms, limit, limit_value })
}

pub fn vienna_e(family: &ConvergentFamily, trace: &EventTrace) -> Result<Point, DriftError> {
    if trace.resolution.stage() == Some(0) {
        return Err(DriftError::ZeroStage);
    }
    let fam = family.clone();
    let g = Generator::steered_process(format!("vienna-e[{}]", family.name()), move |n, obs| {
        Ok(fam.member(vienna_index(obs, n)))
    });
    Ok(Point::with_trace(g, trace.clone())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "kernel", rename_all = "snake_case")]
pub enum RationalityDescriptor {
    Rational,
    Irrational,
    /// The limit is the kernel, whose class is recorded.
    KernelClass(Rationality),
}

pub fn rationality_descriptor(
    drift: &Drift,
    kind: CheckingKind,
    trace: &EventTrace,
) -> Result<RationalityDescriptor, DriftError> {
    let run = checking_sequence(drift, kind, trace, 0)?;
    if run.limit == TermRef::Kernel {
        return Ok(RationalityDescriptor::KernelClass(drift.kernel_rationality));
    }
    let (_, class) = drift.resolve(run.limit).expect("kind was checked against the wing");
    Ok(match class {
        Rationality::Rational => RationalityDescriptor::Rational,
        Rationality::Irrational => RationalityDescriptor::Irrational,
    })
}
