//! Truncated two-variable series: rank grading `t` and weight variable `q`.
//!
//! Exponents of `q` are half-integers, stored doubled. Every series carries
//! a per-rank *known bound*: coefficients at or below it are exact, anything
//! above it was lost to truncation. A rank whose bound is [`KNOWN_ALL`] is a
//! finite Laurent polynomial known completely. Products and Adams operations
//! propagate the bounds, so two series can always be compared exactly on the
//! region where both are known, even when `q` exponents are negative.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::SeriesError;

/// Marks a rank whose coefficients are all known (no truncation happened).
pub const KNOWN_ALL: i64 = i64::MAX;

/// A half-integer, stored as twice its value.
#[derive(
    Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInt(doubled)
    }

    pub const fn from_int(value: i64) -> Self {
        HalfInt(2 * value)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.0 / 2)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}/2", self.0),
        }
    }
}

impl FromStr for HalfInt {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(num) = s.strip_suffix("/2") {
            num.trim()
                .parse::<i64>()
                .map(HalfInt::from_doubled)
                .map_err(|e| format!("bad half-integer {s:?}: {e}"))
        } else {
            s.parse::<i64>()
                .map(HalfInt::from_int)
                .map_err(|e| format!("bad half-integer {s:?}: {e}"))
        }
    }
}

/// Truncation window shared by the operands of every binary operation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub t_max: usize,
    pub q_min: HalfInt,
    pub q_max: HalfInt,
}

impl TruncationPolicy {
    pub fn new(t_max: usize, q_min: HalfInt, q_max: HalfInt) -> Result<Self, SeriesError> {
        if q_min > q_max {
            return Err(SeriesError::PolicyMerge(format!(
                "empty q window [{q_min}, {q_max}]"
            )));
        }
        Ok(TruncationPolicy {
            t_max,
            q_min,
            q_max,
        })
    }

    /// Integer-exponent convenience constructor.
    pub fn ints(t_max: usize, q_min: i64, q_max: i64) -> Result<Self, SeriesError> {
        Self::new(t_max, HalfInt::from_int(q_min), HalfInt::from_int(q_max))
    }

    /// Intersection of two windows.
    pub fn merge(&self, other: &TruncationPolicy) -> Result<TruncationPolicy, SeriesError> {
        let merged = TruncationPolicy {
            t_max: self.t_max.min(other.t_max),
            q_min: self.q_min.max(other.q_min),
            q_max: self.q_max.min(other.q_max),
        };
        if merged.q_min > merged.q_max {
            return Err(SeriesError::PolicyMerge(format!(
                "[{}, {}] and [{}, {}] do not overlap",
                self.q_min, self.q_max, other.q_min, other.q_max
            )));
        }
        Ok(merged)
    }

    pub fn contains(&self, n: usize, e2: i64) -> bool {
        n <= self.t_max && self.q_min.0 <= e2 && e2 <= self.q_max.0
    }

    fn floor2(&self) -> i64 {
        self.q_min.0
    }

    fn ceil2(&self) -> i64 {
        self.q_max.0
    }
}

/// Coefficient rings the series arithmetic runs over.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + Zero + One {
    fn from_i64(v: i64) -> Self;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

macro_rules! impl_coeff {
    ($t:ty, $from:expr) => {
        impl Coeff for $t {
            fn from_i64(v: i64) -> Self {
                $from(v)
            }
            fn add_assign_ref(&mut self, other: &Self) {
                *self += other;
            }
            fn sub_assign_ref(&mut self, other: &Self) {
                *self -= other;
            }
            fn mul_ref(&self, other: &Self) -> Self {
                self * other
            }
            fn neg_ref(&self) -> Self {
                -self
            }
        }
    };
}

impl_coeff!(BigInt, BigInt::from);
impl_coeff!(BigRational, |v: i64| BigRational::from_integer(
    BigInt::from(v)
));

/// A truncated series in `t` (rank) and `q` (half-integer weight exponent).
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    policy: TruncationPolicy,
    known: Vec<i64>,
    terms: BTreeMap<(usize, i64), C>,
}

/// Integer series: the graded-dimension currency of the crate.
pub type GradedSeries = Series<BigInt>;
/// Rational intermediate series used by exp/log.
pub type RatSeries = Series<BigRational>;

/// First coefficient where two series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub t_degree: usize,
    pub q_exponent: String,
    pub lhs: String,
    pub rhs: String,
}

fn bound_add(a: i64, b: i64) -> i64 {
    if a == KNOWN_ALL || b == KNOWN_ALL {
        KNOWN_ALL
    } else {
        a + b
    }
}

impl<C: Coeff> Series<C> {
    pub fn zero(policy: TruncationPolicy) -> Self {
        Series {
            policy,
            known: vec![KNOWN_ALL; policy.t_max + 1],
            terms: BTreeMap::new(),
        }
    }

    pub fn one(policy: TruncationPolicy) -> Self {
        let mut s = Self::zero(policy);
        if policy.contains(0, 0) {
            s.terms.insert((0, 0), C::one());
        }
        s
    }

    /// Builds an exactly known series from `(rank, q exponent, coefficient)` triples.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (usize, HalfInt, C)>,
        policy: TruncationPolicy,
    ) -> Result<Self, SeriesError> {
        let mut map: BTreeMap<(usize, i64), C> = BTreeMap::new();
        for (n, e, c) in terms {
            if !policy.contains(n, e.0) {
                return Err(SeriesError::OutsideWindow {
                    n,
                    exponent: e,
                    t_max: policy.t_max,
                    q_min: policy.q_min,
                    q_max: policy.q_max,
                });
            }
            map.entry((n, e.0))
                .or_insert_with(C::zero)
                .add_assign_ref(&c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Series {
            policy,
            known: vec![KNOWN_ALL; policy.t_max + 1],
            terms: map,
        })
    }

    /// Assembles a series from raw parts: drops zeros and anything above the
    /// known bound, rejects terms under the floor.
    pub(crate) fn from_raw(
        policy: TruncationPolicy,
        mut known: Vec<i64>,
        terms: BTreeMap<(usize, i64), C>,
    ) -> Result<Self, SeriesError> {
        known.resize(policy.t_max + 1, KNOWN_ALL);
        let mut kept = BTreeMap::new();
        for ((n, e), c) in terms {
            if c.is_zero() || n > policy.t_max {
                continue;
            }
            if e > policy.ceil2() {
                if known[n] == KNOWN_ALL {
                    known[n] = policy.ceil2();
                }
                continue;
            }
            if e > known[n] {
                continue;
            }
            if e < policy.floor2() {
                return Err(SeriesError::BelowWindow {
                    n,
                    exponent: HalfInt(e),
                    q_min: policy.q_min,
                });
            }
            kept.insert((n, e), c);
        }
        for k in known.iter_mut() {
            if *k != KNOWN_ALL {
                *k = (*k).min(policy.ceil2());
            }
        }
        Ok(Series {
            policy,
            known,
            terms: kept,
        })
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    /// Highest `q` exponent known exactly at rank `n`; `None` when the rank is
    /// known completely.
    pub fn known_to(&self, n: usize) -> Option<HalfInt> {
        match self.known.get(n) {
            Some(&k) if k != KNOWN_ALL => Some(HalfInt(k)),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.known.iter().all(|&k| k == KNOWN_ALL)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored terms in (rank, exponent) order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, HalfInt, &C)> {
        self.terms.iter().map(|(&(n, e), c)| (n, HalfInt(e), c))
    }

    pub fn rank_terms(&self, n: usize) -> impl Iterator<Item = (HalfInt, &C)> {
        self.terms
            .range((n, i64::MIN)..=(n, i64::MAX))
            .map(|(&(_, e), c)| (HalfInt(e), c))
    }

    pub fn coeff(&self, n: usize, exponent: HalfInt) -> Result<C, SeriesError> {
        if !self.policy.contains(n, exponent.0) {
            return Err(SeriesError::OutsideWindow {
                n,
                exponent,
                t_max: self.policy.t_max,
                q_min: self.policy.q_min,
                q_max: self.policy.q_max,
            });
        }
        if exponent.0 > self.known[n] {
            return Err(SeriesError::TruncatedRegion {
                n,
                exponent,
                known: HalfInt(self.known[n]).to_string(),
            });
        }
        Ok(self
            .terms
            .get(&(n, exponent.0))
            .cloned()
            .unwrap_or_else(C::zero))
    }

    /// Re-windows the series to `policy`, which must lie inside the current window
    /// on the low side for terms that are present.
    pub fn restrict(&self, policy: &TruncationPolicy) -> Result<Self, SeriesError> {
        if *policy == self.policy {
            return Ok(self.clone());
        }
        let mut known: Vec<i64> = (0..=policy.t_max)
            .map(|n| self.known.get(n).copied().unwrap_or(self.policy.ceil2()))
            .collect();
        // Ranks beyond the old t_max were never computed.
        for (n, k) in known.iter_mut().enumerate() {
            if n > self.policy.t_max {
                *k = i64::MIN / 4;
            }
        }
        let terms = self.terms.iter().map(|(&k, c)| (k, c.clone())).collect();
        Self::from_raw(*policy, known, terms)
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self), SeriesError> {
        if self.policy == other.policy {
            return Ok((self.clone(), other.clone()));
        }
        let p = self.policy.merge(&other.policy)?;
        Ok((self.restrict(&p)?, other.restrict(&p)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.policy != other.policy {
            let (a, b) = self.aligned(other)?;
            return a.add(&b);
        }
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            terms.entry(*k).or_insert_with(C::zero).add_assign_ref(c);
        }
        let known = self
            .known
            .iter()
            .zip(&other.known)
            .map(|(a, b)| *a.min(b))
            .collect();
        Self::from_raw(self.policy, known, terms)
    }

    pub fn neg(&self) -> Self {
        Series {
            policy: self.policy,
            known: self.known.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg_ref())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &C) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (*k, c.mul_ref(factor)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Series {
            policy: self.policy,
            known: self.known.clone(),
            terms,
        }
    }

    fn by_rank(&self) -> Vec<Vec<(i64, &C)>> {
        let mut out = vec![Vec::new(); self.policy.t_max + 1];
        for (&(n, e), c) in &self.terms {
            out[n].push((e, c));
        }
        out
    }

    fn lowest(&self, ranks: &[Vec<(i64, &C)>]) -> Vec<i64> {
        ranks
            .iter()
            .zip(&self.known)
            .map(|(r, &k)| match r.first() {
                Some(&(e, _)) => e,
                None if k == KNOWN_ALL => KNOWN_ALL,
                None => k + 1,
            })
            .collect()
    }

    /// Cauchy product, truncated to the window with exact known bounds.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.policy != other.policy {
            let (a, b) = self.aligned(other)?;
            return a.mul(&b);
        }
        let p = self.policy;
        let ra = self.by_rank();
        let rb = other.by_rank();
        let lo_a = self.lowest(&ra);
        let lo_b = other.lowest(&rb);
        let mut known = vec![KNOWN_ALL; p.t_max + 1];
        for (n, slot) in known.iter_mut().enumerate() {
            for (n1, (&la, &ka)) in lo_a.iter().zip(&self.known).enumerate().take(n + 1) {
                let n2 = n - n1;
                *slot = (*slot)
                    .min(bound_add(la, other.known[n2]))
                    .min(bound_add(ka, lo_b[n2]));
            }
        }
        let mut terms: BTreeMap<(usize, i64), C> = BTreeMap::new();
        for (n1, row_a) in ra.iter().enumerate() {
            for (n2, row_b) in rb.iter().enumerate().take(p.t_max + 1 - n1) {
                let n = n1 + n2;
                let cap = known[n].min(p.ceil2());
                for &(e1, c1) in row_a {
                    for &(e2, c2) in row_b {
                        let e = e1 + e2;
                        if e > cap {
                            if e > p.ceil2() && known[n] == KNOWN_ALL {
                                known[n] = p.ceil2();
                            }
                            continue;
                        }
                        terms
                            .entry((n, e))
                            .or_insert_with(C::zero)
                            .add_assign_ref(&c1.mul_ref(c2));
                    }
                }
            }
        }
        Self::from_raw(p, known, terms)
    }

    /// Multiplies by `t^r` without any loss of precision.
    pub fn shift_rank(&self, r: usize) -> Self {
        let p = self.policy;
        let known = (0..=p.t_max)
            .map(|n| if n < r { KNOWN_ALL } else { self.known[n - r] })
            .collect();
        let terms = self
            .terms
            .iter()
            .filter(|(&(n, _), _)| n + r <= p.t_max)
            .map(|(&(n, e), c)| ((n + r, e), c.clone()))
            .collect();
        Series {
            policy: p,
            known,
            terms,
        }
    }

    /// Multiplies by `q^exponent`.
    pub fn shift_q(&self, exponent: HalfInt) -> Result<Self, SeriesError> {
        let known = self
            .known
            .iter()
            .map(|&k| bound_add(k, exponent.0))
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|(&(n, e), c)| ((n, e + exponent.0), c.clone()))
            .collect();
        Self::from_raw(self.policy, known, terms)
    }

    /// Keeps only the rank-`n` part.
    pub fn rank_part(&self, n: usize) -> Self {
        let known = (0..=self.policy.t_max)
            .map(|m| if m == n { self.known[m] } else { KNOWN_ALL })
            .collect();
        let terms = self
            .terms
            .iter()
            .filter(|(&(m, _), _)| m == n)
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        Series {
            policy: self.policy,
            known,
            terms,
        }
    }

    /// Adams operation: `t -> t^k`, `q -> q^k`.
    pub fn adams(&self, k: usize) -> Result<Self, SeriesError> {
        if k == 0 {
            return Err(SeriesError::BadAdamsOrder(k));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let p = self.policy;
        let k64 = k as i64;
        let known = (0..=p.t_max)
            .map(|m| {
                if m % k != 0 {
                    KNOWN_ALL
                } else {
                    let src = self.known[m / k];
                    if src == KNOWN_ALL {
                        KNOWN_ALL
                    } else {
                        k64 * (src + 1) - 1
                    }
                }
            })
            .collect();
        let terms = self
            .terms
            .iter()
            .filter(|(&(n, _), _)| n * k <= p.t_max)
            .map(|(&(n, e), c)| ((n * k, e * k64), c.clone()))
            .collect();
        Self::from_raw(p, known, terms)
    }

    /// Rank-0 constant term must be `1` with no other rank-0 terms.
    pub fn has_unit_constant(&self) -> bool {
        let mut rank0 = self.rank_terms(0);
        matches!(rank0.next(), Some((e, c)) if e == HalfInt::ZERO && *c == C::one())
            && rank0.next().is_none()
    }

    pub fn has_zero_constant_part(&self) -> bool {
        self.rank_terms(0).next().is_none()
    }

    /// `1 / f` for `f` with unit constant term, as `sum_k (1 - f)^k`.
    pub fn invert_geometric(&self) -> Result<Self, SeriesError> {
        if !self.has_unit_constant() {
            return Err(SeriesError::NotUnit(
                "constant term must be 1 with no other t^0 terms".to_string(),
            ));
        }
        let one = Self::one(self.policy);
        let h = one.sub(self)?;
        let mut g = one.clone();
        for _ in 0..self.policy.t_max {
            g = one.add(&h.mul(&g)?)?;
        }
        Ok(g)
    }

    /// Common exactly-known region of two series, per rank (`None` = unbounded).
    pub fn common_known(&self, other: &Self) -> Vec<Option<HalfInt>> {
        (0..=self.policy.t_max.min(other.policy.t_max))
            .map(|n| {
                let k = self.known[n].min(other.known[n]);
                (k != KNOWN_ALL).then_some(HalfInt(
                    k.min(self.policy.ceil2().min(other.policy.ceil2())),
                ))
            })
            .collect()
    }

    /// First coefficient (in rank, then exponent order) where the two series
    /// differ inside the region both know exactly.
    pub fn first_difference(&self, other: &Self) -> Option<Discrepancy> {
        let bounds = self.common_known(other);
        let mut keys: Vec<(usize, i64)> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        keys.sort_unstable();
        keys.dedup();
        for (n, e) in keys {
            if n >= bounds.len() {
                continue;
            }
            if let Some(b) = bounds[n] {
                if e > b.0 {
                    continue;
                }
            }
            let zero = C::zero();
            let a = self.terms.get(&(n, e)).unwrap_or(&zero);
            let b = other.terms.get(&(n, e)).unwrap_or(&zero);
            if a != b {
                return Some(Discrepancy {
                    t_degree: n,
                    q_exponent: HalfInt(e).to_string(),
                    lhs: a.to_string(),
                    rhs: b.to_string(),
                });
            }
        }
        None
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            policy: self.policy,
            known: self.known.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }
}

impl GradedSeries {
    pub fn to_rational(&self) -> RatSeries {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }

    /// True when every stored coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Deterministic JSON: policy, per-rank known bounds (doubled, `null` when
    /// complete) and sorted `[n, e2, c]` triples.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(&(n, e), c)| {
                let num: serde_json::Number = c.to_string().parse().expect("integer literal");
                json!([n, e, num])
            })
            .collect();
        let known: Vec<Value> = self
            .known
            .iter()
            .map(|&k| {
                if k == KNOWN_ALL {
                    Value::Null
                } else {
                    json!(k)
                }
            })
            .collect();
        json!({
            "policy": {
                "t_max": self.policy.t_max,
                "q_min2": self.policy.q_min.0,
                "q_max2": self.policy.q_max.0,
            },
            "known2": known,
            "terms": terms,
        })
    }

    pub fn from_json(value: &Value) -> Result<Self, SeriesError> {
        let bad = |m: &str| SeriesError::Format(m.to_string());
        let pol = value.get("policy").ok_or_else(|| bad("missing policy"))?;
        let get_i = |v: &Value, k: &str| v.get(k).and_then(Value::as_i64).ok_or_else(|| bad(k));
        let t_max = get_i(pol, "t_max")?;
        if t_max < 0 {
            return Err(bad("negative t_max"));
        }
        let policy = TruncationPolicy::new(
            t_max as usize,
            HalfInt(get_i(pol, "q_min2")?),
            HalfInt(get_i(pol, "q_max2")?),
        )?;
        let known = match value.get("known2") {
            None => vec![KNOWN_ALL; policy.t_max + 1],
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Null => Ok(KNOWN_ALL),
                    v => v.as_i64().ok_or_else(|| bad("known2 entry")),
                })
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(bad("known2 must be an array")),
        };
        let mut terms = BTreeMap::new();
        let items = value
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("terms"))?;
        for item in items {
            let triple = item
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| bad("term triple"))?;
            let n = triple[0].as_u64().ok_or_else(|| bad("term rank"))? as usize;
            let e = triple[1].as_i64().ok_or_else(|| bad("term exponent"))?;
            let c: BigInt = match &triple[2] {
                Value::Number(num) => num
                    .to_string()
                    .parse()
                    .map_err(|_| bad("term coefficient"))?,
                Value::String(s) => s.parse().map_err(|_| bad("term coefficient"))?,
                _ => return Err(bad("term coefficient")),
            };
            if !policy.contains(n, e) {
                return Err(SeriesError::OutsideWindow {
                    n,
                    exponent: HalfInt(e),
                    t_max: policy.t_max,
                    q_min: policy.q_min,
                    q_max: policy.q_max,
                });
            }
            *terms.entry((n, e)).or_insert_with(BigInt::zero) += c;
        }
        Self::from_raw(policy, known, terms)
    }
}

impl RatSeries {
    /// Converts back to integers; any fractional coefficient is an arithmetic bug.
    pub fn to_integral(&self) -> Result<GradedSeries, SeriesError> {
        let mut terms = BTreeMap::new();
        for (&(n, e), c) in &self.terms {
            if !c.is_integer() {
                return Err(SeriesError::NonIntegral {
                    n,
                    exponent: HalfInt(e),
                    coeff: c.to_string(),
                });
            }
            terms.insert((n, e), c.to_integer());
        }
        Ok(Series {
            policy: self.policy,
            known: self.known.clone(),
            terms,
        })
    }
}

impl<C: Coeff> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(n, e), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if e != 0 {
                write!(f, "*q^({})", HalfInt(e))?;
            }
            if n != 0 {
                write!(f, "*t^{n}")?;
            }
        }
        Ok(())
    }
}

/// Small helper for tests and callers holding `i64` data.
pub fn int_terms(
    terms: &[(usize, i64, i64)],
    policy: TruncationPolicy,
) -> Result<GradedSeries, SeriesError> {
    GradedSeries::from_terms(
        terms
            .iter()
            .map(|&(n, e2, c)| (n, HalfInt::from_doubled(e2), BigInt::from(c))),
        policy,
    )
}

/// Coefficient as `i64`, for assertions on small values.
pub fn coeff_i64(f: &GradedSeries, n: usize, exponent: HalfInt) -> Result<i64, SeriesError> {
    f.coeff(n, exponent)
        .map(|c| c.to_i64().expect("coefficient fits in i64"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::ints(4, -6, 12).unwrap()
    }

    fn h(v: i64) -> HalfInt {
        HalfInt::from_int(v)
    }

    #[test]
    fn make_series_examples() {
        let one = int_terms(&[(0, 0, 1)], pol()).unwrap();
        assert_eq!(one, GradedSeries::one(pol()));
        let half = int_terms(&[(1, 1, 1)], pol()).unwrap();
        assert_eq!(coeff_i64(&half, 1, HalfInt::from_doubled(1)).unwrap(), 1);
        let cancel = int_terms(&[(1, 0, 1), (1, 0, -1)], pol()).unwrap();
        assert!(cancel.is_zero());
        let err = int_terms(&[(5, 0, 1)], pol()).unwrap_err();
        assert!(matches!(err, SeriesError::OutsideWindow { n: 5, .. }));
        let err = int_terms(&[(1, 100, 1)], pol()).unwrap_err();
        assert!(matches!(err, SeriesError::OutsideWindow { .. }));
    }

    #[test]
    fn add_examples() {
        let one = GradedSeries::one(pol());
        assert!(one.add(&one.neg()).unwrap().is_zero());
        let t = int_terms(&[(1, 0, 1)], pol()).unwrap();
        assert_eq!(coeff_i64(&t.add(&t).unwrap(), 1, h(0)).unwrap(), 2);
        let a = int_terms(&[(1, 2, 1)], pol()).unwrap();
        let b = int_terms(&[(1, 1, 1)], pol()).unwrap();
        assert_eq!(a.add(&b).unwrap().len(), 2);
    }

    #[test]
    fn mul_examples() {
        let p = TruncationPolicy::ints(4, 0, 12).unwrap();
        let one_minus_qt = int_terms(&[(0, 0, 1), (1, 2, -1)], p).unwrap();
        let geo = int_terms(
            &(0..=4).map(|n| (n, 2 * n as i64, 1)).collect::<Vec<_>>(),
            p,
        )
        .unwrap();
        let prod = one_minus_qt.mul(&geo).unwrap();
        assert!(prod.first_difference(&GradedSeries::one(p)).is_none());

        let half = int_terms(&[(0, 1, 1)], p).unwrap();
        assert_eq!(
            half.mul(&half).unwrap(),
            int_terms(&[(0, 2, 1)], p).unwrap()
        );

        let one_plus_t = int_terms(&[(0, 0, 1), (1, 0, 1)], p).unwrap();
        assert_eq!(
            one_plus_t.mul(&one_plus_t).unwrap(),
            int_terms(&[(0, 0, 1), (1, 0, 2), (2, 0, 1)], p).unwrap()
        );
    }

    #[test]
    fn invert_geometric_examples() {
        let p = TruncationPolicy::ints(5, 0, 12).unwrap();
        let inv = int_terms(&[(0, 0, 1), (1, 0, -1)], p)
            .unwrap()
            .invert_geometric()
            .unwrap();
        for n in 0..=5 {
            assert_eq!(coeff_i64(&inv, n, h(0)).unwrap(), 1);
        }
        let inv = int_terms(&[(0, 0, 1), (1, 2, -1)], p)
            .unwrap()
            .invert_geometric()
            .unwrap();
        for n in 0..=5 {
            assert_eq!(coeff_i64(&inv, n, h(n as i64)).unwrap(), 1);
        }
        let f = int_terms(&[(0, 0, 1), (1, 0, -2)], p).unwrap();
        let inv = f.invert_geometric().unwrap();
        for n in 0..=5 {
            assert_eq!(coeff_i64(&inv, n, h(0)).unwrap(), 1 << n);
        }
        assert!(f
            .mul(&inv)
            .unwrap()
            .first_difference(&GradedSeries::one(p))
            .is_none());
        let bad = int_terms(&[(0, 0, 2)], p).unwrap();
        assert!(matches!(
            bad.invert_geometric(),
            Err(SeriesError::NotUnit(_))
        ));
    }

    #[test]
    fn coeff_window_is_an_error_not_zero() {
        let p = TruncationPolicy::ints(4, 0, 12).unwrap();
        let geo = int_terms(&(0..=4).map(|n| (n, 0, 1)).collect::<Vec<_>>(), p).unwrap();
        assert_eq!(coeff_i64(&geo, 3, h(0)).unwrap(), 1);
        let qt = int_terms(&[(1, 2, 1)], p).unwrap();
        assert_eq!(coeff_i64(&qt, 1, HalfInt::from_doubled(1)).unwrap(), 0);
        assert!(qt.coeff(5, h(0)).is_err());
        assert!(qt.coeff(1, h(13)).is_err());
    }

    #[test]
    fn truncated_region_is_distinguished_from_zero() {
        // 1/(1-q) truncated at q^12, times q^-2: only exponents <= 10 remain exact.
        let p = TruncationPolicy::ints(1, -4, 12).unwrap();
        let geo = int_terms(&(0..=12).map(|i| (0, 2 * i, 1)).collect::<Vec<_>>(), p).unwrap();
        let geo = GradedSeries::from_raw(p, vec![24, KNOWN_ALL], geo.terms.clone()).unwrap();
        let shifted = geo.mul(&int_terms(&[(0, -4, 1)], p).unwrap()).unwrap();
        assert_eq!(shifted.known_to(0), Some(h(10)));
        assert_eq!(coeff_i64(&shifted, 0, h(10)).unwrap(), 1);
        assert!(matches!(
            shifted.coeff(0, h(11)),
            Err(SeriesError::TruncatedRegion { .. })
        ));
    }

    #[test]
    fn flat_window_associativity_counterexample_is_handled() {
        // With a flat window containing negative exponents, naive truncation
        // breaks associativity; known bounds keep the comparison honest.
        let p = TruncationPolicy::ints(0, -1, 1).unwrap();
        let q = int_terms(&[(0, 2, 1)], p).unwrap();
        let qinv = int_terms(&[(0, -2, 1)], p).unwrap();
        let left = q.mul(&q).unwrap().mul(&qinv).unwrap();
        let right = q.mul(&q.mul(&qinv).unwrap()).unwrap();
        assert!(left.first_difference(&right).is_none());
        assert_eq!(coeff_i64(&right, 0, h(1)).unwrap(), 1);
        assert!(left.coeff(0, h(1)).is_err());
    }

    #[test]
    fn json_roundtrip_and_determinism() {
        let p = pol();
        let f = int_terms(&[(2, -3, 7), (0, 0, 1), (1, 5, -2)], p).unwrap();
        let v = f.to_json();
        assert_eq!(v.to_string(), f.to_json().to_string());
        assert_eq!(GradedSeries::from_json(&v).unwrap(), f);
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms[0], json!([0, 0, 1]));
    }

    #[test]
    fn half_int_parse_display() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), HalfInt::from_doubled(3));
        assert_eq!("-2".parse::<HalfInt>().unwrap(), HalfInt::from_int(-2));
        assert_eq!(HalfInt::from_doubled(-1).to_string(), "-1/2");
        assert_eq!(HalfInt::from_doubled(4).to_string(), "2");
    }

    fn arb_series() -> impl Strategy<Value = GradedSeries> {
        proptest::collection::vec((0usize..=4, 0i64..=10, -5i64..=5), 0..10)
            .prop_map(|terms| int_terms(&terms, TruncationPolicy::ints(4, 0, 5).unwrap()).unwrap())
    }

    fn arb_laurent() -> impl Strategy<Value = GradedSeries> {
        proptest::collection::vec((0usize..=3, -4i64..=8, -5i64..=5), 0..8)
            .prop_map(|terms| int_terms(&terms, TruncationPolicy::ints(3, -8, 4).unwrap()).unwrap())
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            let ab_c = a.add(&b).unwrap().add(&c).unwrap();
            let a_bc = a.add(&b.add(&c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            // the two sides may drop different terms past the ceiling
            prop_assert!(lhs.first_difference(&rhs).is_none());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert!(l.first_difference(&r).is_none());
        }

        #[test]
        fn laurent_products_agree_where_known(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            let l = a.mul(&b);
            let r = b.mul(&c);
            if let (Ok(ab), Ok(bc)) = (l, r) {
                if let (Ok(x), Ok(y)) = (ab.mul(&c), a.mul(&bc)) {
                    prop_assert!(x.first_difference(&y).is_none());
                }
            }
        }

        #[test]
        fn geometric_inverse(a in arb_series()) {
            let p = *a.policy();
            let f = GradedSeries::one(p).add(&a.shift_rank(1)).unwrap();
            let g = f.invert_geometric().unwrap();
            prop_assert!(f.mul(&g).unwrap().first_difference(&GradedSeries::one(p)).is_none());
        }
    }
}
