//! Plethystic exponential/logarithm and the elementary ↔ power-sum dictionary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::mobius;
use crate::error::SeriesError;
use crate::series::{GradedSeries, RatSeries};

pub fn adams(f: &GradedSeries, n: usize) -> Result<GradedSeries, SeriesError> {
    f.adams(n)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `exp(h)` for `h` without a `t^0` part.
pub fn exp_series(h: &RatSeries) -> Result<RatSeries, SeriesError> {
    if !h.has_zero_constant_part() {
        return Err(SeriesError::NonzeroConstantPart);
    }
    let p = *h.policy();
    let mut sum = RatSeries::one(p);
    let mut term = RatSeries::one(p);
    for k in 1..=p.t_max {
        term = term.mul(h)?.scale(&rat(1, k as i64));
        sum = sum.add(&term)?;
    }
    Ok(sum)
}

/// `log(f)` for `f` with unit constant term.
pub fn log_series(f: &RatSeries) -> Result<RatSeries, SeriesError> {
    if !f.has_unit_constant() {
        return Err(SeriesError::NotUnit(
            "logarithm needs constant term 1".into(),
        ));
    }
    let p = *f.policy();
    let h = f.sub(&RatSeries::one(p))?;
    let mut sum = RatSeries::zero(p);
    let mut power = RatSeries::one(p);
    for k in 1..=p.t_max {
        power = power.mul(&h)?;
        let sign = if k % 2 == 1 { 1 } else { -1 };
        sum = sum.add(&power.scale(&rat(sign, k as i64)))?;
    }
    Ok(sum)
}

/// Plethystic exponential `EXP(f) = prod (1 - q^e t^n)^{-a_{n,e}}`, evaluated as
/// `exp(sum_k psi_k(f) / k)` over the rationals.
pub fn pexp(f: &GradedSeries) -> Result<GradedSeries, SeriesError> {
    if !f.has_zero_constant_part() {
        return Err(SeriesError::NonzeroConstantPart);
    }
    let p = *f.policy();
    let fr = f.to_rational();
    let mut log = RatSeries::zero(p);
    for k in 1..=p.t_max {
        log = log.add(&fr.adams(k)?.scale(&rat(1, k as i64)))?;
    }
    exp_series(&log)?.to_integral()
}

/// Inverse of [`pexp`]: `sum_k mu(k)/k psi_k(log f)`.
pub fn plog(f: &GradedSeries) -> Result<GradedSeries, SeriesError> {
    if !f.has_unit_constant() {
        return Err(SeriesError::NotUnit(
            "plethystic logarithm needs constant term 1".into(),
        ));
    }
    let p = *f.policy();
    let log = log_series(&f.to_rational())?;
    let mut out = RatSeries::zero(p);
    for k in 1..=p.t_max {
        let mu = mobius(k as u64);
        if mu == 0 {
            continue;
        }
        out = out.add(&log.adams(k)?.scale(&rat(mu, k as i64)))?;
    }
    out.to_integral()
}

/// Elementary symmetric values `(s_1, .., s_r)` of an eigenvalue multiset of size `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumTuple {
    entries: Vec<BigRational>,
}

impl SpectrumTuple {
    pub fn new(entries: Vec<BigRational>) -> Self {
        SpectrumTuple { entries }
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        SpectrumTuple {
            entries: entries.iter().map(|&v| rat(v, 1)).collect(),
        }
    }

    /// Elementary symmetric values of an explicit multiset, by expanding
    /// `prod (x - lambda)`.
    pub fn of_multiset(eigenvalues: &[BigRational]) -> Self {
        // coefficients of prod (1 + lambda x): e_0 .. e_r
        let mut e = vec![BigRational::one()];
        for lam in eigenvalues {
            let mut next = vec![BigRational::zero(); e.len() + 1];
            for (i, c) in e.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * lam;
            }
            e = next;
        }
        SpectrumTuple {
            entries: e.into_iter().skip(1).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    fn elementary(&self, k: usize) -> BigRational {
        match k {
            0 => BigRational::one(),
            k if k <= self.entries.len() => self.entries[k - 1].clone(),
            _ => BigRational::zero(),
        }
    }
}

/// Power sums `p_1..p_len` of the multiset with elementary values `s` (Newton's identities).
pub fn power_sums(s: &SpectrumTuple, len: usize) -> Vec<BigRational> {
    let mut p: Vec<BigRational> = Vec::with_capacity(len);
    for k in 1..=len {
        let sign_k = if k % 2 == 1 { 1 } else { -1 };
        let mut v = s.elementary(k) * BigRational::from_integer(BigInt::from(sign_k * k as i64));
        for i in 1..k {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            v += s.elementary(i) * &p[k - i - 1] * BigRational::from_integer(BigInt::from(sign));
        }
        p.push(v);
    }
    p
}

pub fn elem_to_power(s: &SpectrumTuple) -> Vec<BigRational> {
    power_sums(s, s.rank())
}

pub fn power_to_elem(p: &[BigRational], r: usize) -> SpectrumTuple {
    assert!(p.len() >= r, "need at least r power sums");
    let mut e = vec![BigRational::one()];
    for k in 1..=r {
        let mut v = BigRational::zero();
        for i in 1..=k {
            let term = &e[k - i] * &p[i - 1];
            if i % 2 == 1 {
                v += term;
            } else {
                v -= term;
            }
        }
        e.push(v / BigRational::from_integer(BigInt::from(k)));
    }
    SpectrumTuple {
        entries: e.into_iter().skip(1).collect(),
    }
}

/// Elementary values of the union of two multisets, computed by adding power
/// sums in the common rank and converting back.
pub fn spectrum_cup(a: &SpectrumTuple, b: &SpectrumTuple) -> SpectrumTuple {
    let total = a.rank() + b.rank();
    let pa = power_sums(a, total);
    let pb = power_sums(b, total);
    let sum: Vec<BigRational> = pa.iter().zip(&pb).map(|(x, y)| x + y).collect();
    power_to_elem(&sum, total)
}
