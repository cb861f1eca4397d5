//! Dense univariate polynomials in `q`, reduced rational functions, and exact
//! interpolation from integer samples.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::CountError;
use crate::series::Coeff;

/// Polynomial in `q`, little-endian coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

pub type IntPoly = Poly<BigInt>;
pub type RatPoly = Poly<BigRational>;

impl<C: Coeff> Poly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C::from_i64(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![C::one()],
        }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `q`
    pub fn q() -> Self {
        Self::monomial(1, C::one())
    }

    pub fn monomial(degree: usize, c: C) -> Self {
        let mut coeffs = vec![C::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![C::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i].add_assign_ref(c);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i].add_assign_ref(c);
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j].add_assign_ref(&a.mul_ref(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `q^deg * p(1/q)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// `p(q^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        Self::new(out)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x);
            acc.add_assign_ref(c);
        }
        acc
    }
}

impl IntPoly {
    pub fn to_rational(&self) -> RatPoly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        }
    }

    pub fn eval_i64(&self, q: i64) -> BigInt {
        self.eval(&BigInt::from(q))
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
}

impl RatPoly {
    /// Integer polynomial if every coefficient is integral.
    pub fn to_integer(&self) -> Option<IntPoly> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(Poly::new)
    }

    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(l) => a.scale(&(BigRational::one() / l)),
            None => a,
        }
    }

    /// Clears denominators: `(integer primitive-ish poly, factor)` with `self = poly / factor`.
    fn clear_denominators(&self) -> (IntPoly, BigInt) {
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
            .collect();
        (Poly::new(ints), l)
    }
}

fn fmt_poly<C: Coeff>(p: &Poly<C>, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in p.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let s = c.to_string();
        let (neg, mag) = match s.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, s),
        };
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let unit = mag == "1";
        match i {
            0 => write!(f, "{mag}")?,
            1 if unit => write!(f, "{var}")?,
            1 => write!(f, "{mag}*{var}")?,
            _ if unit => write!(f, "{var}^{i}")?,
            _ => write!(f, "{mag}*{var}^{i}")?,
        }
    }
    Ok(())
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(self, "q", f)
    }
}

/// Reduced ratio of integer polynomials in `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionQ {
    num: IntPoly,
    den: IntPoly,
}

impl RationalFunctionQ {
    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self, CountError> {
        if den.is_zero() {
            return Err(CountError::NonPolynomial("zero denominator".into()));
        }
        Ok(Self::reduced(num.to_rational(), den.to_rational()))
    }

    pub fn from_poly(p: IntPoly) -> Self {
        RationalFunctionQ {
            num: p,
            den: IntPoly::one(),
        }
    }

    /// From polynomials with rational coefficients.
    pub fn from_rational_polys(num: &RatPoly, den: &RatPoly) -> Result<Self, CountError> {
        if den.is_zero() {
            return Err(CountError::NonPolynomial("zero denominator".into()));
        }
        Ok(Self::reduced(num.clone(), den.clone()))
    }

    fn reduced(num: RatPoly, den: RatPoly) -> Self {
        if num.is_zero() {
            return RationalFunctionQ {
                num: IntPoly::zero(),
                den: IntPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let (n_int, n_fac) = n.clear_denominators();
        let (d_int, d_fac) = d.clear_denominators();
        // n/d = (n_int/n_fac) / (d_int/d_fac) = (n_int*d_fac) / (d_int*n_fac)
        let mut num = n_int.scale(&d_fac);
        let mut den = d_int.scale(&n_fac);
        let c = num.content().gcd(&den.content());
        if !c.is_zero() && !c.is_one() {
            num = Poly::new(num.coeffs.iter().map(|x| x / &c).collect());
            den = Poly::new(den.coeffs.iter().map(|x| x / &c).collect());
        }
        if den.leading().is_some_and(|l| l.is_negative()) {
            num = num.neg();
            den = den.neg();
        }
        RationalFunctionQ { num, den }
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0) && self.den.coeff(0).is_one()
    }

    pub fn as_polynomial(&self) -> Option<&IntPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::reduced(num.to_rational(), den.to_rational())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::reduced(
            self.num.mul(&other.num).to_rational(),
            self.den.mul(&other.den).to_rational(),
        )
    }

    pub fn div(&self, other: &Self) -> Result<Self, CountError> {
        if other.num.is_zero() {
            return Err(CountError::NonPolynomial(
                "division by zero rational function".into(),
            ));
        }
        Ok(Self::reduced(
            self.num.mul(&other.den).to_rational(),
            self.den.mul(&other.num).to_rational(),
        ))
    }

    /// Exact value at an integer point.
    pub fn eval(&self, q: i64) -> Option<BigRational> {
        let d = self.den.eval_i64(q);
        (!d.is_zero()).then(|| BigRational::new(self.num.eval_i64(q), d))
    }
}

impl fmt::Display for RationalFunctionQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Interpolates an integer polynomial of degree at most `max_degree` through
/// `samples`, using the first `max_degree + 1` points and checking the rest.
pub fn interpolate(samples: &[(i64, BigInt)], max_degree: usize) -> Result<IntPoly, CountError> {
    if samples.len() < max_degree + 1 {
        return Err(CountError::Interpolation(format!(
            "{} samples cannot fix a degree-{max_degree} polynomial",
            samples.len()
        )));
    }
    let fit = &samples[..=max_degree];
    // Newton divided differences.
    let xs: Vec<BigRational> = fit
        .iter()
        .map(|(x, _)| BigRational::from_integer(BigInt::from(*x)))
        .collect();
    let mut table: Vec<BigRational> = fit
        .iter()
        .map(|(_, y)| BigRational::from_integer(y.clone()))
        .collect();
    for level in 1..fit.len() {
        for i in (level..fit.len()).rev() {
            table[i] = (&table[i] - &table[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut poly = RatPoly::zero();
    let mut basis = RatPoly::one();
    for (i, c) in table.iter().enumerate() {
        poly = poly.add(&basis.scale(c));
        basis = basis.mul(&Poly::new(vec![-xs[i].clone(), BigRational::one()]));
    }
    let ipoly = poly.to_integer().ok_or_else(|| {
        CountError::Interpolation(format!(
            "fitted polynomial {poly} has fractional coefficients"
        ))
    })?;
    for (x, y) in &samples[max_degree + 1..] {
        let v = ipoly.eval_i64(*x);
        if &v != y {
            return Err(CountError::Interpolation(format!(
                "fit {ipoly} predicts {v} at q={x}, sample is {y}"
            )));
        }
    }
    Ok(ipoly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn arithmetic_and_display() {
        let q_minus_1 = ip(&[-1, 1]);
        assert_eq!(q_minus_1.pow(2), ip(&[1, -2, 1]));
        assert_eq!(q_minus_1.pow(2).to_string(), "q^2 - 2*q + 1");
        assert_eq!(ip(&[0, -3]).to_string(), "-3*q");
        assert_eq!(ip(&[1, 2, 3]).reversed(), ip(&[3, 2, 1]));
        assert_eq!(ip(&[1, 1]).compose_power(2), ip(&[1, 0, 1]));
        assert_eq!(ip(&[1, 1, 1]).eval_i64(2), BigInt::from(7));
    }

    #[test]
    fn rational_function_reduces() {
        // (q^2 - 1)/(q - 1) = q + 1
        let r = RationalFunctionQ::new(ip(&[-1, 0, 1]), ip(&[-1, 1])).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.numerator(), &ip(&[1, 1]));
        // 2/(4q - 4) = 1/(2q - 2), sign-normalized
        let r = RationalFunctionQ::new(ip(&[-2]), ip(&[4, -4])).unwrap();
        assert_eq!(r.numerator(), &ip(&[1]));
        assert_eq!(r.denominator(), &ip(&[-2, 2]));
        let sum = r.add(&r);
        assert_eq!(sum.denominator(), &ip(&[-1, 1]));
        assert_eq!(r.eval(3).unwrap(), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn interpolation_checks_extra_samples() {
        let s: Vec<(i64, BigInt)> = [2, 3, 4, 5]
            .iter()
            .map(|&q| (q, BigInt::from(q * q - 1)))
            .collect();
        assert_eq!(interpolate(&s, 2).unwrap(), ip(&[-1, 0, 1]));
        assert!(interpolate(&s, 1).is_err());
        assert!(interpolate(&s[..2], 2).is_err());
    }
}
