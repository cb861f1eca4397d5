//! Dimension-series functors (Sym, tensor, free Lie, enveloping algebra) and the
//! point-count to Borel–Moore series dictionary.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::SeriesError;
use crate::plethysm::{pexp, plog};
use crate::poly::{IntPoly, RationalFunctionQ};
use crate::series::{GradedSeries, TruncationPolicy, KNOWN_ALL};

/// Virtual dimension of a moduli stack; the series twist is `q^{vdim/2}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VirtualDimension(pub i64);

impl VirtualDimension {
    /// `2 r^2 (g - 1)`, the surface-group stacks.
    pub fn surface(g: i64, r: i64) -> Self {
        VirtualDimension(2 * r * r * (g - 1))
    }

    pub fn value(self) -> i64 {
        self.0
    }
}

impl fmt::Display for VirtualDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn sym_series(f: &GradedSeries) -> Result<GradedSeries, SeriesError> {
    pexp(f)
}

/// Series of the tensor algebra: `1 / (1 - f)`.
pub fn tensor_series(f: &GradedSeries) -> Result<GradedSeries, SeriesError> {
    if !f.has_zero_constant_part() {
        return Err(SeriesError::NonzeroConstantPart);
    }
    GradedSeries::one(*f.policy()).sub(f)?.invert_geometric()
}

/// Free Lie algebra series, by inverting PBW against the tensor algebra.
pub fn free_lie_series(f: &GradedSeries) -> Result<GradedSeries, SeriesError> {
    plog(&tensor_series(f)?)
}

pub fn uea_series(g: &GradedSeries) -> Result<GradedSeries, SeriesError> {
    sym_series(g)
}

/// `1 + q + q^2 + ...` in rank 0, truncated at the ceiling.
pub fn bcstar_series(policy: TruncationPolicy) -> Result<GradedSeries, SeriesError> {
    let top = policy.q_max.doubled();
    let terms: BTreeMap<(usize, i64), BigInt> = (0..=top.max(-1))
        .step_by(2)
        .map(|e| ((0, e), BigInt::one()))
        .collect();
    GradedSeries::from_raw(policy, vec![top], terms)
}

/// `|GL_r(F_q)| = prod_{i<r} (q^r - q^i)`.
pub fn gl_order(r: usize) -> IntPoly {
    (0..r).fold(IntPoly::one(), |acc, i| {
        acc.mul(&IntPoly::monomial(r, BigInt::one()).sub(&IntPoly::monomial(i, BigInt::one())))
    })
}

/// Virtual BM series of `pt/GL_r` with virtual dimension `2 r^2 (g - 1)`.
pub fn pt_mod_glr_bm_vir_series(
    r: usize,
    g: i64,
    policy: TruncationPolicy,
) -> Result<GradedSeries, SeriesError> {
    assert!(r >= 1, "rank must be positive");
    let count = RationalFunctionQ::new(IntPoly::one(), gl_order(r)).expect("nonzero group order");
    bm_vir_from_count(&count, VirtualDimension::surface(g, r as i64), policy)
}

/// `P(q^{-1}) q^{vdim/2}` expanded as a power series upward from its lowest
/// exponent, placed in rank 0.
pub fn bm_vir_from_count(
    count: &RationalFunctionQ,
    vdim: VirtualDimension,
    policy: TruncationPolicy,
) -> Result<GradedSeries, SeriesError> {
    let num = count.numerator();
    let den = count.denominator();
    if num.is_zero() {
        return Ok(GradedSeries::zero(policy));
    }
    // N(1/q)/D(1/q) = q^{deg D - deg N} rev(N)(q) / rev(D)(q)
    let rn = num.reversed();
    let rd = den.reversed();
    let lead = rd.coeff(0);
    if !lead.abs().is_one() {
        return Err(SeriesError::Expansion(format!(
            "({count}) at q -> 1/q: leading denominator coefficient {lead} is not a unit"
        )));
    }
    let base2 = 2 * (den.degree().unwrap() as i64 - num.degree().unwrap() as i64) + vdim.0;
    let exact = rd.degree() == Some(0);
    let ceil2 = policy.q_max.doubled();
    let mut terms = BTreeMap::new();
    if exact {
        for (i, c) in rn.coeffs().iter().enumerate() {
            terms.insert((0, base2 + 2 * i as i64), c * &lead);
        }
        return GradedSeries::from_raw(policy, vec![KNOWN_ALL], terms);
    }
    let len = if ceil2 < base2 {
        0
    } else {
        ((ceil2 - base2) / 2 + 1) as usize
    };
    let mut c: Vec<BigInt> = Vec::with_capacity(len);
    for i in 0..len {
        let mut v = rn.coeff(i);
        for j in 1..=i.min(rd.degree().unwrap()) {
            v -= rd.coeff(j) * &c[i - j];
        }
        // lead is +-1
        c.push(v * &lead);
    }
    for (i, v) in c.into_iter().enumerate() {
        terms.insert((0, base2 + 2 * i as i64), v);
    }
    GradedSeries::from_raw(policy, vec![ceil2], terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{divisors, mobius};
    use crate::series::{coeff_i64, int_terms, HalfInt};
    use proptest::prelude::*;

    fn h(v: i64) -> HalfInt {
        HalfInt::from_int(v)
    }

    fn ip(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn tensor_and_sym_examples() {
        let p = TruncationPolicy::ints(5, 0, 4).unwrap();
        let two_t = int_terms(&[(1, 0, 2)], p).unwrap();
        assert_eq!(coeff_i64(&sym_series(&two_t).unwrap(), 3, h(0)).unwrap(), 4);
        let ten = tensor_series(&two_t).unwrap();
        for n in 0..=5 {
            assert_eq!(coeff_i64(&ten, n, h(0)).unwrap(), 1 << n);
        }
        let t_t2 = int_terms(&[(1, 0, 1), (2, 0, 1)], p).unwrap();
        assert_eq!(
            coeff_i64(&tensor_series(&t_t2).unwrap(), 3, h(0)).unwrap(),
            3
        );
        assert_eq!(
            uea_series(&GradedSeries::zero(p)).unwrap(),
            GradedSeries::one(p)
        );
    }

    fn necklace(k: i64, n: u64) -> i64 {
        divisors(n)
            .iter()
            .map(|&d| mobius(d) * k.pow((n / d) as u32))
            .sum::<i64>()
            / n as i64
    }

    #[test]
    fn free_lie_matches_necklace_formula() {
        let p = TruncationPolicy::ints(8, 0, 0).unwrap();
        let two_t = int_terms(&[(1, 0, 2)], p).unwrap();
        let lie = free_lie_series(&two_t).unwrap();
        for n in 1..=8 {
            assert_eq!(
                coeff_i64(&lie, n, h(0)).unwrap(),
                necklace(2, n as u64),
                "degree {n}"
            );
        }
        let one_t = int_terms(&[(1, 0, 1)], p).unwrap();
        assert_eq!(free_lie_series(&one_t).unwrap(), one_t);
    }

    #[test]
    fn bcstar_times_one_minus_q() {
        let p = TruncationPolicy::ints(0, 0, 3).unwrap();
        let b = bcstar_series(p).unwrap();
        assert_eq!(b.len(), 4);
        let one_minus_q = int_terms(&[(0, 0, 1), (0, 2, -1)], p).unwrap();
        assert!(b
            .mul(&one_minus_q)
            .unwrap()
            .first_difference(&GradedSeries::one(p))
            .is_none());
    }

    #[test]
    fn dictionary_cases() {
        let p = TruncationPolicy::ints(0, -10, 10).unwrap();
        // pt/C*: 1/(q-1), vdim -2
        let c = RationalFunctionQ::new(ip(&[1]), ip(&[-1, 1])).unwrap();
        let s = bm_vir_from_count(&c, VirtualDimension(-2), p).unwrap();
        assert_eq!(s, bcstar_series(p).unwrap());
        // (q-1)^3 with vdim 2 is -(q-1)^3 q^{-2} after reflection
        let c = RationalFunctionQ::from_poly(ip(&[-1, 1]).pow(3));
        let s = bm_vir_from_count(&c, VirtualDimension(2), p).unwrap();
        let want = int_terms(&[(0, -4, 1), (0, -2, -3), (0, 0, 3), (0, 2, -1)], p).unwrap();
        assert_eq!(s, want);
        assert!(s.is_exact());
        let one = RationalFunctionQ::from_poly(ip(&[1]));
        assert_eq!(
            bm_vir_from_count(&one, VirtualDimension(0), p).unwrap(),
            GradedSeries::one(p)
        );
        let bad = RationalFunctionQ::new(ip(&[1]), ip(&[-1, 2])).unwrap();
        assert!(matches!(
            bm_vir_from_count(&bad, VirtualDimension(0), p),
            Err(SeriesError::Expansion(_))
        ));
    }

    #[test]
    fn pt_mod_gl_series() {
        let p = TruncationPolicy::ints(0, -20, 12).unwrap();
        let s1 = pt_mod_glr_bm_vir_series(1, 0, p).unwrap();
        assert_eq!(s1, bcstar_series(p).unwrap());
        // 1/((1-q)(1-q^2)): coefficient of q^k is floor(k/2)+1
        let s2 = pt_mod_glr_bm_vir_series(2, 0, p).unwrap();
        for k in 0..=12 {
            assert_eq!(coeff_i64(&s2, 0, h(k)).unwrap(), k / 2 + 1);
        }
        for g in 0..4 {
            let s = pt_mod_glr_bm_vir_series(1, g, p).unwrap();
            let one_minus_q = int_terms(&[(0, 0, 1), (0, 2, -1)], p).unwrap();
            let want = int_terms(&[(0, 2 * g, 1)], p).unwrap();
            assert!(s
                .mul(&one_minus_q)
                .unwrap()
                .first_difference(&want)
                .is_none());
        }
    }

    fn arb_count() -> impl Strategy<Value = RationalFunctionQ> {
        (prop::collection::vec(-3i64..4, 1..4), 0usize..3, 0usize..3).prop_map(|(num, a, b)| {
            let mut n = ip(&num);
            if n.is_zero() {
                n = ip(&[1]);
            }
            // denominators (q^a - 1)(q - 1)^b keep the reflected expansion integral
            let mut d = ip(&[1]);
            if a > 0 {
                d = d.mul(&IntPoly::monomial(a, BigInt::one()).sub(&ip(&[1])));
            }
            d = d.mul(&ip(&[-1, 1]).pow(b as u32));
            RationalFunctionQ::new(n, d).unwrap()
        })
    }

    proptest! {
        #[test]
        fn dictionary_is_multiplicative(a in arb_count(), b in arb_count(), va in -3i64..3, vb in -3i64..3) {
            let p = TruncationPolicy::ints(0, -30, 8).unwrap();
            let sa = bm_vir_from_count(&a, VirtualDimension(2 * va), p).unwrap();
            let sb = bm_vir_from_count(&b, VirtualDimension(2 * vb), p).unwrap();
            let sab = bm_vir_from_count(&a.mul(&b), VirtualDimension(2 * (va + vb)), p).unwrap();
            let prod = sa.mul(&sb).unwrap();
            prop_assert!(prod.first_difference(&sab).is_none());
        }

        #[test]
        fn pbw_roundtrip(c in prop::collection::vec((1usize..4, 0i64..3, 0i64..3), 0..5)) {
            let p = TruncationPolicy::ints(5, 0, 6).unwrap();
            let f = int_terms(&c.iter().map(|&(n, e, a)| (n, 2 * e, a)).collect::<Vec<_>>(), p).unwrap();
            let lie = free_lie_series(&f).unwrap();
            prop_assert!(lie.is_nonnegative());
            let lhs = pexp(&lie).unwrap();
            let rhs = tensor_series(&f).unwrap();
            prop_assert!(lhs.first_difference(&rhs).is_none());
        }
    }
}
