//! Point counts of twisted character stacks and varieties over `F_q`.
//!
//! Two independent routes are provided: brute-force enumeration of solutions of
//! `prod [A_i, B_i] = z` in an explicit `GL_r(F_q)`, and the Frobenius
//! character sum `|G|^{2g-1} sum_chi omega_chi(z) chi(1)^{2-2g}` evaluated
//! symbolically from character degree data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::prime_powers;
use crate::error::CountError;
use crate::group::{
    brute_class_count, build_group, rcf_class_count, GroupModel, GroupTables, DEFAULT_GROUP_CAP,
};
use crate::lie::{bm_vir_from_count, gl_order, VirtualDimension};
use crate::poly::{interpolate, IntPoly, RatPoly, RationalFunctionQ};
use crate::series::{GradedSeries, TruncationPolicy, KNOWN_ALL};

/// Default cap on the number of enumerated relation tuples.
pub const DEFAULT_TUPLE_BUDGET: u128 = 200_000_000;

/// One family of irreducible characters sharing a degree and a central sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterFamily {
    pub name: &'static str,
    pub degree: IntPoly,
    pub multiplicity: RatPoly,
    /// `omega_chi(-I)`; only meaningful when `-I != I`.
    pub sign_at_minus_one: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterDegreeData {
    pub rank: usize,
    pub families: Vec<CharacterFamily>,
}

fn ip(c: &[i64]) -> IntPoly {
    IntPoly::from_i64s(c)
}

fn quarter(p: IntPoly) -> RatPoly {
    p.to_rational()
        .scale(&BigRational::new(BigInt::one(), BigInt::from(4)))
}

impl CharacterDegreeData {
    pub fn gl1() -> Self {
        CharacterDegreeData {
            rank: 1,
            families: vec![CharacterFamily {
                name: "linear",
                degree: ip(&[1]),
                multiplicity: ip(&[-1, 1]).to_rational(),
                sign_at_minus_one: 1,
            }],
        }
    }

    /// `GL_2(F_q)`, with the principal-series and cuspidal families split by
    /// the parity of their parameters so that each part has a constant
    /// central sign at `-I` (`q` odd).
    pub fn gl2() -> Self {
        let qm1 = ip(&[-1, 1]);
        let fam = |name, degree: IntPoly, multiplicity: RatPoly, sign| CharacterFamily {
            name,
            degree,
            multiplicity,
            sign_at_minus_one: sign,
        };
        CharacterDegreeData {
            rank: 2,
            families: vec![
                fam("linear", ip(&[1]), qm1.to_rational(), 1),
                fam("steinberg", ip(&[0, 1]), qm1.to_rational(), 1),
                fam(
                    "principal-even",
                    ip(&[1, 1]),
                    quarter(qm1.mul(&ip(&[-3, 1]))),
                    1,
                ),
                fam("principal-odd", ip(&[1, 1]), quarter(qm1.pow(2)), -1),
                fam("cuspidal-even", ip(&[-1, 1]), quarter(qm1.pow(2)), 1),
                fam("cuspidal-odd", ip(&[-1, 1]), quarter(ip(&[-1, 0, 1])), -1),
            ],
        }
    }

    pub fn for_rank(rank: usize) -> Result<Self, CountError> {
        match rank {
            1 => Ok(Self::gl1()),
            2 => Ok(Self::gl2()),
            _ => Err(CountError::Unsupported(format!(
                "no character degree data for GL_{rank}"
            ))),
        }
    }

    /// Copy with one family's central sign negated.
    pub fn with_flipped_sign(&self, family: &str) -> Self {
        let mut out = self.clone();
        for f in out.families.iter_mut().filter(|f| f.name == family) {
            f.sign_at_minus_one = -f.sign_at_minus_one;
        }
        out
    }

    /// `sum multiplicity` as a polynomial.
    pub fn class_count_poly(&self) -> RatPoly {
        self.families
            .iter()
            .fold(RatPoly::zero(), |acc, f| acc.add(&f.multiplicity))
    }

    fn weighted_square_sum(&self, signed: bool) -> RatPoly {
        self.families.iter().fold(RatPoly::zero(), |acc, f| {
            let d2 = f.degree.pow(2).to_rational();
            let s = if signed {
                f.sign_at_minus_one as i64
            } else {
                1
            };
            acc.add(
                &f.multiplicity
                    .mul(&d2)
                    .scale(&BigRational::from_integer(s.into())),
            )
        })
    }

    /// Degree-sum and column-orthogonality identities.
    pub fn validate(&self) -> Result<(), CountError> {
        let order = gl_order(self.rank).to_rational();
        let total = self.weighted_square_sum(false);
        if total != order {
            return Err(CountError::CharacterData(format!(
                "sum mult*deg^2 = {total}, |G| = {order}"
            )));
        }
        if self.rank == 2 {
            let signed = self.weighted_square_sum(true);
            if !signed.is_zero() {
                return Err(CountError::CharacterData(format!(
                    "sum sign*mult*deg^2 = {signed}, expected 0 (columns at I and -I)"
                )));
            }
            let classes = self.class_count_poly();
            let want = ip(&[-1, 0, 1]).to_rational();
            if classes != want {
                return Err(CountError::CharacterData(format!(
                    "sum mult = {classes}, class count is {want}"
                )));
            }
        }
        Ok(())
    }
}

/// Symbolic number of solutions of `prod_{i<=g} [A_i, B_i] = zeta_r^d I`.
pub fn frobenius_count(
    r: usize,
    g: u32,
    d: i64,
    data: &CharacterDegreeData,
) -> Result<RationalFunctionQ, CountError> {
    if data.rank != r || !(1..=2).contains(&r) {
        return Err(CountError::Unsupported(format!(
            "Frobenius count needs rank-{r} data for r in 1..=2"
        )));
    }
    let twisted = d.rem_euclid(r as i64) != 0;
    let mut sum = RationalFunctionQ::from_poly(IntPoly::zero());
    for f in &data.families {
        let sign = if twisted {
            f.sign_at_minus_one as i64
        } else {
            1
        };
        let m = f
            .multiplicity
            .scale(&BigRational::from_integer(sign.into()));
        let term = if g == 0 {
            RationalFunctionQ::from_rational_polys(
                &m.mul(&f.degree.pow(2).to_rational()),
                &RatPoly::one(),
            )?
        } else {
            RationalFunctionQ::from_rational_polys(&m, &f.degree.pow(2 * g - 2).to_rational())?
        };
        sum = sum.add(&term);
    }
    let order = RationalFunctionQ::from_poly(gl_order(r));
    let scaled = if g == 0 {
        sum.div(&order)?
    } else {
        sum.mul(&RationalFunctionQ::from_poly(gl_order(r).pow(2 * g - 1)))
    };
    if !scaled.is_polynomial() {
        return Err(CountError::NonPolynomial(format!(
            "Frobenius sum reduces to {scaled}"
        )));
    }
    Ok(scaled)
}

/// Exact number of `2g`-tuples in `G` with `prod [A_i, B_i] = central`.
pub fn brute_relation_count(
    group: &GroupModel,
    g: u32,
    central: usize,
    budget: u128,
) -> Result<u128, CountError> {
    let c = &group.elements()[central];
    let ops = group.ops();
    let lam = c[0];
    if lam == 0 || *c != ops.scalar(lam) {
        return Err(CountError::BadCentral);
    }
    if g == 0 {
        return Ok((central == group.identity_index()) as u128);
    }
    let n = group.order() as u128;
    let tuples = n.checked_pow(2 * g).unwrap_or(u128::MAX);
    if tuples > budget {
        return Err(CountError::Budget {
            what: format!("{}-tuples in GL_{}(F_{})", 2 * g, group.rank(), group.q()),
            needed: tuples,
            budget,
        });
    }
    let t = group.tables(budget.max(n * n))?;
    Ok(count_with_tables(&t, g, central as u32))
}

fn count_with_tables(t: &GroupTables, g: u32, z: u32) -> u128 {
    fn rec(t: &GroupTables, pairs: u32, prefix: u32, z: u32) -> u128 {
        let n = t.n;
        if pairs == 0 {
            return (prefix == z) as u128;
        }
        let row = prefix as usize * n;
        let mut total = 0;
        for a in 0..n {
            for b in 0..n {
                let next = t.mul[row + t.comm[a * n + b] as usize];
                total += rec(t, pairs - 1, next, z);
            }
        }
        total
    }
    let n = t.n;
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut total = 0;
            for b in 0..n {
                total += rec(t, g - 1, t.comm[a * n + b], z);
            }
            total
        })
        .sum()
}

pub fn class_count(group: &GroupModel) -> usize {
    brute_class_count(group)
}

/// One `(q, value)` observation, as emitted by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSample {
    pub q: u64,
    pub count: String,
}

/// Class counts of `GL_r(F_q)` at the first `max_degree + 2` prime powers,
/// by orbit enumeration (`r <= 2`) or rational canonical forms (`r = 3`).
pub fn class_count_samples(
    r: usize,
    n: usize,
    cap: u128,
) -> Result<Vec<(u64, BigInt)>, CountError> {
    prime_powers()
        .take(n)
        .map(|q| {
            let k = if r <= 2 {
                class_count(&build_group(r, q, cap)?) as u128
            } else {
                rcf_class_count(r, q)?
            };
            Ok((q, BigInt::from(k)))
        })
        .collect()
}

/// Class-count polynomial of `GL_r`, fitted with one spare sample.
pub fn fit_class_count_poly(r: usize, cap: u128) -> Result<IntPoly, CountError> {
    let samples: Vec<(i64, BigInt)> = class_count_samples(r, r + 2, cap)?
        .into_iter()
        .map(|(q, k)| (q as i64, k))
        .collect();
    interpolate(&samples, r)
}

/// Where a stack count came from, recorded in reports.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountOracle {
    ClosedForm,
    Frobenius,
    ClassCountFit,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StackOracle {
    Auto,
    Frobenius,
    ClassCounts,
}

/// Character data and caps used by the counting routines.
#[derive(Clone, Debug)]
pub struct CountConfig {
    pub gl1: CharacterDegreeData,
    pub gl2: CharacterDegreeData,
    pub group_cap: u128,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            gl1: CharacterDegreeData::gl1(),
            gl2: CharacterDegreeData::gl2(),
            group_cap: DEFAULT_GROUP_CAP,
        }
    }
}

impl CountConfig {
    pub fn data(&self, r: usize) -> Result<&CharacterDegreeData, CountError> {
        match r {
            1 => Ok(&self.gl1),
            2 => Ok(&self.gl2),
            _ => Err(CountError::Unsupported(format!(
                "no character degree data for GL_{r}"
            ))),
        }
    }
}

/// Number of solutions of the twisted relation, as a polynomial in `q`.
pub fn relation_count(
    g: u32,
    r: usize,
    d: i64,
    oracle: StackOracle,
    cfg: &CountConfig,
) -> Result<(IntPoly, CountOracle), CountError> {
    let central_is_identity = d.rem_euclid(r as i64) == 0;
    if g == 0 {
        let v = if central_is_identity {
            IntPoly::one()
        } else {
            IntPoly::zero()
        };
        return Ok((v, CountOracle::ClosedForm));
    }
    let use_classes = match oracle {
        StackOracle::ClassCounts => true,
        StackOracle::Frobenius => false,
        StackOracle::Auto => r > 2,
    };
    if use_classes {
        if g != 1 || !central_is_identity {
            return Err(CountError::Unsupported(
                "class counts give only the untwisted genus-1 count".into(),
            ));
        }
        let k = fit_class_count_poly(r, cfg.group_cap)?;
        return Ok((k.mul(&gl_order(r)), CountOracle::ClassCountFit));
    }
    let rf = frobenius_count(r, g, d, cfg.data(r)?)?;
    let n = rf
        .as_polynomial()
        .ok_or_else(|| CountError::NonPolynomial(format!("relation count reduces to {rf}")))?;
    Ok((n.clone(), CountOracle::Frobenius))
}

/// `|R_{g,r,d}(F_q)| / |GL_r(F_q)|`.
pub fn stack_count(
    g: u32,
    r: usize,
    d: i64,
    oracle: StackOracle,
    cfg: &CountConfig,
) -> Result<(RationalFunctionQ, CountOracle), CountError> {
    let (n, o) = relation_count(g, r, d, oracle, cfg)?;
    Ok((RationalFunctionQ::new(n, gl_order(r))?, o))
}

pub fn stack_count_series(
    g: u32,
    r: usize,
    d: i64,
    vdim: VirtualDimension,
    oracle: StackOracle,
    cfg: &CountConfig,
    policy: TruncationPolicy,
) -> Result<(GradedSeries, CountOracle), CountError> {
    let (count, o) = stack_count(g, r, d, oracle, cfg)?;
    Ok((bm_vir_from_count(&count, vdim, policy)?, o))
}

/// Point count of the smooth twisted character variety: the relation count
/// divided by `|GL_r| / (q - 1)`.
pub fn smooth_twisted_count(
    g: u32,
    r: usize,
    d: i64,
    cfg: &CountConfig,
) -> Result<(IntPoly, CountOracle), CountError> {
    if (r as i64).gcd(&d) != 1 {
        return Err(CountError::Unsupported(format!("gcd({r}, {d}) != 1")));
    }
    let (n, o) = relation_count(g, r, d, StackOracle::Frobenius, cfg)?;
    let pgl = RationalFunctionQ::new(gl_order(r), ip(&[-1, 1]))?;
    let c = RationalFunctionQ::from_poly(n).div(&pgl)?;
    let p = c
        .as_polynomial()
        .ok_or_else(|| CountError::NonPolynomial(format!("smooth count reduces to {c}")))?
        .clone();
    Ok((p, o))
}

/// `P(q) q^{-r^2 (g - 1) - 1}` in rank 0.
pub fn smooth_twisted_series(
    g: u32,
    r: usize,
    d: i64,
    cfg: &CountConfig,
    policy: TruncationPolicy,
) -> Result<(GradedSeries, CountOracle), CountError> {
    let (p, o) = smooth_twisted_count(g, r, d, cfg)?;
    let shift2 = -2 * ((r * r) as i64 * (g as i64 - 1) + 1);
    let terms = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| ((0usize, shift2 + 2 * i as i64), c.clone()))
        .collect();
    Ok((GradedSeries::from_raw(policy, vec![KNOWN_ALL], terms)?, o))
}
