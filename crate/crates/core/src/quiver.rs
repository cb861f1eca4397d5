//! Quivers, Euler forms, and Kac polynomials by counting representations over
//! finite fields.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, mobius, multichoose, prime_powers};
use crate::error::{CountError, QuiverError};
use crate::ff::Field;
use crate::group::{gl_order_value, Mat, MatOps, MAX_RANK};
use crate::lie::VirtualDimension;
use crate::poly::{interpolate, IntPoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quiver {
    vertices: usize,
    arrows: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertices: usize, arrows: Vec<(usize, usize)>) -> Result<Self, QuiverError> {
        for &(s, t) in &arrows {
            for v in [s, t] {
                if v >= vertices {
                    return Err(QuiverError::BadVertex(v));
                }
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    /// One vertex with `g` loops.
    pub fn loops(g: usize) -> Self {
        Quiver {
            vertices: 1,
            arrows: vec![(0, 0); g],
        }
    }

    pub fn jordan() -> Self {
        Self::loops(1)
    }

    /// `0 -> 1 -> ... -> n-1`.
    pub fn linear(n: usize) -> Self {
        Quiver {
            vertices: n,
            arrows: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn parse(text: &str) -> Result<Self, QuiverError> {
        let err = |line: usize, msg: String| QuiverError::Parse { line, msg };
        let mut vertices: Option<usize> = None;
        let mut arrows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, rest) = content
                .split_once(':')
                .ok_or_else(|| err(line, format!("expected `key: value`, found `{content}`")))?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(line, format!("`{s}` is not a nonnegative integer")))
            };
            match key.trim() {
                "vertices" => {
                    if vertices.is_some() {
                        return Err(err(line, "vertex count declared twice".into()));
                    }
                    if fields.len() != 1 {
                        return Err(err(line, "`vertices:` takes one count".into()));
                    }
                    vertices = Some(num(fields[0])?);
                }
                "arrow" => {
                    let n = vertices
                        .ok_or_else(|| err(line, "arrow before `vertices:` line".into()))?;
                    if fields.len() != 2 {
                        return Err(err(line, "`arrow:` takes a source and a target".into()));
                    }
                    let (s, t) = (num(fields[0])?, num(fields[1])?);
                    for v in [s, t] {
                        if v >= n {
                            return Err(err(line, format!("vertex {v} out of range 0..{n}")));
                        }
                    }
                    arrows.push((s, t));
                }
                other => return Err(err(line, format!("unknown key `{other}`"))),
            }
        }
        let vertices = vertices.ok_or_else(|| {
            err(
                text.lines().count().max(1),
                "missing `vertices:` line".into(),
            )
        })?;
        Quiver::new(vertices, arrows)
    }
}

impl FromStr for Quiver {
    type Err = QuiverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quiver::parse(s)
    }
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices: {}", self.vertices)?;
        for (s, t) in &self.arrows {
            writeln!(f, "arrow: {s} {t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(pub Vec<u64>);

impl DimVector {
    pub fn new(entries: Vec<u64>) -> Self {
        DimVector(entries)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn check(&self, q: &Quiver) -> Result<(), QuiverError> {
        if self.0.len() != q.vertices {
            return Err(QuiverError::DimMismatch {
                expected: q.vertices,
                got: self.0.len(),
            });
        }
        Ok(())
    }

    fn gcd(&self) -> u64 {
        self.0.iter().fold(0, |g, &x| g.gcd(&x))
    }

    fn div(&self, s: u64) -> DimVector {
        DimVector(self.0.iter().map(|&x| x / s).collect())
    }

    /// All `e` with `0 <= e <= self` componentwise, `e != 0`, by increasing total.
    fn sub_vectors(&self) -> Vec<DimVector> {
        let mut out = vec![Vec::new()];
        for &d in &self.0 {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u64>| (0..=d).map(move |x| [v.clone(), vec![x]].concat()))
                .collect();
        }
        let mut out: Vec<DimVector> = out
            .into_iter()
            .map(DimVector)
            .filter(|v| !v.is_zero())
            .collect();
        out.sort_by_key(|v| (v.total(), v.0.clone()));
        out
    }
}

impl FromStr for DimVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| format!("`{}` is not a nonnegative integer", p.trim()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(DimVector)
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `chi_Q(d, e) = sum_i d_i e_i - sum_a d_{s(a)} e_{t(a)}`.
pub fn euler_form(q: &Quiver, d: &DimVector, e: &DimVector) -> Result<i64, QuiverError> {
    d.check(q)?;
    e.check(q)?;
    let diag: i64 = d.0.iter().zip(&e.0).map(|(&a, &b)| (a * b) as i64).sum();
    let off: i64 = q
        .arrows
        .iter()
        .map(|&(s, t)| (d.0[s] * e.0[t]) as i64)
        .sum();
    Ok(diag - off)
}

pub fn sym_euler(q: &Quiver, d: &DimVector, e: &DimVector) -> Result<i64, QuiverError> {
    Ok(euler_form(q, d, e)? + euler_form(q, e, d)?)
}

/// `1 - (d1, d2)_Q`, defined when the symmetrized form is nonpositive.
pub fn serre_exponent(q: &Quiver, d1: &DimVector, d2: &DimVector) -> Result<i64, QuiverError> {
    let s = sym_euler(q, d1, d2)?;
    if s > 0 {
        return Err(QuiverError::PositiveForm(s));
    }
    Ok(1 - s)
}

/// Arrows `a`, reversed arrows `a*`, then one loop per vertex.
pub fn triple_quiver(q: &Quiver) -> Quiver {
    let mut arrows = q.arrows.clone();
    arrows.extend(q.arrows.iter().map(|&(s, t)| (t, s)));
    arrows.extend((0..q.vertices).map(|i| (i, i)));
    Quiver {
        vertices: q.vertices,
        arrows,
    }
}

pub fn preproj_vdim(q: &Quiver, d: &DimVector) -> Result<VirtualDimension, QuiverError> {
    Ok(VirtualDimension(-2 * euler_form(q, d, d)?))
}

/// Absolutely indecomposable counts as an integer polynomial in `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KacPolynomial(pub IntPoly);

impl KacPolynomial {
    pub fn poly(&self) -> &IntPoly {
        &self.0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.is_nonnegative()
    }
}

impl fmt::Display for KacPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Default cap on `|prod_i GL_{d_i}(F_q)|` for one Burnside sum.
pub const DEFAULT_REP_GROUP_CAP: u128 = 200_000;

fn nullity_of_twisted_commutator(
    f: &Field,
    gt: &Mat,
    dt: usize,
    gs: &Mat,
    ds: usize,
    buf: &mut Vec<u8>,
) -> u32 {
    let n = dt * ds;
    buf.clear();
    buf.resize(n * n, 0);
    // row (i, j), column (k, l): gt[i][k] delta(j, l) - delta(i, k) gs[l][j]
    for i in 0..dt {
        for j in 0..ds {
            let row = (i * ds + j) * n;
            for k in 0..dt {
                for l in 0..ds {
                    let mut v = if j == l { gt[i * MAX_RANK + k] } else { 0 };
                    if i == k {
                        v = f.sub(v, gs[l * MAX_RANK + j]);
                    }
                    buf[row + k * ds + l] = v;
                }
            }
        }
    }
    (n - f.rank(buf, n, n)) as u32
}

/// Isomorphism classes of `d`-dimensional representations over `F_q`, by
/// Burnside's lemma for the `prod GL_{d_i}` action.
pub fn count_rep_classes(
    quiver: &Quiver,
    d: &DimVector,
    q: u64,
    cap: u128,
) -> Result<BigInt, QuiverError> {
    d.check(quiver)?;
    let field = Field::new(q)?;
    if let Some(&big) = d.0.iter().find(|&&x| x as usize > MAX_RANK) {
        return Err(
            CountError::Unsupported(format!("vertex dimension {big} exceeds {MAX_RANK}")).into(),
        );
    }
    let order: u128 = d.0.iter().fold(1u128, |acc, &di| {
        acc.saturating_mul(gl_order_value(di as usize, q))
    });
    if order > cap {
        return Err(CountError::Budget {
            what: format!("|GL_{d}(F_{q})|"),
            needed: order,
            budget: cap,
        }
        .into());
    }
    let groups: Vec<Vec<Mat>> =
        d.0.iter()
            .map(|&di| {
                if di == 0 {
                    vec![[0; MAX_RANK * MAX_RANK]]
                } else {
                    MatOps::new(di as usize, field.clone()).enumerate_gl()
                }
            })
            .collect();
    let sizes: Vec<u64> = groups.iter().map(|g| g.len() as u64).collect();
    let max_exp: usize = quiver
        .arrows
        .iter()
        .map(|&(s, t)| (d.0[s] * d.0[t]) as usize)
        .sum();
    let hist = (0..order as u64)
        .into_par_iter()
        .fold(
            || (vec![0u64; max_exp + 1], Vec::new()),
            |(mut hist, mut buf), mut code| {
                let mut pick: Vec<&Mat> = Vec::with_capacity(groups.len());
                for (g, &n) in groups.iter().zip(&sizes) {
                    pick.push(&g[(code % n) as usize]);
                    code /= n;
                }
                let mut e = 0;
                for &(s, t) in &quiver.arrows {
                    let (ds, dt) = (d.0[s] as usize, d.0[t] as usize);
                    if ds > 0 && dt > 0 {
                        e += nullity_of_twisted_commutator(
                            &field, pick[t], dt, pick[s], ds, &mut buf,
                        );
                    }
                }
                hist[e as usize] += 1;
                (hist, buf)
            },
        )
        .map(|(h, _)| h)
        .reduce(
            || vec![0u64; max_exp + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let qb = BigInt::from(q);
    let total: BigInt = hist
        .iter()
        .enumerate()
        .map(|(e, &c)| BigInt::from(c) * qb.pow(e as u32))
        .sum();
    let (quot, rem) = total.div_rem(&BigInt::from(order));
    assert!(
        rem.is_zero(),
        "Burnside sum not divisible by the group order"
    );
    Ok(quot)
}

/// Indecomposable counts from all-representation counts:
/// `sum_e M_e x^e = prod_e (1 - x^e)^{-I_e}`.
fn krull_schmidt_invert(
    dims: &[DimVector],
    box_dim: &DimVector,
    m: &HashMap<DimVector, BigInt>,
) -> HashMap<DimVector, BigInt> {
    let k = box_dim.0.len();
    let strides: Vec<usize> = (0..k)
        .scan(1usize, |acc, i| {
            let s = *acc;
            *acc *= box_dim.0[i] as usize + 1;
            Some(s)
        })
        .collect();
    let size: usize = box_dim.0.iter().map(|&x| x as usize + 1).product();
    let encode = |v: &DimVector| {
        v.0.iter()
            .zip(&strides)
            .map(|(&x, &s)| x as usize * s)
            .sum::<usize>()
    };
    let decode = |mut c: usize| -> Vec<u64> {
        box_dim
            .0
            .iter()
            .map(|&b| {
                let x = c % (b as usize + 1);
                c /= b as usize + 1;
                x as u64
            })
            .collect()
    };
    let mut prod = vec![BigInt::zero(); size];
    prod[0] = BigInt::one();
    let mut out = HashMap::new();
    for e in dims {
        let ie = &m[e] - &prod[encode(e)];
        // multiply prod by (1 - x^e)^{-ie}, truncated to the box
        let mut next = vec![BigInt::zero(); size];
        for (c, v) in prod.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let base = decode(c);
            for j in 0.. {
                let target: Option<Vec<u64>> = base
                    .iter()
                    .zip(&e.0)
                    .zip(&box_dim.0)
                    .map(|((&b, &x), &lim)| {
                        let t = b + j * x;
                        (t <= lim).then_some(t)
                    })
                    .collect();
                let Some(t) = target else { break };
                next[encode(&DimVector(t))] += v * multichoose(&ie, j as usize);
            }
        }
        prod = next;
        out.insert(e.clone(), ie);
    }
    out
}

/// Options for [`kac_polynomial`].
#[derive(Clone, Debug)]
pub struct KacOptions {
    /// Field sizes to count over; empty selects the first prime powers needed.
    pub samples: Vec<u64>,
    pub group_cap: u128,
    pub max_total_dim: u64,
}

impl Default for KacOptions {
    fn default() -> Self {
        KacOptions {
            samples: Vec::new(),
            group_cap: DEFAULT_REP_GROUP_CAP,
            max_total_dim: 4,
        }
    }
}

fn degree_bound(quiver: &Quiver, e: &DimVector) -> Result<usize, QuiverError> {
    Ok((1 - euler_form(quiver, e, e)?).max(0) as usize)
}

/// Kac polynomial `a_{Q,d}(q)`: representation counts at several `q`,
/// Krull–Schmidt inversion to indecomposables, Galois descent to absolutely
/// indecomposables, then interpolation with one spare sample as a check.
pub fn kac_polynomial(
    quiver: &Quiver,
    d: &DimVector,
    opts: &KacOptions,
) -> Result<KacPolynomial, QuiverError> {
    d.check(quiver)?;
    if d.is_zero() {
        return Err(CountError::Unsupported("zero dimension vector".into()).into());
    }
    if d.total() > opts.max_total_dim {
        return Err(CountError::Unsupported(format!(
            "total dimension {} exceeds the configured limit {}",
            d.total(),
            opts.max_total_dim
        ))
        .into());
    }
    let dims = d.sub_vectors();
    let bounds: Vec<usize> = dims
        .iter()
        .map(|e| degree_bound(quiver, e))
        .collect::<Result<_, _>>()?;
    let needed = bounds.iter().max().copied().unwrap_or(0) + 2;
    let samples: Vec<u64> = if opts.samples.is_empty() {
        prime_powers().take(needed).collect()
    } else {
        opts.samples.clone()
    };
    if samples.len() < needed {
        return Err(CountError::Interpolation(format!(
            "{} samples given, {needed} needed",
            samples.len()
        ))
        .into());
    }
    // indecomposable counts per sample
    let mut indec: Vec<HashMap<DimVector, BigInt>> = Vec::new();
    for &q in &samples {
        let m: HashMap<DimVector, BigInt> = dims
            .iter()
            .map(|e| Ok((e.clone(), count_rep_classes(quiver, e, q, opts.group_cap)?)))
            .collect::<Result<_, QuiverError>>()?;
        indec.push(krull_schmidt_invert(&dims, d, &m));
    }
    let mut fitted: HashMap<DimVector, IntPoly> = HashMap::new();
    for (e, &bound) in dims.iter().zip(&bounds) {
        let mut points = Vec::with_capacity(samples.len());
        for (qi, &q) in samples.iter().enumerate() {
            // I_e(q) = sum_{s | e} (1/s) sum_{k | s} mu(s/k) A_{e/s}(q^k)
            let mut value = BigRational::from_integer(indec[qi][e].clone());
            for s in divisors(e.gcd()).into_iter().filter(|&s| s > 1) {
                let a = &fitted[&e.div(s)];
                let mut inner = BigInt::zero();
                for k in divisors(s) {
                    let qk = BigInt::from(q).pow(k as u32);
                    inner += a.eval(&qk) * mobius(s / k);
                }
                value -= BigRational::new(inner, BigInt::from(s));
            }
            if !value.is_integer() {
                return Err(CountError::Interpolation(format!(
                    "absolutely indecomposable count for {e} at q={q} is {value}"
                ))
                .into());
            }
            points.push((q as i64, value.to_integer()));
        }
        fitted.insert(e.clone(), interpolate(&points, bound)?);
    }
    let a = fitted.remove(d).expect("target dimension fitted");
    if a.coeffs().iter().any(|c| c.is_negative()) {
        return Err(CountError::Interpolation(format!(
            "fitted polynomial {a} has a negative coefficient"
        ))
        .into());
    }
    Ok(KacPolynomial(a))
}
