//! Explicit models of `GL_r(F_q)` for small `r`, with conjugacy-class counting
//! by orbit enumeration and by rational canonical forms.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::CountError;
use crate::ff::{Elem, Field};

/// Largest supported matrix size.
pub const MAX_RANK: usize = 4;

/// Default cap on `|GL_r(F_q)|`.
pub const DEFAULT_GROUP_CAP: u128 = 200_000;

/// Square matrix of size `r <= 4`, row-major, unused slots zero.
pub type Mat = [Elem; MAX_RANK * MAX_RANK];

/// `prod_{i<r} (q^r - q^i)`, saturating.
pub fn gl_order_value(r: usize, q: u64) -> u128 {
    let qr = (q as u128).saturating_pow(r as u32);
    (0..r).fold(1u128, |acc, i| {
        acc.saturating_mul(qr - (q as u128).pow(i as u32))
    })
}

/// Matrix arithmetic of a fixed size over a fixed field.
#[derive(Clone, Debug)]
pub struct MatOps {
    pub r: usize,
    pub field: Field,
}

impl MatOps {
    pub fn new(r: usize, field: Field) -> Self {
        assert!((1..=MAX_RANK).contains(&r), "matrix size {r} unsupported");
        MatOps { r, field }
    }

    pub fn scalar(&self, c: Elem) -> Mat {
        let mut m = [0; MAX_RANK * MAX_RANK];
        for i in 0..self.r {
            m[i * MAX_RANK + i] = c;
        }
        m
    }

    pub fn identity(&self) -> Mat {
        self.scalar(1)
    }

    #[inline]
    pub fn get(&self, m: &Mat, i: usize, j: usize) -> Elem {
        m[i * MAX_RANK + j]
    }

    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        let f = &self.field;
        let mut out = [0; MAX_RANK * MAX_RANK];
        for i in 0..self.r {
            for j in 0..self.r {
                let mut s = 0;
                for k in 0..self.r {
                    s = f.add(s, f.mul(a[i * MAX_RANK + k], b[k * MAX_RANK + j]));
                }
                out[i * MAX_RANK + j] = s;
            }
        }
        out
    }

    pub fn rank(&self, m: &Mat) -> usize {
        let mut buf: Vec<Elem> = (0..self.r)
            .flat_map(|i| (0..self.r).map(move |j| (i, j)))
            .map(|(i, j)| m[i * MAX_RANK + j])
            .collect();
        self.field.rank(&mut buf, self.r, self.r)
    }

    pub fn is_invertible(&self, m: &Mat) -> bool {
        self.rank(m) == self.r
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self, m: &Mat) -> Option<Mat> {
        let (r, f) = (self.r, &self.field);
        let w = 2 * r;
        let mut a = vec![0; r * w];
        for i in 0..r {
            for j in 0..r {
                a[i * w + j] = m[i * MAX_RANK + j];
            }
            a[i * w + r + i] = 1;
        }
        for c in 0..r {
            let piv = (c..r).find(|&i| a[i * w + c] != 0)?;
            for j in 0..w {
                a.swap(piv * w + j, c * w + j);
            }
            let inv = f.inv(a[c * w + c]);
            for j in 0..w {
                a[c * w + j] = f.mul(a[c * w + j], inv);
            }
            for i in 0..r {
                if i != c && a[i * w + c] != 0 {
                    let s = a[i * w + c];
                    for j in 0..w {
                        let v = f.mul(s, a[c * w + j]);
                        a[i * w + j] = f.sub(a[i * w + j], v);
                    }
                }
            }
        }
        let mut out = [0; MAX_RANK * MAX_RANK];
        for i in 0..r {
            for j in 0..r {
                out[i * MAX_RANK + j] = a[i * w + r + j];
            }
        }
        Some(out)
    }

    /// Decodes `code` in base `q` into the `r x r` entries.
    pub fn decode(&self, mut code: u64) -> Mat {
        let q = self.field.q() as u64;
        let mut m = [0; MAX_RANK * MAX_RANK];
        for i in 0..self.r {
            for j in 0..self.r {
                m[i * MAX_RANK + j] = (code % q) as Elem;
                code /= q;
            }
        }
        m
    }

    /// All invertible matrices, in code order.
    pub fn enumerate_gl(&self) -> Vec<Mat> {
        let total = (self.field.q() as u64).pow((self.r * self.r) as u32);
        (0..total)
            .into_par_iter()
            .map(|c| self.decode(c))
            .filter(|m| self.is_invertible(m))
            .collect()
    }
}

/// `GL_r(F_q)` as an explicit element list.
#[derive(Clone, Debug)]
pub struct GroupModel {
    ops: MatOps,
    elements: Vec<Mat>,
    index: HashMap<Mat, u32>,
}

/// Builds `GL_r(F_q)` if its order is at most `cap`.
pub fn build_group(r: usize, q: u64, cap: u128) -> Result<GroupModel, CountError> {
    if !(1..=3).contains(&r) {
        return Err(CountError::Unsupported(format!(
            "group models are built for r in 1..=3, got {r}"
        )));
    }
    let field = Field::new(q)?;
    let order = gl_order_value(r, q);
    if order > cap {
        return Err(CountError::Budget {
            what: format!("|GL_{r}(F_{q})|"),
            needed: order,
            budget: cap,
        });
    }
    let ops = MatOps::new(r, field);
    let elements = ops.enumerate_gl();
    assert_eq!(elements.len() as u128, order, "GL_{r}(F_{q}) order formula");
    let index = elements
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i as u32))
        .collect();
    Ok(GroupModel {
        ops,
        elements,
        index,
    })
}

impl GroupModel {
    pub fn rank(&self) -> usize {
        self.ops.r
    }

    pub fn q(&self) -> u64 {
        self.ops.field.q() as u64
    }

    pub fn field(&self) -> &Field {
        &self.ops.field
    }

    pub fn ops(&self) -> &MatOps {
        &self.ops
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        self.index.get(m).map(|&i| i as usize)
    }

    pub fn identity_index(&self) -> usize {
        self.index_of(&self.ops.identity())
            .expect("identity is in the group")
    }

    /// The scalar `zeta^d * I` for a primitive `r`-th root of unity `zeta`.
    pub fn central_twist(&self, d: i64) -> Result<usize, CountError> {
        let r = self.rank();
        let f = self.field();
        if d.rem_euclid(r as i64) == 0 {
            return Ok(self.identity_index());
        }
        let zeta = f.primitive_root_of_unity(r).ok_or_else(|| {
            CountError::Unsupported(format!("F_{} has no primitive {r}-th root of unity", f.q()))
        })?;
        let e = d.rem_euclid(r as i64) as u64;
        Ok(self
            .index_of(&self.ops.scalar(f.pow(zeta, e)))
            .expect("scalar matrices are invertible"))
    }

    /// Multiplication, inverse, and commutator tables indexed by element position.
    pub fn tables(&self, cap: u128) -> Result<GroupTables, CountError> {
        let n = self.order();
        let cells = (n as u128) * (n as u128);
        if cells > cap {
            return Err(CountError::Budget {
                what: "group multiplication table".into(),
                needed: cells,
                budget: cap,
            });
        }
        let mul: Vec<u32> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let a = self.elements[i];
                (0..n).map(move |j| self.index[&self.ops.mul(&a, &self.elements[j])])
            })
            .collect();
        let id = self.identity_index() as u32;
        let inv: Vec<u32> = (0..n)
            .map(|i| {
                (0..n)
                    .find(|&j| mul[i * n + j] == id)
                    .expect("inverse exists") as u32
            })
            .collect();
        let comm: Vec<u32> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                let (mul, inv) = (&mul, &inv);
                (0..n).map(move |b| {
                    let ab = mul[a * n + b] as usize;
                    let ab_ai = mul[ab * n + inv[a] as usize] as usize;
                    mul[ab_ai * n + inv[b] as usize]
                })
            })
            .collect();
        Ok(GroupTables {
            n,
            identity: id,
            mul,
            inv,
            comm,
        })
    }
}

/// Dense Cayley data for a small group.
#[derive(Clone, Debug)]
pub struct GroupTables {
    pub n: usize,
    pub identity: u32,
    pub mul: Vec<u32>,
    pub inv: Vec<u32>,
    /// `[a, b] = a b a^{-1} b^{-1}`
    pub comm: Vec<u32>,
}

/// Conjugacy classes by marking orbits.
pub fn brute_class_count(g: &GroupModel) -> usize {
    let n = g.order();
    let inverses: Vec<Mat> = g
        .elements
        .par_iter()
        .map(|m| g.ops.inverse(m).expect("invertible"))
        .collect();
    let mut seen = vec![false; n];
    let mut classes = 0;
    for x in 0..n {
        if seen[x] {
            continue;
        }
        classes += 1;
        let orbit: Vec<usize> = (0..n)
            .into_par_iter()
            .map(|h| {
                let c = g
                    .ops
                    .mul(&g.ops.mul(&g.elements[h], &g.elements[x]), &inverses[h]);
                g.index[&c] as usize
            })
            .collect();
        for y in orbit {
            seen[y] = true;
        }
    }
    classes
}

/// Monic polynomial over `F_q`, low coefficient first.
type FqPoly = Vec<Elem>;

fn divides(f: &Field, d: &FqPoly, p: &FqPoly) -> bool {
    let dd = d.len() - 1;
    let mut rem = p.clone();
    while rem.len() > dd {
        let c = *rem.last().unwrap();
        let shift = rem.len() - 1 - dd;
        if c != 0 {
            // d is monic
            for (i, &di) in d.iter().enumerate() {
                rem[shift + i] = f.sub(rem[shift + i], f.mul(c, di));
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

/// Monic polynomials of degree `1..=max_deg` with nonzero constant term.
fn monic_nonvanishing(f: &Field, max_deg: usize) -> Vec<FqPoly> {
    let q = f.q() as u64;
    let mut out = Vec::new();
    for deg in 1..=max_deg {
        for code in 0..q.pow(deg as u32) {
            let mut p: FqPoly = Vec::with_capacity(deg + 1);
            let mut c = code;
            for _ in 0..deg {
                p.push((c % q) as Elem);
                c /= q;
            }
            p.push(1);
            if p[0] != 0 {
                out.push(p);
            }
        }
    }
    out
}

/// Number of conjugacy classes of `GL_r(F_q)`, counted as chains of invariant
/// factors `f_1 | f_2 | ... | f_m` with total degree `r` and `f_i(0) != 0`.
pub fn rcf_class_count(r: usize, q: u64) -> Result<u128, CountError> {
    let f = Field::new(q)?;
    let polys = monic_nonvanishing(&f, r);
    fn chains(f: &Field, polys: &[FqPoly], prev: Option<&FqPoly>, remaining: usize) -> u128 {
        if remaining == 0 {
            return 1;
        }
        polys
            .iter()
            .filter(|p| p.len() - 1 <= remaining)
            .filter(|p| prev.is_none_or(|d| divides(f, d, p)))
            .map(|p| {
                let rest = remaining - (p.len() - 1);
                // every later factor is a multiple of p, so it needs room for deg p
                if rest != 0 && rest < p.len() - 1 {
                    0
                } else {
                    chains(f, polys, Some(p), rest)
                }
            })
            .sum()
    }
    Ok(chains(&f, &polys, None, r))
}
