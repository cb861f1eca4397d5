//! Table-driven finite fields `F_q` and small dense linear algebra over them.

use crate::arith::prime_power;
use crate::error::CountError;

pub type Elem = u8;

/// Largest supported field size.
pub const MAX_Q: u64 = 256;

/// `F_q` with elements encoded as base-`p` digit vectors, so that `0` and `1`
/// are the field's zero and one.
#[derive(Clone, Debug)]
pub struct Field {
    q: usize,
    p: usize,
    k: u32,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    generator: Elem,
}

impl Field {
    pub fn new(q: u64) -> Result<Self, CountError> {
        let (p, k) = prime_power(q).ok_or(CountError::NotPrimePower(q))?;
        if q > MAX_Q {
            return Err(CountError::FieldTooLarge(q));
        }
        let (q, p) = (q as usize, p as usize);
        let add = table(q, |a, b| digits_op(a, b, p, k, |x, y| (x + y) % p));
        let neg: Vec<Elem> = (0..q)
            .map(|a| digits_op(a, 0, p, k, |x, _| (p - x) % p) as Elem)
            .collect();
        let mul = if k == 1 {
            table(q, |a, b| (a * b) % p)
        } else {
            find_extension_mul(q, p, k)
        };
        let mut inv = vec![0; q];
        for a in 1..q {
            inv[a] = (1..q)
                .find(|&b| mul[a * q + b] == 1)
                .expect("field element has an inverse") as Elem;
        }
        let mut f = Field {
            q,
            p,
            k,
            add,
            mul,
            neg,
            inv,
            generator: 1,
        };
        f.generator = (1..q)
            .map(|g| g as Elem)
            .find(|&g| f.multiplicative_order(g) == q - 1)
            .expect("multiplicative group is cyclic");
        Ok(f)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// Panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn minus_one(&self) -> Elem {
        self.neg(1)
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn multiplicative_order(&self, a: Elem) -> usize {
        assert!(a != 0);
        let mut x = a;
        let mut n = 1;
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// A primitive `r`-th root of unity, present iff `r | q - 1`.
    pub fn primitive_root_of_unity(&self, r: usize) -> Option<Elem> {
        let m = self.q - 1;
        (r >= 1 && m.is_multiple_of(r)).then(|| self.pow(self.generator, (m / r) as u64))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|a| a as Elem)
    }

    /// Rank of a row-major `rows x cols` matrix; the buffer is destroyed.
    pub fn rank(&self, m: &mut [Elem], rows: usize, cols: usize) -> usize {
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
                continue;
            };
            if piv != rank {
                for j in 0..cols {
                    m.swap(piv * cols + j, rank * cols + j);
                }
            }
            let inv = self.inv(m[rank * cols + c]);
            for j in c..cols {
                m[rank * cols + j] = self.mul(m[rank * cols + j], inv);
            }
            for r in 0..rows {
                if r != rank && m[r * cols + c] != 0 {
                    let f = m[r * cols + c];
                    for j in c..cols {
                        let v = self.mul(f, m[rank * cols + j]);
                        m[r * cols + j] = self.sub(m[r * cols + j], v);
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

fn table(q: usize, f: impl Fn(usize, usize) -> usize) -> Vec<Elem> {
    let mut t = vec![0; q * q];
    for a in 0..q {
        for b in 0..q {
            t[a * q + b] = f(a, b) as Elem;
        }
    }
    t
}

fn to_digits(mut a: usize, p: usize, k: u32) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn from_digits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn digits_op(a: usize, b: usize, p: usize, k: u32, f: impl Fn(usize, usize) -> usize) -> usize {
    let (da, db) = (to_digits(a, p, k), to_digits(b, p, k));
    let out: Vec<usize> = da.iter().zip(&db).map(|(&x, &y)| f(x, y)).collect();
    from_digits(&out, p)
}

/// Multiplication modulo a monic `f` of degree `k` (low coefficients `low`).
fn poly_mul_mod(a: usize, b: usize, p: usize, k: u32, low: &[usize]) -> usize {
    let k = k as usize;
    let (da, db) = (to_digits(a, p, k as u32), to_digits(b, p, k as u32));
    let mut prod = vec![0usize; 2 * k - 1];
    for i in 0..k {
        for j in 0..k {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    // x^k = -low(x)
    for top in (k..2 * k - 1).rev() {
        let c = prod[top];
        if c != 0 {
            prod[top] = 0;
            for (i, &l) in low.iter().enumerate() {
                prod[top - k + i] = (prod[top - k + i] + (p - l) * c) % p;
            }
        }
    }
    from_digits(&prod[..k], p)
}

fn find_extension_mul(q: usize, p: usize, k: u32) -> Vec<Elem> {
    for code in 0..q {
        let low = to_digits(code, p, k);
        if low[0] == 0 {
            continue;
        }
        let t = table(q, |a, b| poly_mul_mod(a, b, p, k, &low));
        // no zero divisors <=> modulus irreducible
        let is_field = (1..q).all(|a| (1..q).all(|b| t[a * q + b] != 0));
        if is_field {
            return t;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}
