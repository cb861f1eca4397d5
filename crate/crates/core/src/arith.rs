//! Small number-theoretic helpers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Möbius function.
pub fn mobius(mut n: u64) -> i64 {
    assert!(n > 0, "mobius(0)");
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// `(p, k)` with `q = p^k`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Prime powers in increasing order.
pub fn prime_powers() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&q| prime_power(q).is_some())
}

/// Generalized binomial `C(a + k - 1, k)`: the coefficient of `x^k` in `(1 - x)^{-a}`.
pub fn multichoose(a: &BigInt, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= a + BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}
