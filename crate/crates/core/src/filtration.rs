//! Filtered graded-dimension tables and the super-symmetric algebra engine
//! that produces them from generator data.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CheckError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiltrationKind {
    Weight,
    Perverse,
    LessPerverse,
    Combined,
}

impl fmt::Display for FiltrationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FiltrationKind::Weight => "W",
            FiltrationKind::Perverse => "H",
            FiltrationKind::LessPerverse => "L",
            FiltrationKind::Combined => "F",
        };
        f.write_str(s)
    }
}

/// Graded pieces `dim Gr_k H^i` per rank, keyed by `(rank, degree, index)`.
/// Dimensions are signed so that an inconsistent computation is detectable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationTable {
    pub kind: FiltrationKind,
    entries: BTreeMap<(usize, i64, i64), i64>,
}

impl FiltrationTable {
    pub fn new(kind: FiltrationKind) -> Self {
        FiltrationTable {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, rank: usize, degree: i64, index: i64, dim: i64) {
        let e = self.entries.entry((rank, degree, index)).or_insert(0);
        *e += dim;
        if *e == 0 {
            self.entries.remove(&(rank, degree, index));
        }
    }

    pub fn graded(&self, rank: usize, degree: i64, index: i64) -> i64 {
        self.entries
            .get(&(rank, degree, index))
            .copied()
            .unwrap_or(0)
    }

    /// `dim F_k H^i = sum_{k' <= k} dim Gr_{k'}`.
    pub fn cumulative(&self, rank: usize, degree: i64, index: i64) -> i64 {
        self.entries
            .range((rank, degree, i64::MIN)..=(rank, degree, index))
            .map(|(_, &d)| d)
            .sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, i64, i64), i64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Total dimension per `(rank, degree)`.
    pub fn totals(&self) -> BTreeMap<(usize, i64), i64> {
        let mut out = BTreeMap::new();
        for (&(n, i, _), &d) in &self.entries {
            *out.entry((n, i)).or_insert(0) += d;
        }
        out.retain(|_, d| *d != 0);
        out
    }

    /// Graded dimensions for one rank, summed over degrees, by index.
    pub fn profile(&self, rank: usize) -> BTreeMap<i64, i64> {
        let mut out = BTreeMap::new();
        for (&(n, _, k), &d) in &self.entries {
            if n == rank {
                *out.entry(k).or_insert(0) += d;
            }
        }
        out
    }

    /// Copy with every index moved by `delta`.
    pub fn shifted(&self, delta: i64) -> Self {
        FiltrationTable {
            kind: self.kind,
            entries: self
                .entries
                .iter()
                .map(|(&(n, i, k), &d)| ((n, i, k + delta), d))
                .collect(),
        }
    }

    /// Cumulative dimensions weakly increase and end at `betti`;
    /// less-perverse tables live on even nonnegative indices.
    pub fn validate(&self, betti: &BTreeMap<(usize, i64), i64>) -> Result<(), CheckError> {
        for (&(n, i, k), &d) in &self.entries {
            if d < 0 {
                return Err(CheckError::Table(format!(
                    "{} table: rank {n}, degree {i}: cumulative dimension drops at index {k}",
                    self.kind
                )));
            }
            if self.kind == FiltrationKind::LessPerverse && (k < 0 || k % 2 != 0) {
                return Err(CheckError::Table(format!(
                    "L table: rank {n}, degree {i}: piece at odd or negative index {k}"
                )));
            }
        }
        let totals = self.totals();
        for key in totals.keys().chain(betti.keys()) {
            let (a, b) = (
                totals.get(key).copied().unwrap_or(0),
                betti.get(key).copied().unwrap_or(0),
            );
            if a != b {
                return Err(CheckError::Table(format!(
                    "{} table: rank {}, degree {}: filtration ends at {a}, total dimension is {b}",
                    self.kind, key.0, key.1
                )));
            }
        }
        Ok(())
    }
}

/// One homogeneous generator of a free super-commutative algebra. Parity is
/// the parity of `degree`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub rank: usize,
    pub degree: i64,
    pub weight: i64,
    pub perverse: i64,
    pub less_perverse: i64,
    pub multiplicity: i64,
}

/// `(rank, degree, weight, perverse, less perverse)`
pub type Label = (usize, i64, i64, i64, i64);

/// Graded dimensions of `Sym` of the generators, up to rank `r_max` and with
/// degrees capped at `deg_cap` while multiplying out. Every generator must
/// have degree at least `-2 * rank`.
pub fn super_sym(gens: &[Generator], r_max: usize, deg_cap: i64) -> HashMap<Label, i64> {
    let mut acc: HashMap<Label, i64> = HashMap::from([((0, 0, 0, 0, 0), 1)]);
    // later factors lower the degree by at most 2 per unit of rank
    let cap = deg_cap + 2 * r_max as i64;
    for g in gens
        .iter()
        .filter(|g| g.rank >= 1 && g.rank <= r_max && g.degree <= cap)
    {
        assert!(
            g.degree >= -2 * g.rank as i64,
            "generator degree below the supported bound"
        );
        let odd = g.degree.rem_euclid(2) == 1;
        let a = g.multiplicity;
        let mut next: HashMap<Label, i64> = HashMap::new();
        for (&(n, i, w, h, l), &c) in &acc {
            let mut coeff = 1i64;
            let mut j = 0i64;
            loop {
                let m = n + j as usize * g.rank;
                if m > r_max {
                    break;
                }
                if coeff != 0 {
                    let key = (
                        m,
                        i + j * g.degree,
                        w + j * g.weight,
                        h + j * g.perverse,
                        l + j * g.less_perverse,
                    );
                    if key.1 <= cap {
                        *next.entry(key).or_insert(0) += c * coeff;
                    }
                }
                // even: C(a + j, j + 1) ratio; odd: C(a, j + 1)
                coeff = if odd {
                    coeff * (a - j) / (j + 1)
                } else {
                    coeff * (a + j) / (j + 1)
                };
                j += 1;
                if odd && j > a {
                    break;
                }
            }
        }
        next.retain(|_, c| *c != 0);
        acc = next;
    }
    acc.retain(|&(n, i, ..), _| n >= 1 && i <= deg_cap);
    acc
}

/// Projects labelled dimensions onto a table.
pub fn project(sym: &HashMap<Label, i64>, kind: FiltrationKind) -> FiltrationTable {
    let mut t = FiltrationTable::new(kind);
    for (&(n, i, w, h, l), &d) in sym {
        let k = match kind {
            FiltrationKind::Weight => w,
            FiltrationKind::Perverse => h,
            FiltrationKind::LessPerverse => l,
            FiltrationKind::Combined => h - l / 2,
        };
        t.add(n, i, k, d);
    }
    t
}

/// `(rank, degree)` dimensions of labelled data.
pub fn betti(sym: &HashMap<Label, i64>) -> BTreeMap<(usize, i64), i64> {
    let mut out = BTreeMap::new();
    for (&(n, i, ..), &d) in sym {
        *out.entry((n, i)).or_insert(0) += d;
    }
    out.retain(|_, d| *d != 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(rank: usize, degree: i64, multiplicity: i64) -> Generator {
        Generator {
            rank,
            degree,
            weight: degree,
            perverse: 0,
            less_perverse: 0,
            multiplicity,
        }
    }

    #[test]
    fn sym_of_even_and_odd() {
        // one even generator: polynomial ring, one class per rank
        let s = super_sym(&[gen(1, 0, 1)], 4, 10);
        assert_eq!(
            betti(&s).values().copied().collect::<Vec<_>>(),
            vec![1, 1, 1, 1]
        );
        // two odd generators of rank 1: exterior algebra, 1, 2, 1
        let s = super_sym(&[gen(1, 1, 2)], 4, 10);
        let b = betti(&s);
        assert_eq!(b.get(&(1, 1)), Some(&2));
        assert_eq!(b.get(&(2, 2)), Some(&1));
        assert_eq!(b.get(&(3, 3)), None);
    }

    #[test]
    fn negative_degrees_survive_truncation() {
        let g = [gen(1, 4, 1), gen(1, -2, 1)];
        let s = super_sym(&g, 2, 2);
        // x_{4} x_{-2} has degree 2
        assert_eq!(betti(&s).get(&(2, 2)), Some(&1));
        assert_eq!(betti(&s).get(&(2, -4)), Some(&1));
    }

    #[test]
    fn table_validation() {
        let mut t = FiltrationTable::new(FiltrationKind::LessPerverse);
        t.add(1, 0, 0, 1);
        t.add(1, 0, 2, 1);
        let betti = BTreeMap::from([((1, 0), 2)]);
        t.validate(&betti).unwrap();
        assert_eq!(t.cumulative(1, 0, 1), 1);
        assert_eq!(t.cumulative(1, 0, 2), 2);
        assert!(t.shifted(1).validate(&betti).is_err());
        let mut bad = t.clone();
        bad.add(1, 0, 4, -1);
        assert!(bad.validate(&BTreeMap::from([((1, 0), 1)])).is_err());
        assert!(t.validate(&BTreeMap::from([((1, 0), 3)])).is_err());
    }
}
