//! Betti tables and necessary conditions for Betti-deficient differential
//! modules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use serde::Serialize;

use crate::complex::{subsets, Complex};
use crate::error::{Error, Result};

/// `β_{i,k}`: the number of generators of degree `k` in homological degree `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    entries: BTreeMap<(usize, i64), usize>,
}

impl BettiTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, i64, usize)>) -> Self {
        let mut t = Self::new();
        for (i, k, b) in entries {
            t.set(i, k, b);
        }
        t
    }

    pub fn set(&mut self, i: usize, k: i64, b: usize) {
        if b == 0 {
            self.entries.remove(&(i, k));
        } else {
            self.entries.insert((i, k), b);
        }
    }

    pub fn get(&self, i: usize, k: i64) -> usize {
        self.entries.get(&(i, k)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, i64, usize)> + '_ {
        self.entries.iter().map(|(&(i, k), &b)| (i, k, b))
    }

    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn length(&self) -> usize {
        self.entries.keys().map(|k| k.0).max().unwrap_or(0)
    }

    /// Is every nonzero column concentrated in a single degree?
    pub fn is_pure(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.entries.keys().all(|(i, _)| seen.insert(*i))
    }
}

impl fmt::Display for BettiTable {
    /// Column `i`, row `k − i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "(empty)");
        }
        let rows: Vec<i64> = self.entries.keys().map(|&(i, k)| k - i as i64).collect();
        let (rlo, rhi) = (*rows.iter().min().unwrap(), *rows.iter().max().unwrap());
        let cols = self.length();
        write!(f, "     ")?;
        for i in 0..=cols {
            write!(f, "{i:>5}")?;
        }
        for r in rlo..=rhi {
            write!(f, "\n{:>4}:", r)?;
            for i in 0..=cols {
                match self.get(i, r + i as i64) {
                    0 => write!(f, "{:>5}", "-")?,
                    b => write!(f, "{b:>5}")?,
                }
            }
        }
        Ok(())
    }
}

/// Reads Betti numbers off the twists of a minimal complex.
pub fn betti_table(c: &Complex) -> Result<BettiTable> {
    if !c.is_minimal() {
        return Err(Error::NotMinimal("a differential contains a unit entry".into()));
    }
    let mut t = BettiTable::new();
    for (i, m) in c.modules().iter().enumerate() {
        for k in m.gen_degrees() {
            t.set(i, k, t.get(i, k) + 1);
        }
    }
    Ok(t)
}

/// Two nonzero entries that a unit of a degree-`a` flag could connect.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopePair {
    pub upper: (usize, i64),
    pub lower: (usize, i64),
    pub j: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub slope: Rational64,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// All `((i,k),(i−j,ℓ),j)` with `j ≥ 2`, both entries nonzero and `ℓ − k = (1−j)a`.
pub fn slope_pairs(t: &BettiTable, a: i64) -> Vec<SlopePair> {
    let mut out = Vec::new();
    for (i, k, _) in t.entries() {
        for j in 2..=i {
            let l = k + (1 - j as i64) * a;
            if t.get(i - j, l) > 0 {
                let slope = Rational64::from_integer(1 - a) + Rational64::new(a, j as i64);
                out.push(SlopePair { upper: (i, k), lower: (i - j, l), j, slope });
            }
        }
    }
    out
}

/// Degrees `a` for which the Koszul resolution of a complete intersection
/// with these generator degrees admits a slope pair.
pub fn ci_deficiency_degrees(degrees: &[i64]) -> BTreeSet<i64> {
    let n = degrees.len();
    let sums: Vec<Vec<i64>> =
        (0..=n).map(|s| subsets(n, s).iter().map(|j| j.iter().map(|&r| degrees[r]).sum()).collect()).collect();
    let mut out = BTreeSet::new();
    for j in 2..=n {
        for s1 in 0..=n - j {
            for d1 in &sums[s1] {
                for d2 in &sums[s1 + j] {
                    let diff = d1 - d2;
                    let den = 1 - j as i64;
                    if diff % den == 0 {
                        out.insert(diff / den);
                    }
                }
            }
        }
    }
    out
}

/// `{(d_{i−j} − d_i)/(1 − j) : 2 ≤ j ≤ i ≤ ℓ}` restricted to integers.
pub fn pure_deficiency_degrees(d: &[i64]) -> Result<BTreeSet<i64>> {
    if d.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("degree sequence must be strictly increasing".into()));
    }
    let mut out = BTreeSet::new();
    for i in 2..d.len() {
        for j in 2..=i {
            let (num, den) = (d[i - j] - d[i], 1 - j as i64);
            if num % den == 0 {
                let a = num / den;
                debug_assert!(a > 0);
                out.insert(a);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::poly::Ring;

    #[test]
    fn koszul_tables() {
        let r = Ring::new(Field::Rational, &["x", "y"]).unwrap();
        let k = crate::complex::koszul(&r, &[r.var(0), r.var(1)]).unwrap();
        let t = betti_table(&k).unwrap();
        assert_eq!(t, BettiTable::from_entries([(0, 0, 1), (1, 1, 2), (2, 2, 1)]));
        let p = slope_pairs(&t, 2);
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].upper, p[0].lower, p[0].slope), ((2, 2), (0, 0), Rational64::from_integer(0)));
        assert!(slope_pairs(&t, 0).is_empty());
    }

    #[test]
    fn half_slope() {
        let t = BettiTable::from_entries([(1, 3, 1), (3, 4, 1)]);
        let p = slope_pairs(&t, 1);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].slope, Rational64::new(1, 2));
    }

    #[test]
    fn deficiency_sets() {
        assert_eq!(ci_deficiency_degrees(&[2, 2]), BTreeSet::from([4]));
        assert_eq!(ci_deficiency_degrees(&[1, 1]), BTreeSet::from([2]));
        assert!(ci_deficiency_degrees(&[2, 2, 3]).contains(&4));
        assert_eq!(pure_deficiency_degrees(&[0, 2, 3, 5]).unwrap(), BTreeSet::from([3]));
        assert_eq!(pure_deficiency_degrees(&[0, 1, 2, 3]).unwrap(), BTreeSet::from([2]));
    }
}
