//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use flagforge::field::Field;
use flagforge::poly::{HomMap, Poly, Ring};

/// Exponent vectors of total degree `d` in `n` variables, by recursion.
pub fn exponent_vectors(n: usize, d: i64) -> Vec<Vec<u32>> {
    if d < 0 {
        return vec![];
    }
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in exponent_vectors(n - 1, d - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

/// `dim (S/(x_1^{d_1}, ..., x_n^{d_n}))_m` by counting standard monomials.
pub fn monomial_ci_hilbert(degrees: &[i64], m: i64) -> usize {
    exponent_vectors(degrees.len(), m)
        .iter()
        .filter(|e| e.iter().zip(degrees).all(|(x, d)| (*x as i64) < *d))
        .count()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

/// `Σ_{|J| = i} dim (S/I)_{j + d_J}` with standard-monomial counts.
pub fn oracle_ext_dim(degrees: &[i64], i: usize, j: i64) -> usize {
    subsets(degrees.len(), i).iter().map(|s| monomial_ci_hilbert(degrees, j + s.iter().map(|&r| degrees[r]).sum::<i64>())).sum()
}

pub fn oracle_rigid(degrees: &[i64], a: i64) -> bool {
    (2..=degrees.len()).all(|i| oracle_ext_dim(degrees, i, a - i as i64 * a) == 0)
}

/// Plain matrix product of polynomial matrices.
pub fn matmul(a: &[Vec<Poly>], b: &[Vec<Poly>], ring: &Ring) -> Vec<Vec<Poly>> {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n)
        .map(|r| {
            (0..m)
                .map(|c| (0..k).fold(ring.zero(), |acc, t| acc.add(&a[r][t].mul(&b[t][c]))))
                .collect()
        })
        .collect()
}

pub fn square(h: &HomMap) -> Vec<Vec<Poly>> {
    let rows = h.to_rows();
    matmul(&rows, &rows, h.ring())
}

pub fn is_zero_matrix(m: &[Vec<Poly>]) -> bool {
    m.iter().flatten().all(Poly::is_zero)
}

/// Exterior algebra element: sorted index list → coefficient.
pub type Ext = BTreeMap<Vec<usize>, Poly>;

/// Product by sorting the concatenated index word with adjacent swaps.
pub fn ext_mul(x: &Ext, y: &Ext, ring: &Ring) -> Ext {
    let mut out: Ext = BTreeMap::new();
    for (i, p) in x {
        for (j, q) in y {
            let mut w: Vec<usize> = i.iter().chain(j).copied().collect();
            let mut sign = 1;
            for pass in 0..w.len() {
                for t in 0..w.len().saturating_sub(1 + pass) {
                    if w[t] > w[t + 1] {
                        w.swap(t, t + 1);
                        sign = -sign;
                    }
                }
            }
            if w.windows(2).any(|p| p[0] == p[1]) {
                continue;
            }
            let c = if sign > 0 { p.mul(q) } else { p.mul(q).neg() };
            let e = out.entry(w).or_insert_with(|| ring.zero());
            *e = e.add(&c);
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

pub fn ext_add(x: &Ext, y: &Ext, sign: i64, ring: &Ring) -> Ext {
    let mut out = x.clone();
    for (k, p) in y {
        let e = out.entry(k.clone()).or_insert_with(|| ring.zero());
        *e = if sign > 0 { e.add(p) } else { e.sub(p) };
    }
    out.retain(|_, p| !p.is_zero());
    out
}

pub fn qring(vars: &[&str]) -> Ring {
    Ring::new(Field::Rational, vars).unwrap()
}
