//! Exact scalars over ℚ and 𝔽_p, and the dense linear algebra every
//! degree-slice computation reduces to.
//!
//! Rationals stay on an `i64` fast path and spill to arbitrary precision
//! only when a numerator or denominator outgrows it; the representation is
//! canonical either way, so equality and hashing are structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The coefficient field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u32),
}

impl Field {
    /// 𝔽_p for a prime `p < 2^31`.
    pub fn prime(p: u32) -> Result<Field> {
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!("{p} is not below 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    /// Characteristic, 0 for ℚ.
    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn from_characteristic(c: u32) -> Result<Field> {
        if c == 0 {
            Ok(Field::Rational)
        } else {
            Field::prime(c)
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Rational => Scalar(Repr::Q(Rat::Small(v, 1))),
            Field::Prime(p) => {
                let r = v.rem_euclid(*p as i64) as u32;
                Scalar(Repr::Fp { value: r, modulus: *p })
            }
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar(Repr::Q(Rat::from_big(BigRational::from_integer(v.clone())))),
            Field::Prime(p) => {
                let m = BigInt::from(*p);
                let r = v.mod_floor(&m).to_u32().expect("residue fits");
                Scalar(Repr::Fp { value: r, modulus: *p })
            }
        }
    }

    /// `num/den`; fails when `den` vanishes in this field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        let d = self.from_bigint(den);
        let inv = d
            .inv()
            .ok_or_else(|| Error::Parse(format!("denominator {den} is zero in {self}")))?;
        Ok(&self.from_bigint(num) * &inv)
    }

    /// Every element of a prime field, in residue order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => Some((0..*p).map(|v| self.from_i64(v as i64)).collect()),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Rat {
    // reduced, den > 0
    Small(i64, i64),
    // never representable as Small
    Big(Box<BigRational>),
}

impl Rat {
    fn from_i128(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat::Small(n, d),
            _ => Rat::Big(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat::Small(n, d),
            _ => Rat::Big(Box::new(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    fn add(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, o) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                return Rat::from_i128(a + c, b);
            }
            return Rat::from_i128(a * d + c * b, b * d);
        }
        Rat::from_big(self.to_big() + o.to_big())
    }

    fn mul(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, o) {
            return Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Rat::from_big(self.to_big() * o.to_big())
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::Small(n, d) => match n.checked_neg() {
                Some(m) => Rat::Small(m, *d),
                None => Rat::from_big(-self.to_big()),
            },
            Rat::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }

    fn inv(&self) -> Option<Rat> {
        match self {
            Rat::Small(0, _) => None,
            Rat::Small(n, d) => Some(Rat::from_i128(*d as i128, *n as i128)),
            Rat::Big(b) => Some(Rat::from_big(b.recip())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Q(Rat),
    Fp { value: u32, modulus: u32 },
}

/// An element of ℚ or of a prime field 𝔽_p.
///
/// Mixing elements of different fields in one operation is a logic error
/// and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn field(&self) -> Field {
        match &self.0 {
            Repr::Q(_) => Field::Rational,
            Repr::Fp { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Q(r) => r.is_zero(),
            Repr::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Q(r) => matches!(r, Rat::Small(1, 1)),
            Repr::Fp { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match &self.0 {
            Repr::Q(r) => r.inv().map(|r| Scalar(Repr::Q(r))),
            Repr::Fp { value, modulus } => {
                if *value == 0 {
                    return None;
                }
                Some(Scalar(Repr::Fp {
                    value: pow_mod(*value, modulus - 2, *modulus),
                    modulus: *modulus,
                }))
            }
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Rational value as a `BigRational`; prime-field elements map to their
    /// least nonnegative representative.
    pub fn to_rational(&self) -> BigRational {
        match &self.0 {
            Repr::Q(r) => r.to_big(),
            Repr::Fp { value, .. } => BigRational::from_integer(BigInt::from(*value)),
        }
    }

    /// Reduce into `target`; rationals need a denominator invertible there.
    pub fn convert(&self, target: Field) -> Result<Scalar> {
        if self.field() == target {
            return Ok(self.clone());
        }
        let r = self.to_rational();
        target.from_ratio(r.numer(), r.denom())
    }

    /// `true` when the printed form needs a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Q(Rat::Small(n, _)) => *n < 0,
            Repr::Q(Rat::Big(b)) => b.is_negative(),
            Repr::Fp { .. } => false,
        }
    }

    fn check_same(&self, o: &Scalar) -> u32 {
        match (&self.0, &o.0) {
            (Repr::Q(_), Repr::Q(_)) => 0,
            (Repr::Fp { modulus: p, .. }, Repr::Fp { modulus: q, .. }) if p == q => *p,
            _ => panic!("scalar arithmetic across fields: {} vs {}", self.field(), o.field()),
        }
    }
}

fn pow_mod(b: u32, mut e: u32, m: u32) -> u32 {
    let m64 = m as u64;
    let mut acc = 1u64 % m64;
    let mut base = b as u64 % m64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m64;
        }
        base = base * base % m64;
        e >>= 1;
    }
    acc as u32
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let p = self.check_same(o);
        match (&self.0, &o.0) {
            (Repr::Q(a), Repr::Q(b)) => Scalar(Repr::Q(a.add(b))),
            (Repr::Fp { value: a, .. }, Repr::Fp { value: b, .. }) => Scalar(Repr::Fp {
                value: ((*a as u64 + *b as u64) % p as u64) as u32,
                modulus: p,
            }),
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let p = self.check_same(o);
        match (&self.0, &o.0) {
            (Repr::Q(a), Repr::Q(b)) => Scalar(Repr::Q(a.mul(b))),
            (Repr::Fp { value: a, .. }, Repr::Fp { value: b, .. }) => Scalar(Repr::Fp {
                value: ((*a as u64 * *b as u64) % p as u64) as u32,
                modulus: p,
            }),
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Q(a) => Scalar(Repr::Q(a.neg())),
            Repr::Fp { value, modulus } => Scalar(Repr::Fp {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            }),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Q(Rat::Small(n, 1)) => write!(f, "{n}"),
            Repr::Q(Rat::Small(n, d)) => write!(f, "{n}/{d}"),
            Repr::Q(Rat::Big(b)) => {
                if b.denom().is_one() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
            Repr::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Dense row-major matrix of scalars from a single field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Output of [`rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: ScalarMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl ScalarMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        ScalarMatrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let data: Vec<Scalar> = rows.into_iter().flatten().collect();
        if data.iter().any(|s| s.field() != field) {
            return Err(Error::ShapeMismatch(format!("entries outside {field}")));
        }
        Ok(ScalarMatrix { field, rows: r, cols: c, data })
    }

    /// Convenience for tests and small literals.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let v = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_rows(field, v).expect("rectangular literal")
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut t = ScalarMatrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &ScalarMatrix) -> Result<ScalarMatrix> {
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = ScalarMatrix::zeros(self.field, self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = o.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + &(a * b);
                        out.set(r, c, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|r| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn augment(&self, other: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!(self.rows, other.rows, "augment needs equal row counts");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        ScalarMatrix { field: self.field, rows: self.rows, cols, data }
    }
}

/// Reduced row-echelon form by leftmost pivot, first nonzero row.
pub fn rref(m: &ScalarMatrix) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for k in 0..cols {
                a.data.swap(p * cols + k, r * cols + k);
            }
        }
        let inv = a.get(r, c).inv().expect("pivot is nonzero");
        let support: Vec<usize> = (c..cols).filter(|&k| !a.get(r, k).is_zero()).collect();
        for &k in &support {
            let v = a.get(r, k) * &inv;
            a.set(r, k, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c).clone();
            if factor.is_zero() {
                continue;
            }
            for &k in &support {
                let v = a.get(i, k) - &(&factor * a.get(r, k));
                a.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    Rref { matrix: a, pivots, rank }
}

/// Basis of the right null space, one vector per free column (free variable
/// set to 1, the other free variables 0).
pub fn kernel_basis(m: &ScalarMatrix) -> Vec<Vec<Scalar>> {
    let Rref { matrix: red, pivots, .. } = rref(m);
    let field = m.field;
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![field.zero(); m.cols];
            v[free] = field.one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -red.get(row, free);
            }
            v
        })
        .collect()
}

/// Canonical particular solution of `m·x = b` (free variables zero), or
/// `None` when the system is inconsistent.
pub fn solve(m: &ScalarMatrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.rows, "right-hand side length");
    let field = m.field;
    let rhs = ScalarMatrix { field, rows: m.rows, cols: 1, data: b.to_vec() };
    let Rref { matrix: red, pivots, .. } = rref(&m.augment(&rhs));
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![field.zero(); m.cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = red.get(row, m.cols).clone();
    }
    Some(x)
}

/// A left null vector `y` with `y·m = 0` and `y·b ≠ 0`, certifying that
/// `m·x = b` has no solution.
pub fn inconsistency_witness(m: &ScalarMatrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let field = m.field;
    kernel_basis(&m.transpose()).into_iter().find(|y| {
        let mut acc = field.zero();
        for (yi, bi) in y.iter().zip(b) {
            acc = &acc + &(yi * bi);
        }
        !acc.is_zero()
    })
}

/// Sparse vector: `(index, value)` pairs, strictly increasing index, no zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

fn axpy_sparse(v: &SparseVec, f: &Scalar, p: &SparseVec) -> SparseVec {
    // v - f*p
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < p.len() {
        let take_v = j == p.len() || (i < v.len() && v[i].0 < p[j].0);
        let take_p = i == v.len() || (j < p.len() && p[j].0 < v[i].0);
        if take_v {
            out.push(v[i].clone());
            i += 1;
        } else if take_p {
            out.push((p[j].0, -&(f * &p[j].1)));
            j += 1;
        } else {
            let x = &v[i].1 - &(f * &p[j].1);
            if !x.is_zero() {
                out.push((v[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental row-echelon basis of a span of sparse vectors.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    pivots: std::collections::HashMap<usize, SparseVec>,
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduce `v` against the current basis.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut done = Vec::new();
        while let Some((lead, x)) = v.first().cloned() {
            match self.pivots.get(&lead) {
                Some(p) => v = axpy_sparse(&v, &x, p),
                None => {
                    done.push(v.remove(0));
                }
            }
        }
        done
    }

    /// Adds `v` to the span; `true` when the rank grew.
    pub fn insert(&mut self, mut v: SparseVec) -> bool {
        while let Some((lead, x)) = v.first().cloned() {
            match self.pivots.get(&lead) {
                Some(p) => v = axpy_sparse(&v, &x, p),
                None => {
                    let inv = x.inv().expect("nonzero lead");
                    let v: SparseVec = v.into_iter().map(|(k, y)| (k, &y * &inv)).collect();
                    self.pivots.insert(lead, v);
                    return true;
                }
            }
        }
        false
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The echelon vectors, ordered by leading index.
    pub fn basis(&self) -> Vec<SparseVec> {
        let mut keys: Vec<&usize> = self.pivots.keys().collect();
        keys.sort();
        keys.into_iter().map(|k| self.pivots[k].clone()).collect()
    }
}

/// Rank of a family of sparse vectors.
pub fn sparse_rank(vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = SparseEchelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Dense vector to sparse.
pub fn to_sparse(v: &[Scalar]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// Sparse vector to dense of length `n`.
pub fn to_dense(field: Field, n: usize, v: &SparseVec) -> Vec<Scalar> {
    let mut out = vec![field.zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

impl ScalarMatrix {
    /// Columns as sparse vectors.
    pub fn sparse_columns(&self) -> Vec<SparseVec> {
        let mut cols = vec![Vec::new(); self.cols];
        for r in 0..self.rows {
            for (c, x) in self.row(r).iter().enumerate() {
                if !x.is_zero() {
                    cols[c].push((r, x.clone()));
                }
            }
        }
        cols
    }

    /// Dense matrix whose columns are the given sparse vectors.
    pub fn from_sparse_columns(field: Field, rows: usize, cols: &[SparseVec]) -> ScalarMatrix {
        let mut m = ScalarMatrix::zeros(field, rows, cols.len());
        for (c, v) in cols.iter().enumerate() {
            for (r, x) in v {
                m.set(*r, c, x.clone());
            }
        }
        m
    }
}
