//! Standard-graded polynomial rings, homogeneous polynomials, graded free
//! modules and homogeneous maps between them.
//!
//! Every variable has degree 1. A twist `t` denotes the summand `S(t)`,
//! whose generator lives in internal degree `-t`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use num_bigint::BigInt;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{sparse_rank, Field, Scalar, ScalarMatrix, SparseVec};

/// Exponent vector, ordered graded-lex with `x1 > x2 > ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    deg: u32,
    exps: SmallVec<[u16; 12]>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { deg: 0, exps: SmallVec::from_elem(0, nvars) }
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial { deg: exps.iter().map(|&e| e as u32).sum(), exps: exps.into() }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect();
        Monomial { deg: self.deg + o.deg, exps }
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&o.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Monomial { deg: self.deg - o.deg, exps })
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.exps.iter().zip(&o.exps).all(|(a, b)| a <= b)
    }
}

type MonomialCache = RefCell<HashMap<(usize, i64), Rc<Vec<Monomial>>>>;

/// All monomials of degree `k` in `n` variables, in descending order.
pub fn monomials_of_degree(n: usize, k: i64) -> Rc<Vec<Monomial>> {
    thread_local! {
        static CACHE: MonomialCache = RefCell::new(HashMap::new());
    }
    if k < 0 {
        return Rc::new(Vec::new());
    }
    if let Some(v) = CACHE.with(|c| c.borrow().get(&(n, k)).cloned()) {
        return v;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u16; n];
    fn rec(i: usize, left: u16, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    if n == 0 {
        if k == 0 {
            out.push(Monomial::one(0));
        }
    } else {
        rec(0, k as u16, &mut cur, &mut out);
    }
    let v = Rc::new(out);
    CACHE.with(|c| c.borrow_mut().insert((n, k), v.clone()));
    v
}

/// Number of monomials of degree `k` in `n` variables.
pub fn monomial_count(n: usize, k: i64) -> u128 {
    if k < 0 {
        return 0;
    }
    if n == 0 {
        return (k == 0) as u128;
    }
    binomial(k as u128 + n as u128 - 1, n as u128 - 1)
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct RingData {
    field: Field,
    vars: Vec<String>,
}

/// `k[x1..xn]` with standard grading. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring(Arc<RingData>);

impl Ring {
    pub fn new<S: AsRef<str>>(field: Field, vars: &[S]) -> Result<Ring> {
        if vars.is_empty() {
            return Err(Error::InvalidRing("at least one variable is required".into()));
        }
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            let mut chars = v.chars();
            let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::InvalidRing(format!("bad variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidRing(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Ring(Arc::new(RingData { field, vars })))
    }

    /// Variables `x1..xn` (or `x`, `y`, `z` style names given explicitly).
    pub fn with_indexed_vars(field: Field, prefix: &str, n: usize) -> Result<Ring> {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Ring::new(field, &names)
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    /// Same variables over another field.
    pub fn with_field(&self, field: Field) -> Ring {
        if field == self.field() {
            return self.clone();
        }
        Ring(Arc::new(RingData { field, vars: self.0.vars.clone() }))
    }

    pub fn zero(&self) -> Poly {
        Poly { ring: self.clone(), terms: Vec::new() }
    }

    pub fn one(&self) -> Poly {
        self.constant(self.field().one())
    }

    pub fn constant(&self, c: Scalar) -> Poly {
        self.term(c, Monomial::one(self.nvars()))
    }

    pub fn from_i64(&self, c: i64) -> Poly {
        self.constant(self.field().from_i64(c))
    }

    pub fn var(&self, i: usize) -> Poly {
        self.term(self.field().one(), Monomial::var(self.nvars(), i))
    }

    pub fn term(&self, c: Scalar, m: Monomial) -> Poly {
        assert_eq!(c.field(), self.field(), "coefficient field");
        assert_eq!(m.exps.len(), self.nvars(), "monomial arity");
        if c.is_zero() {
            return self.zero();
        }
        Poly { ring: self.clone(), terms: vec![(m, c)] }
    }

    pub fn parse(&self, s: &str) -> Result<Poly> {
        parse_poly(self, s)
    }

    /// Dimension of `S_k`.
    pub fn hilbert(&self, k: i64) -> u128 {
        monomial_count(self.nvars(), k)
    }
}

/// A polynomial in canonical form: nonzero terms, strictly descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: Ring,
    terms: Vec<(Monomial, Scalar)>,
}

impl Poly {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.deg == 0
    }

    pub fn constant_term(&self) -> Scalar {
        match self.terms.last() {
            Some((m, c)) if m.deg == 0 => c.clone(),
            _ => self.ring.field().zero(),
        }
    }

    /// Largest term degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.deg)
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m, _)) => self.terms.iter().all(|(t, _)| t.deg == m.deg),
        }
    }

    /// Common degree of all terms; `None` if zero or inhomogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        if self.is_homogeneous() {
            self.degree()
        } else {
            None
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        match self.terms.binary_search_by(|(t, _)| m.cmp(t)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.ring.field().zero(),
        }
    }

    fn from_map(ring: &Ring, map: BTreeMap<Monomial, Scalar>) -> Poly {
        let terms = map.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Poly { ring: ring.clone(), terms }
    }

    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Poly {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.exps.len(), ring.nvars(), "monomial arity");
            let e = map.entry(m).or_insert_with(|| ring.field().zero());
            *e = &*e + &c;
        }
        Poly::from_map(ring, map)
    }

    fn check_ring(&self, o: &Poly) {
        assert!(self.ring == o.ring, "polynomials from different rings");
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.check_ring(o);
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            let (a, b) = (&self.terms[i], &o.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a.1 + &b.1;
                    if !c.is_zero() {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&o.terms[j..]);
        Poly { ring: self.ring.clone(), terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.check_ring(o);
        if self.is_zero() || o.is_zero() {
            return self.ring.zero();
        }
        if o.terms.len() == 1 {
            return self.mul_term(&o.terms[0].1, &o.terms[0].0);
        }
        if self.terms.len() == 1 {
            return o.mul_term(&self.terms[0].1, &self.terms[0].0);
        }
        let mut map: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let c = ca * cb;
                let m = ma.mul(mb);
                match map.get_mut(&m) {
                    Some(e) => *e = &*e + &c,
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        Poly::from_map(&self.ring, map)
    }

    /// Multiply by `c * m`; monomial multiplication preserves the order.
    pub fn mul_term(&self, c: &Scalar, m: &Monomial) -> Poly {
        if c.is_zero() {
            return self.ring.zero();
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, d)| (t.mul(m), d * c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return self.ring.zero();
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Reinterpret in a ring with the same variables (coefficients are
    /// converted, e.g. reduced modulo p).
    pub fn to_ring(&self, ring: &Ring) -> Result<Poly> {
        if ring.vars() != self.ring.vars() {
            return Err(Error::InvalidRing("variable lists differ".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.clone(), c.convert(ring.field())?));
        }
        Ok(Poly::from_terms(ring, terms))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.deg == 0 {
                factors.push(abs.to_string());
            }
            for (v, &e) in self.ring.vars().iter().zip(m.exps.iter()) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

fn parse_poly(ring: &Ring, src: &str) -> Result<Poly> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let field = ring.field();
    let mut terms = Vec::new();
    let bytes = s.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let mut negative = false;
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            negative = bytes[pos] == b'-';
            pos += 1;
        } else if pos != 0 {
            return Err(Error::Parse(format!("expected sign at offset {pos} in `{src}`")));
        }
        let end = s[pos..].find(['+', '-']).map_or(s.len(), |k| pos + k);
        let body = &s[pos..end];
        if body.is_empty() {
            return Err(Error::Parse(format!("empty term in `{src}`")));
        }
        let mut coeff = field.from_i64(if negative { -1 } else { 1 });
        let mut mono = Monomial::one(ring.nvars());
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in `{src}`")));
            }
            if factor.as_bytes()[0].is_ascii_digit() {
                let (num, den) = match factor.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (factor, "1"),
                };
                let num: BigInt = num
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient `{factor}`")))?;
                let den: BigInt = den
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient `{factor}`")))?;
                coeff = &coeff * &field.from_ratio(&num, &den)?;
            } else {
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => {
                        let e: u16 = e
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
                        (n, e)
                    }
                    None => (factor, 1),
                };
                let i = ring
                    .var_index(name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
                mono.exps[i] += exp;
                mono.deg += exp as u32;
            }
        }
        terms.push((mono, coeff));
        pos = end;
    }
    Ok(Poly::from_terms(ring, terms))
}

/// `⊕ S(t_k)`; generator `k` sits in internal degree `-t_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedFreeModule {
    ring: Ring,
    twists: Vec<i64>,
}

impl GradedFreeModule {
    pub fn new(ring: &Ring, twists: Vec<i64>) -> Self {
        GradedFreeModule { ring: ring.clone(), twists }
    }

    pub fn zero(ring: &Ring) -> Self {
        Self::new(ring, Vec::new())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    pub fn gen_degree(&self, k: usize) -> i64 {
        -self.twists[k]
    }

    pub fn gen_degrees(&self) -> Vec<i64> {
        self.twists.iter().map(|t| -t).collect()
    }

    /// Every generator degree shifted up by `s` (the module `F(-s)`).
    pub fn shift(&self, s: i64) -> Self {
        Self::new(&self.ring, self.twists.iter().map(|t| t - s).collect())
    }

    pub fn direct_sum(&self, o: &GradedFreeModule) -> Self {
        let mut t = self.twists.clone();
        t.extend_from_slice(&o.twists);
        Self::new(&self.ring, t)
    }

    pub fn slice_dim(&self, j: i64) -> usize {
        self.twists
            .iter()
            .map(|t| monomial_count(self.ring.nvars(), j + t) as usize)
            .sum()
    }

    pub fn slice_basis(&self, j: i64) -> DegreeSlice {
        let mut basis = Vec::new();
        for (k, t) in self.twists.iter().enumerate() {
            for m in monomials_of_degree(self.ring.nvars(), j + t).iter() {
                basis.push((k, m.clone()));
            }
        }
        let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        DegreeSlice { degree: j, basis, index }
    }
}

/// Ordered monomial basis of one graded component of a free module.
#[derive(Clone, Debug)]
pub struct DegreeSlice {
    pub degree: i64,
    pub basis: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
}

impl DegreeSlice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, generator: usize, m: &Monomial) -> Option<usize> {
        self.index.get(&(generator, m.clone())).copied()
    }
}

/// A matrix of polynomials `source → target`, homogeneous of `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMap {
    source: GradedFreeModule,
    target: GradedFreeModule,
    degree: i64,
    entries: Vec<Poly>,
}

impl HomMap {
    /// Validates that entry `(r,c)` is zero or homogeneous of degree
    /// `gen(c) + degree - gen(r)`.
    pub fn new(
        source: &GradedFreeModule,
        target: &GradedFreeModule,
        degree: i64,
        rows: Vec<Vec<Poly>>,
    ) -> Result<HomMap> {
        if rows.len() != target.rank() || rows.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::ShapeMismatch(format!(
                "expected a {}x{} matrix",
                target.rank(),
                source.rank()
            )));
        }
        if source.ring() != target.ring() {
            return Err(Error::ShapeMismatch("source and target rings differ".into()));
        }
        for (r, row) in rows.iter().enumerate() {
            for (c, p) in row.iter().enumerate() {
                if p.ring() != source.ring() {
                    return Err(Error::ShapeMismatch(format!("entry ({r},{c}) from another ring")));
                }
                if p.is_zero() {
                    continue;
                }
                let expected = source.gen_degree(c) + degree - target.gen_degree(r);
                if p.homogeneous_degree().map(i64::from) != Some(expected) {
                    return Err(Error::HomogeneityViolation {
                        row: r,
                        col: c,
                        expected,
                        found: p.to_string(),
                    });
                }
            }
        }
        Ok(HomMap {
            source: source.clone(),
            target: target.clone(),
            degree,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zero(source: &GradedFreeModule, target: &GradedFreeModule, degree: i64) -> HomMap {
        let ring = source.ring();
        HomMap {
            source: source.clone(),
            target: target.clone(),
            degree,
            entries: vec![ring.zero(); source.rank() * target.rank()],
        }
    }

    pub fn identity(m: &GradedFreeModule) -> HomMap {
        let mut h = HomMap::zero(m, m, 0);
        for i in 0..m.rank() {
            h.entries[i * m.rank() + i] = m.ring().one();
        }
        h
    }

    pub fn source(&self) -> &GradedFreeModule {
        &self.source
    }
    pub fn target(&self) -> &GradedFreeModule {
        &self.target
    }
    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn ring(&self) -> &Ring {
        self.source.ring()
    }
    pub fn rows(&self) -> usize {
        self.target.rank()
    }
    pub fn cols(&self) -> usize {
        self.source.rank()
    }

    pub fn entry(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols() + c]
    }

    /// Degree an entry must have (if nonzero).
    pub fn entry_degree(&self, r: usize, c: usize) -> i64 {
        self.source.gen_degree(c) + self.degree - self.target.gen_degree(r)
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.entry(r, c).clone()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    /// Overwrite one entry, re-checking its degree.
    pub fn set(&mut self, r: usize, c: usize, p: Poly) -> Result<()> {
        if !p.is_zero() {
            let expected = self.entry_degree(r, c);
            if p.homogeneous_degree().map(i64::from) != Some(expected) {
                return Err(Error::HomogeneityViolation { row: r, col: c, expected, found: p.to_string() });
            }
        }
        let cols = self.cols();
        self.entries[r * cols + c] = p;
        Ok(())
    }

    fn same_shape(&self, o: &HomMap) -> Result<()> {
        if self.source != o.source || self.target != o.target || self.degree != o.degree {
            return Err(Error::ShapeMismatch("maps differ in source, target or degree".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &HomMap) -> Result<HomMap> {
        self.same_shape(o)?;
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect();
        Ok(HomMap { entries, ..self.clone() })
    }

    pub fn sub(&self, o: &HomMap) -> Result<HomMap> {
        self.same_shape(o)?;
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect();
        Ok(HomMap { entries, ..self.clone() })
    }

    pub fn neg(&self) -> HomMap {
        HomMap { entries: self.entries.iter().map(Poly::neg).collect(), ..self.clone() }
    }

    pub fn scale(&self, c: &Scalar) -> HomMap {
        HomMap { entries: self.entries.iter().map(|p| p.scale(c)).collect(), ..self.clone() }
    }

    /// Multiply every entry by a homogeneous polynomial, raising the degree.
    pub fn scale_poly(&self, f: &Poly) -> Result<HomMap> {
        let d = match f.homogeneous_degree() {
            Some(d) => d as i64,
            None if f.is_zero() => 0,
            None => return Err(Error::NonHomogeneous(f.to_string())),
        };
        Ok(HomMap {
            entries: self.entries.iter().map(|p| p.mul(f)).collect(),
            degree: self.degree + d,
            ..self.clone()
        })
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &HomMap) -> Result<HomMap> {
        if self.source != o.target {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose: inner target has rank {}, outer source has rank {} (or twists differ)",
                o.target.rank(),
                self.source.rank()
            )));
        }
        let (n, k, m) = (self.rows(), self.cols(), o.cols());
        let ring = self.ring();
        let mut entries = Vec::with_capacity(n * m);
        for r in 0..n {
            for c in 0..m {
                let mut acc = ring.zero();
                for t in 0..k {
                    let (a, b) = (self.entry(r, t), o.entry(t, c));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                entries.push(acc);
            }
        }
        Ok(HomMap {
            source: o.source.clone(),
            target: self.target.clone(),
            degree: self.degree + o.degree,
            entries,
        })
    }

    pub fn transpose_as(&self, source: &GradedFreeModule, target: &GradedFreeModule, degree: i64) -> Result<HomMap> {
        let rows = (0..self.cols())
            .map(|c| (0..self.rows()).map(|r| self.entry(r, c).clone()).collect())
            .collect();
        HomMap::new(source, target, degree, rows)
    }

    /// Same matrix, reinterpreted with other twists/degree (checked).
    pub fn retwist(&self, source: &GradedFreeModule, target: &GradedFreeModule, degree: i64) -> Result<HomMap> {
        HomMap::new(source, target, degree, self.to_rows())
    }

    /// Sub-block with the given row and column index lists.
    pub fn block(&self, rows: &[usize], cols: &[usize], source: &GradedFreeModule, target: &GradedFreeModule, degree: i64) -> Result<HomMap> {
        let m = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.entry(r, c).clone()).collect())
            .collect();
        HomMap::new(source, target, degree, m)
    }

    /// Scalar matrix of the map from the degree-`j` slice of the source to
    /// the degree `j + degree` slice of the target.
    pub fn slice_matrix(&self, j: i64) -> ScalarMatrix {
        let src = self.source.slice_basis(j);
        let tgt = self.target.slice_basis(j + self.degree);
        self.slice_matrix_with(&src, &tgt)
    }

    pub fn slice_matrix_with(&self, src: &DegreeSlice, tgt: &DegreeSlice) -> ScalarMatrix {
        let field = self.ring().field();
        let mut m = ScalarMatrix::zeros(field, tgt.dim(), src.dim());
        for (col, (g, mono)) in src.basis.iter().enumerate() {
            for r in 0..self.rows() {
                let p = self.entry(r, *g);
                for (t, c) in p.terms() {
                    let pos = tgt
                        .position(r, &t.mul(mono))
                        .expect("homogeneous entry lands in the target slice");
                    let v = m.get(pos, col) + c;
                    m.set(pos, col, v);
                }
            }
        }
        m
    }

    /// Images of the source slice basis vectors, as sparse vectors in the
    /// target slice basis.
    pub fn slice_columns(&self, j: i64) -> (usize, Vec<SparseVec>) {
        let src = self.source.slice_basis(j);
        let tgt = self.target.slice_basis(j + self.degree);
        let mut cols = Vec::with_capacity(src.dim());
        for (g, mono) in &src.basis {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for r in 0..self.rows() {
                for (t, c) in self.entry(r, *g).terms() {
                    let pos = tgt.position(r, &t.mul(mono)).expect("homogeneous entry lands in the target slice");
                    match acc.get_mut(&pos) {
                        Some(x) => *x = &*x + c,
                        None => {
                            acc.insert(pos, c.clone());
                        }
                    }
                }
            }
            cols.push(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect());
        }
        (tgt.dim(), cols)
    }

    /// Rank of the degree-`j` slice map.
    pub fn slice_rank(&self, j: i64) -> usize {
        sparse_rank(self.slice_columns(j).1)
    }

    /// Reduce coefficients into another field.
    pub fn to_ring(&self, ring: &Ring) -> Result<HomMap> {
        let s = GradedFreeModule::new(ring, self.source.twists.clone());
        let t = GradedFreeModule::new(ring, self.target.twists.clone());
        let mut entries = Vec::with_capacity(self.entries.len());
        for p in &self.entries {
            entries.push(p.to_ring(ring)?);
        }
        Ok(HomMap { source: s, target: t, degree: self.degree, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(vars: &[&str]) -> Ring {
        Ring::new(Field::Rational, vars).unwrap()
    }

    #[test]
    fn parse_print_round_trip() {
        let r = ring(&["x1", "x2", "x3"]);
        for s in ["3*x1^2*x2 - x3", "-1", "0", "1/2*x1 + x2", "x1*x2*x3 - 2*x3^3", "-x1 + 7"] {
            let p = r.parse(s).unwrap();
            assert_eq!(r.parse(&p.to_string()).unwrap(), p, "{s}");
        }
        assert_eq!(r.parse("x2 + x1").unwrap().to_string(), "x1 + x2");
        assert_eq!(r.parse("x1 - x1").unwrap(), r.zero());
        assert_eq!(r.parse("2 * x1 ^ 2").unwrap().to_string(), "2*x1^2");
        assert!(r.parse("x4").is_err());
        assert!(r.parse("x1 +").is_err());
        assert!(r.parse("1/0").is_err());
    }

    #[test]
    fn grlex_order() {
        let r = ring(&["x", "y", "z"]);
        let p = r.parse("z + y^2 + x*z + x^2 + 1").unwrap();
        assert_eq!(p.to_string(), "x^2 + x*z + y^2 + z + 1");
        assert!(!p.is_homogeneous());
    }

    #[test]
    fn prime_field_parsing() {
        let r = Ring::new(Field::prime(3).unwrap(), &["x"]).unwrap();
        assert_eq!(r.parse("4*x - 1/2").unwrap().to_string(), "x + 1");
    }

    #[test]
    fn slice_basis_examples() {
        let r = ring(&["x", "y"]);
        let s = GradedFreeModule::new(&r, vec![0]);
        let b = s.slice_basis(1);
        assert_eq!(b.dim(), 2);
        assert_eq!(b.basis[0].1, Monomial::var(2, 0));
        assert_eq!(GradedFreeModule::new(&r, vec![-2]).slice_basis(1).dim(), 0);
        let r3 = ring(&["x1", "x2", "x3"]);
        let f = GradedFreeModule::new(&r3, vec![0, -1, -1, -2]);
        assert_eq!(f.slice_basis(2).dim(), 13);
        assert_eq!(f.slice_dim(2), 13);
    }

    #[test]
    fn slice_matrix_examples() {
        let r = ring(&["x"]);
        let s = GradedFreeModule::new(&r, vec![0]);
        let mx = HomMap::new(&s, &s, 1, vec![vec![r.var(0)]]).unwrap();
        for j in 0..4 {
            assert_eq!(mx.slice_matrix(j), ScalarMatrix::identity(Field::Rational, 1));
        }
        let r2 = ring(&["x1", "x2"]);
        let src = GradedFreeModule::new(&r2, vec![-1, -1]);
        let tgt = GradedFreeModule::new(&r2, vec![0]);
        let phi = HomMap::new(&src, &tgt, 0, vec![vec![r2.var(0), r2.var(1)]]).unwrap();
        assert_eq!(phi.slice_matrix(1), ScalarMatrix::identity(Field::Rational, 2));
        assert!(HomMap::zero(&src, &tgt, 0).slice_matrix(3).is_zero());
        for j in 0..4 {
            assert_eq!(phi.slice_rank(j), phi.slice_matrix(j).rank());
        }
    }

    #[test]
    fn homogeneity_is_enforced() {
        let r = ring(&["x", "y"]);
        let s = GradedFreeModule::new(&r, vec![0]);
        let bad = HomMap::new(&s, &s, 1, vec![vec![r.parse("x^2").unwrap()]]);
        assert!(matches!(bad, Err(Error::HomogeneityViolation { expected: 1, .. })));
        let bad = HomMap::new(&s, &s, 1, vec![vec![r.parse("x + 1").unwrap()]]);
        assert!(bad.is_err());
    }

    #[test]
    fn compose_examples() {
        let r = ring(&["x1", "x2"]);
        let f0 = GradedFreeModule::new(&r, vec![0]);
        let f1 = GradedFreeModule::new(&r, vec![-1, -1]);
        let f2 = GradedFreeModule::new(&r, vec![-2]);
        let d1 = HomMap::new(&f1, &f0, 0, vec![vec![r.var(0), r.var(1)]]).unwrap();
        let d2 = HomMap::new(&f2, &f1, 0, vec![vec![r.var(1)], vec![r.var(0).neg()]]).unwrap();
        let c = d1.compose(&d2).unwrap();
        assert!(c.is_zero());
        assert!(d2.compose(&d2).is_err());
        let z = HomMap::zero(&f2, &f1, 0);
        assert!(d1.compose(&z).unwrap().is_zero());
        for j in 0..4 {
            let lhs = c.slice_matrix(j);
            let rhs = d1.slice_matrix(j).mul(&d2.slice_matrix(j)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
