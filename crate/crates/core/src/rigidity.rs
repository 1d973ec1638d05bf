//! Complete intersections: the exterior-algebra description of their Ext
//! algebra, a-rigidity tests, non-rigid windows and explicit witnesses.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::complex::{end_cohomology_dim, koszul, subsets, Complex, EndElement};
use crate::deform::{assemble, find_conjugating_homotopy, LiftState};
use crate::diffmod::{fold, h0_hilbert, DifferentialModule};
use crate::error::{Error, Result};
use crate::field::{Field, SparseEchelon, SparseVec};
use crate::poly::{binomial, monomials_of_degree, Monomial, Poly, Ring};

/// `S/(f_1..f_c)` for a homogeneous regular sequence, degrees ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteIntersection {
    nvars: usize,
    degrees: Vec<i64>,
    gens: Option<(Ring, Vec<Poly>)>,
}

impl CompleteIntersection {
    /// Generators are sorted by degree (stably).
    pub fn from_gens(ring: &Ring, gens: Vec<Poly>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Precondition("a complete intersection needs at least one generator".into()));
        }
        let mut with_deg = Vec::new();
        for g in gens {
            match g.homogeneous_degree() {
                Some(d) if d >= 1 => with_deg.push((d as i64, g)),
                _ => return Err(Error::NonHomogeneous(format!("`{g}` is not homogeneous of positive degree"))),
            }
        }
        with_deg.sort_by_key(|(d, _)| *d);
        let degrees = with_deg.iter().map(|(d, _)| *d).collect();
        let gens = with_deg.into_iter().map(|(_, g)| g).collect();
        Ok(CompleteIntersection { nvars: ring.nvars(), degrees, gens: Some((ring.clone(), gens)) })
    }

    /// Degrees-only mode; the regular sequence is trusted to exist.
    pub fn from_degrees(nvars: usize, mut degrees: Vec<i64>) -> Result<Self> {
        if degrees.is_empty() || degrees.iter().any(|&d| d < 1) {
            return Err(Error::Precondition("degrees must be positive and nonempty".into()));
        }
        if nvars == 0 || degrees.len() > nvars {
            return Err(Error::Precondition(format!(
                "{} generators cannot form a regular sequence in {nvars} variables",
                degrees.len()
            )));
        }
        degrees.sort_unstable();
        Ok(CompleteIntersection { nvars, degrees, gens: None })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn codim(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_artinian(&self) -> bool {
        self.codim() == self.nvars
    }

    pub fn is_linear(&self) -> bool {
        self.degrees.iter().all(|&d| d == 1)
    }

    pub fn generators(&self) -> Option<(&Ring, &[Poly])> {
        self.gens.as_ref().map(|(r, g)| (r, g.as_slice()))
    }

    /// Explicit generators; degrees-only inputs become `x_k^{d_k}` over ℚ.
    pub fn realize(&self) -> (Ring, Vec<Poly>) {
        if let Some((r, g)) = &self.gens {
            return (r.clone(), g.clone());
        }
        let ring = Ring::with_indexed_vars(Field::Rational, "x", self.nvars).expect("positive variable count");
        let gens = self.degrees.iter().enumerate().map(|(k, &d)| ring.var(k).pow(d as u32)).collect();
        (ring, gens)
    }

    pub fn koszul(&self) -> Complex {
        let (ring, gens) = self.realize();
        koszul(&ring, &gens).expect("generators are homogeneous")
    }

    /// `dim (S/I)_m` from `∏(1−t^{d})/(1−t)^n`.
    pub fn hilbert(&self, m: i64) -> i128 {
        if m < 0 {
            return 0;
        }
        let mut num: BTreeMap<i64, i128> = BTreeMap::from([(0, 1)]);
        for &d in &self.degrees {
            let mut next = num.clone();
            for (k, c) in &num {
                *next.entry(k + d).or_insert(0) -= c;
            }
            num = next;
        }
        let n = self.nvars as u128;
        num.iter()
            .filter(|(k, _)| **k <= m)
            .map(|(k, c)| c * binomial((m - k) as u128 + n - 1, n - 1) as i128)
            .sum()
    }

    /// `|d| − n`, the top degree of an Artinian quotient.
    pub fn socle_degree(&self) -> Result<i64> {
        if !self.is_artinian() {
            return Err(Error::NotArtinian(format!("{} generators in {} variables", self.codim(), self.nvars)));
        }
        Ok(self.degrees.iter().sum::<i64>() - self.nvars as i64)
    }

    /// `dim Ext^i(S/I, S/I)_j = Σ_{|J| = i} dim (S/I)_{j + d_J}`.
    pub fn ext_dim(&self, i: usize, j: i64) -> usize {
        subsets(self.codim(), i)
            .iter()
            .map(|jset| self.hilbert(j + jset.iter().map(|&r| self.degrees[r]).sum::<i64>()) as usize)
            .sum()
    }

    /// Internal degrees where `Ext^i` can be nonzero, for Artinian quotients.
    pub fn ext_support(&self, i: usize) -> Result<Vec<i64>> {
        let soc = self.socle_degree()?;
        let mut out = Vec::new();
        let sums: Vec<i64> = subsets(self.codim(), i).iter().map(|j| j.iter().map(|&r| self.degrees[r]).sum()).collect();
        let (Some(&lo), Some(&hi)) = (sums.iter().max(), sums.iter().min()) else {
            return Ok(out);
        };
        for j in -lo..=soc - hi {
            if self.ext_dim(i, j) > 0 {
                out.push(j);
            }
        }
        Ok(out)
    }
}

/// `ci_ext_dim` as a free function.
pub fn ci_ext_dim(ci: &CompleteIntersection, i: usize, j: i64) -> usize {
    ci.ext_dim(i, j)
}

/// An element of `S ⊗ ΛV`, `V = ⟨e_1..e_c⟩`, keyed by index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtElement {
    ring: Ring,
    rank: usize,
    terms: BTreeMap<Vec<usize>, Poly>,
}

fn inversions(v: &[usize]) -> usize {
    let mut n = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                n += 1;
            }
        }
    }
    n
}

impl ExtElement {
    pub fn zero(ring: &Ring, rank: usize) -> Self {
        ExtElement { ring: ring.clone(), rank, terms: BTreeMap::new() }
    }

    /// `p · e_{j_1} ∧ ... ∧ e_{j_k}` for 0-based indices in any order.
    pub fn monomial(ring: &Ring, rank: usize, p: Poly, indices: &[usize]) -> Self {
        let mut e = Self::zero(ring, rank);
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        let repeated = sorted.windows(2).any(|w| w[0] == w[1]);
        assert!(sorted.iter().all(|&i| i < rank), "index out of range");
        if repeated || p.is_zero() {
            return e;
        }
        let p = if inversions(indices) % 2 == 1 { p.neg() } else { p };
        e.terms.insert(sorted, p);
        e
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_add(&mut self, k: Vec<usize>, p: Poly) {
        let v = match self.terms.remove(&k) {
            Some(q) => q.add(&p),
            None => p,
        };
        if !v.is_zero() {
            self.terms.insert(k, v);
        }
    }

    pub fn add(&self, o: &ExtElement) -> ExtElement {
        let mut out = self.clone();
        for (k, p) in &o.terms {
            out.insert_add(k.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, o: &ExtElement) -> ExtElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> ExtElement {
        ExtElement { terms: self.terms.iter().map(|(k, p)| (k.clone(), p.neg())).collect(), ..self.clone() }
    }

    pub fn scale(&self, f: &Poly) -> ExtElement {
        let mut out = Self::zero(&self.ring, self.rank);
        for (k, p) in &self.terms {
            out.insert_add(k.clone(), p.mul(f));
        }
        out
    }

    /// Exterior product with Koszul signs.
    pub fn wedge(&self, o: &ExtElement) -> ExtElement {
        let mut out = Self::zero(&self.ring, self.rank);
        for (j, p) in &self.terms {
            for (k, q) in &o.terms {
                if j.iter().any(|x| k.contains(x)) {
                    continue;
                }
                let mut seq = j.clone();
                seq.extend_from_slice(k);
                let sign_odd = inversions(&seq) % 2 == 1;
                seq.sort_unstable();
                let c = p.mul(q);
                out.insert_add(seq, if sign_odd { c.neg() } else { c });
            }
        }
        out
    }

    /// Exterior degree if all terms share one.
    pub fn exterior_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Vec::len);
        let first = it.next()?;
        it.all(|l| l == first).then_some(first)
    }

    /// Contraction `e_K ↦ Σ_J p_J ι_J(e_K)` on the Koszul complex `c` of a
    /// length-`rank` sequence, where `ι_J = ι_{j_k} ∘ ... ∘ ι_{j_1}` and
    /// `ι_j(e_L) = (−1)^{pos(j, L)} e_{L∖j}`.
    pub fn contraction(&self, c: &Complex, degrees: &[i64]) -> Result<EndElement> {
        let k = self.exterior_degree().unwrap_or(0) as i64;
        let internal = match self.terms.iter().next() {
            None => 0,
            Some((j, p)) => p.homogeneous_degree().ok_or_else(|| Error::NonHomogeneous(p.to_string()))? as i64
                - j.iter().map(|&r| degrees[r]).sum::<i64>(),
        };
        let bases: Vec<Vec<Vec<usize>>> = (0..=self.rank).map(|i| subsets(self.rank, i)).collect();
        let mut out = EndElement::zero(c, k, internal);
        for n in k..=self.rank as i64 {
            let (src, tgt) = (&bases[n as usize], &bases[(n - k) as usize]);
            let mut rows = vec![vec![c.ring().zero(); src.len()]; tgt.len()];
            for (col, kset) in src.iter().enumerate() {
                for (jset, p) in &self.terms {
                    let mut cur = kset.clone();
                    let mut neg = false;
                    let mut ok = true;
                    for j in jset {
                        match cur.iter().position(|x| x == j) {
                            Some(pos) => {
                                neg ^= pos % 2 == 1;
                                cur.remove(pos);
                            }
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let row = tgt.iter().position(|t| *t == cur).expect("subset present");
                    let v = if neg { p.neg() } else { p.clone() };
                    rows[row][col] = rows[row][col].add(&v);
                }
            }
            let h = crate::poly::HomMap::new(c.module(n), c.module(n - k), internal, rows)?;
            out.set_component(n, h)?;
        }
        Ok(out)
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, p)| {
                let e: Vec<String> = k.iter().map(|i| format!("e{}", i + 1)).collect();
                if k.is_empty() {
                    format!("({p})")
                } else {
                    format!("({p})*{}", e.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Where a rigidity test gets its Ext dimensions.
#[derive(Clone, Copy, Debug)]
pub enum RigiditySource<'a> {
    Ci(&'a CompleteIntersection),
    Anchor(&'a Complex),
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RigidityReport {
    pub degree: i64,
    pub rigid: bool,
    /// `(i, a − i·a, dim)` for `2 ≤ i ≤ ℓ`.
    pub slices: Vec<(usize, i64, usize)>,
}

/// Rigid iff `Ext^i_{a−ia}` vanishes for every `2 ≤ i ≤ ℓ`.
pub fn is_a_rigid(src: RigiditySource<'_>, a: i64) -> RigidityReport {
    let ell = match src {
        RigiditySource::Ci(ci) => ci.codim(),
        RigiditySource::Anchor(c) => c.length(),
    };
    let slices: Vec<(usize, i64, usize)> = (2..=ell)
        .map(|i| {
            let j = a - i as i64 * a;
            let dim = match src {
                RigiditySource::Ci(ci) => ci.ext_dim(i, j),
                RigiditySource::Anchor(c) => end_cohomology_dim(c, i as i64, j),
            };
            (i, j, dim)
        })
        .collect();
    RigidityReport { degree: a, rigid: slices.iter().all(|s| s.2 == 0), slices }
}

/// The closed interval of degrees where an Artinian CI is not rigid.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct RigidityWindow {
    pub lo: i64,
    pub hi: i64,
    pub linear: bool,
}

pub fn rigidity_window(ci: &CompleteIntersection) -> Result<RigidityWindow> {
    if !ci.is_artinian() {
        return Err(Error::NotArtinian(format!("{} generators in {} variables", ci.codim(), ci.nvars)));
    }
    let n = ci.nvars;
    if n < 2 {
        return Err(Error::Precondition("the rigidity window needs at least two variables".into()));
    }
    let d = &ci.degrees;
    let total: i64 = d.iter().sum();
    let w = if ci.is_linear() {
        RigidityWindow { lo: 2, hi: 2, linear: true }
    } else {
        RigidityWindow { lo: d[0] + d[1] + n as i64 - total, hi: d[n - 2] + d[n - 1], linear: false }
    };
    for (a, expect_rigid) in [(w.lo - 1, true), (w.lo, false), (w.hi, false), (w.hi + 1, true)] {
        if is_a_rigid(RigiditySource::Ci(ci), a).rigid != expect_rigid {
            return Err(Error::InvariantViolation(format!(
                "window [{}, {}] disagrees with the Ext computation at a = {a}",
                w.lo, w.hi
            )));
        }
    }
    Ok(w)
}

/// A flag of degree `a` on the Koszul complex that is not the fold.
#[derive(Clone, Debug)]
pub struct Witness {
    /// 1-based pair `(i, i+1)` of the class `m·e_i∧e_{i+1}`.
    pub pair: (usize, usize),
    pub monomial_degree: i64,
    pub monomial: Poly,
    pub class: ExtElement,
    pub flag: DifferentialModule,
    pub state: LiftState,
}

fn ideal_span(c: &Complex, j: i64) -> (SparseEchelon, crate::poly::DegreeSlice) {
    let mut ech = SparseEchelon::new();
    if let Some(d1) = c.differential(1) {
        for v in d1.slice_columns(j).1 {
            ech.insert(v);
        }
    }
    (ech, c.module(0).slice_basis(j))
}

/// Lex-first monomial of degree `j` that is nonzero in `S/I`.
pub fn standard_monomial(c: &Complex, j: i64) -> Option<Monomial> {
    let (ech, basis) = ideal_span(c, j);
    let field = c.ring().field();
    monomials_of_degree(c.ring().nvars(), j).iter().find_map(|m| {
        let pos = basis.position(0, m)?;
        let v: SparseVec = vec![(pos, field.one())];
        (!ech.contains(v)).then(|| m.clone())
    })
}

pub fn nonrigidity_witness(ci: &CompleteIntersection, a: i64) -> Result<Witness> {
    let w = rigidity_window(ci)?;
    if a < w.lo || a > w.hi {
        return Err(Error::Precondition(format!("a = {a} lies outside the non-rigid window [{}, {}]", w.lo, w.hi)));
    }
    let soc = ci.socle_degree()?;
    let d = &ci.degrees;
    let (ring, _) = ci.realize();
    let k = ci.koszul();
    let n = ci.codim();
    let (i, j) = (0..n - 1)
        .map(|i| (i, d[i] + d[i + 1] - a))
        .find(|&(_, j)| (0..=soc).contains(&j))
        .ok_or_else(|| Error::NoWitnessDegree(format!("no pair (i, i+1) has d_i + d_(i+1) − {a} in [0, {soc}]")))?;
    let mono = standard_monomial(&k, j)
        .ok_or_else(|| Error::NoWitnessDegree(format!("(S/I)_{j} has no standard monomial")))?;
    let m = ring.term(ring.field().one(), mono);
    let class = ExtElement::monomial(&ring, n, m.clone(), &[i, i + 1]);
    let delta2 = class.contraction(&k, d)?.parity_twist();
    let mut deltas = vec![delta2];
    for s in 3..=n as i64 {
        deltas.push(EndElement::zero(&k, s, a * (1 - s)));
    }
    let state = LiftState::with_deltas(&k, a, deltas)?;
    let flag = assemble(&state)?;
    if n >= 2 {
        let stage2 = LiftState::with_deltas(&k, a, state.deltas()[..1].to_vec())?;
        let fold2 = LiftState::with_deltas(&k, a, vec![EndElement::zero(&k, 2, -a)])?;
        if find_conjugating_homotopy(&fold2, &stage2)?.is_some() {
            return Err(Error::InvariantViolation(format!("witness at a = {a} is conjugate to the fold")));
        }
    }
    Ok(Witness { pair: (i + 1, i + 2), monomial_degree: j, monomial: m, class, flag, state })
}

/// `(a₋, a₊)`: rigid for all `a ≤ a₋` and all `a ≥ a₊`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct Thresholds {
    pub a_minus: i64,
    pub a_plus: i64,
    pub always_rigid: bool,
}

fn thresholds_from(nonrigid: &[i64]) -> Thresholds {
    match (nonrigid.iter().min(), nonrigid.iter().max()) {
        (Some(&lo), Some(&hi)) => Thresholds { a_minus: lo - 1, a_plus: hi + 1, always_rigid: false },
        _ => Thresholds { a_minus: 0, a_plus: 0, always_rigid: true },
    }
}

/// Internal degrees `d` with `a(1−i) = d` for integral `a`, mapped to `a`.
fn degree_to_a(i: i64, d: i64) -> Option<i64> {
    (d % (1 - i) == 0).then(|| d / (1 - i))
}

pub fn rigid_thresholds(src: RigiditySource<'_>) -> Result<Thresholds> {
    let mut nonrigid = Vec::new();
    match src {
        RigiditySource::Ci(ci) => {
            for i in 2..=ci.codim() {
                for d in ci.ext_support(i)? {
                    if let Some(a) = degree_to_a(i as i64, d) {
                        nonrigid.push(a);
                    }
                }
            }
        }
        RigiditySource::Anchor(c) => {
            if c.length() < 2 {
                return Ok(thresholds_from(&[]));
            }
            let (lo_h, hi_h) = homology_support(c)?;
            let Some((lo_h, hi_h)) = lo_h.zip(hi_h) else {
                return Ok(thresholds_from(&[]));
            };
            for i in 2..=c.length() as i64 {
                let g = c.module(i).gen_degrees();
                let (Some(&gmin), Some(&gmax)) = (g.iter().min(), g.iter().max()) else { continue };
                for d in lo_h - gmax..=hi_h - gmin {
                    if let Some(a) = degree_to_a(i, d) {
                        if end_cohomology_dim(c, i, d) > 0 {
                            nonrigid.push(a);
                        }
                    }
                }
            }
        }
    }
    nonrigid.sort_unstable();
    nonrigid.dedup();
    Ok(thresholds_from(&nonrigid))
}

/// Lowest and highest degree of `H_0`, verified to be of finite length.
fn homology_support(c: &Complex) -> Result<(Option<i64>, Option<i64>)> {
    let g0 = c.module(0).gen_degrees();
    let (Some(&lo), Some(&top)) = (g0.iter().min(), g0.iter().max()) else {
        return Ok((None, None));
    };
    let f = fold(c, 0);
    let (_, hi) = crate::diffmod::default_window(&f);
    let h = h0_hilbert(c, lo, hi.max(top));
    let vanish = h.iter().find(|(j, v)| **j >= top && **v == 0).map(|(j, _)| *j);
    let Some(vanish) = vanish else {
        return Err(Error::SupportUnbounded(format!("H_0 does not vanish by degree {}", hi.max(top))));
    };
    let nonzero: Vec<i64> = h.iter().filter(|(j, v)| **j < vanish && **v > 0).map(|(j, _)| *j).collect();
    Ok((nonzero.first().copied(), nonzero.last().copied()))
}
