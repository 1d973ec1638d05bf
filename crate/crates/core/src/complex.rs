//! Finite free complexes, the Koszul and pfaffian resolutions, and the
//! endomorphism complex `End(F)` with its slice-wise linear algebra.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::field::{kernel_basis, solve, sparse_rank, Scalar, ScalarMatrix, SparseVec};
use crate::poly::{monomials_of_degree, GradedFreeModule, HomMap, Monomial, Poly, Ring};

/// `F_0 ← F_1 ← ... ← F_ℓ` with degree-0 differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    ring: Ring,
    modules: Vec<GradedFreeModule>,
    maps: Vec<HomMap>,
    zero: GradedFreeModule,
}

impl Complex {
    /// Builds and validates (shapes, homogeneity, `∂² = 0`).
    pub fn new(ring: &Ring, modules: Vec<GradedFreeModule>, maps: Vec<HomMap>) -> Result<Complex> {
        let c = Complex::unchecked(ring, modules, maps)?;
        check_complex(&c)?;
        Ok(c)
    }

    /// Shape checks only; `∂² = 0` is left to [`check_complex`].
    pub fn unchecked(ring: &Ring, modules: Vec<GradedFreeModule>, maps: Vec<HomMap>) -> Result<Complex> {
        if modules.is_empty() {
            return Err(Error::ComplexViolation("a complex needs at least F_0".into()));
        }
        if maps.len() + 1 != modules.len() {
            return Err(Error::ComplexViolation(format!(
                "{} modules need {} differentials, got {}",
                modules.len(),
                modules.len() - 1,
                maps.len()
            )));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.source() != &modules[i + 1] || m.target() != &modules[i] {
                return Err(Error::ComplexViolation(format!("differential {} has the wrong source or target", i + 1)));
            }
            if m.degree() != 0 {
                return Err(Error::ComplexViolation(format!("differential {} has degree {}", i + 1, m.degree())));
            }
        }
        if modules.iter().any(|m| m.ring() != ring) {
            return Err(Error::ComplexViolation("modules over different rings".into()));
        }
        Ok(Complex { ring: ring.clone(), modules, maps, zero: GradedFreeModule::zero(ring) })
    }

    /// From twist lists and matrix rows (`maps[i]` is `∂_{i+1}`).
    pub fn from_twists(ring: &Ring, twists: Vec<Vec<i64>>, maps: Vec<Vec<Vec<Poly>>>) -> Result<Complex> {
        let modules: Vec<GradedFreeModule> = twists.into_iter().map(|t| GradedFreeModule::new(ring, t)).collect();
        if maps.len() + 1 != modules.len() {
            return Err(Error::ComplexViolation(format!(
                "{} modules need {} differentials, got {}",
                modules.len(),
                modules.len().saturating_sub(1),
                maps.len()
            )));
        }
        let mut hm = Vec::new();
        for (i, rows) in maps.into_iter().enumerate() {
            hm.push(HomMap::new(&modules[i + 1], &modules[i], 0, rows)?);
        }
        Complex::new(ring, modules, hm)
    }

    /// The complex with a single rank-0 module.
    pub fn zero(ring: &Ring) -> Complex {
        Complex::unchecked(ring, vec![GradedFreeModule::zero(ring)], Vec::new()).expect("zero complex")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// `ℓ`, the index of the last module.
    pub fn length(&self) -> usize {
        self.maps.len()
    }

    /// `F_i`, or the zero module outside `[0, ℓ]`.
    pub fn module(&self, i: i64) -> &GradedFreeModule {
        if i < 0 || i as usize >= self.modules.len() {
            &self.zero
        } else {
            &self.modules[i as usize]
        }
    }

    pub fn modules(&self) -> &[GradedFreeModule] {
        &self.modules
    }

    /// `∂_i: F_i → F_{i-1}` for `1 ≤ i ≤ ℓ`.
    pub fn differential(&self, i: i64) -> Option<&HomMap> {
        if i < 1 || i as usize > self.maps.len() {
            None
        } else {
            Some(&self.maps[i as usize - 1])
        }
    }

    pub fn maps(&self) -> &[HomMap] {
        &self.maps
    }

    /// True when no differential has a nonzero constant entry.
    pub fn is_minimal(&self) -> bool {
        self.maps.iter().all(|m| {
            (0..m.rows()).all(|r| (0..m.cols()).all(|c| m.entry(r, c).constant_term().is_zero()))
        })
    }

    /// Same complex with coefficients moved to `ring` (same variables).
    pub fn to_ring(&self, ring: &Ring) -> Result<Complex> {
        let modules = self.modules.iter().map(|m| GradedFreeModule::new(ring, m.twists().to_vec())).collect();
        let mut maps = Vec::new();
        for m in &self.maps {
            maps.push(m.to_ring(ring)?);
        }
        Complex::new(ring, modules, maps)
    }

    /// The differential as an element of `End^1_0`.
    pub fn differential_end(&self) -> EndElement {
        let mut e = EndElement::zero(self, 1, 0);
        for n in 1..=self.length() as i64 {
            e.components.insert(n, self.differential(n).unwrap().clone());
        }
        e
    }

    /// Smallest and largest generator degree over all modules.
    pub fn generator_degree_range(&self) -> Option<(i64, i64)> {
        let all: Vec<i64> = self.modules.iter().flat_map(|m| m.gen_degrees()).collect();
        Some((*all.iter().min()?, *all.iter().max()?))
    }
}

/// Symbolic validation of a complex: every `∂_{i-1} ∘ ∂_i` vanishes.
pub fn check_complex(c: &Complex) -> Result<()> {
    for i in 2..=c.length() as i64 {
        let prod = c.differential(i - 1).unwrap().compose(c.differential(i).unwrap())?;
        if !prod.is_zero() {
            let (r, col) = (0..prod.rows())
                .flat_map(|r| (0..prod.cols()).map(move |c| (r, c)))
                .find(|&(r, c)| !prod.entry(r, c).is_zero())
                .unwrap();
            return Err(Error::ComplexViolation(format!(
                "∂_{}∘∂_{} has entry ({r},{col}) = {}",
                i - 1,
                i,
                prod.entry(r, col)
            )));
        }
    }
    Ok(())
}

/// Index sets of size `k` in `0..n`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Koszul complex on homogeneous `f`: `F_i` has basis `e_J`, `|J| = i`,
/// and `∂(e_J) = Σ_s (-1)^s f_{j_s} e_{J∖j_s}`.
pub fn koszul(ring: &Ring, f: &[Poly]) -> Result<Complex> {
    if f.is_empty() {
        return Err(Error::NonHomogeneous("the Koszul complex needs at least one element".into()));
    }
    let mut degs = Vec::new();
    for p in f {
        match p.homogeneous_degree() {
            Some(d) if d >= 1 => degs.push(d as i64),
            _ => return Err(Error::NonHomogeneous(format!("`{p}` is not homogeneous of positive degree"))),
        }
    }
    let c = f.len();
    let bases: Vec<Vec<Vec<usize>>> = (0..=c).map(|i| subsets(c, i)).collect();
    let modules: Vec<GradedFreeModule> = bases
        .iter()
        .map(|b| GradedFreeModule::new(ring, b.iter().map(|j| -j.iter().map(|&r| degs[r]).sum::<i64>()).collect()))
        .collect();
    let mut maps = Vec::new();
    for i in 1..=c {
        let row_index: HashMap<&Vec<usize>, usize> = bases[i - 1].iter().enumerate().map(|(k, j)| (j, k)).collect();
        let mut rows = vec![vec![ring.zero(); bases[i].len()]; bases[i - 1].len()];
        for (col, j) in bases[i].iter().enumerate() {
            for (s, &js) in j.iter().enumerate() {
                let rest: Vec<usize> = j.iter().copied().filter(|&x| x != js).collect();
                let p = if s % 2 == 0 { f[js].clone() } else { f[js].neg() };
                rows[row_index[&rest]][col] = p;
            }
        }
        maps.push(HomMap::new(&modules[i], &modules[i - 1], 0, rows)?);
    }
    Complex::new(ring, modules, maps)
}

/// Pfaffian of a skew-symmetric matrix, expanded along the first row.
pub fn pfaffian(m: &[Vec<Poly>], ring: &Ring) -> Poly {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    if n % 2 == 1 {
        return ring.zero();
    }
    let mut acc = ring.zero();
    for j in 1..n {
        if m[0][j].is_zero() {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor: Vec<Vec<Poly>> = keep.iter().map(|&r| keep.iter().map(|&c| m[r][c].clone()).collect()).collect();
        let term = m[0][j].mul(&pfaffian(&minor, ring));
        acc = if j % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// The Buchsbaum–Eisenbud resolution of the 4×4 pfaffians of a generic
/// 5×5 skew matrix, with its DG-algebra structure.
#[derive(Clone, Debug)]
pub struct PfaffianResolution {
    pub complex: Complex,
    /// The generic skew matrix `X`.
    pub matrix: Vec<Vec<Poly>>,
    /// `pf[k]` is the pfaffian of `X` with row and column `k` deleted.
    pub pf: Vec<Poly>,
    /// `products[i][j][k]`: coefficient of `f_k` in `e_i e_j` (0-based).
    pub products: Vec<Vec<Vec<Poly>>>,
}

fn perm_sign(v: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                s = -s;
            }
        }
    }
    s
}

/// Uses the first ten ring variables as `x12, x13, x14, x15, x23, x24,
/// x25, x34, x35, x45`.
#[allow(clippy::needless_range_loop)]
pub fn pfaffian_resolution(ring: &Ring) -> Result<PfaffianResolution> {
    if ring.nvars() < 10 {
        return Err(Error::RingShapeMismatch(format!(
            "the generic 5x5 skew matrix needs 10 variables, ring has {}",
            ring.nvars()
        )));
    }
    let mut var_of = HashMap::new();
    let mut v = 0;
    for i in 0..5 {
        for j in i + 1..5 {
            var_of.insert((i, j), v);
            v += 1;
        }
    }
    let x = |i: usize, j: usize| -> Poly {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => ring.var(var_of[&(i, j)]),
            std::cmp::Ordering::Greater => ring.var(var_of[&(j, i)]).neg(),
            std::cmp::Ordering::Equal => ring.zero(),
        }
    };
    let matrix: Vec<Vec<Poly>> = (0..5).map(|i| (0..5).map(|j| x(i, j)).collect()).collect();
    let pf: Vec<Poly> = (0..5)
        .map(|k| {
            let keep: Vec<usize> = (0..5).filter(|&r| r != k).collect();
            let sub: Vec<Vec<Poly>> = keep.iter().map(|&r| keep.iter().map(|&c| matrix[r][c].clone()).collect()).collect();
            pfaffian(&sub, ring)
        })
        .collect();
    let f0 = GradedFreeModule::new(ring, vec![0]);
    let f1 = GradedFreeModule::new(ring, vec![-2; 5]);
    let f2 = GradedFreeModule::new(ring, vec![-3; 5]);
    let f3 = GradedFreeModule::new(ring, vec![-5]);
    let d1_row: Vec<Poly> = (0..5).map(|k| if k % 2 == 0 { pf[k].clone() } else { pf[k].neg() }).collect();
    let d1 = HomMap::new(&f1, &f0, 0, vec![d1_row.clone()])?;
    let d2 = HomMap::new(&f2, &f1, 0, matrix.clone())?;
    let d3 = HomMap::new(&f3, &f2, 0, d1_row.iter().map(|p| vec![p.clone()]).collect())?;
    let complex = Complex::new(ring, vec![f0, f1, f2, f3], vec![d1, d2, d3])?;

    let mut products = vec![vec![vec![ring.zero(); 5]; 5]; 5];
    for i in 0..5 {
        for j in i + 1..5 {
            for k in (0..5).filter(|&k| k != i && k != j) {
                let rest: Vec<usize> = (0..5).filter(|&r| r != i && r != j && r != k).collect();
                let (i1, j1, k1) = (i as i64 + 1, j as i64 + 1, k as i64 + 1);
                let sign = if (i1 + j1 + k1 + 1) % 2 == 0 { 1 } else { -1 } * perm_sign(&[i, j, k]);
                let p = x(rest[0], rest[1]);
                let p = if sign > 0 { p } else { p.neg() };
                products[i][j][k] = p.clone();
                products[j][i][k] = p.neg();
            }
        }
    }
    Ok(PfaffianResolution { complex, matrix, pf, products })
}

impl PfaffianResolution {
    /// Left multiplication by `e_i` (`1 ≤ i ≤ 5`), an element of
    /// `End^{-1}` of internal degree 2.
    pub fn left_mult(&self, i: usize) -> Result<EndElement> {
        if !(1..=5).contains(&i) {
            return Err(Error::Precondition(format!("e_{i} is not a basis element")));
        }
        let c = &self.complex;
        let ring = c.ring();
        let i = i - 1;
        let mut e = EndElement::zero(c, -1, 2);
        let col: Vec<Vec<Poly>> = (0..5).map(|k| vec![if k == i { ring.one() } else { ring.zero() }]).collect();
        e.set_component(0, HomMap::new(c.module(0), c.module(1), 2, col)?)?;
        let mid: Vec<Vec<Poly>> = (0..5).map(|k| (0..5).map(|j| self.products[i][j][k].clone()).collect()).collect();
        e.set_component(1, HomMap::new(c.module(1), c.module(2), 2, mid)?)?;
        let row: Vec<Poly> = (0..5).map(|k| if k == i { ring.one() } else { ring.zero() }).collect();
        e.set_component(2, HomMap::new(c.module(2), c.module(3), 2, vec![row])?)?;
        Ok(e)
    }
}

/// A map `F → F[-m]` of internal degree `d`: components `φ_n: F_n → F_{n-m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndElement {
    degree: i64,
    internal: i64,
    components: BTreeMap<i64, HomMap>,
}

/// Indices `n` with both `F_n` and `F_{n-m}` inside the complex.
pub fn end_range(c: &Complex, m: i64) -> std::ops::RangeInclusive<i64> {
    let l = c.length() as i64;
    m.max(0)..=l.min(l + m)
}

impl EndElement {
    pub fn zero(c: &Complex, m: i64, d: i64) -> EndElement {
        let components = end_range(c, m)
            .map(|n| (n, HomMap::zero(c.module(n), c.module(n - m), d)))
            .collect();
        EndElement { degree: m, internal: d, components }
    }

    /// Single block `φ_n`, all other components zero.
    pub fn from_block(c: &Complex, m: i64, n: i64, block: HomMap) -> Result<EndElement> {
        let mut e = EndElement::zero(c, m, block.degree());
        e.set_component(n, block)?;
        Ok(e)
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn internal_degree(&self) -> i64 {
        self.internal
    }

    pub fn component(&self, n: i64) -> Option<&HomMap> {
        self.components.get(&n)
    }

    pub fn components(&self) -> impl Iterator<Item = (i64, &HomMap)> {
        self.components.iter().map(|(n, h)| (*n, h))
    }

    pub fn set_component(&mut self, n: i64, h: HomMap) -> Result<()> {
        let slot = self
            .components
            .get(&n)
            .ok_or_else(|| Error::ShapeMismatch(format!("no component at index {n} in degree {}", self.degree)))?;
        if slot.source() != h.source() || slot.target() != h.target() || h.degree() != self.internal {
            return Err(Error::ShapeMismatch(format!("component {n} has the wrong shape or degree")));
        }
        self.components.insert(n, h);
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(HomMap::is_zero)
    }

    fn zip(&self, o: &EndElement, f: impl Fn(&HomMap, &HomMap) -> Result<HomMap>) -> Result<EndElement> {
        if self.degree != o.degree || self.internal != o.internal {
            return Err(Error::ShapeMismatch("endomorphisms of different degrees".into()));
        }
        let mut components = BTreeMap::new();
        for (n, a) in &self.components {
            let b = o.components.get(n).ok_or_else(|| Error::ShapeMismatch("component sets differ".into()))?;
            components.insert(*n, f(a, b)?);
        }
        Ok(EndElement { components, ..self.clone() })
    }

    pub fn add(&self, o: &EndElement) -> Result<EndElement> {
        self.zip(o, HomMap::add)
    }

    pub fn sub(&self, o: &EndElement) -> Result<EndElement> {
        self.zip(o, HomMap::sub)
    }

    pub fn neg(&self) -> EndElement {
        EndElement { components: self.components.iter().map(|(n, h)| (*n, h.neg())).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: &Scalar) -> EndElement {
        EndElement { components: self.components.iter().map(|(n, h)| (*n, h.scale(s))).collect(), ..self.clone() }
    }

    /// `(φ_n) ↦ ((-1)^n φ_n)`, an automorphism of `End(F)` as a graded
    /// group that intertwines the sign conventions `∂φ ± φ∂`.
    pub fn parity_twist(&self) -> EndElement {
        let components = self
            .components
            .iter()
            .map(|(n, h)| (*n, if n.rem_euclid(2) == 1 { h.neg() } else { h.clone() }))
            .collect();
        EndElement { components, ..self.clone() }
    }

    /// `self ∘ o`.
    pub fn compose(&self, c: &Complex, o: &EndElement) -> Result<EndElement> {
        let mut out = EndElement::zero(c, self.degree + o.degree, self.internal + o.internal);
        let keys: Vec<i64> = out.components.keys().copied().collect();
        for n in keys {
            let (Some(inner), Some(outer)) = (o.components.get(&n), self.components.get(&(n - o.degree))) else {
                continue;
            };
            out.components.insert(n, outer.compose(inner)?);
        }
        Ok(out)
    }

    /// Reduce coefficients into `c`'s ring (same variables).
    pub fn to_complex(&self, c: &Complex) -> Result<EndElement> {
        let mut out = EndElement::zero(c, self.degree, self.internal);
        for (n, h) in &self.components {
            out.set_component(*n, h.to_ring(c.ring())?.retwist(c.module(*n), c.module(n - self.degree), self.internal)?)?;
        }
        Ok(out)
    }
}

/// `∂∘h + s·h∘∂` for `s = ±1`.
pub fn signed_apply(c: &Complex, h: &EndElement, s: i64) -> Result<EndElement> {
    let del = c.differential_end();
    let left = del.compose(c, h)?;
    let right = h.compose(c, &del)?;
    if s == 1 {
        left.add(&right)
    } else {
        left.sub(&right)
    }
}

/// `d(φ) = ∂∘φ − (−1)^{|φ|} φ∘∂`.
pub fn d_end(c: &Complex, phi: &EndElement) -> Result<EndElement> {
    signed_apply(c, phi, end_sign(phi.degree))
}

/// The sign `s` with `d = ∂∘· + s·(·∘∂)` on `End^m`.
pub fn end_sign(m: i64) -> i64 {
    if m.rem_euclid(2) == 0 {
        -1
    } else {
        1
    }
}

pub fn is_chain_map(c: &Complex, phi: &EndElement) -> bool {
    d_end(c, phi).map(|e| e.is_zero()).unwrap_or(false)
}

/// One coordinate of `End^m_d`: component `n`, entry `(row, col)`, and the
/// monomial multiplying that entry.
pub type EndCoordinate = (i64, usize, usize, Monomial);

/// Monomial basis of `End^m_d` as a vector space. Components are listed
/// from the highest homological index down, then row-major, then by
/// monomial order.
#[derive(Clone, Debug)]
pub struct EndBasis {
    pub degree: i64,
    pub internal: i64,
    pub coords: Vec<EndCoordinate>,
    index: HashMap<EndCoordinate, usize>,
}

impl EndBasis {
    pub fn new(c: &Complex, m: i64, d: i64) -> EndBasis {
        let nv = c.ring().nvars();
        let mut coords = Vec::new();
        for n in end_range(c, m).rev() {
            let (src, tgt) = (c.module(n), c.module(n - m));
            for r in 0..tgt.rank() {
                for col in 0..src.rank() {
                    let deg = src.gen_degree(col) + d - tgt.gen_degree(r);
                    for mono in monomials_of_degree(nv, deg).iter() {
                        coords.push((n, r, col, mono.clone()));
                    }
                }
            }
        }
        let index = coords.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        EndBasis { degree: m, internal: d, coords, index }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn position(&self, k: &EndCoordinate) -> Option<usize> {
        self.index.get(k).copied()
    }

    pub fn coordinates(&self, phi: &EndElement) -> Result<Vec<Scalar>> {
        if phi.degree != self.degree || phi.internal != self.internal {
            return Err(Error::ShapeMismatch("element and basis differ in degree".into()));
        }
        let field = phi
            .components
            .values()
            .next()
            .map(|h| h.ring().field())
            .ok_or_else(|| Error::ShapeMismatch("empty endomorphism".into()));
        let Ok(field) = field else {
            return Ok(Vec::new());
        };
        let mut v = vec![field.zero(); self.dim()];
        for (n, h) in &phi.components {
            for r in 0..h.rows() {
                for col in 0..h.cols() {
                    for (mono, coef) in h.entry(r, col).terms() {
                        let pos = self.position(&(*n, r, col, mono.clone())).expect("homogeneous component");
                        v[pos] = coef.clone();
                    }
                }
            }
        }
        Ok(v)
    }

    pub fn element(&self, c: &Complex, v: &[Scalar]) -> EndElement {
        assert_eq!(v.len(), self.dim(), "coordinate vector length");
        let ring = c.ring();
        let mut grouped: BTreeMap<(i64, usize, usize), Vec<(Monomial, Scalar)>> = BTreeMap::new();
        for (k, x) in self.coords.iter().zip(v) {
            if !x.is_zero() {
                grouped.entry((k.0, k.1, k.2)).or_default().push((k.3.clone(), x.clone()));
            }
        }
        let mut e = EndElement::zero(c, self.degree, self.internal);
        for ((n, r, col), terms) in grouped {
            let h = e.components.get_mut(&n).unwrap();
            h.set(r, col, Poly::from_terms(ring, terms)).expect("basis monomials have the right degree");
        }
        e
    }
}

/// Columns of `h ↦ ∂∘h + s·h∘∂` from `End^m_d` to `End^{m+1}_d`, one
/// sparse vector per basis element of the source, with both bases.
pub fn homotopy_columns(c: &Complex, m: i64, d: i64, s: i64) -> (Vec<SparseVec>, EndBasis, EndBasis) {
    let src = EndBasis::new(c, m, d);
    let tgt = EndBasis::new(c, m + 1, d);
    let sign = c.ring().field().from_i64(s);
    let mut cols = Vec::with_capacity(src.dim());
    for (n, r, cc, mono) in &src.coords {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        let mut push = |pos: usize, v: Scalar| match acc.get_mut(&pos) {
            Some(x) => *x = &*x + &v,
            None => {
                acc.insert(pos, v);
            }
        };
        // ∂_{n-m} ∘ (elementary map in component n)
        if let Some(del) = c.differential(n - m) {
            for r2 in 0..del.rows() {
                for (t, coef) in del.entry(r2, *r).terms() {
                    push(tgt.position(&(*n, r2, *cc, t.mul(mono))).expect("target coordinate"), coef.clone());
                }
            }
        }
        // s · (elementary map) ∘ ∂_{n+1}
        if let Some(del) = c.differential(n + 1) {
            for c2 in 0..del.cols() {
                for (t, coef) in del.entry(*cc, c2).terms() {
                    push(tgt.position(&(n + 1, *r, c2, t.mul(mono))).expect("target coordinate"), &sign * coef);
                }
            }
        }
        cols.push(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect());
    }
    (cols, src, tgt)
}

/// Dense form of [`homotopy_columns`].
pub fn homotopy_system(c: &Complex, m: i64, d: i64, s: i64) -> (ScalarMatrix, EndBasis, EndBasis) {
    let (cols, src, tgt) = homotopy_columns(c, m, d, s);
    (ScalarMatrix::from_sparse_columns(c.ring().field(), tgt.dim(), &cols), src, tgt)
}

/// Canonical `h` with `d(h) = φ`, or `None` if `φ` is not nullhomotopic.
pub fn find_nullhomotopy(c: &Complex, phi: &EndElement) -> Result<Option<EndElement>> {
    if !is_chain_map(c, phi) {
        return Err(Error::NotAChainMap { degree: phi.degree });
    }
    let m = phi.degree - 1;
    let (a, src, tgt) = homotopy_system(c, m, phi.internal, end_sign(m));
    let b = tgt.coordinates(phi)?;
    Ok(solve(&a, &b).map(|x| src.element(c, &x)))
}

/// `dim Z^m_d − dim B^m_d` of `End(F)`.
pub fn end_cohomology_dim(c: &Complex, m: i64, d: i64) -> usize {
    let (z, _, _) = homotopy_columns(c, m, d, end_sign(m));
    let n = z.len();
    if n == 0 {
        return 0;
    }
    let (b, _, _) = homotopy_columns(c, m - 1, d, end_sign(m - 1));
    n - sparse_rank(z) - sparse_rank(b)
}

/// Basis of the cocycles `Z^m_d` (kernel of `d`).
pub fn cocycle_basis(c: &Complex, m: i64, d: i64) -> Vec<EndElement> {
    let (z, src, _) = homotopy_system(c, m, d, end_sign(m));
    kernel_basis(&z).iter().map(|v| src.element(c, v)).collect()
}
