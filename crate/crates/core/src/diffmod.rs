//! Graded differential modules: folds, free flags and their anchors,
//! homology Hilbert functions, minimization, curvature and matrix
//! factorizations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, EndElement};
use crate::error::{Error, Result};
use crate::poly::{GradedFreeModule, HomMap, Poly};

/// A free module `D` with a degree-`a` map `d: D → D` squaring to zero.
/// Flag levels, when present, list the generator indices of each level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialModule {
    module: GradedFreeModule,
    degree: i64,
    d: HomMap,
    levels: Option<Vec<Vec<usize>>>,
}

/// Graded Betti numbers: internal degree ↦ count.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiRecord {
    pub counts: BTreeMap<i64, usize>,
}

impl BettiRecord {
    pub fn from_degrees(degs: impl IntoIterator<Item = i64>) -> Self {
        let mut counts = BTreeMap::new();
        for d in degs {
            *counts.entry(d).or_insert(0) += 1;
        }
        BettiRecord { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

fn check_levels(levels: &[Vec<usize>], rank: usize) -> Result<()> {
    let mut seen = vec![false; rank];
    for l in levels {
        for &g in l {
            if g >= rank || seen[g] {
                return Err(Error::FlagViolation(format!("generator {g} is out of range or listed twice")));
            }
            seen[g] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::FlagViolation("flag levels do not cover every generator".into()));
    }
    Ok(())
}

impl DifferentialModule {
    /// Validates `d² = 0` and, when given, the strict flag shape.
    pub fn new(module: &GradedFreeModule, degree: i64, d: HomMap, levels: Option<Vec<Vec<usize>>>) -> Result<Self> {
        if d.source() != module || d.target() != module || d.degree() != degree {
            return Err(Error::ShapeMismatch("the differential must be an endomorphism of the declared degree".into()));
        }
        if !d.compose(&d)?.is_zero() {
            return Err(Error::SquareNonzero("d∘d is nonzero".into()));
        }
        let dm = DifferentialModule { module: module.clone(), degree, d, levels };
        if let Some(l) = &dm.levels {
            check_levels(l, module.rank())?;
            dm.check_triangular()?;
        }
        Ok(dm)
    }

    pub fn module(&self) -> &GradedFreeModule {
        &self.module
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn differential(&self) -> &HomMap {
        &self.d
    }

    pub fn levels(&self) -> Option<&[Vec<usize>]> {
        self.levels.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    fn level_of(&self) -> Option<Vec<usize>> {
        let levels = self.levels.as_ref()?;
        let mut out = vec![0; self.rank()];
        for (i, l) in levels.iter().enumerate() {
            for &g in l {
                out[g] = i;
            }
        }
        Some(out)
    }

    fn check_triangular(&self) -> Result<()> {
        let Some(level) = self.level_of() else { return Ok(()) };
        for r in 0..self.rank() {
            for c in 0..self.rank() {
                if level[r] >= level[c] && !self.d.entry(r, c).is_zero() {
                    return Err(Error::FlagViolation(format!(
                        "entry ({r},{c}) maps level {} into level {}",
                        level[c], level[r]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Generator degrees after undoing the level shift: level `i` moves up
    /// by `i·a`.
    fn untwisted_level(&self, i: usize) -> GradedFreeModule {
        let levels = self.levels.as_ref().expect("flag data");
        let twists = levels[i].iter().map(|&g| self.module.twists()[g] - i as i64 * self.degree).collect();
        GradedFreeModule::new(self.module.ring(), twists)
    }

    /// The anchor complex and the higher blocks `δ_2, δ_3, ...` of a flag.
    pub fn flag_parts(&self) -> Result<(Complex, Vec<EndElement>)> {
        let levels = self.levels.as_ref().ok_or_else(|| Error::FlagViolation("no flag data".into()))?;
        self.check_triangular()?;
        let ring = self.module.ring();
        let ell = levels.len().saturating_sub(1);
        let modules: Vec<GradedFreeModule> = (0..levels.len()).map(|i| self.untwisted_level(i)).collect();
        let mut maps = Vec::new();
        for i in 1..=ell {
            let b = self.d.block(&levels[i - 1], &levels[i], &modules[i], &modules[i - 1], 0)?;
            maps.push(b);
        }
        let anchor = if levels.is_empty() {
            Complex::zero(ring)
        } else {
            let c = Complex::unchecked(ring, modules.clone(), maps)?;
            crate::complex::check_complex(&c).map_err(|e| Error::AnchorNotAComplex(e.to_string()))?;
            c
        };
        let mut deltas = Vec::new();
        for k in 2..=ell as i64 {
            let internal = self.degree * (1 - k);
            let mut e = EndElement::zero(&anchor, k, internal);
            for n in k..=ell as i64 {
                let (src, tgt) = (n as usize, (n - k) as usize);
                let b = self.d.block(&levels[tgt], &levels[src], &modules[src], &modules[tgt], internal)?;
                e.set_component(n, b)?;
            }
            deltas.push(e);
        }
        Ok((anchor, deltas))
    }

    pub fn is_minimal(&self) -> bool {
        (0..self.rank()).all(|r| (0..self.rank()).all(|c| self.d.entry(r, c).constant_term().is_zero()))
    }

    /// Same module with coefficients moved into `ring`.
    pub fn to_ring(&self, ring: &crate::poly::Ring) -> Result<Self> {
        let m = GradedFreeModule::new(ring, self.module.twists().to_vec());
        DifferentialModule::new(&m, self.degree, self.d.to_ring(ring)?, self.levels.clone())
    }
}

/// Generator twists of `⊕ F_i(i·a)` and the level partition.
pub fn fold_module(c: &Complex, a: i64) -> (GradedFreeModule, Vec<Vec<usize>>) {
    let mut twists = Vec::new();
    let mut levels = Vec::new();
    for (i, m) in c.modules().iter().enumerate() {
        let start = twists.len();
        twists.extend(m.twists().iter().map(|t| t + i as i64 * a));
        levels.push((start..twists.len()).collect());
    }
    (GradedFreeModule::new(c.ring(), twists), levels)
}

/// Write `φ ∈ End^m` of `c` into the folded module as blocks
/// `level n → level n−m`; the result has degree `internal + m·a`.
pub fn place_end_element(c: &Complex, a: i64, phi: &EndElement, into: &mut [Vec<Poly>]) {
    let (_, levels) = fold_module(c, a);
    for (n, h) in phi.components() {
        let (src, tgt) = (&levels[n as usize], &levels[(n - phi.degree()) as usize]);
        for (r, &gr) in tgt.iter().enumerate() {
            for (col, &gc) in src.iter().enumerate() {
                let p = h.entry(r, col);
                if !p.is_zero() {
                    into[gr][gc] = into[gr][gc].add(p);
                }
            }
        }
    }
}

/// The free flag with anchor `c` and higher blocks `deltas = [δ_2, δ_3, ...]`.
pub fn flag_from_blocks(c: &Complex, a: i64, deltas: &[EndElement]) -> Result<DifferentialModule> {
    let (module, levels) = fold_module(c, a);
    let ring = c.ring();
    let mut rows = vec![vec![ring.zero(); module.rank()]; module.rank()];
    place_end_element(c, a, &c.differential_end(), &mut rows);
    for (k, delta) in deltas.iter().enumerate() {
        let k = k as i64 + 2;
        if delta.degree() != k || delta.internal_degree() != a * (1 - k) {
            return Err(Error::FlagViolation(format!(
                "δ_{k} must have degree {k} and internal degree {}",
                a * (1 - k)
            )));
        }
        place_end_element(c, a, delta, &mut rows);
    }
    let d = HomMap::new(&module, &module, a, rows)?;
    DifferentialModule::new(&module, a, d, Some(levels))
}

/// The degree-`a` fold `⊕ F_i(i·a)`.
pub fn fold(c: &Complex, a: i64) -> DifferentialModule {
    flag_from_blocks(c, a, &[]).expect("a fold is a flag")
}

/// Recover the anchor complex of a flag.
pub fn validate_flag(d: &DifferentialModule) -> Result<Complex> {
    d.flag_parts().map(|(c, _)| c)
}

/// Default reporting window `[min gen degree, max gen degree + slack]` with
/// `slack = n·(largest gap between consecutive generator degrees) + |a| + 2`.
pub fn default_window(d: &DifferentialModule) -> (i64, i64) {
    let mut degs = d.module.gen_degrees();
    degs.sort_unstable();
    let (Some(&lo), Some(&hi)) = (degs.first(), degs.last()) else {
        return (0, 0);
    };
    let gap = degs.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
    let n = d.module.ring().nvars() as i64;
    (lo, hi + n * gap + d.degree.abs() + 2)
}

/// `dim ker(d_j) − rank(d_{j−a})` for each `j` in `[j0, j1]`.
pub fn homology_hilbert(d: &DifferentialModule, j0: i64, j1: i64) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for j in j0..=j1 {
        let dim = d.module.slice_dim(j);
        let rank_here = d.d.slice_rank(j);
        let rank_in = d.d.slice_rank(j - d.degree);
        assert!(dim >= rank_here + rank_in, "homology dimension went negative at degree {j}");
        out.insert(j, dim - rank_here - rank_in);
    }
    out
}

/// Hilbert function of `H_0 = coker(∂_1)` of a complex.
pub fn h0_hilbert(c: &Complex, j0: i64, j1: i64) -> BTreeMap<i64, usize> {
    (j0..=j1)
        .map(|j| {
            let dim = c.module(0).slice_dim(j);
            let r = c.differential(1).map_or(0, |m| m.slice_rank(j));
            (j, dim - r)
        })
        .collect()
}

/// Strip unit entries until `d ⊗ k = 0`; returns the minimal module and its
/// Betti numbers.
pub fn minimize(dm: &DifferentialModule) -> Result<(DifferentialModule, BettiRecord)> {
    let ring = dm.module.ring().clone();
    let mut twists = dm.module.twists().to_vec();
    let mut m: Vec<Vec<Poly>> = dm.d.to_rows();
    loop {
        let n = twists.len();
        let unit = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .find(|&(r, c)| m[r][c].is_unit());
        let Some((mut r, c)) = unit else { break };
        if r == c {
            r = (0..n)
                .find(|&k| k != c && m[k][c].is_unit())
                .ok_or_else(|| Error::InvariantViolation("isolated diagonal unit in a square-zero matrix".into()))?;
        }
        let u_inv = m[r][c].constant_term().inv().expect("unit");
        let keep: Vec<usize> = (0..n).filter(|&k| k != r && k != c).collect();
        let mut next = vec![vec![ring.zero(); keep.len()]; keep.len()];
        for (i, &mi) in keep.iter().enumerate() {
            for (j, &kj) in keep.iter().enumerate() {
                let corr = m[mi][c].mul(&m[r][kj]).scale(&u_inv);
                next[i][j] = m[mi][kj].sub(&corr);
            }
        }
        twists = keep.iter().map(|&k| twists[k]).collect();
        m = next;
    }
    let module = GradedFreeModule::new(&ring, twists);
    let d = HomMap::new(&module, &module, dm.degree, m)?;
    let out = DifferentialModule::new(&module, dm.degree, d, None)
        .map_err(|e| Error::InvariantViolation(format!("minimization broke d² = 0: {e}")))?;
    let betti = BettiRecord::from_degrees(module.gen_degrees());
    Ok((out, betti))
}

/// `Some(f)` when `d∘d = f·id` (`f = 0` for an honest differential).
pub fn curvature(d: &HomMap) -> Option<Poly> {
    if d.source() != d.target() {
        return None;
    }
    let sq = d.compose(d).ok()?;
    let n = sq.rows();
    if n == 0 {
        return Some(d.ring().zero());
    }
    let f = sq.entry(0, 0).clone();
    for r in 0..n {
        for c in 0..n {
            let e = sq.entry(r, c);
            if (r == c && e != &f) || (r != c && !e.is_zero()) {
                return None;
            }
        }
    }
    Some(f)
}

/// A degree-`a` endomorphism squaring to `f·id`, with optional level data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvedModule {
    module: GradedFreeModule,
    degree: i64,
    d: HomMap,
    curvature: Poly,
    levels: Option<Vec<Vec<usize>>>,
}

impl CurvedModule {
    pub fn new(module: &GradedFreeModule, degree: i64, d: HomMap, levels: Option<Vec<Vec<usize>>>) -> Result<Self> {
        if d.source() != module || d.target() != module || d.degree() != degree {
            return Err(Error::ShapeMismatch("the differential must be an endomorphism of the declared degree".into()));
        }
        if let Some(l) = &levels {
            check_levels(l, module.rank())?;
        }
        let f = curvature(&d).ok_or_else(|| Error::SquareNonzero("d∘d is not a multiple of the identity".into()))?;
        Ok(CurvedModule { module: module.clone(), degree, d, curvature: f, levels })
    }

    /// `∂ + Σ_k (−1)^k σ_k` on the fold, where `σ ∈ End^{-1}` has
    /// components `σ_k: F_k → F_{k+1}`.
    pub fn from_homotopy(c: &Complex, a: i64, sigma: &EndElement) -> Result<Self> {
        if sigma.degree() != -1 || sigma.internal_degree() != 2 * a {
            return Err(Error::ShapeMismatch(format!("σ must lie in End^-1 of internal degree {}", 2 * a)));
        }
        let (module, levels) = fold_module(c, a);
        let ring = c.ring();
        let mut rows = vec![vec![ring.zero(); module.rank()]; module.rank()];
        place_end_element(c, a, &c.differential_end(), &mut rows);
        place_end_element(c, a, &sigma.parity_twist(), &mut rows);
        let d = HomMap::new(&module, &module, a, rows)?;
        CurvedModule::new(&module, a, d, Some(levels))
    }

    pub fn module(&self) -> &GradedFreeModule {
        &self.module
    }
    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn differential(&self) -> &HomMap {
        &self.d
    }
    pub fn curvature(&self) -> &Poly {
        &self.curvature
    }
    pub fn levels(&self) -> Option<&[Vec<usize>]> {
        self.levels.as_deref()
    }
}

/// The odd→even block `A` and even→odd block `B` of a curved module, checked
/// to satisfy `AB = f·id` and `BA = f·id`.
pub fn matrix_factorization(cm: &CurvedModule) -> Result<(HomMap, HomMap)> {
    let levels = cm.levels.as_ref().ok_or(Error::ParityMissing)?;
    let even: Vec<usize> = levels.iter().step_by(2).flatten().copied().collect();
    let odd: Vec<usize> = levels.iter().skip(1).step_by(2).flatten().copied().collect();
    let sub = |idx: &[usize]| GradedFreeModule::new(cm.module.ring(), idx.iter().map(|&g| cm.module.twists()[g]).collect());
    let (me, mo) = (sub(&even), sub(&odd));
    for (rows, cols) in [(&even, &even), (&odd, &odd)] {
        for &r in rows.iter() {
            for &c in cols.iter() {
                if !cm.d.entry(r, c).is_zero() {
                    return Err(Error::FactorizationFailed(format!("entry ({r},{c}) preserves parity")));
                }
            }
        }
    }
    let a = cm.d.block(&even, &odd, &mo, &me, cm.degree)?;
    let b = cm.d.block(&odd, &even, &me, &mo, cm.degree)?;
    verify_factorization(&a, &b, &cm.curvature)?;
    Ok((a, b))
}

/// Checks `AB = f·id` and `BA = f·id`.
pub fn verify_factorization(a: &HomMap, b: &HomMap, f: &Poly) -> Result<()> {
    for (name, prod) in [("AB", a.compose(b)?), ("BA", b.compose(a)?)] {
        for r in 0..prod.rows() {
            for c in 0..prod.cols() {
                let want = if r == c { f.clone() } else { f.ring().zero() };
                if prod.entry(r, c) != &want {
                    return Err(Error::FactorizationFailed(format!(
                        "{name} has entry ({r},{c}) = {}, expected {want}",
                        prod.entry(r, c)
                    )));
                }
            }
        }
    }
    Ok(())
}
