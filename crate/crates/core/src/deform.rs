//! Iterative construction of free flags on an anchor complex: obstruction
//! classes, lift spaces, conjugation by unipotent changes of basis,
//! rescaling, finite-field enumeration and dimension bounds.
//!
//! A state at stage `i` stores `δ_2, ..., δ_i` with `δ_j ∈ End^j` of
//! internal degree `a(1−j)`. The stage-`i` identities are
//! `Σ_{k=1}^{p} δ_k δ_{p+1−k} = 0` for `2 ≤ p ≤ i`, with `δ_1 = ∂`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use crate::complex::{
    end_cohomology_dim, homotopy_columns, is_chain_map, signed_apply, Complex, EndBasis, EndElement,
};
use crate::diffmod::{flag_from_blocks, fold_module, place_end_element, validate_flag, DifferentialModule};
use crate::error::{Error, Result};
use crate::field::{inconsistency_witness, kernel_basis, solve, to_dense, to_sparse, Field, Scalar, ScalarMatrix, SparseEchelon};
use crate::poly::HomMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftState {
    anchor: Complex,
    degree: i64,
    deltas: Vec<EndElement>,
}

impl LiftState {
    /// Stage 1: the fold, nothing chosen yet.
    pub fn new(anchor: &Complex, a: i64) -> Self {
        LiftState { anchor: anchor.clone(), degree: a, deltas: Vec::new() }
    }

    /// A state with `deltas = [δ_2, ..., δ_i]`, invariants checked.
    pub fn with_deltas(anchor: &Complex, a: i64, deltas: Vec<EndElement>) -> Result<Self> {
        let s = LiftState { anchor: anchor.clone(), degree: a, deltas };
        s.verify()?;
        Ok(s)
    }

    /// The state of an assembled flag.
    pub fn from_flag(dm: &DifferentialModule) -> Result<Self> {
        let (anchor, deltas) = dm.flag_parts()?;
        LiftState::with_deltas(&anchor, dm.degree(), deltas)
    }

    pub fn anchor(&self) -> &Complex {
        &self.anchor
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn stage(&self) -> usize {
        self.deltas.len() + 1
    }

    /// `δ_j` for `2 ≤ j ≤ stage`.
    pub fn delta(&self, j: usize) -> Option<&EndElement> {
        self.deltas.get(j.checked_sub(2)?)
    }

    pub fn deltas(&self) -> &[EndElement] {
        &self.deltas
    }

    /// True once every block of the flag has been chosen.
    pub fn is_complete(&self) -> bool {
        self.stage() >= self.anchor.length().max(1)
    }

    fn all_deltas(&self) -> Vec<EndElement> {
        let mut v = vec![self.anchor.differential_end()];
        v.extend(self.deltas.iter().cloned());
        v
    }

    /// Re-checks degrees and the truncated square-zero identities.
    pub fn verify(&self) -> Result<()> {
        for (k, d) in self.deltas.iter().enumerate() {
            let j = k as i64 + 2;
            if d.degree() != j || d.internal_degree() != self.degree * (1 - j) {
                return Err(Error::InvariantViolation(format!(
                    "δ_{j} has degree ({}, {}), expected ({j}, {})",
                    d.degree(),
                    d.internal_degree(),
                    self.degree * (1 - j)
                )));
            }
            if EndElement::zero(&self.anchor, j, d.internal_degree()).components().count() != d.components().count() {
                return Err(Error::InvariantViolation(format!("δ_{j} is not an endomorphism of the anchor")));
            }
        }
        let all = self.all_deltas();
        for p in 2..=self.stage() {
            let mut sum = EndElement::zero(&self.anchor, p as i64 + 1, self.degree * (1 - p as i64));
            for k in 1..=p {
                sum = sum.add(&all[k - 1].compose(&self.anchor, &all[p - k])?)?;
            }
            if !sum.is_zero() {
                return Err(Error::InvariantViolation(format!("Σ δ_k δ_{{{}-k}} ≠ 0 at p = {p}", p + 1)));
            }
        }
        Ok(())
    }
}

/// `ω = −Σ_{j=2}^{i} δ_j δ_{i+2−j}`, a map `F → F[−i−2]` of internal degree `−ia`.
pub fn obstruction(s: &LiftState) -> Result<EndElement> {
    let i = s.stage() as i64;
    let mut w = EndElement::zero(&s.anchor, i + 2, -i * s.degree);
    for j in 2..=i {
        let prod = s.delta(j as usize).unwrap().compose(&s.anchor, s.delta((i + 2 - j) as usize).unwrap())?;
        w = w.sub(&prod)?;
    }
    let class = class_of(&w);
    if !is_chain_map(&s.anchor, &class) {
        return Err(Error::InvariantViolation(format!("the stage-{i} obstruction is not a cocycle")));
    }
    Ok(w)
}

/// The `d^End` cocycle representing `ω`: `ω` itself in even cohomological
/// degree, its parity twist in odd degree.
pub fn obstruction_class(s: &LiftState) -> Result<EndElement> {
    obstruction(s).map(|w| class_of(&w))
}

fn class_of(w: &EndElement) -> EndElement {
    if w.degree().rem_euclid(2) == 1 {
        w.parity_twist()
    } else {
        w.clone()
    }
}

/// How to pick `δ_{i+1}` among the solutions of `∂δ + δ∂ = ω`.
#[derive(Clone, Debug)]
pub enum LiftChoice {
    /// The canonical particular solution.
    Canonical,
    /// Particular solution plus these coordinates on the cocycle basis of
    /// [`lift_space`].
    Coordinates(Vec<Scalar>),
    /// An explicit solution, verified.
    Delta(EndElement),
}

/// Proof that `∂δ + δ∂ = ω` has no solution: a functional `y` vanishing on
/// every `∂δ + δ∂` with `y(ω) ≠ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionCertificate {
    pub stage: usize,
    pub cohomological_degree: i64,
    pub internal_degree: i64,
    /// `(component, row, col, monomial, weight)` of the functional.
    pub functional: Vec<(i64, usize, usize, String, String)>,
    pub pairing: String,
}

impl fmt::Display for ObstructionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stage {} obstruction in End^{} of internal degree {}: the functional ",
            self.stage, self.cohomological_degree, self.internal_degree
        )?;
        let terms: Vec<String> = self
            .functional
            .iter()
            .map(|(n, r, c, m, w)| format!("{w}·[{m}]({n}:{r},{c})"))
            .collect();
        write!(f, "{} kills every ∂δ+δ∂ but takes the value {} on ω", terms.join(" + "), self.pairing)
    }
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Lifted(LiftState),
    Obstructed(ObstructionCertificate),
}

fn lift_system(s: &LiftState) -> (ScalarMatrix, EndBasis, EndBasis) {
    let i = s.stage() as i64;
    let (cols, src, tgt) = homotopy_columns(&s.anchor, i + 1, -i * s.degree, 1);
    (ScalarMatrix::from_sparse_columns(s.anchor.ring().field(), tgt.dim(), &cols), src, tgt)
}

fn certificate(s: &LiftState, a: &ScalarMatrix, tgt: &EndBasis, b: &[Scalar]) -> ObstructionCertificate {
    let y = inconsistency_witness(a, b).expect("an inconsistent system has a left witness");
    let field = s.anchor.ring().field();
    let mut pairing = field.zero();
    for (yi, bi) in y.iter().zip(b) {
        pairing = &pairing + &(yi * bi);
    }
    let functional = tgt
        .coords
        .iter()
        .zip(&y)
        .filter(|(_, w)| !w.is_zero())
        .map(|((n, r, c, m), w)| {
            let mono = s.anchor.ring().term(field.one(), m.clone()).to_string();
            (*n, *r, *c, mono, w.to_string())
        })
        .collect();
    ObstructionCertificate {
        stage: s.stage(),
        cohomological_degree: tgt.degree,
        internal_degree: tgt.internal,
        functional,
        pairing: pairing.to_string(),
    }
}

/// Solve for `δ_{i+1}`; an unsolvable system is reported as a value.
pub fn lift(s: &LiftState, choice: &LiftChoice) -> Result<LiftOutcome> {
    if s.is_complete() {
        return Err(Error::Precondition(format!(
            "stage {} already completes a flag on a length-{} anchor",
            s.stage(),
            s.anchor.length()
        )));
    }
    let w = obstruction(s)?;
    let (a, src, tgt) = lift_system(s);
    let b = tgt.coordinates(&w)?;
    let Some(particular) = solve(&a, &b) else {
        return Ok(LiftOutcome::Obstructed(certificate(s, &a, &tgt, &b)));
    };
    let delta = match choice {
        LiftChoice::Canonical => src.element(&s.anchor, &particular),
        LiftChoice::Coordinates(coords) => {
            let basis = kernel_basis(&a);
            if coords.len() != basis.len() {
                return Err(Error::Precondition(format!(
                    "{} coordinates given for a {}-dimensional cocycle space",
                    coords.len(),
                    basis.len()
                )));
            }
            let mut x = particular;
            for (c, z) in coords.iter().zip(&basis) {
                for (xi, zi) in x.iter_mut().zip(z) {
                    *xi = &*xi + &(c * zi);
                }
            }
            src.element(&s.anchor, &x)
        }
        LiftChoice::Delta(d) => {
            if d.degree() != src.degree || d.internal_degree() != src.internal {
                return Err(Error::Precondition(format!(
                    "δ_{} must lie in End^{} of internal degree {}",
                    s.stage() + 1,
                    src.degree,
                    src.internal
                )));
            }
            d.clone()
        }
    };
    let mut deltas = s.deltas.clone();
    deltas.push(delta);
    let next = LiftState { anchor: s.anchor.clone(), degree: s.degree, deltas };
    next.verify()?;
    Ok(LiftOutcome::Lifted(next))
}

/// All lifts of a state: particular solution, cocycles, coboundaries.
#[derive(Clone, Debug)]
pub struct LiftSpace {
    pub stage: usize,
    pub particular: Option<EndElement>,
    pub cocycles: Vec<EndElement>,
    pub coboundaries: Vec<EndElement>,
    pub quotient_dim: usize,
    /// Cocycles spanning a complement of the coboundaries.
    pub complement: Vec<EndElement>,
}

pub fn lift_space(s: &LiftState) -> Result<LiftSpace> {
    let i = s.stage() as i64;
    let internal = -i * s.degree;
    let w = obstruction(s)?;
    let (a, src, tgt) = lift_system(s);
    let b = tgt.coordinates(&w)?;
    let particular = solve(&a, &b).map(|x| src.element(&s.anchor, &x));
    let z = kernel_basis(&a);
    let (bcols, _, _) = homotopy_columns(&s.anchor, i, internal, -1);
    let mut ech = SparseEchelon::new();
    for v in bcols {
        ech.insert(v);
    }
    let field = s.anchor.ring().field();
    let coboundaries: Vec<EndElement> =
        ech.basis().iter().map(|v| src.element(&s.anchor, &to_dense(field, src.dim(), v))).collect();
    let mut complement = Vec::new();
    for v in &z {
        if ech.insert(to_sparse(v)) {
            complement.push(src.element(&s.anchor, v));
        }
    }
    let quotient_dim = complement.len();
    let expected = end_cohomology_dim(&s.anchor, i + 1, internal);
    if quotient_dim != expected {
        return Err(Error::InvariantViolation(format!(
            "lift space has dimension {quotient_dim}, End cohomology has {expected}"
        )));
    }
    Ok(LiftSpace {
        stage: s.stage(),
        particular,
        cocycles: z.iter().map(|v| src.element(&s.anchor, v)).collect(),
        coboundaries,
        quotient_dim,
        complement,
    })
}

/// `P = I + h` conjugating one stage-`i` flag into another.
#[derive(Clone, Debug)]
pub struct ConjugationCertificate {
    pub stage: usize,
    pub p: HomMap,
    pub p_inv: HomMap,
    /// Level differences on which `P⁻¹ d P = d'` was verified.
    pub verified_through: usize,
}

fn same_prefix(s: &LiftState, t: &LiftState) -> Result<usize> {
    if s.anchor != t.anchor || s.degree != t.degree || s.stage() != t.stage() {
        return Err(Error::HomotopyInvalid("states differ in anchor, degree or stage".into()));
    }
    let i = s.stage();
    if i < 2 {
        return Err(Error::HomotopyInvalid("stage-1 states have nothing to conjugate".into()));
    }
    if s.deltas[..i - 2] != t.deltas[..i - 2] {
        return Err(Error::HomotopyInvalid(format!("states differ below stage {i}")));
    }
    Ok(i)
}

/// Matrix of the partial flag `∂ + δ_2 + ... + δ_i` on the fold.
fn partial_flag(s: &LiftState) -> Result<HomMap> {
    let (module, _) = fold_module(&s.anchor, s.degree);
    let ring = s.anchor.ring();
    let mut rows = vec![vec![ring.zero(); module.rank()]; module.rank()];
    for d in s.all_deltas() {
        place_end_element(&s.anchor, s.degree, &d, &mut rows);
    }
    HomMap::new(&module, &module, s.degree, rows)
}

fn level_blocks_agree(x: &HomMap, y: &HomMap, levels: &[Vec<usize>], upto: usize) -> Option<(usize, usize)> {
    for (li, src) in levels.iter().enumerate() {
        for (lj, tgt) in levels.iter().enumerate() {
            if lj > li || li - lj > upto {
                continue;
            }
            for &r in tgt {
                for &c in src {
                    if x.entry(r, c) != y.entry(r, c) {
                        return Some((li, lj));
                    }
                }
            }
        }
    }
    None
}

/// Certify `s ≅ s'` through stage `i` given `h` with `δ'_i = δ_i + ∂h − h∂`.
pub fn homotopic_lift_iso(s: &LiftState, s2: &LiftState, h: &EndElement) -> Result<ConjugationCertificate> {
    let i = same_prefix(s, s2)?;
    let a = s.degree;
    let want = (i as i64 - 1, a * (1 - i as i64));
    if (h.degree(), h.internal_degree()) != want {
        return Err(Error::HomotopyInvalid(format!(
            "h must lie in End^{} of internal degree {}",
            want.0, want.1
        )));
    }
    let diff = s2.deltas[i - 2].sub(&s.deltas[i - 2])?;
    if signed_apply(&s.anchor, h, -1)? != diff {
        return Err(Error::HomotopyInvalid(format!("δ'_{i} − δ_{i} ≠ ∂h − h∂")));
    }
    let (module, levels) = fold_module(&s.anchor, a);
    let ring = s.anchor.ring();
    let mut hrows = vec![vec![ring.zero(); module.rank()]; module.rank()];
    place_end_element(&s.anchor, a, h, &mut hrows);
    let hm = HomMap::new(&module, &module, 0, hrows)?;
    let id = HomMap::identity(&module);
    let p = id.add(&hm)?;
    let mut p_inv = id.clone();
    let mut power = id;
    let neg_h = hm.neg();
    loop {
        power = power.compose(&neg_h)?;
        if power.is_zero() {
            break;
        }
        p_inv = p_inv.add(&power)?;
    }
    let d = partial_flag(s)?;
    let d2 = partial_flag(s2)?;
    let conj = p_inv.compose(&d)?.compose(&p)?;
    if let Some((li, lj)) = level_blocks_agree(&conj, &d2, &levels, i) {
        return Err(Error::InvariantViolation(format!(
            "P⁻¹dP and d' differ on the block from level {li} to level {lj}"
        )));
    }
    Ok(ConjugationCertificate { stage: i, p, p_inv, verified_through: i })
}

/// Canonical `h` with `δ'_i − δ_i = ∂h − h∂`, if one exists.
pub fn find_conjugating_homotopy(s: &LiftState, s2: &LiftState) -> Result<Option<EndElement>> {
    let i = same_prefix(s, s2)? as i64;
    let diff = s2.deltas[i as usize - 2].sub(&s.deltas[i as usize - 2])?;
    let (cols, src, tgt) = homotopy_columns(&s.anchor, i - 1, s.degree * (1 - i), -1);
    let a = ScalarMatrix::from_sparse_columns(s.anchor.ring().field(), tgt.dim(), &cols);
    let b = tgt.coordinates(&diff)?;
    Ok(solve(&a, &b).map(|x| src.element(&s.anchor, &x)))
}

/// The differential module of a complete state.
pub fn assemble(s: &LiftState) -> Result<DifferentialModule> {
    if !s.is_complete() {
        return Err(Error::Precondition(format!(
            "stage {} of a length-{} anchor is not complete",
            s.stage(),
            s.anchor.length()
        )));
    }
    let dm = flag_from_blocks(&s.anchor, s.degree, &s.deltas).map_err(|e| match e {
        Error::SquareNonzero(m) => Error::SquareNonzero(format!("assembled flag: {m}")),
        other => other,
    })?;
    if validate_flag(&dm)? != s.anchor {
        return Err(Error::InvariantViolation("assembled flag has a different anchor".into()));
    }
    Ok(dm)
}

/// `δ_j ↦ λ^{j−1} δ_j`.
pub fn rescale(dm: &DifferentialModule, lambda: &Scalar) -> Result<DifferentialModule> {
    if lambda.is_zero() {
        return Err(Error::Precondition("λ must be invertible".into()));
    }
    let (anchor, deltas) = dm.flag_parts()?;
    let scaled: Vec<EndElement> =
        deltas.iter().enumerate().map(|(k, d)| d.scale(&lambda.pow(k as u32 + 1))).collect();
    flag_from_blocks(&anchor, dm.degree(), &scaled)
}

/// Counts for one stage of [`enumerate_flags`].
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct StageLog {
    pub stage: usize,
    pub parents: usize,
    pub obstructed: usize,
    pub cocycle_dims: Vec<usize>,
    pub coboundary_dims: Vec<usize>,
    pub classes: usize,
}

/// One stage-wise isomorphism class and how many raw lifts it absorbs.
#[derive(Clone, Debug)]
pub struct FlagClass {
    pub state: LiftState,
    pub multiplicity: BigUint,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub field: Field,
    pub classes: Vec<FlagClass>,
    pub log: Vec<StageLog>,
    /// Total raw lifts before identification.
    pub raw_states: BigUint,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Budget from `FLAGFORGE_BUDGET`, else the default.
pub fn budget_from_env() -> u64 {
    std::env::var("FLAGFORGE_BUDGET").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// All flags over `F_p` up to stage-wise conjugation, breadth first.
pub fn enumerate_flags(anchor: &Complex, a: i64, p: u32, budget: u64) -> Result<Enumeration> {
    let field = Field::prime(p)?;
    let ring = anchor.ring().with_field(field);
    let anchor = anchor.to_ring(&ring)?;
    let mut frontier = vec![FlagClass { state: LiftState::new(&anchor, a), multiplicity: BigUint::from(1u32) }];
    let mut log = Vec::new();
    let mut raw = BigUint::from(1u32);
    let mut explored: u64 = 1;
    while frontier.iter().any(|c| !c.state.is_complete()) {
        let stage = frontier[0].state.stage();
        let mut entry = StageLog { stage, parents: frontier.len(), ..Default::default() };
        let mut spaces = Vec::new();
        let mut needed = BigUint::from(0u32);
        for parent in &frontier {
            let ls = lift_space(&parent.state)?;
            if ls.particular.is_some() {
                needed += BigUint::from(p).pow(ls.quotient_dim as u32);
            }
            spaces.push(ls);
        }
        let total = BigUint::from(explored) + &needed;
        if total > BigUint::from(budget) {
            return Err(Error::BudgetExceeded { needed: total.to_string(), budget });
        }
        let mut next = Vec::new();
        let mut next_raw = BigUint::from(0u32);
        let elems = field.elements().expect("prime field");
        for (parent, ls) in frontier.iter().zip(spaces) {
            entry.cocycle_dims.push(ls.cocycles.len());
            entry.coboundary_dims.push(ls.coboundaries.len());
            let Some(part) = ls.particular else {
                entry.obstructed += 1;
                continue;
            };
            let weight = BigUint::from(p).pow(ls.coboundaries.len() as u32);
            next_raw += BigUint::from(p).pow(ls.cocycles.len() as u32);
            let q = ls.complement.len();
            let mut coords = vec![0usize; q];
            loop {
                let mut delta = part.clone();
                for (c, z) in coords.iter().zip(&ls.complement) {
                    if *c != 0 {
                        delta = delta.add(&z.scale(&elems[*c]))?;
                    }
                }
                match lift(&parent.state, &LiftChoice::Delta(delta))? {
                    LiftOutcome::Lifted(st) => next.push(FlagClass {
                        state: st,
                        multiplicity: &parent.multiplicity * &weight,
                    }),
                    LiftOutcome::Obstructed(_) => unreachable!("a particular solution exists"),
                }
                explored += 1;
                let mut k = 0;
                while k < q {
                    coords[k] += 1;
                    if coords[k] < p as usize {
                        break;
                    }
                    coords[k] = 0;
                    k += 1;
                }
                if k == q {
                    break;
                }
            }
        }
        raw = next_raw;
        entry.classes = next.len();
        log.push(entry);
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(Enumeration { field, classes: frontier, log, raw_states: raw })
}

/// `(lower, upper)` bounds on the dimension of the space of degree-`a`
/// flags on `anchor`, from `End` cohomology.
pub fn dim_bounds(anchor: &Complex, a: i64) -> (i64, i64) {
    let ell = anchor.length() as i64;
    let upper: i64 = (2..=ell).map(|i| end_cohomology_dim(anchor, i, a - i * a) as i64).sum();
    let correction: i64 = (4..=ell).map(|i| end_cohomology_dim(anchor, i, 2 * a - i * a) as i64).sum();
    ((upper - correction).max(0), upper)
}

/// Per-stage report of `lift_space` dimensions along the canonical path.
pub fn canonical_path(anchor: &Complex, a: i64) -> Result<(LiftState, Vec<BTreeMap<&'static str, i64>>)> {
    let mut s = LiftState::new(anchor, a);
    let mut log = Vec::new();
    while !s.is_complete() {
        let ls = lift_space(&s)?;
        let mut row = BTreeMap::new();
        row.insert("stage", s.stage() as i64);
        row.insert("cocycles", ls.cocycles.len() as i64);
        row.insert("coboundaries", ls.coboundaries.len() as i64);
        row.insert("quotient", ls.quotient_dim as i64);
        log.push(row);
        s = match lift(&s, &LiftChoice::Canonical)? {
            LiftOutcome::Lifted(t) => t,
            LiftOutcome::Obstructed(c) => return Err(Error::InvariantViolation(c.to_string())),
        };
    }
    Ok((s, log))
}
