mod common;

use common::{is_zero_matrix, square};
use flagforge::complex::{end_cohomology_dim, koszul, EndElement};
use flagforge::deform::{
    assemble, canonical_path, enumerate_flags, find_conjugating_homotopy, homotopic_lift_iso, lift, lift_space,
    obstruction, rescale, LiftChoice, LiftOutcome, LiftState, DEFAULT_BUDGET,
};
use flagforge::diffmod::{default_window, fold, h0_hilbert, homology_hilbert};
use flagforge::error::Error;
use flagforge::field::Field;
use flagforge::gallery::{exterior_triple, codim2_anchor, codim2_state};
use flagforge::poly::{HomMap, Ring};
use flagforge::rigidity::ExtElement;
use num_bigint::BigUint;

#[test]
fn stage_one_and_fold_path() {
    let (_, k) = codim2_anchor();
    let s = LiftState::new(&k, 1);
    assert!(obstruction(&s).unwrap().is_zero());
    let (end, log) = canonical_path(&k, 1).unwrap();
    assert_eq!(log.len(), 1);
    assert_eq!(assemble(&end).unwrap(), fold(&k, 1));
}

#[test]
fn codim2_family_lifts_and_assembles() {
    let (r, k) = codim2_anchor();
    for f in ["x3^2", "x1*x2", "x1^2 + x2*x3", "0"] {
        let s = codim2_state(&k, &r.parse(f).unwrap()).unwrap();
        assert!(s.is_complete());
        let d = assemble(&s).unwrap();
        assert_eq!(d.differential().entry(0, 3), &r.parse(f).unwrap());
        assert!(is_zero_matrix(&square(d.differential())));
    }
    let s = LiftState::new(&k, 0);
    let ls = lift_space(&s).unwrap();
    assert_eq!(ls.quotient_dim, end_cohomology_dim(&k, 2, 0));
    assert_eq!(ls.quotient_dim, 1);
}

#[test]
fn conjugation_rules() {
    let (r, k) = codim2_anchor();
    let d0 = codim2_state(&k, &r.zero()).unwrap();
    let cert = homotopic_lift_iso(&d0, &d0, &EndElement::zero(&k, 1, 0)).unwrap();
    assert_eq!(cert.p, flagforge::poly::HomMap::identity(cert.p.source()));
    let dz = codim2_state(&k, &r.parse("x3^2").unwrap()).unwrap();
    let mut h = EndElement::zero(&k, 1, 0);
    h.set_component(2, HomMap::new(k.module(2), k.module(1), 0, vec![vec![r.var(2)], vec![r.var(2)]]).unwrap()).unwrap();
    assert!(matches!(homotopic_lift_iso(&d0, &dz, &h), Err(Error::HomotopyInvalid(_))));
    assert!(find_conjugating_homotopy(&d0, &dz).unwrap().is_none());
    let dxy = codim2_state(&k, &r.parse("x1*x2").unwrap()).unwrap();
    let h = find_conjugating_homotopy(&d0, &dxy).unwrap().unwrap();
    homotopic_lift_iso(&d0, &dxy, &h).unwrap();
}

#[test]
fn rescaling() {
    let (r, k) = codim2_anchor();
    let dz = assemble(&codim2_state(&k, &r.parse("x3^2").unwrap()).unwrap()).unwrap();
    let two = assemble(&codim2_state(&k, &r.parse("2*x3^2").unwrap()).unwrap()).unwrap();
    assert_eq!(rescale(&dz, &Field::Rational.from_i64(2)).unwrap(), two);
    assert!(matches!(rescale(&dz, &Field::Rational.zero()), Err(Error::Precondition(_))));
    let s = LiftState::from_flag(&dz).unwrap();
    let t = LiftState::from_flag(&two).unwrap();
    assert!(find_conjugating_homotopy(&s, &t).unwrap().is_none());
}

#[test]
fn exterior_triple_lift() {
    let (r, [_, f2, _]) = exterior_triple();
    let k = koszul(&r, &(0..4).map(|i| r.var(i).pow(2)).collect::<Vec<_>>()).unwrap();
    let delta2 = f2.contraction(&k, &[2, 2, 2, 2]).unwrap().parity_twist();
    let s = LiftState::with_deltas(&k, 0, vec![delta2]).unwrap();
    let w = obstruction(&s).unwrap();
    assert!(!w.is_zero());
    let top = ExtElement::monomial(&r, 4, r.parse("2*x1^2*x2^2*x3^2*x4^2").unwrap(), &[0, 1, 2, 3]);
    let c = top.contraction(&k, &[2, 2, 2, 2]).unwrap();
    assert!(w == c || w == c.neg(), "ω is contraction by ±2x1²x2²x3²x4² e1234");
    let mut st = s;
    while !st.is_complete() {
        st = match lift(&st, &LiftChoice::Canonical).unwrap() {
            LiftOutcome::Lifted(t) => t,
            LiftOutcome::Obstructed(cert) => panic!("{cert}"),
        };
    }
    let d = assemble(&st).unwrap();
    assert_eq!(d.degree(), 0);
    assert_eq!(st.deltas().len(), 3);
    let (lo, hi) = default_window(&d);
    assert_eq!(homology_hilbert(&d, lo, hi), h0_hilbert(&k, lo, hi));
}

fn f_koszul(p: u32, n: usize) -> flagforge::complex::Complex {
    let r = Ring::with_indexed_vars(Field::Prime(p), "x", n).unwrap();
    koszul(&r, &(0..n).map(|i| r.var(i)).collect::<Vec<_>>()).unwrap()
}

#[test]
fn enumerations() {
    let e = enumerate_flags(&f_koszul(2, 3), 0, 2, DEFAULT_BUDGET).unwrap();
    assert_eq!(e.classes.len(), 1);
    let e = enumerate_flags(&f_koszul(3, 2), 2, 3, DEFAULT_BUDGET).unwrap();
    assert_eq!(e.classes.len(), 3);
    let total: BigUint = e.classes.iter().map(|c| c.multiplicity.clone()).sum();
    assert_eq!(total, e.raw_states);
    for c in &e.classes {
        c.state.verify().unwrap();
        let d = assemble(&c.state).unwrap();
        assert!(is_zero_matrix(&square(d.differential())));
    }
    assert!(matches!(enumerate_flags(&f_koszul(2, 3), 2, 2, 3), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn completed_state_cannot_lift() {
    let (r, k) = codim2_anchor();
    let s = codim2_state(&k, &r.zero()).unwrap();
    assert!(matches!(lift(&s, &LiftChoice::Canonical), Err(Error::Precondition(_))));
}
