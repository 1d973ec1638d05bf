mod common;

use common::{is_zero_matrix, matmul, qring};
use flagforge::complex::{
    check_complex, d_end, end_cohomology_dim, find_nullhomotopy, homotopy_system, is_chain_map, koszul,
    pfaffian_resolution, subsets, Complex, EndBasis, EndElement, end_sign,
};
use flagforge::error::Error;
use flagforge::field::{kernel_basis, Field};
use flagforge::poly::{monomials_of_degree, HomMap, Poly, Ring};
use proptest::prelude::*;

fn random_form(r: &Ring, deg: i64, coeffs: &[i64]) -> Poly {
    monomials_of_degree(r.nvars(), deg)
        .iter()
        .zip(coeffs.iter().cycle())
        .fold(r.zero(), |acc, (m, &c)| acc.add(&r.term(r.field().from_i64(c), m.clone())))
}

fn anchor(degs: &[i64], coeffs: &[i64]) -> Complex {
    let r = qring(&["x", "y", "z"]);
    let forms: Vec<Poly> = degs.iter().enumerate().map(|(i, &d)| random_form(&r, d, &coeffs[i..])).collect();
    koszul(&r, &forms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn koszul_squares_to_zero(degs in proptest::collection::vec(1i64..3, 1..4), coeffs in proptest::collection::vec(1i64..=3, 12)) {
        let k = anchor(&degs, &coeffs);
        for i in 1..k.length() as i64 {
            let prod = matmul(&k.differential(i).unwrap().to_rows(), &k.differential(i + 1).unwrap().to_rows(), k.ring());
            prop_assert!(is_zero_matrix(&prod));
        }
    }

    #[test]
    fn d_end_squares_to_zero(m in -1i64..3, d in -2i64..2, coeffs in proptest::collection::vec(-2i64..=2, 1..40)) {
        let k = anchor(&[1, 1, 2], &[1, 2, -1, 1, 3, 1]);
        let basis = EndBasis::new(&k, m, d);
        let v: Vec<_> = (0..basis.dim()).map(|i| k.ring().field().from_i64(coeffs[i % coeffs.len()])).collect();
        let phi = basis.element(&k, &v);
        let once = d_end(&k, &phi).unwrap();
        prop_assert!(d_end(&k, &once).unwrap().is_zero());
        prop_assert!(is_chain_map(&k, &once));
    }
}

/// `dim ker − rank` of the dense systems, a second route to End cohomology.
fn dense_cohomology(c: &Complex, m: i64, d: i64) -> usize {
    let (z, _, _) = homotopy_system(c, m, d, end_sign(m));
    let (b, _, _) = homotopy_system(c, m - 1, d, end_sign(m - 1));
    kernel_basis(&z).len() - b.rank()
}

#[test]
fn end_cohomology_two_routes() {
    let k = anchor(&[1, 2], &[1, -1, 2, 1, 1, 1]);
    for m in -1..=3 {
        for d in -4..=1 {
            assert_eq!(end_cohomology_dim(&k, m, d), dense_cohomology(&k, m, d), "m = {m}, d = {d}");
        }
    }
}

#[test]
fn codim2_nullhomotopy() {
    let r = qring(&["x1", "x2", "x3"]);
    let k = koszul(&r, &[r.var(0), r.var(1)]).unwrap();
    assert_eq!(k.differential(2).unwrap().to_rows(), vec![vec![r.var(1).neg()], vec![r.var(0)]]);
    let block = |f: Poly| {
        EndElement::from_block(&k, 2, 2, HomMap::new(k.module(2), k.module(0), 0, vec![vec![f]]).unwrap()).unwrap()
    };
    let h = find_nullhomotopy(&k, &block(r.parse("x1*x2").unwrap())).unwrap().unwrap();
    assert_eq!(h.component(2).unwrap().to_rows(), vec![vec![r.var(1)], vec![r.zero()]]);
    assert!(h.component(1).unwrap().is_zero());
    assert!(find_nullhomotopy(&k, &block(r.parse("x3^2").unwrap())).unwrap().is_none());
    let odd = EndElement::from_block(&k, 1, 1, HomMap::new(k.module(1), k.module(0), 1, vec![vec![r.var(0).pow(2), r.zero()]]).unwrap()).unwrap();
    assert!(matches!(find_nullhomotopy(&k, &odd), Err(Error::NotAChainMap { .. })));
}

#[test]
fn pfaffian_complex_is_exact_shape() {
    let names = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"];
    let r = qring(&names);
    let pr = pfaffian_resolution(&r).unwrap();
    check_complex(&pr.complex).unwrap();
    assert_eq!(pr.complex.modules().iter().map(|m| m.rank()).collect::<Vec<_>>(), vec![1, 5, 5, 1]);
    for p in &pr.pf {
        assert_eq!(p.homogeneous_degree(), Some(2));
    }
    let m = pr.left_mult(1).unwrap();
    assert_eq!((m.degree(), m.internal_degree()), (-1, 2));
    assert!(pr.left_mult(6).is_err());
}

#[test]
fn subsets_are_lex() {
    assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    assert!(subsets(2, 3).is_empty());
}

#[test]
fn non_complex_rejected() {
    let r = qring(&["x", "y"]);
    let bad = Complex::from_twists(
        &r,
        vec![vec![0], vec![-1, -1], vec![-2]],
        vec![vec![vec![r.var(0), r.var(1)]], vec![vec![r.var(1)], vec![r.var(0)]]],
    );
    assert!(matches!(bad, Err(Error::ComplexViolation(_))));
    let f5 = Ring::new(Field::Prime(5), &["x", "y"]).unwrap();
    assert!(koszul(&f5, &[f5.var(0), f5.var(1)]).unwrap().is_minimal());
}
