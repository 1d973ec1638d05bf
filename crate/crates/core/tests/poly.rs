mod common;

use common::exponent_vectors;
use flagforge::error::Error;
use flagforge::field::Field;
use flagforge::poly::{monomial_count, GradedFreeModule, HomMap, Monomial, Poly, Ring};
use proptest::prelude::*;

fn ring(f: Field) -> Ring {
    Ring::new(f, &["x", "y", "z"]).unwrap()
}

fn poly_strategy(f: Field) -> impl Strategy<Value = Poly> {
    proptest::collection::vec((-5i64..=5, 0u16..3, 0u16..3, 0u16..3), 0..5).prop_map(move |terms| {
        let r = ring(f);
        terms.iter().fold(r.zero(), |acc, &(c, a, b, d)| {
            acc.add(&r.term(f.from_i64(c), Monomial::from_exponents(&[a, b, d])))
        })
    })
}

fn axioms(f: Field) -> impl Strategy<Value = (Poly, Poly, Poly)> {
    (poly_strategy(f), poly_strategy(f), poly_strategy(f))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn ring_axioms_q((a, b, c) in axioms(Field::Rational)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&a.ring().one()), a.clone());
    }

    #[test]
    fn ring_axioms_f5((a, b, c) in axioms(Field::Prime(5))) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.scale(&Field::Prime(5).from_i64(5)), a.ring().zero());
    }

    #[test]
    fn parse_display_round_trip(a in poly_strategy(Field::Rational)) {
        let back = a.ring().parse(&a.to_string()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn pow_is_repeated_product(a in poly_strategy(Field::Rational), e in 0u32..4) {
        let direct = (0..e).fold(a.ring().one(), |acc, _| acc.mul(&a));
        prop_assert_eq!(a.pow(e), direct);
    }
}

#[test]
fn monomial_counts_match_enumeration() {
    for n in 1..5 {
        for d in 0..7 {
            assert_eq!(monomial_count(n, d) as usize, exponent_vectors(n, d).len());
        }
    }
    assert_eq!(monomial_count(3, -1), 0);
}

#[test]
fn parsing() {
    let r = ring(Field::Rational);
    assert_eq!(r.parse("x*y - y*x").unwrap(), r.zero());
    assert_eq!(r.parse("x^2 + x*y + y*x + y^2").unwrap(), r.var(0).add(&r.var(1)).pow(2));
    assert_eq!(r.parse("1/2*x + 1/2*x").unwrap(), r.var(0));
    assert!(matches!(r.parse("w"), Err(Error::Parse(_))));
    assert!(matches!(r.parse("x +"), Err(Error::Parse(_))));
    let f3 = ring(Field::Prime(3));
    assert_eq!(f3.parse("3*x + y").unwrap(), f3.var(1));
}

#[test]
fn homogeneity_is_enforced() {
    let r = ring(Field::Rational);
    let src = GradedFreeModule::new(&r, vec![-1, -1]);
    let tgt = GradedFreeModule::new(&r, vec![0]);
    assert!(HomMap::new(&src, &tgt, 0, vec![vec![r.var(0), r.var(1)]]).is_ok());
    let bad = HomMap::new(&src, &tgt, 0, vec![vec![r.var(0), r.parse("y^2").unwrap()]]);
    assert!(matches!(bad, Err(Error::HomogeneityViolation { row: 0, col: 1, .. })));
}

#[test]
fn slices() {
    let r = ring(Field::Rational);
    let m = GradedFreeModule::new(&r, vec![0, -2]);
    assert_eq!(m.gen_degrees(), vec![0, 2]);
    assert_eq!(m.slice_dim(2), 6 + 1);
    assert_eq!(m.slice_basis(3).dim(), 10 + 3);
}
