use std::collections::BTreeMap;

use gknot::{Mono, Poly, Sub, Var};
use proptest::prelude::*;

fn vars() -> Vec<Var> {
    vec![
        Var::Kauffman,
        Var::T(Sub::id("e1")),
        Var::S(Sub::id("e1")),
        Var::A("Q".into()),
        Var::B("Q".into()),
        Var::lam("P", "Q"),
        Var::X(vec!["Q".into()]),
        Var::R(Sub::id("e1"), Sub::id("e2")),
        Var::Y(Sub::id("e1"), "Q".into()),
    ]
}

fn mono() -> impl Strategy<Value = Mono> {
    prop::collection::vec((0..9usize, -3i64..=3), 0..3)
        .prop_map(|v| Mono::from_pairs(v.into_iter().map(|(i, e)| (vars()[i].clone(), e))))
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-5i64..=5, mono()), 0..5).prop_map(|ts| {
        let mut p = Poly::zero();
        for (c, m) in ts {
            p.add_assign(&Poly::term(c, m));
        }
        p
    })
}

proptest! {
    #[test]
    fn addition_is_an_abelian_group(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.add(&Poly::zero()), a.clone());
        prop_assert!(a.add(&a.neg()).is_zero());
        prop_assert_eq!(a.sub(&b), a.add(&b.neg()));
    }

    #[test]
    fn multiplication_is_a_commutative_ring(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&Poly::one()), a.clone());
        prop_assert!(a.mul(&Poly::zero()).is_zero());
    }

    #[test]
    fn text_round_trip(a in poly()) {
        let text = a.to_string();
        let back: Poly = text.parse().unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn monomials_invert(m in mono(), k in -3i64..=3) {
        let p = Poly::term(1, m.clone());
        prop_assert_eq!(p.pow(-1).unwrap().mul(&p), Poly::one());
        prop_assert_eq!(p.pow(k).unwrap(), Poly::term(1, m.pow(k)));
    }

    #[test]
    fn substitution_is_a_ring_map(a in poly(), b in poly(), m in mono(), neg in any::<bool>()) {
        let mut map = BTreeMap::new();
        map.insert(Var::A("Q".into()), Poly::var(Var::Kauffman).mul(&Poly::var(Var::T(Sub::id("e1")))));
        // Variables occur with negative exponents, so only units may be substituted.
        map.insert(Var::lam("P", "Q"), Poly::term(if neg { -1 } else { 1 }, m));
        let f = |p: &Poly| p.substitute(&map).unwrap();
        prop_assert_eq!(f(&a.add(&b)), f(&a).add(&f(&b)));
        prop_assert_eq!(f(&a.mul(&b)), f(&a).mul(&f(&b)));
    }

    #[test]
    fn coefficients_reassemble(a in poly()) {
        let v = Var::Kauffman;
        let mut sum = Poly::zero();
        for k in -6..=6 {
            sum.add_assign(&a.coefficient_at(&v, k).mul(&Poly::var_pow(v.clone(), k)));
        }
        prop_assert_eq!(sum, a);
    }
}

#[test]
fn bipartition_key_avoids_smallest_pole() {
    let poles: Vec<String> = ["P", "Q", "R"].iter().map(|s| s.to_string()).collect();
    assert_eq!(Var::x(["P"], &poles), Some(Var::X(vec!["Q".into(), "R".into()])));
    assert_eq!(Var::x(["Q", "R"], &poles), Var::x(["P"], &poles));
    assert_eq!(Var::x(Vec::<&str>::new(), &poles), None);
    assert_eq!(Var::x(["P", "Q", "R"], &poles), None);
}

#[test]
fn negative_power_of_non_unit_fails() {
    let p: Poly = "A + 1".parse().unwrap();
    assert!(p.pow(-1).is_err());
    assert_eq!(p.pow(2).unwrap().to_string(), "A^2 + 2*A + 1");
}
