use std::sync::Arc;

use proptest::prelude::*;

use hilbloc::cusp::{associate_normal_form, classify_cusp_ideal, CuspCanonicalIdeal};
use hilbloc::{
    parse_element, parse_poly, q, qr, CoeffAlgebra, CurveRing, GroebnerBasis, IdealGens, Oracle, PolyRing, RingElement,
};

fn node() -> Arc<CurveRing> {
    CurveRing::node(CoeffAlgebra::rationals(), 12).unwrap()
}

fn cusp() -> Arc<CurveRing> {
    CurveRing::cusp(CoeffAlgebra::rationals(), 12).unwrap()
}

/// Small bivariate polynomial as source text.
fn poly_src() -> impl Strategy<Value = String> {
    prop::collection::vec((-4i64..=4, 1i64..=3, 0u32..4, 0u32..4), 1..5).prop_map(|terms| {
        terms
            .iter()
            .map(|(n, d, a, b)| format!("({n}/{d})*x^{a}*y^{b}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

fn elem(ring: &Arc<CurveRing>, src: &str) -> RingElement {
    parse_element(ring, src).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in poly_src(), b in poly_src(), c in poly_src(), cuspidal in any::<bool>()) {
        let r = if cuspidal { cusp() } else { node() };
        let (a, b, c) = (elem(&r, &a), elem(&r, &b), elem(&r, &c));
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a.clone());
        prop_assert_eq!(a.mul(&RingElement::one(&r)).unwrap(), a);
    }

    #[test]
    fn normal_form_is_canonical(a in poly_src()) {
        let r = cusp();
        let e = elem(&r, &a);
        prop_assert_eq!(elem(&r, &e.to_string()), e.clone());
        prop_assert_eq!(elem(&r, &format!("({a}) + (x^2 - y^3)*({a})")), e);
        let n = node();
        let killed = elem(&n, &format!("x*y*({a})"));
        prop_assert!(killed.is_zero());
    }

    #[test]
    fn parse_print_round_trip(a in poly_src()) {
        let ring = PolyRing::grevlex(&["x", "y"]).unwrap();
        let p = parse_poly(&ring, &a).unwrap();
        prop_assert_eq!(parse_poly(&ring, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn groebner_normal_forms(g1 in poly_src(), g2 in poly_src(), f in poly_src(), h in poly_src()) {
        let ring = PolyRing::grevlex(&["x", "y"]).unwrap();
        let p = |s: &str| parse_poly(&ring, s).unwrap();
        let gb = GroebnerBasis::new(&ring, &[p(&g1), p(&g2)]).unwrap();
        let nf = gb.normal_form(&p(&f)).unwrap();
        prop_assert_eq!(gb.normal_form(&nf).unwrap(), nf.clone());
        let shifted = &p(&f) + &(&p(&h) * &p(&g1));
        prop_assert_eq!(gb.normal_form(&shifted).unwrap(), nf);
        prop_assert!(gb.contains(&(&p(&h) * &p(&g2))).unwrap());
    }

    #[test]
    fn associate_forms_reconstruct_the_input(unit in poly_src(), kind in 0usize..5, m in 0u32..3, a in 1i64..5) {
        let r = CurveRing::cusp(CoeffAlgebra::rationals(), 40).unwrap();
        let u = elem(&r, &format!("1 + y*({unit})"));
        let canon = match kind {
            0 => CuspCanonicalIdeal::pow_y(m + 1).unwrap(),
            1 => CuspCanonicalIdeal::x_pow_y(m),
            _ => CuspCanonicalIdeal::binom(m, (kind as u32 % 2) + 1, qr(a, 2)).unwrap(),
        };
        let g = canon.generators(&r).remove(0).mul(&u).unwrap();
        let f = associate_normal_form(&g, None).unwrap();
        prop_assert_eq!(&f.canonical, &canon);
        let back = f.unit_witness.mul(&f.canonical_element()).unwrap();
        prop_assert_eq!(back, elem(f.unit_witness.ring(), &g.to_string()));
    }

    #[test]
    fn classification_is_idempotent(kind in 0usize..5, m in 0u32..4, a in prop::sample::select(vec![-3i64, -1, 2, 5])) {
        let r = cusp();
        let o = Oracle::default();
        let canon = match kind {
            0 => CuspCanonicalIdeal::pow_y(m + 1).unwrap(),
            1 => CuspCanonicalIdeal::x_pow_y(m),
            2 => CuspCanonicalIdeal::two_gen(m, 1).unwrap(),
            3 => CuspCanonicalIdeal::two_gen(m, 2).unwrap(),
            _ => CuspCanonicalIdeal::binom(m, 1, q(a)).unwrap(),
        };
        let once = classify_cusp_ideal(&canon.ideal(&r).unwrap(), &o).unwrap();
        prop_assert_eq!(&once, &canon);
        let twice = classify_cusp_ideal(&once.ideal(&r).unwrap(), &o).unwrap();
        prop_assert_eq!(twice, once);
        let padded = IdealGens::new(&r, [canon.generators(&r), vec![elem(&r, &format!("y^{}", 2 * m + 6))]].concat()).unwrap();
        prop_assert_eq!(classify_cusp_ideal(&padded, &o).unwrap(), canon);
    }
}
