//! Property-based tests for the exact algebra layers.

use std::sync::Arc;

use proptest::prelude::*;
use qdp::dalg::DElement;
use qdp::field::PrimeField;
use qdp::linalg::{Mat, RowSpace};
use qdp::qarith::QContext;

fn ctx32() -> Arc<QContext> {
    Arc::new(QContext::new(3, 2).unwrap())
}

fn ctx54() -> Arc<QContext> {
    Arc::new(QContext::new(5, 4).unwrap())
}

prop_compose! {
    fn element(ell: u64)(terms in prop::collection::vec((0usize..40, 0u64..5), 0..4)) -> Vec<(usize, u64)> {
        terms.into_iter().map(|(d, c)| (d, c % ell)).collect()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divided_power_mul_commutative(a in element(3), b in element(3)) {
        let c = ctx32();
        let x = DElement::from_terms(&c, &a);
        let y = DElement::from_terms(&c, &b);
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
    }

    #[test]
    fn divided_power_mul_associative(a in element(5), b in element(5), d in element(5)) {
        let c = ctx54();
        let x = DElement::from_terms(&c, &a);
        let y = DElement::from_terms(&c, &b);
        let z = DElement::from_terms(&c, &d);
        prop_assert_eq!(
            x.mul(&y).unwrap().mul(&z).unwrap(),
            x.mul(&y.mul(&z).unwrap()).unwrap()
        );
    }

    #[test]
    fn divided_power_distributive(a in element(3), b in element(3), d in element(3)) {
        let c = ctx32();
        let x = DElement::from_terms(&c, &a);
        let y = DElement::from_terms(&c, &b);
        let z = DElement::from_terms(&c, &d);
        prop_assert_eq!(
            x.mul(&y.add(&z).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
        );
    }

    #[test]
    fn derivation_is_linear_and_q_leibniz(a in element(3), b in element(3)) {
        let c = ctx32();
        let f = c.field();
        let x = DElement::from_terms(&c, &a);
        let y = DElement::from_terms(&c, &b);
        // linearity
        prop_assert_eq!(
            x.add(&y).unwrap().derive(1),
            x.derive(1).add(&y.derive(1)).unwrap()
        );
        // the twisted Leibniz rule, homogeneous piece by piece
        for (m, cm) in y.terms() {
            let ym = DElement::from_terms(&c, &[(m, cm)]);
            let lhs = x.mul(&ym).unwrap().derive(1);
            let rhs = x
                .mul(&ym.derive(1))
                .unwrap()
                .add(&x.derive(1).mul(&ym).unwrap().scale(f.pow(c.q(), m as u64)))
                .unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn taylor_roundtrip(a in element(5)) {
        let c = ctx54();
        let x = DElement::from_terms(&c, &a);
        prop_assert_eq!(DElement::from_taylor(&c, &x.taylor_expand()), x);
    }

    #[test]
    fn rank_bounded_and_kernel_orthogonal(
        rows in prop::collection::vec(prop::collection::vec(0u64..5, 6), 0..8)
    ) {
        let f = PrimeField::new(5).unwrap();
        let m = Mat::from_rows(rows.clone(), 6);
        let rank = m.rank(&f);
        prop_assert!(rank <= rows.len().min(6));
        let ns = m.nullspace(&f);
        prop_assert_eq!(rank + ns.rows, 6);
        for i in 0..ns.rows {
            let img = m.apply(ns.row(i), &f);
            prop_assert!(img.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn rowspace_reduce_idempotent(
        rows in prop::collection::vec(prop::collection::vec(0u64..3, 5), 0..6),
        v in prop::collection::vec(0u64..3, 5)
    ) {
        let f = PrimeField::new(3).unwrap();
        let mut rs = RowSpace::new(5, f);
        for r in rows {
            rs.push_row(r);
        }
        let r1 = rs.reduce(v.clone());
        let r2 = rs.reduce(r1.clone());
        prop_assert_eq!(r1, r2);
    }
}
