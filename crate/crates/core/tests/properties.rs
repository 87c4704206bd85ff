use std::cmp::Ordering;

use num_bigint::BigUint;
use proptest::prelude::*;
use qkneser::linalg::complementary;
use qkneser::{ExactRational, Field, FieldElem, MatGF, QuadExt, Subspace};

const ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 16, 25];

fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n.into(), d.into())
}

fn quad() -> impl Strategy<Value = QuadExt> {
    (-50i64..50, 1i64..20, -50i64..50, 1i64..20, 1u64..60)
        .prop_map(|(a, ad, b, bd, n)| QuadExt::new(rat(a, ad), rat(b, bd), BigUint::from(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn field_axioms(qi in 0..ORDERS.len(), a in 0u8..=255, b in 0u8..=255, c in 0u8..=255) {
        let f = Field::new(ORDERS[qi]).unwrap();
        let q = ORDERS[qi] as u8;
        let (a, b, c) = (FieldElem(a % q), FieldElem(b % q), FieldElem(c % q));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
        }
        prop_assert_eq!(f.pow(a, ORDERS[qi]), a);
    }

    #[test]
    fn quad_order_matches_floats(x in quad(), y in quad()) {
        let (fx, fy) = (x.approx(), y.approx());
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
        }
        prop_assert_eq!(x.cmp(&x), Ordering::Equal);
        prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
    }

    #[test]
    fn span_is_canonical(qi in 0..4usize, d in 2usize..6, raw in prop::collection::vec(0u8..=255, 36)) {
        let q = ORDERS[qi];
        let f = Field::new(q).unwrap();
        let rows: Vec<Vec<FieldElem>> = raw.chunks(6).take(d).map(|r| r[..d].iter().map(|&x| FieldElem(x % q as u8)).collect()).collect();
        let k = d / 2;
        let s = Subspace::span(&f, d, &rows[..k]).unwrap();
        prop_assert!(s.is_canonical());
        prop_assert_eq!(s.dim(), MatGF::from_rows(&rows[..k]).unwrap().rank(&f));
        // the same span from permuted generators
        let mut rev = rows[..k].to_vec();
        rev.reverse();
        prop_assert_eq!(Subspace::span(&f, d, &rev).unwrap(), s.clone());
        // complementary iff the joint rank is full
        let t = Subspace::span(&f, d, &rows[k..]).unwrap();
        if s.dim() + t.dim() == d {
            let joint = MatGF::from_rows(&rows).unwrap().rank(&f) == d;
            prop_assert_eq!(complementary(&f, &s, &t).unwrap(), joint);
        }
    }
}
