use iquantum::qring::{expand, qbinom, LaurentPoly, PowerSeriesTrunc, RatQ, SeriesDir};
use proptest::prelude::*;

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-4i64..=4, -3i64..=3), 0..4).prop_map(LaurentPoly::from_terms)
}

fn nonzero_laurent() -> impl Strategy<Value = LaurentPoly> {
    laurent().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratq() -> impl Strategy<Value = RatQ> {
    (laurent(), nonzero_laurent()).prop_map(|(n, d)| RatQ::new(n, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_axioms(a in ratq(), b in ratq(), c in ratq()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a);
        }
    }

    #[test]
    fn bar_is_an_involutive_automorphism(a in ratq(), b in ratq()) {
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
        prop_assert_eq!(a.bar().bar(), a);
    }

    #[test]
    fn canonical_text_round_trips(a in ratq(), p in laurent()) {
        prop_assert_eq!(a.to_string().parse::<RatQ>().unwrap(), a);
        prop_assert_eq!(p.to_string().parse::<LaurentPoly>().unwrap(), p);
    }

    #[test]
    fn expansion_inverts_multiplication(n in laurent(), k in 1i64..=3, order in 0i64..=12) {
        // den = (1 - q^k) has an invertible constant term, so the expansion is integral.
        let den = &LaurentPoly::one() - &LaurentPoly::q_pow(k);
        let s = expand(&RatQ::new(n.clone(), den.clone()).unwrap(), SeriesDir::AscendingQ, order).unwrap();
        let back = s.mul(&PowerSeriesTrunc::from_poly(&den, SeriesDir::AscendingQ, order));
        let known = order + n.terms().next().map_or(0, |(e, _)| e.min(0));
        prop_assert_eq!(back.order(), known.min(order));
        prop_assert_eq!(back, PowerSeriesTrunc::from_poly(&n, SeriesDir::AscendingQ, known.min(order)));
    }
}

#[test]
fn qbinom_pascal_recursion() {
    for m in 1..=8i64 {
        for n in 0..=m {
            let lhs = qbinom(m, n, 1);
            let rhs = &(&qbinom(m - 1, n, 1) * &LaurentPoly::q_pow(n))
                + &(&qbinom(m - 1, n - 1, 1) * &LaurentPoly::q_pow(n - m));
            assert_eq!(lhs, rhs, "m = {m}, n = {n}");
        }
    }
}
