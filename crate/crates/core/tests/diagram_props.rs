use iquantum::klr::{self, default_orientation, geometric_qtable, KLRElem, Klr, SignConvention};
use iquantum::satake::{examples, SatakeDatum, Word};
use iquantum::shapes;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// The test data with a sign convention under which `Q^ı` is hermitian.
fn data() -> Vec<(SatakeDatum, SignConvention)> {
    examples::acceptance_data()
        .into_iter()
        .map(|(name, d)| (d, if name == "quasi-split A3" { SignConvention::Intro } else { SignConvention::Body }))
        .collect()
}

fn datum() -> impl Strategy<Value = (SatakeDatum, SignConvention)> {
    prop::sample::select(data())
}

fn engine(d: &SatakeDatum, conv: SignConvention) -> Klr<'_> {
    Klr::new(d, geometric_qtable(d, &default_orientation(d), conv).unwrap())
}

fn random_word(rng: &mut StdRng, d: &SatakeDatum, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..d.rank())).collect()
}

fn single_degree(d: &SatakeDatum, x: &KLRElem) -> i64 {
    x.degrees(d).into_iter().next().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_b_is_symmetric((d, _) in datum(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let w = random_word(&mut rng, &d, 4);
        let v = random_word(&mut rng, &d, 4);
        let sweep = d.weight_sweep(-3, 3);
        let lam = &sweep[rng.gen_range(0..sweep.len())];
        prop_assert_eq!(shapes::pair_b(&d, &w, &v, lam), shapes::pair_b(&d, &v, &w, lam));
    }

    #[test]
    fn degree_is_realization_independent((d, _) in datum(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = shapes::random_shape(&d, &mut rng, 10);
        s.validate(&d).unwrap();
        let sweep = d.weight_sweep(-4, 4);
        let lam = &sweep[rng.gen_range(0..sweep.len())];
        prop_assert_eq!(shapes::degree(&s, lam, &d), shapes::degree_b(&s, lam, &d));
        prop_assert_eq!(shapes::degree(&s.transpose(), lam, &d), shapes::degree(&s, lam, &d));
    }

    #[test]
    fn hom_ranks_are_nonnegative((d, _) in datum(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let w = random_word(&mut rng, &d, 3);
        let v = random_word(&mut rng, &d, 3);
        let sweep = d.weight_sweep(-4, 4);
        let lam = &sweep[rng.gen_range(0..sweep.len())];
        prop_assert!(shapes::hom_rank(&d, &w, &v, lam, 12).is_nonnegative());
    }

    #[test]
    fn multiplication_is_associative_and_graded((d, conv) in datum(), seed in any::<u64>()) {
        let eng = engine(&d, conv);
        let mut rng = StdRng::seed_from_u64(seed);
        let bottom = random_word(&mut rng, &d, 4);
        let c = klr::random_basis(&mut rng, &bottom, 2);
        let b = klr::random_basis(&mut rng, c.top(), 2);
        let a = klr::random_basis(&mut rng, b.top(), 2);
        let ab = eng.mul(&a, &b).unwrap();
        let left = eng.mul(&ab, &c).unwrap();
        let right = eng.mul(&a, &eng.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let expect = single_degree(&d, &a) + single_degree(&d, &b);
        prop_assert!(ab.degrees(&d).into_iter().all(|g| g == expect));
    }

    #[test]
    fn dot_slides_hold((d, conv) in datum(), seed in any::<u64>()) {
        let eng = engine(&d, conv);
        let mut rng = StdRng::seed_from_u64(seed);
        let mut bottom = random_word(&mut rng, &d, 3);
        while bottom.len() < 2 {
            bottom.push(rng.gen_range(0..d.rank()));
        }
        let y = klr::random_basis(&mut rng, &bottom, 2);
        let top = y.top().to_vec();
        let s = rng.gen_range(0..top.len() - 1);
        let psi = KLRElem::crossing(top.clone(), s).unwrap();
        let above = psi.top().to_vec();
        let lhs = eng
            .mul(&psi, &eng.mul(&KLRElem::dot(top.clone(), s).unwrap(), &y).unwrap())
            .unwrap()
            .sub(&eng.mul(&KLRElem::dot(above.clone(), s + 1).unwrap(), &eng.mul(&psi, &y).unwrap()).unwrap())
            .unwrap();
        let expect = if top[s] == top[s + 1] { y.clone() } else { KLRElem::zero(above, y.bottom().to_vec()) };
        prop_assert_eq!(lhs, expect);
    }
}

#[test]
fn divided_idempotents_are_idempotent() {
    for (d, conv) in data() {
        let eng = engine(&d, conv);
        for i in d.nodes() {
            for n in 1..=4 {
                let e = eng.divided_idempotent(i, n);
                assert_eq!(eng.mul(&e, &e).unwrap(), e, "{} ^({n})", d.name(i));
            }
        }
    }
}
