use iquantum::freealg::{self, FElem};
use iquantum::iuea::{self, IElem};
use iquantum::qring::{LaurentPoly, RatQ};
use iquantum::satake::{examples, IWeight, LamVec, SatakeDatum, Word};
use proptest::prelude::*;

fn data() -> Vec<SatakeDatum> {
    examples::acceptance_data().into_iter().map(|(_, d)| d).collect()
}

fn datum() -> impl Strategy<Value = SatakeDatum> {
    prop::sample::select(data())
}

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..rank, 0..=max_len)
}

/// `θ`-combinations of words sharing one content, so that the element is homogeneous.
fn homogeneous(rank: usize, len: usize) -> impl Strategy<Value = FElem> {
    (word(rank, len), prop::collection::vec((any::<prop::sample::Index>(), -2i64..=2, -2i64..=2), 1..4)).prop_map(
        |(w, picks)| {
            let mut x = FElem::zero();
            for (idx, c, e) in picks {
                let mut v = w.clone();
                if !v.is_empty() {
                    let k = idx.index(v.len());
                    v.rotate_left(k);
                }
                x.add_term(v, RatQ::from(LaurentPoly::monomial(c, e)));
            }
            x
        },
    )
}

fn iweight(datum: &SatakeDatum, seed: usize) -> IWeight {
    let sweep = datum.weight_sweep(-3, 3);
    sweep[seed % sweep.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leq_lambda_is_a_partial_order(d in datum(), a in prop::collection::vec(0u32..4, 3), b in prop::collection::vec(0u32..4, 3), c in prop::collection::vec(0u32..4, 3)) {
        let n = d.rank();
        let v = |x: &Vec<u32>| LamVec { mult: x[..n].to_vec() };
        let (a, b, c) = (v(&a), v(&b), v(&c));
        prop_assert!(d.leq_lambda(&a, &a));
        if d.leq_lambda(&a, &b) && d.leq_lambda(&b, &a) {
            prop_assert_eq!(&a, &b);
        }
        if d.leq_lambda(&a, &b) && d.leq_lambda(&b, &c) {
            prop_assert!(d.leq_lambda(&a, &c));
        }
    }

    #[test]
    fn comparable_words_shift_weights_alike(d in datum(), w in word(3, 4), extra in prop::collection::vec(0usize..3, 0..3), seed in 0usize..1000) {
        let n = d.rank();
        let w: Word = w.into_iter().filter(|&i| i < n).collect();
        let mut v = w.clone();
        for i in extra.into_iter().filter(|&i| i < n) {
            v.push(i);
            v.push(d.tau(i));
        }
        prop_assert!(d.leq_lambda(&d.plain_word_weight(&w), &d.plain_word_weight(&v)));
        let lam = iweight(&d, seed);
        let (x, y) = (d.apply_plain_word(&lam, &w), d.apply_plain_word(&lam, &v));
        prop_assert_eq!(x.lam, y.lam);
    }

    #[test]
    fn varsigma_relation_holds(d in datum(), seed in 0usize..1000) {
        let lam = iweight(&d, seed);
        for i in d.nodes() {
            let t = d.tau(i);
            prop_assert_eq!(d.varsigma(t) - lam.lam(t), lam.lam(i) - d.varsigma(i) - d.a(i, t));
        }
    }

    #[test]
    fn orbit_shift_is_trivial(d in datum(), seed in 0usize..1000, j in 0usize..3) {
        let j = j % d.rank();
        let lam = iweight(&d, seed);
        let moved = d.shift(&d.shift(&lam, j, 1), d.tau(j), 1);
        prop_assert_eq!(moved.lam, lam.lam);
    }

    #[test]
    fn pairing_is_symmetric_and_graded(d in datum(), x in homogeneous(3, 4), y in homogeneous(3, 4)) {
        let n = d.rank();
        prop_assume!(x.terms().chain(y.terms()).all(|(w, _)| w.iter().all(|&i| i < n)));
        let xy = freealg::pair(&d, &x, &y);
        prop_assert_eq!(&xy, &freealg::pair(&d, &y, &x));
        let wx = x.components(&d).into_keys().next();
        let wy = y.components(&d).into_keys().next();
        if wx != wy {
            prop_assert!(xy.is_zero());
        }
    }

    #[test]
    fn derivations_are_adjoint(d in datum(), x in homogeneous(3, 3), y in homogeneous(3, 4), i in 0usize..3) {
        let n = d.rank();
        let i = i % n;
        prop_assume!(x.terms().chain(y.terms()).all(|(w, _)| w.iter().all(|&k| k < n)));
        let th = FElem::theta(i);
        prop_assert_eq!(freealg::pair(&d, &x.mul(&th), &y), freealg::pair(&d, &x, &freealg::r_i(&d, i, &y)));
        prop_assert_eq!(freealg::sesq(&d, &th.mul(&x), &y), freealg::sesq(&d, &x, &freealg::i_r(&d, i, &y)));
        prop_assert_eq!(freealg::sesq(&d, &x, &th.mul(&y)), freealg::sesq(&d, &freealg::i_rtilde(&d, i, &x), &y));
    }

    #[test]
    fn b_monomials_are_bar_invariant(d in datum(), w in word(3, 4), seed in 0usize..1000) {
        let n = d.rank();
        let w: Word = w.into_iter().filter(|&i| i < n).collect();
        let lam = iweight(&d, seed);
        let b = iuea::b_plain_word(&d, &w, &lam);
        prop_assert_eq!(b.j, b.jt.psi());
    }

    #[test]
    fn b_action_is_adjoint(d in datum(), w in word(3, 3), v in word(3, 4), i in 0usize..3, seed in 0usize..1000) {
        let n = d.rank();
        let i = i % n;
        let w: Word = w.into_iter().filter(|&k| k < n).collect();
        let v: Word = v.into_iter().filter(|&k| k < n).collect();
        let lam = iweight(&d, seed);
        let x = iuea::b_plain_word(&d, &w, &lam);
        let y = iuea::b_plain_word(&d, &v, &lam);
        let kappa = d.apply_plain_word(&lam, &w);
        let lhs = iuea::ipair(&d, &iuea::act_b(&d, i, &x), &y);
        let rhs = iuea::ipair(&d, &x, &iuea::act_b(&d, d.tau(i), &y));
        let e = d.d(i) * (1 + d.varsigma(i) - kappa.lam(i));
        prop_assert_eq!(lhs, rhs.shift(e));
    }
}

#[test]
fn unit_pairs_to_one() {
    for d in data() {
        for lam in d.weight_sweep(-1, 1) {
            let u = IElem::unit(&lam);
            assert_eq!(iuea::ipair(&d, &u, &u), RatQ::one());
        }
    }
}
