//! The acceptance suite: every cross-check between independent algorithms, run on the shipped
//! configurations.

use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::config::{shipped_config, Config};
use crate::error::Result;
use crate::freealg;
use crate::iuea::{self, IElem, IEngine};
use crate::klr::{self, KLRElem, Klr};
use crate::qring::{expand, qint, LaurentPoly, RatQ, SeriesDir};
use crate::satake::{DPWord, IWeight, Node, SatakeDatum, Word};
use crate::shapes;

/// Lower end of the weight sweep.
pub const SWEEP_LO: i64 = -4;
/// Upper end of the weight sweep.
pub const SWEEP_HI: i64 = 4;
/// Truncation order for series comparisons.
pub const ORDER: i64 = 20;

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub checks: u64,
    /// The first failing comparison, or a summary.
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {} checks; {}", self.id, self.name, self.checks, self.detail)
    }
}

/// A named test datum with its configuration.
#[derive(Clone, Debug)]
pub struct SuiteDatum {
    pub label: &'static str,
    pub config: Config,
}

impl SuiteDatum {
    pub fn datum(&self) -> &SatakeDatum {
        &self.config.datum
    }

    fn sweep(&self) -> Vec<IWeight> {
        self.datum().weight_sweep(SWEEP_LO, SWEEP_HI)
    }
}

/// The five test data of the suite.
pub fn acceptance_suite() -> Result<Vec<SuiteDatum>> {
    [
        ("split A1", "split_a1"),
        ("diagonal A1xA1", "diagonal_a1a1"),
        ("quasi-split A2", "quasi_split_a2"),
        ("quasi-split A3", "quasi_split_a3"),
        ("split A2", "split_a2"),
    ]
    .into_iter()
    .map(|(label, stem)| Ok(SuiteDatum { label, config: shipped_config(stem)? }))
    .collect()
}

/// Extra data for the Serre complex with `m = 1` and `m = 3`.
pub fn serre_extras() -> Result<Vec<SuiteDatum>> {
    [("split A1xA1", "split_a1a1"), ("split affine A1", "split_affine_a1")]
        .into_iter()
        .map(|(label, stem)| Ok(SuiteDatum { label, config: shipped_config(stem)? }))
        .collect()
}

/// Collects comparisons and remembers the first failure.
struct Tally {
    checks: u64,
    failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Self { checks: 0, failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.check(false, || what);
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        if self.failure.is_none() {
            self.failure = other.failure;
        }
    }

    fn finish(self, id: u8, name: &'static str, summary: String) -> CriterionResult {
        let passed = self.failure.is_none();
        CriterionResult { id, name, passed, checks: self.checks, detail: self.failure.unwrap_or(summary) }
    }
}

/// Runs `f` on every datum in parallel and merges the tallies in order.
fn per_datum<F>(data: &[SuiteDatum], f: F) -> Tally
where
    F: Fn(&SuiteDatum) -> Tally + Sync,
{
    let tallies: Vec<Tally> = std::thread::scope(|s| {
        let handles: Vec<_> = data.iter().map(|sd| s.spawn(|| f(sd))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion worker panicked")).collect()
    });
    let mut total = Tally::new();
    for t in tallies {
        total.merge(t);
    }
    total
}

fn lam_text(datum: &SatakeDatum, lam: &IWeight) -> String {
    let mut parts = Vec::new();
    for i in datum.nodes() {
        if datum.is_fixed(i) {
            parts.push(format!("p{}={}", datum.name(i), lam.parity(i)));
        } else if datum.tau(i) > i {
            parts.push(format!("l{}={}", datum.name(i), lam.lam(i)));
        }
    }
    format!("({})", parts.join(","))
}

fn words(datum: &SatakeDatum, max_len: usize) -> Vec<Word> {
    datum.words_up_to(max_len)
}

/// `pair_b = ipair` on all word pairs.
pub fn criterion_1(data: &[SuiteDatum]) -> CriterionResult {
    let t = per_datum(data, |sd| {
        let datum = sd.datum();
        let max = if sd.label == "quasi-split A3" { 4 } else { 5 };
        let ws = words(datum, max);
        let mut t = Tally::new();
        for lam in sd.sweep() {
            let mut eng = IEngine::new(datum, &lam);
            let elems: Vec<IElem> = ws.iter().map(|w| eng.b_plain(w)).collect();
            let targets: Vec<IWeight> = ws.iter().map(|w| datum.apply_plain_word(&lam, w)).collect();
            for (a, w) in ws.iter().enumerate() {
                for (b, v) in ws.iter().enumerate() {
                    let combi = shapes::pair_b(datum, w, v, &lam);
                    if targets[a] != targets[b] {
                        t.check(combi.is_zero(), || {
                            format!(
                                "{}: pair_b({}, {}) nonzero across weights",
                                sd.label,
                                datum.format_word(w),
                                datum.format_word(v)
                            )
                        });
                        continue;
                    }
                    let alg = iuea::ipair(datum, &elems[a], &elems[b]);
                    t.check(combi == alg, || {
                        format!(
                            "{} at {}: pair_b({}, {}) = {combi} but ipair = {alg}",
                            sd.label,
                            lam_text(datum, &lam),
                            datum.format_word(w),
                            datum.format_word(v)
                        )
                    });
                }
            }
        }
        t
    });
    t.finish(1, "pairing cross-check", "shape sums equal the recursive form on every pair".into())
}

/// `pair_theta = freealg::pair_words`.
pub fn criterion_2(data: &[SuiteDatum]) -> CriterionResult {
    let t = per_datum(data, |sd| {
        let datum = sd.datum();
        let mut t = Tally::new();
        for len in 0..=5 {
            let ws = datum.words_of_length(len);
            for w in &ws {
                for v in &ws {
                    let a = shapes::pair_theta(datum, w, v);
                    let b = freealg::pair_words(datum, w, v);
                    t.check(a == b, || {
                        format!(
                            "{}: pair_theta({}, {}) = {a} but (θ, θ) = {b}",
                            sd.label,
                            datum.format_word(w),
                            datum.format_word(v)
                        )
                    });
                }
            }
        }
        t
    });
    t.finish(2, "theta pairing oracle", "permutation sums equal the algebraic form".into())
}

/// iSerre relations, with the displayed specializations when `i = τj`.
pub fn criterion_3(data: &[SuiteDatum]) -> CriterionResult {
    let t = per_datum(data, |sd| {
        let datum = sd.datum();
        let mut t = Tally::new();
        for lam in sd.sweep() {
            for i in datum.nodes() {
                for j in datum.nodes().filter(|&j| j != i) {
                    let rep = match iuea::iserre_check(datum, i, j, &lam) {
                        Ok(r) => r,
                        Err(e) => {
                            t.fail(format!("{}: iserre_check({i}, {j}) failed: {e}", sd.label));
                            continue;
                        }
                    };
                    t.check(rep.equal, || {
                        format!(
                            "{} at {}: iSerre fails for ({}, {})",
                            sd.label,
                            lam_text(datum, &lam),
                            datum.name(i),
                            datum.name(j)
                        )
                    });
                    if datum.tau(j) != i {
                        continue;
                    }
                    let d = datum.d(i);
                    let e = lam.lam(i) - datum.varsigma(i);
                    let shown = match datum.a(i, j) {
                        0 => Some(RatQ::from(qint(e, d))),
                        -1 => Some(-(RatQ::q_pow(d * (e - 1)) + RatQ::q_pow(d * (1 - e)))),
                        _ => None,
                    };
                    if let Some(shown) = shown {
                        t.check(rep.rhs_coeff == shown, || {
                            format!("{}: coefficient {} differs from {shown}", sd.label, rep.rhs_coeff)
                        });
                    }
                }
            }
        }
        t
    });
    t.finish(3, "iSerre relations", "both sides agree in f for every (i, j, λ)".into())
}

/// BKL coefficients, the product formula and the q-binomial identity.
pub fn criterion_4(data: &[SuiteDatum]) -> CriterionResult {
    let mut t = per_datum(data, |sd| {
        let datum = sd.datum();
        let mut t = Tally::new();
        for lam in sd.sweep() {
            for i in datum.nodes().filter(|&i| !datum.is_fixed(i)) {
                for m in 1..=4 {
                    for n in 0..=m {
                        match (iuea::f_coeff(datum, n, m, i, &lam), iuea::f_coeff_oracle(datum, n, m, i, &lam)) {
                            (Ok(a), Ok(b)) => t.check(a == b, || {
                                format!(
                                    "{} at {}: f_{n},{m} = {a} but the count gives {b}",
                                    sd.label,
                                    lam_text(datum, &lam)
                                )
                            }),
                            (a, b) => t.fail(format!("{}: f_coeff errored: {a:?} / {b:?}", sd.label)),
                        }
                    }
                }
                match iuea::bkl_sum(datum, i, &lam) {
                    Ok(s) => {
                        let p = iuea::bkl_product(datum, i, &lam);
                        t.check(s == p, || format!("{}: BKL sum {s} differs from product {p}", sd.label));
                    }
                    Err(e) => t.fail(format!("{}: bkl_sum errored: {e}", sd.label)),
                }
            }
        }
        t
    });
    for m in 1..=8 {
        let [p, l, r] = iuea::binomial_identity_sides(m);
        t.check(p == l && l == r, || format!("q-binomial identity fails at m = {m}: {p} / {l} / {r}"));
    }
    t.finish(4, "BKL coefficients", "closed forms, diagram counts and product formula agree".into())
}

/// idivided powers on split A1.
pub fn criterion_5(_data: &[SuiteDatum]) -> CriterionResult {
    let mut t = Tally::new();
    let sd = match shipped_config("split_a1") {
        Ok(c) => c,
        Err(e) => {
            t.fail(format!("split A1 config: {e}"));
            return t.finish(5, "idivided powers", String::new());
        }
    };
    let datum = &sd.datum;
    for lam in datum.weight_sweep(0, 0) {
        for n in 0..=6u32 {
            let exp = iuea::delta_expansion(datum, &[(0, n)], &lam);
            let mut expected = std::collections::BTreeMap::new();
            for m in 0..=n / 2 {
                let key: DPWord = if n > 2 * m { vec![(0, n - 2 * m)] } else { vec![] };
                expected.insert(key, iuea::idivided_coeff(datum, 0, n, m, &lam));
            }
            for (k, c) in &exp {
                let want = expected.get(k).cloned().unwrap_or_default();
                t.check(*c == want, || {
                    format!(
                        "n = {n}, parity {}: coefficient of δ{} is {c}, expected {want}",
                        lam.parity(0),
                        datum.format_dpword(k)
                    )
                });
            }
            for (k, want) in &expected {
                t.check(exp.contains_key(k), || {
                    format!("n = {n}: missing δ{} (expected {want})", datum.format_dpword(k))
                });
            }
        }
    }
    t.finish(5, "idivided powers", "δ-expansions match the closed form for n ≤ 6, both parities".into())
}

/// Triangularity of cap-free pairings, cross-checked against the recursive form.
pub fn criterion_6(data: &[SuiteDatum]) -> CriterionResult {
    let t = per_datum(data, |sd| {
        let datum = sd.datum();
        let ws = words(datum, 4);
        let mut t = Tally::new();
        for lam in sd.sweep() {
            let mut eng = IEngine::new(datum, &lam);
            for w in &ws {
                let bw = eng.b_plain(w);
                let wt_w = datum.plain_word_weight(w);
                for v in &ws {
                    let val = shapes::pair_b_nabla(datum, w, v, &lam);
                    if !val.is_zero() {
                        t.check(datum.leq_lambda(&datum.plain_word_weight(v), &wt_w), || {
                            format!(
                                "{}: <b_{}, ð_{}> = {val} violates the order",
                                sd.label,
                                datum.format_word(w),
                                datum.format_word(v)
                            )
                        });
                    }
                    let alg = iuea::ipair_nabla(datum, &bw, v);
                    t.check(val == alg, || {
                        format!(
                            "{} at {}: cap-free sum ({}, {}) = {val} but the recursive form gives {alg}",
                            sd.label,
                            lam_text(datum, &lam),
                            datum.format_word(w),
                            datum.format_word(v)
                        )
                    });
                }
            }
        }
        t
    });
    t.finish(6, "triangularity", "no cap-free pairing violates the order on Λ".into())
}

/// Graded ranks: integrality, positivity and agreement with the pairing.
pub fn criterion_7(data: &[SuiteDatum]) -> CriterionResult {
    let mut t = per_datum(data, |sd| {
        let datum = sd.datum();
        let ws = words(datum, 3);
        let mut t = Tally::new();
        for lam in sd.sweep() {
            for w in &ws {
                for v in &ws {
                    let rank = shapes::hom_rank(datum, w, v, &lam, ORDER);
                    t.check(rank.is_nonnegative(), || format!("{}: negative coefficient in {rank}", sd.label));
                    match shapes::hom_rank_from_pairing(datum, w, v, &lam, ORDER) {
                        Ok(p) => t.check(p == rank, || {
                            format!(
                                "{} at {}: rank ({}, {}) = {rank} but the pairing gives {p}",
                                sd.label,
                                lam_text(datum, &lam),
                                datum.format_word(w),
                                datum.format_word(v)
                            )
                        }),
                        Err(e) => t.fail(format!("{}: pairing expansion failed: {e}", sd.label)),
                    }
                }
            }
        }
        t
    });
    match shipped_config("split_a1") {
        Ok(c) => {
            let g = shapes::end_grdim(&c.datum, 10);
            let expect = LaurentPoly::from_terms(
                [1, 1, 1, 2, 2, 3].iter().enumerate().map(|(k, &c)| (2 * k as i64, num_bigint::BigInt::from(c))),
            );
            t.check(g.to_poly() == expect, || format!("End(1) for split A1 is {g}"));
        }
        Err(e) => t.fail(format!("split A1 config: {e}")),
    }
    t.finish(7, "graded ranks", "ranks are nonnegative and equal the expanded pairing".into())
}

/// Two realizations of the shape degree agree.
pub fn criterion_8(data: &[SuiteDatum]) -> CriterionResult {
    let t = per_datum(data, |sd| {
        let datum = sd.datum();
        let sweep = sd.sweep();
        let mut rng = StdRng::seed_from_u64(0x5eed_0008);
        let mut t = Tally::new();
        for _ in 0..500 {
            let s = shapes::random_shape(datum, &mut rng, 8);
            let lam = &sweep[rng.gen_range(0..sweep.len())];
            let a = shapes::degree(&s, lam, datum);
            let b = shapes::degree_b(&s, lam, datum);
            t.check(a == b, || format!("{}: degrees {a} and {b} differ for {}", sd.label, s.display(datum)));
        }
        t
    });
    t.finish(8, "degree well-definedness", "both slicings give the same degree".into())
}

fn dot_poly_elem(top: &[Node], p: usize, poly: &klr::Poly2) -> Result<KLRElem> {
    let mut total = KLRElem::zero(top.to_vec(), top.to_vec());
    for (&(r, s), &c) in poly {
        let mut dots = vec![0; top.len()];
        dots[p] = r;
        dots[p + 1] = s;
        total = total.add(&KLRElem::dots(top.to_vec(), dots)?.scale(c))?;
    }
    Ok(total)
}

fn klr_checks(sd: &SuiteDatum, triples: usize, seed: u64) -> Result<Tally> {
    let datum = sd.datum();
    let label = sd.label;
    let eng = Klr::new(datum, sd.config.qtable()?);
    let mut t = Tally::new();

    for len in 0..=4 {
        let ws = datum.words_of_length(len);
        for w in &ws {
            for v in &ws {
                let g = klr::graded_dim(datum, w, v, ORDER);
                let p = expand(&shapes::pair_theta(datum, w, v).bar(), SeriesDir::AscendingQ, ORDER)?;
                t.check(g == p, || {
                    format!(
                        "{label}: graded dim ({}, {}) = {g} but the pairing gives {p}",
                        datum.format_word(w),
                        datum.format_word(v)
                    )
                });
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let all = datum.words_up_to(4);
    for _ in 0..triples {
        let bottom = &all[rng.gen_range(0..all.len())];
        let c = klr::random_basis(&mut rng, bottom, 2);
        let b = klr::random_basis(&mut rng, c.top(), 2);
        let a = klr::random_basis(&mut rng, b.top(), 2);
        let left = eng.mul(&eng.mul(&a, &b)?, &c)?;
        let right = eng.mul(&a, &eng.mul(&b, &c)?)?;
        t.check(left == right, || {
            format!("{label}: (ab)c = {} but a(bc) = {}", left.display(datum), right.display(datum))
        });
        let expect: i64 = [&a, &b, &c].iter().map(|x| x.degrees(datum).into_iter().next().unwrap_or(0)).sum();
        let degs = left.degrees(datum);
        t.check(degs.is_empty() || degs.into_iter().eq([expect]), || format!("{label}: product is not homogeneous"));
    }

    for i in datum.nodes() {
        for n in 1..=4 {
            let e = eng.divided_idempotent(i, n);
            t.check(eng.mul(&e, &e)? == e, || format!("{label}: 1_{{{}^({n})}} is not idempotent", datum.name(i)));
            let w0: Vec<usize> = (0..n).rev().collect();
            let psi = KLRElem::basis(vec![i; n], &klr::canonical_word(&w0), None)?;
            t.check(eng.mul(&psi, &e)? == psi, || format!("{label}: ψ_w0 1_{{{}^({n})}} ≠ ψ_w0", datum.name(i)));
        }
    }

    for len in 2..=3 {
        for w in datum.words_of_length(len) {
            let samples: Vec<KLRElem> = std::iter::once(KLRElem::idempotent(w.clone()))
                .chain((0..3).map(|_| klr::random_basis(&mut rng, &w, 1)))
                .collect();
            for y in samples {
                let top = y.top().to_vec();
                for s in 0..len - 1 {
                    let (k, l) = (top[s], top[s + 1]);
                    let psi = KLRElem::crossing(top.clone(), s)?;
                    let above = psi.top().to_vec();
                    let delta = if k == l { y.clone() } else { KLRElem::zero(above.clone(), y.bottom().to_vec()) };
                    // ψ x_s - x_{s+1} ψ
                    let lhs = eng
                        .mul(&psi, &eng.mul(&KLRElem::dot(top.clone(), s)?, &y)?)?
                        .sub(&eng.mul(&KLRElem::dot(above.clone(), s + 1)?, &eng.mul(&psi, &y)?)?)?;
                    t.check(lhs == delta, || format!("{label}: first dot slide fails on {}", y.display(datum)));
                    // x_s ψ - ψ x_{s+1}
                    let lhs = eng
                        .mul(&KLRElem::dot(above.clone(), s)?, &eng.mul(&psi, &y)?)?
                        .sub(&eng.mul(&psi, &eng.mul(&KLRElem::dot(top.clone(), s + 1)?, &y)?)?)?;
                    t.check(lhs == delta, || format!("{label}: second dot slide fails on {}", y.display(datum)));
                    let psi_back = KLRElem::crossing(above.clone(), s)?;
                    let sq = eng.mul(&psi_back, &eng.mul(&psi, &y)?)?;
                    let qpoly = eng.mul(&dot_poly_elem(&top, s, eng.table().q(k, l))?, &y)?;
                    t.check(sq == qpoly, || format!("{label}: quadratic relation fails on {}", y.display(datum)));
                }
            }
        }
    }
    Ok(t)
}

/// Quiver Hecke algebra: graded dimensions, associativity, idempotents and local relations.
pub fn criterion_9(data: &[SuiteDatum]) -> CriterionResult {
    let per = 200usize.div_ceil(data.len().max(1));
    let t = per_datum(data, |sd| {
        let seed = 0x5eed_0009 ^ sd.label.len() as u64;
        klr_checks(sd, per, seed).unwrap_or_else(|e| {
            let mut t = Tally::new();
            t.fail(format!("{}: {e}", sd.label));
            t
        })
    });
    t.finish(9, "quiver Hecke algebra", format!("{per} random triples per datum associate"))
}

/// Serre complexes with geometric parameters.
pub fn criterion_10(data: &[SuiteDatum]) -> CriterionResult {
    let mut all: Vec<SuiteDatum> = data.to_vec();
    let mut t = Tally::new();
    match serre_extras() {
        Ok(x) => all.extend(x),
        Err(e) => t.fail(format!("extra Serre data: {e}")),
    }
    let mut seen_m = std::collections::BTreeSet::new();
    for sd in &all {
        let datum = sd.datum();
        let eng = match sd.config.qtable() {
            Ok(q) => Klr::new(datum, q),
            Err(e) => {
                t.fail(format!("{}: {e}", sd.label));
                continue;
            }
        };
        for i in datum.nodes() {
            for j in datum.nodes().filter(|&j| j != i && datum.tau(j) != i) {
                match eng.serre_complex_check(i, j) {
                    Ok(rep) => {
                        seen_m.insert(rep.m);
                        t.check(rep.dd_zero && rep.splitting, || {
                            format!(
                                "{} ({}, {}), m = {}: d∘d = 0 is {}, splitting is {}",
                                sd.label,
                                datum.name(i),
                                datum.name(j),
                                rep.m,
                                rep.dd_zero,
                                rep.splitting
                            )
                        });
                    }
                    Err(e) => t.fail(format!("{} ({}, {}): {e}", sd.label, datum.name(i), datum.name(j))),
                }
            }
        }
    }
    let ms: Vec<String> = seen_m.iter().map(|m| m.to_string()).collect();
    t.finish(10, "Serre complex", format!("exact and split for m in {{{}}}", ms.join(", ")))
}

/// Runs one criterion by number.
pub fn run_criterion(id: u8, data: &[SuiteDatum]) -> Option<CriterionResult> {
    Some(match id {
        1 => criterion_1(data),
        2 => criterion_2(data),
        3 => criterion_3(data),
        4 => criterion_4(data),
        5 => criterion_5(data),
        6 => criterion_6(data),
        7 => criterion_7(data),
        8 => criterion_8(data),
        9 => criterion_9(data),
        10 => criterion_10(data),
        _ => return None,
    })
}

/// Runs all ten criteria on the shipped data.
pub fn run_all() -> Result<Vec<CriterionResult>> {
    let data = acceptance_suite()?;
    Ok((1..=10).filter_map(|id| run_criterion(id, &data)).collect())
}
