//! Lusztig's algebra `f` on the generators `θ_i`: products, the twisted derivations, the bar
//! involution `ψ`, divided powers and the bilinear and sesquilinear forms.
//!
//! Elements are stored as linear combinations of words in the free algebra. The form `(·,·)`
//! is evaluated recursively through the derivations, so its radical is exactly the kernel of
//! the quotient map onto `f`; equality in `f` is tested with [`equal_in_f`].

use std::collections::BTreeMap;
use std::fmt;

use crate::qring::{qfact, LaurentPoly, RatQ};
use crate::satake::{flatten, LamVec, Node, SatakeDatum, Word};

/// A finite linear combination of words with coefficients in `Q(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FElem {
    terms: BTreeMap<Word, RatQ>,
}

impl FElem {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The empty word.
    pub fn one() -> Self {
        Self::word(Vec::new())
    }

    /// `θ_𝐢` for a plain word.
    pub fn word(w: Word) -> Self {
        Self::monomial(w, RatQ::one())
    }

    pub fn monomial(w: Word, c: RatQ) -> Self {
        let mut out = Self::zero();
        out.add_term(w, c);
        out
    }

    /// `θ_i`.
    pub fn theta(i: Node) -> Self {
        Self::word(vec![i])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic word order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &RatQ)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a word.
    pub fn coeff(&self, w: &[Node]) -> RatQ {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: Word, c: RatQ) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &RatQ) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    /// Concatenation product, extended bilinearly.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            for (v, d) in other.terms() {
                let mut wv = w.clone();
                wv.extend_from_slice(v);
                out.add_term(wv, c * d);
            }
        }
        out
    }

    /// `ψ`: bar-conjugate every coefficient, fix every word.
    pub fn psi(&self) -> Self {
        Self { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.bar())).collect() }
    }

    /// Splits the element into its homogeneous components, keyed by weight.
    pub fn components(&self, datum: &SatakeDatum) -> BTreeMap<LamVec, FElem> {
        let mut out: BTreeMap<LamVec, FElem> = BTreeMap::new();
        for (w, c) in self.terms() {
            out.entry(datum.plain_word_weight(w)).or_default().add_term(w.clone(), c.clone());
        }
        out
    }

    /// Renders the element in canonical text form with node names.
    pub fn display<'a>(&'a self, datum: &'a SatakeDatum) -> impl fmt::Display + 'a {
        FElemDisplay { x: self, datum }
    }
}

struct FElemDisplay<'a> {
    x: &'a FElem,
    datum: &'a SatakeDatum,
}

impl fmt::Display for FElemDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.x.terms().map(|(w, c)| format!("[{}]*theta({})", c, self.datum.format_word(w))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `θ_i` multiplied on the left: `θ_i · x`.
pub fn theta_mul(i: Node, x: &FElem) -> FElem {
    let mut out = FElem::zero();
    for (w, c) in x.terms() {
        let mut v = Vec::with_capacity(w.len() + 1);
        v.push(i);
        v.extend_from_slice(w);
        out.add_term(v, c.clone());
    }
    out
}

/// Which derivation [`derivation`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Deriv {
    /// `_iR`: left peeling, factor `q_i^{h_i(α)}`, value `1/(1 - q_i^-2)` on `θ_i`.
    Left,
    /// `R_i`: right peeling, factor `q_i^{h_i(β)}`, value `1/(1 - q_i^-2)` on `θ_i`.
    Right,
    /// `_iR̃`: left peeling, factor `q_i^{-h_i(α)}`, value `1/(1 - q_i^2)` on `θ_i`.
    LeftTilde,
}

fn derivation(datum: &SatakeDatum, i: Node, y: &FElem, kind: Deriv) -> FElem {
    let di = datum.d(i);
    // Numerators collected per output word, then one division by the common factor.
    let mut acc: BTreeMap<Word, RatQ> = BTreeMap::new();
    for (w, c) in y.terms() {
        let l = w.len();
        for r in 0..l {
            if w[r] != i {
                continue;
            }
            let h: i64 = match kind {
                Deriv::Left | Deriv::LeftTilde => w[..r].iter().map(|&s| datum.a(i, s)).sum(),
                Deriv::Right => w[r + 1..].iter().map(|&s| datum.a(i, s)).sum(),
            };
            let e = if kind == Deriv::LeftTilde { -di * h } else { di * h };
            let mut v = w.clone();
            v.remove(r);
            let term = c.shift(e);
            let slot = acc.entry(v).or_default();
            *slot += &term;
        }
    }
    let denom_exp = if kind == Deriv::LeftTilde { 2 * di } else { -2 * di };
    let denom = &LaurentPoly::one() - &LaurentPoly::q_pow(denom_exp);
    let mut out = FElem::zero();
    for (v, c) in acc {
        if !c.is_zero() {
            out.add_term(v, c.div_laurent(&denom).expect("nonzero denominator"));
        }
    }
    out
}

/// `_iR(y)`.
pub fn i_r(datum: &SatakeDatum, i: Node, y: &FElem) -> FElem {
    derivation(datum, i, y, Deriv::Left)
}

/// `R_i(y)`.
pub fn r_i(datum: &SatakeDatum, i: Node, y: &FElem) -> FElem {
    derivation(datum, i, y, Deriv::Right)
}

/// `_iR̃(y)`.
pub fn i_rtilde(datum: &SatakeDatum, i: Node, y: &FElem) -> FElem {
    derivation(datum, i, y, Deriv::LeftTilde)
}

/// `θ_{𝐢}` for a divided-power word: the product of `θ_i^n / [n]^!_{q_i}`.
pub fn theta_word(datum: &SatakeDatum, word: &[(Node, u32)]) -> FElem {
    let mut den = LaurentPoly::one();
    for &(i, n) in word {
        den = &den * &qfact(n, datum.d(i));
    }
    FElem::monomial(flatten(word), RatQ::new(LaurentPoly::one(), den).expect("nonzero factorial"))
}

/// `Π_r (1 - q_{w_r}^{-2})` over the letters of a word.
pub fn word_denominator(datum: &SatakeDatum, w: &[Node]) -> LaurentPoly {
    w.iter().fold(LaurentPoly::one(), |acc, &k| &acc * &(&LaurentPoly::one() - &LaurentPoly::q_pow(-2 * datum.d(k))))
}

/// Numerator of `(θ_w, θ_v)` over [`word_denominator`] of `w`.
///
/// Dynamic programming over the set of letters of `v` not yet consumed: the letters of `w`
/// are peeled from the left with `_hR`, each contributing `q_h` to the power of the sum of
/// `a_{h,s}` over remaining letters `s` to the left of the removed one.
pub fn pair_words_numerator(datum: &SatakeDatum, w: &[Node], v: &[Node]) -> LaurentPoly {
    let l = v.len();
    if w.len() != l {
        return LaurentPoly::zero();
    }
    if datum.plain_word_weight(w) != datum.plain_word_weight(v) {
        return LaurentPoly::zero();
    }
    assert!(l < 32, "word too long for the pairing recursion");
    let full: u32 = if l == 0 { 0 } else { (1u32 << l) - 1 };
    // Masks of remaining letters grouped by the number of letters already consumed.
    let mut layer: BTreeMap<u32, LaurentPoly> = BTreeMap::new();
    layer.insert(full, LaurentPoly::one());
    for &h in w {
        let dh = datum.d(h);
        let mut next: BTreeMap<u32, LaurentPoly> = BTreeMap::new();
        for (mask, val) in &layer {
            let mut left_sum = 0i64;
            for (r, &vr) in v.iter().enumerate() {
                if mask & (1 << r) == 0 {
                    continue;
                }
                if vr == h {
                    let term = val.shift(dh * left_sum);
                    let slot = next.entry(mask & !(1 << r)).or_default();
                    *slot += &term;
                }
                left_sum += datum.a(h, vr);
            }
        }
        layer = next;
    }
    layer.remove(&0).unwrap_or_default()
}

/// `(θ_w, θ_v)`.
pub fn pair_words(datum: &SatakeDatum, w: &[Node], v: &[Node]) -> RatQ {
    let num = pair_words_numerator(datum, w, v);
    if num.is_zero() {
        return RatQ::zero();
    }
    RatQ::new(num, word_denominator(datum, w)).expect("nonzero denominator")
}

/// The symmetric bilinear form `(x, y)`.
pub fn pair(datum: &SatakeDatum, x: &FElem, y: &FElem) -> RatQ {
    let ycomp = y.components(datum);
    let mut total = RatQ::zero();
    for (alpha, xc) in x.components(datum) {
        let Some(yc) = ycomp.get(&alpha) else { continue };
        let mut sum = RatQ::zero();
        let mut den = None;
        for (w, c) in xc.terms() {
            let mut inner = RatQ::zero();
            for (v, d) in yc.terms() {
                let n = pair_words_numerator(datum, w, v);
                if !n.is_zero() {
                    inner += &d.mul_laurent(&n);
                }
            }
            if !inner.is_zero() {
                sum += &(c * &inner);
            }
            den.get_or_insert_with(|| word_denominator(datum, w));
        }
        if let (false, Some(den)) = (sum.is_zero(), den) {
            total += &sum.div_laurent(&den).expect("nonzero denominator");
        }
    }
    total
}

/// The sesquilinear form `⟨x, y⟩ = (ψ(x), y)`.
pub fn sesq(datum: &SatakeDatum, x: &FElem, y: &FElem) -> RatQ {
    pair(datum, &x.psi(), y)
}

/// True when `x = y` in `f`, i.e. `x - y` lies in the radical of the form.
///
/// Pairs the difference against every word of each weight in its support.
pub fn equal_in_f(datum: &SatakeDatum, x: &FElem, y: &FElem) -> bool {
    is_zero_in_f(datum, &x.sub(y))
}

/// True when `x` vanishes in `f`.
pub fn is_zero_in_f(datum: &SatakeDatum, x: &FElem) -> bool {
    for (alpha, comp) in x.components(datum) {
        if comp.terms().count() == 0 {
            continue;
        }
        for v in words_of_weight(&alpha) {
            if !pair(datum, &comp, &FElem::word(v)).is_zero() {
                return false;
            }
        }
    }
    true
}

/// All words with the given letter multiplicities, in lexicographic order.
pub fn words_of_weight(alpha: &LamVec) -> Vec<Word> {
    fn rec(mult: &mut Vec<u32>, cur: &mut Word, out: &mut Vec<Word>, left: u32) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in 0..mult.len() {
            if mult[i] > 0 {
                mult[i] -= 1;
                cur.push(i);
                rec(mult, cur, out, left - 1);
                cur.pop();
                mult[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut mult = alpha.mult.clone();
    rec(&mut mult, &mut Vec::new(), &mut out, alpha.height());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satake::examples::*;

    fn r(s: &str) -> RatQ {
        s.parse().unwrap()
    }

    #[test]
    fn products() {
        let x = FElem::theta(0).mul(&FElem::theta(1));
        assert_eq!(x, FElem::word(vec![0, 1]));
        let y = FElem::theta(0).add(&FElem::theta(1)).mul(&FElem::theta(0));
        assert_eq!(y, FElem::word(vec![0, 0]).add(&FElem::word(vec![1, 0])));
        assert_eq!(FElem::one().mul(&y), y);
    }

    #[test]
    fn derivation_examples() {
        let a2 = quasi_split_a2();
        assert!(i_r(&a2, 0, &FElem::theta(1)).is_zero());
        assert!(i_r(&a2, 0, &FElem::one()).is_zero());
        // _1R(θ_2 θ_1) = q^{a_12} θ_2 / (1 - q^-2)
        let got = i_r(&a2, 0, &FElem::word(vec![1, 0]));
        let expect = FElem::monomial(vec![1], r("(+1*q^1)/(+1*q^0-1*q^2)").scale_int(-1));
        assert_eq!(got, expect);
        assert_eq!(got.coeff(&[1]) * r("+1*q^0-1*q^-2"), r("+1*q^-1"));
    }

    #[test]
    fn theta_word_examples() {
        let a2 = quasi_split_a2();
        let x = theta_word(&a2, &[(0, 2)]);
        assert_eq!(x.coeff(&[0, 0]) * r("+1*q^-1+1*q^1"), RatQ::one());
        assert_eq!(theta_word(&a2, &[]), FElem::one());
        let y = theta_word(&a2, &[(0, 2), (1, 1)]);
        assert_eq!(y.terms().next().unwrap().0, &vec![0, 0, 1]);
    }

    #[test]
    fn pair_examples() {
        let a2 = quasi_split_a2();
        assert!(pair(&a2, &FElem::one(), &FElem::one()).is_one());
        let one_minus = r("+1*q^0-1*q^-2");
        assert_eq!(pair(&a2, &FElem::theta(0), &FElem::theta(0)) * one_minus.clone(), RatQ::one());
        assert!(pair(&a2, &FElem::theta(0), &FElem::theta(1)).is_zero());
        let w = FElem::word(vec![0, 1]);
        assert_eq!(pair(&a2, &w, &w) * one_minus.clone() * one_minus, RatQ::one());
    }

    #[test]
    fn serre_element_is_zero_in_f() {
        // θ_1^2 θ_2 - [2] θ_1 θ_2 θ_1 + θ_2 θ_1^2 is in the radical for a_12 = -1.
        let a2 = split_a2();
        let two = RatQ::from(crate::qring::qint(2, 1));
        let x = FElem::word(vec![0, 0, 1]).sub(&FElem::monomial(vec![0, 1, 0], two)).add(&FElem::word(vec![1, 0, 0]));
        assert!(is_zero_in_f(&a2, &x));
        assert!(!is_zero_in_f(&a2, &FElem::word(vec![0, 1, 0])));
    }
}
