//! Laurent polynomials in one variable `q` with arbitrary-precision integer coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of `Z[q, q^-1]`.
///
/// Stored densely: `coeffs[k]` is the coefficient of `q^(low + k)`. The first and last
/// stored coefficients are nonzero; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    /// `c * q^e`.
    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        Self { low: e, coeffs: vec![c] }
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(1, e)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let terms: Vec<(i64, BigInt)> = terms.into_iter().map(|(e, c)| (e, c.into())).collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let low = terms.iter().map(|t| t.0).min().unwrap();
        let high = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (high - low + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - low) as usize] += c;
        }
        Self::from_dense(low, coeffs)
    }

    /// Normalizes a dense coefficient vector starting at exponent `low`.
    pub(crate) fn from_dense(mut low: i64, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let lead_zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros == coeffs.len() {
            return Self::zero();
        }
        if lead_zeros > 0 {
            coeffs.drain(..lead_zeros);
            low += lead_zeros as i64;
        }
        Self { low, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// True for `c * q^e` (including zero).
    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Lowest exponent with a nonzero coefficient (0 for the zero polynomial).
    pub fn low_exp(&self) -> i64 {
        self.low
    }

    /// Highest exponent with a nonzero coefficient (0 for the zero polynomial).
    pub fn high_exp(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.low + self.coeffs.len() as i64 - 1
        }
    }

    /// Coefficient of `q^e`.
    pub fn coeff(&self, e: i64) -> BigInt {
        let k = e - self.low;
        if k < 0 || k >= self.coeffs.len() as i64 {
            BigInt::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    /// Nonzero terms `(exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(k, c)| (self.low + k as i64, c))
    }

    /// Coefficient of the highest power.
    pub fn leading_coeff(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    /// The substitution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self { low: -self.high_exp(), coeffs }
    }

    /// The substitution `q -> q^d` for `d >= 1`.
    pub fn dilate(&self, d: i64) -> Self {
        assert!(d >= 1, "dilation factor must be positive");
        Self::from_terms(self.terms().map(|(e, c)| (e * d, c.clone())))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Gcd of the coefficients (zero for the zero polynomial), always nonnegative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Exact division of every coefficient by `c`; panics if not exact.
    pub(crate) fn div_scalar_exact(&self, c: &BigInt) -> Self {
        Self {
            low: self.low,
            coeffs: self
                .coeffs
                .iter()
                .map(|x| {
                    let (q, r) = x.div_rem(c);
                    assert!(r.is_zero(), "inexact scalar division");
                    q
                })
                .collect(),
        }
    }

    /// Integer power.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Dense coefficients, the first one belonging to `q^low_exp()`.
    pub fn dense_coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Parts `(low, dense coefficients)` of the polynomial.
    pub(crate) fn into_parts(self) -> (i64, Vec<BigInt>) {
        (self.low, self.coeffs)
    }

    fn add_impl(&self, other: &Self, negate_other: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate_other { -other } else { other.clone() };
        }
        let low = self.low.min(other.low);
        let high = self.high_exp().max(other.high_exp());
        let mut coeffs = vec![BigInt::zero(); (high - low + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(other.low - low) as usize + k];
            if negate_other {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        Self::from_dense(low, coeffs)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Canonical text form: ascending exponents, each term `c*q^e` with an explicit sign.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (e, c) in self.terms() {
            let sign = if c.is_negative() { '-' } else { '+' };
            write!(f, "{sign}{}*q^{e}", c.abs())?;
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse { what: "Laurent polynomial", input: s.to_string() };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "0" {
            return Ok(Self::zero());
        }
        let bytes = t.as_bytes();
        let mut terms = Vec::new();
        let mut pos = 0;
        while pos < bytes.len() {
            let sign = match bytes[pos] {
                b'+' => 1,
                b'-' => -1,
                _ => return Err(err()),
            };
            pos += 1;
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let c: BigInt = t[start..pos].parse().map_err(|_| err())?;
            if !t[pos..].starts_with("*q^") {
                return Err(err());
            }
            pos += 3;
            let start = pos;
            if pos < bytes.len() && bytes[pos] == b'-' {
                pos += 1;
            }
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let e: i64 = t[start..pos].parse().map_err(|_| err())?;
            terms.push((e, c * sign));
        }
        if terms.is_empty() {
            return Err(err());
        }
        Ok(Self::from_terms(terms))
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_impl(rhs, false)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_impl(rhs, true)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in rhs.coeffs.iter().enumerate() {
                coeffs[a + b] += x * y;
            }
        }
        LaurentPoly::from_dense(self.low + rhs.low, coeffs)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        *self = self.add_impl(rhs, false);
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        *self = self.add_impl(rhs, true);
    }
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but fixed total order (by text form), used only for deterministic sorting.
impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.low, &self.coeffs).cmp(&(other.low, &other.coeffs))
    }
}

// Ordinary polynomial helpers on ascending coefficient vectors (index = degree).

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn content_of(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut v);
    if v.is_empty() {
        return v;
    }
    let mut g = content_of(&v);
    if v.last().unwrap().is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    v
}

/// Pseudo-remainder of `a` by `b` (both nonzero, trimmed).
fn pseudo_rem(mut a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    while a.len() > db && !a.is_empty() {
        let da = a.len() - 1;
        let la = a[da].clone();
        for c in a.iter_mut() {
            *c *= lb;
        }
        for (k, bc) in b.iter().enumerate() {
            a[da - db + k] -= &la * bc;
        }
        trim(&mut a);
        if a.len() > db {
            let g = content_of(&a);
            if !g.is_one() && !g.is_zero() {
                for c in a.iter_mut() {
                    *c /= &g;
                }
            }
        }
    }
    a
}

/// Primitive gcd over `Z[q]` of two ordinary polynomials, normalized to positive leading
/// coefficient. Returns `[1]` when the gcd is a unit of `Q[q]`.
pub(crate) fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = primitive(a.to_vec());
    let mut b = primitive(b.to_vec());
    if a.is_empty() {
        return if b.is_empty() { vec![BigInt::one()] } else { b };
    }
    if b.is_empty() {
        return a;
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while b.len() > 1 {
        let r = pseudo_rem(a, &b);
        a = b;
        b = primitive(r);
        if b.is_empty() {
            return a;
        }
    }
    vec![BigInt::one()]
}

/// Exact division of ordinary polynomials; `None` if `b` does not divide `a` over `Z`.
pub(crate) fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    if b.len() > a.len() {
        return None;
    }
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let top = &r[k + db];
        if top.is_zero() {
            continue;
        }
        let (qc, rem) = top.div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (j, bc) in b.iter().enumerate() {
            r[k + j] -= &qc * bc;
        }
        quot[k] = qc;
    }
    if r.iter().all(Zero::is_zero) {
        trim(&mut quot);
        Some(quot)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip() {
        let p = LaurentPoly::from_terms([(-2, -1), (0, 3), (4, 1)]);
        assert_eq!(p.to_string(), "-1*q^-2+3*q^0+1*q^4");
        assert_eq!(lp(&p.to_string()), p);
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert!(" +1*q^0 ".parse::<LaurentPoly>().unwrap().is_one());
        assert!("q+1".parse::<LaurentPoly>().is_err());
    }

    #[test]
    fn ring_operations() {
        let a = lp("+1*q^1+1*q^-1");
        let b = lp("+1*q^1-1*q^-1");
        assert_eq!(&a * &b, lp("+1*q^2-1*q^-2"));
        assert!((&a - &a).is_zero());
        assert_eq!(a.bar(), a);
        assert_eq!(lp("+1*q^2").bar(), lp("+1*q^-2"));
        assert_eq!(lp("+1*q^1+2*q^3").dilate(2), lp("+1*q^2+2*q^6"));
    }

    #[test]
    fn gcd_and_exact_division() {
        let x = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
        // (1 - q^2) = (1 - q)(1 + q), (1 - q^3) = (1 - q)(1 + q + q^2)
        let g = poly_gcd(&x(&[1, 0, -1]), &x(&[1, 0, 0, -1]));
        assert_eq!(g, x(&[-1, 1]));
        assert_eq!(poly_div_exact(&x(&[1, 0, -1]), &x(&[1, 1])), Some(x(&[1, -1])));
        assert_eq!(poly_div_exact(&x(&[1, 0, 1]), &x(&[1, 1])), None);
        assert_eq!(poly_gcd(&x(&[2, 4]), &x(&[3])), x(&[1]));
    }
}
