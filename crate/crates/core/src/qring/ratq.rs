//! The field `Q(q)` realized as normalized quotients of Laurent polynomials.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::laurent::{poly_div_exact, poly_gcd, LaurentPoly};
use crate::error::{Error, Result};

/// A rational function `num / den` in normal form.
///
/// Normal form: `gcd(num, den)` is a unit in `Q[q, q^-1]`, `den` has lowest exponent 0 and a
/// positive leading coefficient, and the integer contents of `num` and `den` are coprime.
/// Structural equality is therefore equality of rational functions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatQ {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Default for RatQ {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<LaurentPoly> for RatQ {
    fn from(p: LaurentPoly) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        Self { num: p, den: LaurentPoly::one() }
    }
}

impl From<i64> for RatQ {
    fn from(c: i64) -> Self {
        LaurentPoly::constant(c).into()
    }
}

/// Splits a nonzero Laurent polynomial into `q^low` times an ordinary polynomial with
/// nonzero constant term.
fn split(p: LaurentPoly) -> (i64, Vec<BigInt>) {
    p.into_parts()
}

impl RatQ {
    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self::from(LaurentPoly::one())
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        Self::from(LaurentPoly::q_pow(e))
    }

    /// The normalized quotient `num / den`.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den, true))
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value lies in `Z[q, q^-1]`.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    fn normalize(num: LaurentPoly, den: LaurentPoly, reduce: bool) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (nl, mut n) = split(num);
        let (dl, mut d) = split(den);
        if reduce && d.len() > 1 && n.len() > 1 {
            let g = poly_gcd(&n, &d);
            if g.len() > 1 {
                n = poly_div_exact(&n, &g).expect("gcd divides numerator");
                d = poly_div_exact(&d, &g).expect("gcd divides denominator");
            }
        }
        let mut c = BigInt::zero();
        for x in n.iter().chain(d.iter()) {
            c = c.gcd(x);
            if c.is_one() {
                break;
            }
        }
        if d.last().unwrap().is_negative() {
            c = -c;
        }
        let num = LaurentPoly::from_dense(nl - dl, n);
        let den = LaurentPoly::from_dense(0, d);
        if c.is_one() {
            Self { num, den }
        } else {
            Self { num: num.div_scalar_exact(&c), den: den.div_scalar_exact(&c) }
        }
    }

    /// The substitution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        Self::normalize(self.num.bar(), self.den.bar(), false)
    }

    /// The substitution `q -> q^d`.
    pub fn dilate(&self, d: i64) -> Self {
        Self::normalize(self.num.dilate(d), self.den.dilate(d), false)
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { num: self.num.shift(k), den: self.den.clone() }
    }

    /// Multiplication by an integer.
    pub fn scale_int(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        Self::normalize(self.num.scale(&BigInt::from(c)), self.den.clone(), false)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone(), false))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Multiplication by a Laurent polynomial.
    pub fn mul_laurent(&self, p: &LaurentPoly) -> Self {
        if p.is_monomial() {
            if p.is_zero() {
                return Self::zero();
            }
            let (e, c) = p.terms().next().map(|(e, c)| (e, c.clone())).unwrap();
            let shifted = self.shift(e);
            return if c.is_one() { shifted } else { Self::normalize(shifted.num.scale(&c), shifted.den, false) };
        }
        Self::normalize(&self.num * p, self.den.clone(), true)
    }

    /// Division by a nonzero Laurent polynomial.
    pub fn div_laurent(&self, p: &LaurentPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(self.num.clone(), &self.den * p, true))
    }

    pub fn pow(&self, n: u32) -> Self {
        Self { num: self.num.pow(n), den: self.den.pow(n) }
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        let rhs = if negate { -&other.num } else { other.num.clone() };
        if self.den == other.den {
            return Self::normalize(&self.num + &rhs, self.den.clone(), !self.den.is_one());
        }
        if self.den.is_one() {
            return Self::normalize(&(&self.num * &other.den) + &rhs, other.den.clone(), true);
        }
        if other.den.is_one() {
            return Self::normalize(&self.num + &(&rhs * &self.den), self.den.clone(), true);
        }
        let (_, a) = split(self.den.clone());
        let (_, b) = split(other.den.clone());
        let g = poly_gcd(&a, &b);
        let (a_red, b_red) = if g.len() > 1 {
            (
                LaurentPoly::from_dense(0, poly_div_exact(&a, &g).unwrap()),
                LaurentPoly::from_dense(0, poly_div_exact(&b, &g).unwrap()),
            )
        } else {
            (self.den.clone(), other.den.clone())
        };
        let num = &(&self.num * &b_red) + &(&rhs * &a_red);
        Self::normalize(num, &self.den * &b_red, true)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.den.is_one() {
            return self.mul_laurent(&other.num);
        }
        if self.den.is_one() {
            return other.mul_laurent(&self.num);
        }
        // Cross-cancel so that the product is already reduced.
        let (n1l, n1) = split(self.num.clone());
        let (n2l, n2) = split(other.num.clone());
        let (_, d1) = split(self.den.clone());
        let (_, d2) = split(other.den.clone());
        let (n1, d2) = cancel(n1, d2);
        let (n2, d1) = cancel(n2, d1);
        let num = &LaurentPoly::from_dense(n1l, n1) * &LaurentPoly::from_dense(n2l, n2);
        let den = &LaurentPoly::from_dense(0, d1) * &LaurentPoly::from_dense(0, d2);
        Self::normalize(num, den, false)
    }
}

fn cancel(n: Vec<BigInt>, d: Vec<BigInt>) -> (Vec<BigInt>, Vec<BigInt>) {
    if n.len() <= 1 || d.len() <= 1 {
        return (n, d);
    }
    let g = poly_gcd(&n, &d);
    if g.len() <= 1 {
        return (n, d);
    }
    (poly_div_exact(&n, &g).unwrap(), poly_div_exact(&d, &g).unwrap())
}

impl fmt::Debug for RatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Canonical text form: the numerator alone when the denominator is 1, else `(num)/(den)`.
impl fmt::Display for RatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for RatQ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('(') {
            let err = || Error::Parse { what: "rational function", input: s.to_string() };
            let (num, den) = rest.split_once(")/(").ok_or_else(err)?;
            let den = den.strip_suffix(')').ok_or_else(err)?;
            RatQ::new(num.parse()?, den.parse()?)
        } else {
            Ok(RatQ::from(t.parse::<LaurentPoly>()?))
        }
    }
}

impl Neg for &RatQ {
    type Output = RatQ;
    fn neg(self) -> RatQ {
        RatQ { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatQ {
    type Output = RatQ;
    fn neg(self) -> RatQ {
        -&self
    }
}

impl Add for &RatQ {
    type Output = RatQ;
    fn add(self, rhs: &RatQ) -> RatQ {
        self.add_impl(rhs, false)
    }
}

impl Sub for &RatQ {
    type Output = RatQ;
    fn sub(self, rhs: &RatQ) -> RatQ {
        self.add_impl(rhs, true)
    }
}

impl Mul for &RatQ {
    type Output = RatQ;
    fn mul(self, rhs: &RatQ) -> RatQ {
        self.mul_impl(rhs)
    }
}

/// Panics on division by zero; use [`RatQ::checked_div`] for a fallible version.
impl Div for &RatQ {
    type Output = RatQ;
    fn div(self, rhs: &RatQ) -> RatQ {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for RatQ {
            type Output = RatQ;
            fn $m(self, rhs: RatQ) -> RatQ {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatQ> for RatQ {
            type Output = RatQ;
            fn $m(self, rhs: &RatQ) -> RatQ {
                (&self).$m(rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&RatQ> for RatQ {
    fn add_assign(&mut self, rhs: &RatQ) {
        *self = self.add_impl(rhs, false);
    }
}

impl SubAssign<&RatQ> for RatQ {
    fn sub_assign(&mut self, rhs: &RatQ) {
        *self = self.add_impl(rhs, true);
    }
}

/// Which arithmetic operation [`arith`] performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// Exact field arithmetic; `Neg` ignores `b`.
pub fn arith(a: &RatQ, b: &RatQ, kind: ArithKind) -> Result<RatQ> {
    Ok(match kind {
        ArithKind::Add => a + b,
        ArithKind::Sub => a - b,
        ArithKind::Mul => a * b,
        ArithKind::Div => a.checked_div(b)?,
        ArithKind::Neg => -a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RatQ {
        s.parse().unwrap()
    }

    #[test]
    fn spec_examples() {
        let q = RatQ::q_pow(1);
        let qi = RatQ::q_pow(-1);
        assert!(arith(&q, &qi, ArithKind::Mul).unwrap().is_one());
        let x = r("(+1*q^0)/(-1*q^-2+1*q^0)");
        assert!(arith(&x, &x, ArithKind::Sub).unwrap().is_zero());
        // (q - q^-1) / (q^2 - q^-2) = 1 / (q + q^-1)
        let a = r("-1*q^-1+1*q^1");
        let b = r("-1*q^-2+1*q^2");
        let c = arith(&a, &b, ArithKind::Div).unwrap();
        assert_eq!(c * r("+1*q^-1+1*q^1"), RatQ::one());
        assert_eq!(arith(&a, &RatQ::zero(), ArithKind::Div), Err(Error::DivisionByZero));
    }

    #[test]
    fn normal_form() {
        let x = RatQ::new(r("+1*q^-2+1*q^0").num().clone(), r("-1*q^-2+1*q^2").num().clone()).unwrap();
        assert_eq!(x.den().low_exp(), 0);
        assert!(x.den().leading_coeff() > BigInt::zero());
        let y = RatQ::new(LaurentPoly::constant(-2), LaurentPoly::constant(4)).unwrap();
        assert_eq!(y.to_string(), "(-1*q^0)/(+2*q^0)");
        assert_eq!(r(&y.to_string()), y);
    }

    #[test]
    fn bar_examples() {
        let s = r("+1*q^-1+1*q^1");
        assert_eq!(s.bar(), s);
        assert_eq!(r("+1*q^2").bar(), r("+1*q^-2"));
        let x = r("(+1*q^0)/(-1*q^-2+1*q^0)");
        let one_minus_q2 = r("+1*q^0-1*q^2");
        assert!((x.bar() * one_minus_q2).is_one());
    }
}
