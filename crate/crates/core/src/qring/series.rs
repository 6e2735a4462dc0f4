//! Truncated Laurent series in `q` or in `q^-1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;
use super::ratq::RatQ;
use crate::error::{Error, Result};

/// Direction of expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesDir {
    /// Powers of `q` increase; terms with exponent above the order are dropped.
    #[serde(rename = "q")]
    AscendingQ,
    /// Powers of `q^-1` increase; terms with exponent below minus the order are dropped.
    #[serde(rename = "q^-1")]
    AscendingQInv,
}

/// A series known up to a truncation order `N`.
///
/// For [`SeriesDir::AscendingQ`] every stored exponent is at most `N`; for
/// [`SeriesDir::AscendingQInv`] every stored exponent is at least `-N`. Leading terms on the
/// other side (finitely many) are kept, so a series bounded below by a negative power
/// such as `q^-2 + 1 + ...` is represented faithfully.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PowerSeriesTrunc {
    dir: SeriesDir,
    order: i64,
    coeffs: BTreeMap<i64, BigInt>,
}

impl PowerSeriesTrunc {
    pub fn zero(dir: SeriesDir, order: i64) -> Self {
        Self { dir, order, coeffs: BTreeMap::new() }
    }

    pub fn one(dir: SeriesDir, order: i64) -> Self {
        Self::from_poly(&LaurentPoly::one(), dir, order)
    }

    /// Truncation of a Laurent polynomial.
    pub fn from_poly(p: &LaurentPoly, dir: SeriesDir, order: i64) -> Self {
        let mut s = Self::zero(dir, order);
        for (e, c) in p.terms() {
            s.add_term(e, c.clone());
        }
        s
    }

    /// `1 / (1 - q^step)` for `step > 0` (ascending in `q`) or `step < 0` (ascending in `q^-1`).
    pub fn geometric(step: i64, order: i64) -> Self {
        assert!(step != 0, "geometric step must be nonzero");
        let dir = if step > 0 { SeriesDir::AscendingQ } else { SeriesDir::AscendingQInv };
        let mut s = Self::zero(dir, order);
        let mut e = 0;
        while s.keeps(e) {
            s.coeffs.insert(e, BigInt::from(1));
            e += step;
        }
        s
    }

    pub fn dir(&self) -> SeriesDir {
        self.dir
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    fn keeps(&self, e: i64) -> bool {
        match self.dir {
            SeriesDir::AscendingQ => e <= self.order,
            SeriesDir::AscendingQInv => e >= -self.order,
        }
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() || !self.keeps(e) {
            return;
        }
        let slot = self.coeffs.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.dir, other.dir, "series directions differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut s = Self::zero(self.dir, self.order.min(other.order));
        for (e, c) in self.terms().chain(other.terms()) {
            s.add_term(e, c.clone());
        }
        s
    }

    /// Product, exact up to the order both factors determine.
    ///
    /// That is the smaller truncation order, lowered by any leading term that lies beyond the
    /// truncated side of the other factor (such as `q^-1` for ascending powers of `q`).
    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.dir, self.order.min(other.order));
        }
        let reach = |x: &Self| match self.dir {
            SeriesDir::AscendingQ => x.coeffs.keys().next().map_or(0, |&e| e.min(0)),
            SeriesDir::AscendingQInv => x.coeffs.keys().next_back().map_or(0, |&e| (-e).min(0)),
        };
        let order = (self.order + reach(other)).min(other.order + reach(self));
        let mut s = Self::zero(self.dir, order);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                if s.keeps(ea + eb) {
                    s.add_term(ea + eb, ca * cb);
                } else if self.dir == SeriesDir::AscendingQ {
                    break;
                }
            }
        }
        s
    }

    /// Multiplication by `q^k`; the truncation order is kept, so terms may fall off.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = Self::zero(self.dir, self.order);
        for (e, c) in self.terms() {
            s.add_term(e + k, c.clone());
        }
        s
    }

    /// The same series known to a lower order; `order` must not exceed the current one.
    pub fn truncate(&self, order: i64) -> Self {
        assert!(order <= self.order, "cannot raise the truncation order");
        let mut s = Self::zero(self.dir, order);
        for (e, c) in self.terms() {
            s.add_term(e, c.clone());
        }
        s
    }

    /// The retained terms as a Laurent polynomial.
    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(e, c)| (e, c.clone())))
    }
}

/// Canonical text form: the retained polynomial followed by the order marker.
impl fmt::Display for PowerSeriesTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let marker = match self.dir {
            SeriesDir::AscendingQ => format!("O(q^{})", self.order + 1),
            SeriesDir::AscendingQInv => format!("O(q^{})", -self.order - 1),
        };
        write!(f, "{} + {}", self.to_poly(), marker)
    }
}

/// Expands `a` as a series in `dir` up to order `order`.
///
/// Long division against the extreme term of the denominator (lowest for ascending in `q`,
/// highest for ascending in `q^-1`). Every coefficient must be an integer.
pub fn expand(a: &RatQ, dir: SeriesDir, order: i64) -> Result<PowerSeriesTrunc> {
    match dir {
        SeriesDir::AscendingQ => expand_ascending(a.num(), a.den(), order),
        SeriesDir::AscendingQInv => {
            let s = expand_ascending(&a.num().bar(), &a.den().bar(), order).map_err(|e| match e {
                Error::NonIntegerExpansion { exponent } => Error::NonIntegerExpansion { exponent: -exponent },
                other => other,
            })?;
            let mut out = PowerSeriesTrunc::zero(dir, order);
            for (e, c) in s.terms() {
                out.add_term(-e, c.clone());
            }
            Ok(out)
        }
    }
}

fn expand_ascending(num: &LaurentPoly, den: &LaurentPoly, order: i64) -> Result<PowerSeriesTrunc> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut out = PowerSeriesTrunc::zero(SeriesDir::AscendingQ, order);
    if num.is_zero() {
        return Ok(out);
    }
    let d = den.dense_coeffs();
    let n = num.dense_coeffs();
    let start = num.low_exp() - den.low_exp();
    if start > order {
        return Ok(out);
    }
    let len = (order - start + 1) as usize;
    let mut c: Vec<BigInt> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = n.get(k).cloned().unwrap_or_default();
        for j in 1..d.len().min(k + 1) {
            acc -= &d[j] * &c[k - j];
        }
        let (q, r) = acc.div_rem(&d[0]);
        if !r.is_zero() {
            return Err(Error::NonIntegerExpansion { exponent: start + k as i64 });
        }
        c.push(q);
    }
    for (k, v) in c.into_iter().enumerate() {
        out.add_term(start + k as i64, v);
    }
    Ok(out)
}
