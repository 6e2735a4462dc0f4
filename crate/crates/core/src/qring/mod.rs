//! Exact arithmetic in `Z[q, q^-1]` and its fraction field, quantum combinatorics and
//! truncated series expansion.

mod laurent;
mod quantum;
mod ratq;
mod series;

pub use laurent::LaurentPoly;
pub use quantum::{qbinom, qfact, qint};
pub use ratq::{arith, ArithKind, RatQ};
pub use series::{expand, PowerSeriesTrunc, SeriesDir};

/// `1 / (1 - q^e)` as an exact rational function.
pub fn geometric_factor(e: i64) -> RatQ {
    RatQ::new(LaurentPoly::one(), &LaurentPoly::one() - &LaurentPoly::q_pow(e)).expect("1 - q^e is nonzero for e != 0")
}
