//! Balanced quantum integers, factorials and binomial coefficients.

use super::laurent::LaurentPoly;

/// `[n]_{q^d} = (q^{dn} - q^{-dn}) / (q^d - q^{-d})`; `[-n] = -[n]`.
pub fn qint(n: i64, d: i64) -> LaurentPoly {
    assert!(d >= 1, "d must be positive");
    if n < 0 {
        return -qint(-n, d);
    }
    LaurentPoly::from_terms((0..n).map(|k| (d * (n - 1 - 2 * k), 1)))
}

/// `[n]^!_{q^d}` for `n >= 0`.
pub fn qfact(n: u32, d: i64) -> LaurentPoly {
    (1..=n as i64).fold(LaurentPoly::one(), |acc, k| &acc * &qint(k, d))
}

/// The balanced binomial `[m; n]_{q^d}` for any integer `m`; zero when `n < 0`.
///
/// Computed by the Pascal rule `[m; n] = q^{-dn}[m-1; n] + q^{d(m-n)}[m-1; n-1]` for
/// `m >= 0` and by `[m; n] = (-1)^n [n - m - 1; n]` for `m < 0`.
pub fn qbinom(m: i64, n: i64, d: i64) -> LaurentPoly {
    assert!(d >= 1, "d must be positive");
    if n < 0 {
        return LaurentPoly::zero();
    }
    if m < 0 {
        let b = qbinom(n - m - 1, n, d);
        return if n % 2 == 0 { b } else { -b };
    }
    if n > m {
        return LaurentPoly::zero();
    }
    // Row-by-row Pascal triangle.
    let mut row = vec![LaurentPoly::one()];
    for r in 1..=m {
        let mut next = Vec::with_capacity(row.len() + 1);
        for k in 0..=r {
            let left = if k < r { row[k as usize].shift(-d * k) } else { LaurentPoly::zero() };
            let right = if k > 0 { row[(k - 1) as usize].shift(d * (r - k)) } else { LaurentPoly::zero() };
            next.push(&left + &right);
        }
        row = next;
    }
    row[n as usize].clone()
}
