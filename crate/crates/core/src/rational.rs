//! Exact rational scalars used for sample coordinates, cut levels and radii.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = Ratio<i128>;

pub fn q(numer: i128, denom: i128) -> Q {
    Q::new(numer, denom)
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q`, an integer, or a decimal such as `-0.125`. Decimals are
/// converted exactly.
pub fn parse_rational(input: &str) -> Result<Q> {
    let s = input.trim();
    let err = || Error::RationalParse {
        input: input.to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| err())?;
        let d: i128 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    // 10^30 still leaves headroom in i128 for later arithmetic on the value.
    if frac_part.len() > 30 {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| err())?
    };
    let denom = 10i128.pow(frac_part.len() as u32);
    let value = Q::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Exact rational with the same decimal rendering as `x`'s shortest
/// round-trip representation.
pub fn from_f64_decimal(x: f64) -> Result<Q> {
    if !x.is_finite() {
        return Err(Error::RationalParse { input: x.to_string() });
    }
    parse_rational(&format!("{x}"))
}

/// Smallest `k` with `x * 2^k` an integer, or `None` when the denominator
/// is not a power of two.
pub fn dyadic_level(x: &Q) -> Option<u32> {
    let d = *x.denom();
    if d > 0 && (d & (d - 1)) == 0 {
        Some(d.trailing_zeros())
    } else {
        None
    }
}

pub fn abs_diff(a: &Q, b: &Q) -> Q {
    (a - b).abs()
}

/// `x mod m` in `[0, m)` for positive `m`.
pub fn modulo(x: &Q, m: &Q) -> Q {
    debug_assert!(m.is_positive());
    let r = x - (x / m).floor() * m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}
