//! The Gray subbase of the unit interval, cut from `f_n(x) = -cos(2^n π x)`
//! at 0.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::Point;
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::seq::ExtDigit;
use crate::subbase::{Cut, CutFunction, FunctionalSubbase};

/// Number of pairs materialized when callers do not ask for a specific count.
pub const DEFAULT_GRAY_PAIRS: usize = 16;

/// `t = 2^n x mod 2` as `(r, q)` with `t = r / q` and `0 ≤ r < 2q`.
fn doubling_residue(x: &Q, n: u32) -> (i128, i128) {
    let (p, q) = (*x.numer(), *x.denom());
    let m = 2 * q;
    let mut r = p.rem_euclid(m);
    for _ in 0..n {
        r = (2 * r) % m;
    }
    (r, q)
}

/// Exact symbol of `x` for the `n`-th Gray pair.
///
/// With `t = 2^n x mod 2`, the sign of `-cos(π t)` is negative on
/// `[0, 1/2) ∪ (3/2, 2)`, positive on `(1/2, 3/2)` and zero at `1/2` and
/// `3/2`. All comparisons are integer comparisons on `t`'s numerator.
pub fn gray_digit(x: &Q, n: u32) -> Result<ExtDigit> {
    if x.is_negative() || *x > Q::one() {
        return Err(Error::Domain {
            point: x.to_string(),
            space: "[0, 1]".into(),
        });
    }
    let (r, q) = doubling_residue(x, n);
    let twice = 2 * r;
    Ok(match twice.cmp(&q) {
        Ordering::Less => ExtDigit::Zero,
        Ordering::Equal => ExtDigit::Boundary,
        Ordering::Greater => match twice.cmp(&(3 * q)) {
            Ordering::Less => ExtDigit::One,
            Ordering::Equal => ExtDigit::Boundary,
            Ordering::Greater => ExtDigit::Zero,
        },
    })
}

pub(super) fn digit_sign(d: ExtDigit) -> Ordering {
    match d {
        ExtDigit::Zero => Ordering::Less,
        ExtDigit::One => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// `x ↦ -cos(2^n π x)` on `[0, 1]`, with the exact oracle [`gray_digit`] at
/// level 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrayCut {
    pub n: u32,
}

impl GrayCut {
    pub(super) fn eval_scalar(&self, x: &Q) -> f64 {
        let (r, q) = doubling_residue(x, self.n);
        -(std::f64::consts::PI * (r as f64) / (q as f64)).cos()
    }
}

impl CutFunction for GrayCut {
    fn eval(&self, x: &Point) -> f64 {
        x.as_scalar().map_or(f64::NAN, |x| self.eval_scalar(x))
    }

    fn exact_sign(&self, x: &Point, level: &Q) -> Option<Ordering> {
        if !level.is_zero() {
            return None;
        }
        gray_digit(x.as_scalar()?, self.n).ok().map(digit_sign)
    }

    fn has_exact_oracle(&self, level: &Q) -> bool {
        level.is_zero()
    }
}

/// The first `pairs` pairs of the Gray subbase.
pub fn gray_subbase(pairs: usize) -> FunctionalSubbase {
    FunctionalSubbase::new(
        (0..pairs)
            .map(|n| Cut::new(Arc::new(GrayCut { n: n as u32 }), Q::zero()))
            .collect(),
    )
}
