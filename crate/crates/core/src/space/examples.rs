//! Counterexample models: a duplicated Gray pair, and the Gray code on the
//! one-point compactification of `[0, 1] ∖ {1/4, 3/4}`.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::gray::{digit_sign, GrayCut};
use super::{CompactifiedMetric, Point, SpaceModel};
use crate::error::{Error, Result};
use crate::rational::{q, Q};
use crate::seq::ExtDigit;
use crate::subbase::{Cut, CutFunction, FunctionalSubbase};

const P: &str = "p";

/// The point at infinity of the compactified model.
pub fn special_point_p() -> Point {
    Point::special(P)
}

/// Symbol of `p` for pair `n`: its code is `⊥⊥10^ω`, with both leading
/// positions on the boundary.
fn p_digit(n: u32) -> ExtDigit {
    match n {
        0 | 1 => ExtDigit::Boundary,
        2 => ExtDigit::One,
        _ => ExtDigit::Zero,
    }
}

/// Gray pair `n` on the compactified interval. Ordinary points keep their
/// Gray symbol; `p` takes the common symbol of `1/4` and `3/4` where they
/// agree and the boundary where they do not.
#[derive(Clone, Copy, Debug)]
struct CompactifiedGrayCut {
    gray: GrayCut,
}

impl CutFunction for CompactifiedGrayCut {
    fn eval(&self, x: &Point) -> f64 {
        match x {
            Point::Special(_) => match p_digit(self.gray.n) {
                ExtDigit::One => 1.0,
                ExtDigit::Zero => -1.0,
                _ => 0.0,
            },
            Point::Real { .. } => x.as_scalar().map_or(f64::NAN, |v| self.gray.eval_scalar(v)),
        }
    }

    fn exact_sign(&self, x: &Point, level: &Q) -> Option<Ordering> {
        if !level.is_zero() {
            return None;
        }
        match x {
            Point::Special(_) => Some(digit_sign(p_digit(self.gray.n))),
            Point::Real { .. } => self.gray.exact_sign(x, level),
        }
    }

    fn has_exact_oracle(&self, level: &Q) -> bool {
        level.is_zero()
    }
}

/// The compactified interval sampled at step `resolution` (with `1/4` and
/// `3/4` removed and `p` added) and its first `pairs` Gray pairs.
pub fn compactified_example(resolution: &Q, pairs: usize) -> Result<(SpaceModel, FunctionalSubbase)> {
    if *resolution <= Q::zero() {
        return Err(Error::InvalidResolution(resolution.to_string()));
    }
    let removed = [q(1, 4), q(3, 4)];
    let mut samples = vec![special_point_p()];
    let mut x = Q::zero();
    while x < Q::one() {
        if !removed.contains(&x) {
            samples.push(Point::scalar(x));
        }
        x += resolution;
    }
    samples.push(Point::scalar(Q::one()));
    let model = SpaceModel::new(
        "compactified",
        samples,
        Arc::new(CompactifiedMetric::new(P)),
        *resolution,
    )?;
    let subbase = FunctionalSubbase::new(
        (0..pairs)
            .map(|n| {
                let cut = CompactifiedGrayCut {
                    gray: GrayCut { n: n as u32 },
                };
                Cut::new(Arc::new(cut), Q::zero())
            })
            .collect(),
    );
    Ok((model, subbase))
}

/// `subbase` with pair `n` enumerated a second time at the end.
pub fn duplicated_subbase(subbase: &FunctionalSubbase, n: usize) -> Result<FunctionalSubbase> {
    subbase.with_duplicate(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::BottomedSeq;
    use crate::space::gray_subbase;

    #[test]
    fn code_of_p_is_bottom_bottom_one_zeros() {
        let (model, s) = compactified_example(&q(1, 64), 8).unwrap();
        let p = special_point_p();
        assert_eq!(s.phi(&p, 4).unwrap().to_string(), "__10");
        assert_eq!(s.phi(&p, 8).unwrap().to_string(), "__100000");
        assert_eq!(s.phi(&p, 4).unwrap().get(0), ExtDigit::Bottom);
        for n in 3..8 {
            assert_eq!(s.digit(n, &p).unwrap(), ExtDigit::Zero);
        }
        assert_eq!(s.digit(2, &p).unwrap(), ExtDigit::One);
        assert!(model.samples().contains(&p));
        assert!(!model.samples().contains(&Point::scalar(q(1, 4))));
        assert!(!model.samples().contains(&Point::scalar(q(3, 4))));
    }

    #[test]
    fn ordinary_points_follow_gray() {
        let (_, s) = compactified_example(&q(1, 64), 4).unwrap();
        assert_eq!(s.phi(&Point::scalar(q(1, 8)), 4).unwrap().to_string(), "00_1");
        let g = gray_subbase(4);
        let x = Point::scalar(q(5, 7));
        assert_eq!(s.phi(&x, 4).unwrap(), g.phi(&x, 4).unwrap());
    }

    #[test]
    fn p_is_a_limit_of_both_removed_points() {
        let (model, _) = compactified_example(&q(1, 64), 0).unwrap();
        let p = special_point_p();
        let near = Point::scalar(q(1, 4) + q(1, 64));
        assert!(model.within(&near, &p, &q(1, 64)));
        let near = Point::scalar(q(3, 4) - q(1, 64));
        assert!(model.within(&near, &p, &q(1, 64)));
        assert!(model.validate_point(&Point::scalar(q(1, 4))).is_err());
    }

    #[test]
    fn duplicated_pair_has_empty_mixed_open_set() {
        let g = gray_subbase(3);
        let dup = duplicated_subbase(&g, 0).unwrap();
        assert_eq!(dup.len(), 4);
        let mixed = BottomedSeq::from_entries([(0, ExtDigit::Zero), (3, ExtDigit::One)]);
        let grid = crate::space::builtin_space(&crate::space::SpaceName::Interval, &q(1, 64)).unwrap();
        for x in grid.samples() {
            assert!(!dup.member_open(&mixed, x).unwrap());
        }
        assert!(dup.member_closed(&mixed, &Point::scalar(q(1, 2))).unwrap());
        assert!(matches!(
            duplicated_subbase(&g, 3),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));
    }
}
