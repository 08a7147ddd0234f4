use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{index_points, Point};
use crate::error::{Error, Result};
use crate::rational::{abs_diff, modulo, q, to_f64, Q};

/// Absolute slack for comparisons made in floating point.
pub const FLOAT_SLACK: f64 = 1e-9;

/// A metric on the points of one space model.
///
/// `distance` is a floating approximation used for reporting and ranking;
/// `cmp_distance` decides `d(a, b)` against a rational radius and is exact
/// whenever [`Metric::is_exact`] holds. Both may assume their arguments
/// passed [`Metric::validate`].
pub trait Metric: Send + Sync + fmt::Debug {
    fn distance(&self, a: &Point, b: &Point) -> f64;

    fn cmp_distance(&self, a: &Point, b: &Point, radius: &Q) -> Ordering;

    fn is_exact(&self) -> bool {
        true
    }

    fn validate(&self, p: &Point) -> Result<()>;
}

/// `d(a, b) ≤ radius`, decided in floating point when the answer is clear by
/// a margin and by the metric's exact comparison otherwise.
pub fn within(metric: &dyn Metric, a: &Point, b: &Point, radius: &Q) -> bool {
    let d = metric.distance(a, b);
    let r = to_f64(radius);
    if d < r - FLOAT_SLACK {
        true
    } else if d > r + FLOAT_SLACK {
        false
    } else {
        metric.cmp_distance(a, b, radius).is_le()
    }
}

fn real_coords<'a>(p: &'a Point, dim: usize, space: &str) -> Result<&'a [Q]> {
    match p.coords() {
        Some(cs) if cs.len() == dim => Ok(cs),
        _ => Err(Error::Domain {
            point: p.to_string(),
            space: space.to_string(),
        }),
    }
}

fn coords(p: &Point) -> &[Q] {
    p.coords().expect("metric called on a point it did not validate")
}

fn approx(p: &Point) -> &[f64] {
    p.approx().expect("metric called on a point it did not validate")
}

fn cmp_norm_sq(sum_sq: Q, radius: &Q) -> Ordering {
    if radius.is_negative() {
        Ordering::Greater
    } else {
        sum_sq.cmp(&(radius * radius))
    }
}

/// Euclidean metric on the unit cube `[0, 1]^dim`.
#[derive(Clone, Debug)]
pub struct EuclideanMetric {
    dim: usize,
}

impl EuclideanMetric {
    pub fn unit_cube(dim: usize) -> Self {
        Self { dim }
    }
}

impl Metric for EuclideanMetric {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        approx(a)
            .iter()
            .zip(approx(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    fn cmp_distance(&self, a: &Point, b: &Point, radius: &Q) -> Ordering {
        let sum_sq = coords(a)
            .iter()
            .zip(coords(b))
            .map(|(x, y)| (x - y) * (x - y))
            .fold(Q::zero(), |acc, v| acc + v);
        cmp_norm_sq(sum_sq, radius)
    }

    fn validate(&self, p: &Point) -> Result<()> {
        let space = if self.dim == 1 {
            "[0, 1]".to_string()
        } else {
            format!("[0, 1]^{}", self.dim)
        };
        let cs = real_coords(p, self.dim, &space)?;
        if cs.iter().all(|c| !c.is_negative() && *c <= Q::one()) {
            Ok(())
        } else {
            Err(Error::Domain {
                point: p.to_string(),
                space,
            })
        }
    }
}

fn wrapped(a: &Q, b: &Q) -> Q {
    let t = modulo(&(a - b), &Q::one());
    let other = Q::one() - t;
    t.min(other)
}

fn wrapped_f64(a: f64, b: f64) -> f64 {
    let t = (a - b).rem_euclid(1.0);
    t.min(1.0 - t)
}

/// Geodesic metric on the circle `R/Z` of circumference 1.
#[derive(Clone, Debug)]
pub struct CircleMetric;

impl Metric for CircleMetric {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        wrapped_f64(approx(a)[0], approx(b)[0])
    }

    fn cmp_distance(&self, a: &Point, b: &Point, radius: &Q) -> Ordering {
        wrapped(&coords(a)[0], &coords(b)[0]).cmp(radius)
    }

    fn validate(&self, p: &Point) -> Result<()> {
        real_coords(p, 1, "circle").map(|_| ())
    }
}

/// Geodesic metric on the flat torus `R²/Z²`.
#[derive(Clone, Debug)]
pub struct TorusMetric;

impl Metric for TorusMetric {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        let (a, b) = (approx(a), approx(b));
        let dx = wrapped_f64(a[0], b[0]);
        let dy = wrapped_f64(a[1], b[1]);
        (dx * dx + dy * dy).sqrt()
    }

    fn cmp_distance(&self, a: &Point, b: &Point, radius: &Q) -> Ordering {
        let (a, b) = (coords(a), coords(b));
        let dx = wrapped(&a[0], &b[0]);
        let dy = wrapped(&a[1], &b[1]);
        cmp_norm_sq(dx * dx + dy * dy, radius)
    }

    fn validate(&self, p: &Point) -> Result<()> {
        real_coords(p, 2, "torus").map(|_| ())
    }
}

/// A metric given by an explicit distance matrix over a finite point set.
#[derive(Clone, Debug)]
pub struct FiniteMetric {
    index: HashMap<Point, usize>,
    matrix: Vec<Vec<Q>>,
}

impl FiniteMetric {
    /// Validates every metric axiom exactly before accepting the matrix.
    pub fn new(points: Vec<Point>, matrix: Vec<Vec<Q>>) -> Result<Self> {
        let n = points.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::MalformedSpaceFile(
                "metric must be a square matrix matching \"points\"".into(),
            ));
        }
        let index = index_points(&points)?;
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                return Err(Error::MetricAxiom(format!("d({0}, {0}) is not 0", points[i])));
            }
            for j in 0..n {
                if matrix[i][j].is_negative() {
                    return Err(Error::MetricAxiom(format!(
                        "d({}, {}) is negative",
                        points[i], points[j]
                    )));
                }
                if i != j && matrix[i][j].is_zero() {
                    return Err(Error::MetricAxiom(format!(
                        "distinct points {} and {} are at distance 0",
                        points[i], points[j]
                    )));
                }
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::MetricAxiom(format!(
                        "d({}, {}) != d({}, {})",
                        points[i], points[j], points[j], points[i]
                    )));
                }
                for k in 0..n {
                    if matrix[i][k] > matrix[i][j] + matrix[j][k] {
                        return Err(Error::MetricAxiom(format!(
                            "triangle inequality fails: d({}, {}) > d({}, {}) + d({}, {})",
                            points[i], points[k], points[i], points[j], points[j], points[k]
                        )));
                    }
                }
            }
        }
        Ok(Self { index, matrix })
    }

    /// Largest nearest-neighbour distance; 1 for a single point.
    pub fn covering_radius(&self) -> Q {
        let n = self.matrix.len();
        (0..n)
            .filter_map(|i| (0..n).filter(|&j| j != i).map(|j| self.matrix[i][j]).min())
            .max()
            .unwrap_or_else(Q::one)
    }

    fn entry(&self, a: &Point, b: &Point) -> &Q {
        &self.matrix[self.index[a]][self.index[b]]
    }
}

impl Metric for FiniteMetric {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        to_f64(self.entry(a, b))
    }

    fn cmp_distance(&self, a: &Point, b: &Point, radius: &Q) -> Ordering {
        self.entry(a, b).cmp(radius)
    }

    fn validate(&self, p: &Point) -> Result<()> {
        if self.index.contains_key(p) {
            Ok(())
        } else {
            Err(Error::Domain {
                point: p.to_string(),
                space: "finite space".into(),
            })
        }
    }
}

/// The unit interval with `1/4` and `3/4` glued into one point `p`: the
/// quotient metric `d(x, y) = min(|x - y|, d(x, p) + d(p, y))` where
/// `d(x, p) = min(|x - 1/4|, |x - 3/4|)`. This realizes the one-point
/// compactification of `[0, 1] ∖ {1/4, 3/4}`.
#[derive(Clone, Debug)]
pub struct CompactifiedMetric {
    point_name: String,
}

impl CompactifiedMetric {
    pub fn new(point_name: &str) -> Self {
        Self {
            point_name: point_name.to_string(),
        }
    }

    fn to_p(x: &Q) -> Q {
        abs_diff(x, &q(1, 4)).min(abs_diff(x, &q(3, 4)))
    }

    fn exact(&self, a: &Point, b: &Point) -> Q {
        match (a.as_scalar(), b.as_scalar()) {
            (Some(x), Some(y)) => abs_diff(x, y).min(Self::to_p(x) + Self::to_p(y)),
            (Some(x), None) | (None, Some(x)) => Self::to_p(x),
            (None, None) => Q::zero(),
        }
    }
}

impl Metric for CompactifiedMetric {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        to_f64(&self.exact(a, b))
    }

    fn cmp_distance(&self, a: &Point, b: &Point, radius: &Q) -> Ordering {
        self.exact(a, b).cmp(radius)
    }

    fn validate(&self, p: &Point) -> Result<()> {
        let ok = match p {
            Point::Special(_) => p.is_special(&self.point_name),
            Point::Real { .. } => p
                .as_scalar()
                .is_some_and(|x| !x.is_negative() && *x <= Q::one() && *x != q(1, 4) && *x != q(3, 4)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain {
                point: p.to_string(),
                space: "compactified interval".into(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: Q) -> Point {
        Point::scalar(x)
    }

    #[test]
    fn euclidean_comparison_is_exact_on_the_boundary() {
        let m = EuclideanMetric::unit_cube(2);
        let a = Point::real(vec![q(0, 1), q(0, 1)]);
        let b = Point::real(vec![q(3, 5), q(4, 5)]);
        assert_eq!(m.cmp_distance(&a, &b, &q(1, 1)), Ordering::Equal);
        assert!(within(&m, &a, &b, &q(1, 1)));
        assert!(!within(&m, &a, &b, &(q(1, 1) - q(1, 1_000_000_000_000))));
    }

    #[test]
    fn circle_wraps_around() {
        let m = CircleMetric;
        assert_eq!(m.cmp_distance(&pt(q(1, 8)), &pt(q(7, 8)), &q(1, 4)), Ordering::Equal);
        assert!((m.distance(&pt(q(1, 8)), &pt(q(7, 8))) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn torus_wraps_each_axis() {
        let m = TorusMetric;
        let a = Point::real(vec![q(0, 1), q(0, 1)]);
        let b = Point::real(vec![q(7, 8), q(7, 8)]);
        assert_eq!(m.cmp_distance(&a, &b, &q(1, 8)), Ordering::Greater);
        assert!(within(&m, &a, &b, &q(18, 100)));
    }

    #[test]
    fn compactified_distances_route_through_p() {
        let m = CompactifiedMetric::new("p");
        let p = Point::special("p");
        assert_eq!(m.exact(&pt(q(1, 4) - q(1, 100)), &p), q(1, 100));
        // 0.24 and 0.76 are close through p.
        assert_eq!(m.exact(&pt(q(24, 100)), &pt(q(76, 100))), q(2, 100));
        assert_eq!(m.exact(&pt(q(0, 1)), &pt(q(1, 10))), q(1, 10));
        assert!(m.validate(&pt(q(1, 4))).is_err());
        assert!(m.validate(&Point::special("q")).is_err());
        assert!(m.validate(&p).is_ok());
    }

    #[test]
    fn validation_rejects_out_of_domain_points() {
        let m = EuclideanMetric::unit_cube(1);
        assert!(m.validate(&pt(q(3, 2))).is_err());
        assert!(m.validate(&Point::real(vec![q(0, 1), q(0, 1)])).is_err());
        assert!(m.validate(&Point::special("p")).is_err());
    }
}
