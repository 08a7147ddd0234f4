//! Computational stand-ins for separable metric spaces.
//!
//! A [`SpaceModel`] is a finite sample of a space together with its metric
//! and a covering radius (`resolution`): every point of the space is meant to
//! lie within `resolution` of a sample. Grid coordinates are exact rationals
//! and every shipped metric answers "is `d(a, b) ≤ r`?" exactly, so closure
//! tests never depend on rounding.

mod examples;
mod gray;
mod metric;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::{dyadic_level, from_f64_decimal, parse_rational, to_f64, Q};

pub use examples::{compactified_example, duplicated_subbase, special_point_p};
pub use gray::{gray_digit, gray_subbase, GrayCut, DEFAULT_GRAY_PAIRS};
pub use metric::{within, CircleMetric, CompactifiedMetric, EuclideanMetric, FiniteMetric, Metric, TorusMetric};

/// A sample point: a vector of exact rationals, or a named special point
/// such as the point at infinity of a compactification.
#[derive(Clone)]
pub enum Point {
    Real { coords: Vec<Q>, approx: Vec<f64> },
    Special(Arc<str>),
}

impl Point {
    pub fn real(coords: Vec<Q>) -> Self {
        let approx = coords.iter().map(to_f64).collect();
        Point::Real { coords, approx }
    }

    pub fn scalar(x: Q) -> Self {
        Point::real(vec![x])
    }

    pub fn special(name: &str) -> Self {
        Point::Special(Arc::from(name))
    }

    pub fn coords(&self) -> Option<&[Q]> {
        match self {
            Point::Real { coords, .. } => Some(coords),
            Point::Special(_) => None,
        }
    }

    pub fn approx(&self) -> Option<&[f64]> {
        match self {
            Point::Real { approx, .. } => Some(approx),
            Point::Special(_) => None,
        }
    }

    /// The coordinate of a one-dimensional point.
    pub fn as_scalar(&self) -> Option<&Q> {
        match self.coords() {
            Some([x]) => Some(x),
            _ => None,
        }
    }

    pub fn is_special(&self, name: &str) -> bool {
        matches!(self, Point::Special(s) if &**s == name)
    }

    pub fn dim(&self) -> Option<usize> {
        self.coords().map(<[Q]>::len)
    }

    fn dyadic_rank(&self) -> u32 {
        match self.coords() {
            None => 0,
            Some(cs) => cs
                .iter()
                .map(|c| dyadic_level(c).unwrap_or(u32::MAX))
                .max()
                .unwrap_or(0),
        }
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Point::Real { coords: a, .. }, Point::Real { coords: b, .. }) => a == b,
            (Point::Special(a), Point::Special(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Point::Real { coords, .. } => {
                0u8.hash(state);
                coords.hash(state);
            }
            Point::Special(name) => {
                1u8.hash(state);
                name.hash(state);
            }
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Special(name) => f.write_str(name),
            Point::Real { coords, .. } => {
                if let [x] = coords.as_slice() {
                    return write!(f, "{x}");
                }
                f.write_str("(")?;
                for (i, c) in coords.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({self})")
    }
}

/// Parses `x`, `x,y`, `(x, y)` with rational or decimal coordinates, or a
/// bare identifier for a special point.
pub fn parse_point(input: &str) -> Result<Point> {
    let trimmed = input.trim().trim_start_matches('(').trim_end_matches(')').trim();
    if !trimmed.is_empty() && trimmed.chars().all(|c| c.is_ascii_alphabetic()) {
        return Ok(Point::special(trimmed));
    }
    let coords = trimmed
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::PointParse {
            input: input.to_string(),
            reason: e.to_string(),
        })?;
    Ok(Point::real(coords))
}

/// A named space family. `Finite` carries the path of its JSON description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceName {
    Interval,
    Circle,
    Square,
    Torus,
    Compactified,
    Finite(PathBuf),
}

impl SpaceName {
    /// Grid step used when the caller does not ask for one.
    pub fn default_resolution(&self) -> Q {
        match self {
            SpaceName::Interval => Q::new(1, 256),
            SpaceName::Circle => Q::new(1, 64),
            SpaceName::Square => Q::new(1, 32),
            SpaceName::Torus => Q::new(1, 16),
            SpaceName::Compactified => Q::new(1, 1024),
            SpaceName::Finite(_) => Q::one(),
        }
    }
}

impl FromStr for SpaceName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interval" => Ok(SpaceName::Interval),
            "circle" => Ok(SpaceName::Circle),
            "square" => Ok(SpaceName::Square),
            "torus" => Ok(SpaceName::Torus),
            "compactified" => Ok(SpaceName::Compactified),
            other => match other.strip_prefix("finite:") {
                Some(path) if !path.is_empty() => Ok(SpaceName::Finite(PathBuf::from(path))),
                _ => Err(Error::UnknownSpace(other.to_string())),
            },
        }
    }
}

impl fmt::Display for SpaceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceName::Interval => f.write_str("interval"),
            SpaceName::Circle => f.write_str("circle"),
            SpaceName::Square => f.write_str("square"),
            SpaceName::Torus => f.write_str("torus"),
            SpaceName::Compactified => f.write_str("compactified"),
            SpaceName::Finite(path) => write!(f, "finite:{}", path.display()),
        }
    }
}

/// A finite sample of a metric space with its covering radius.
#[derive(Clone)]
pub struct SpaceModel {
    name: String,
    samples: Vec<Point>,
    metric: Arc<dyn Metric>,
    resolution: Q,
    dense_order: Vec<usize>,
}

impl fmt::Debug for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceModel")
            .field("name", &self.name)
            .field("samples", &self.samples.len())
            .field("resolution", &self.resolution)
            .field("metric", &self.metric)
            .finish()
    }
}

impl SpaceModel {
    /// The dense sequence visits coarse dyadic points before finer ones, so
    /// early centres of a construction spread over the whole space.
    pub fn new(name: impl Into<String>, samples: Vec<Point>, metric: Arc<dyn Metric>, resolution: Q) -> Result<Self> {
        if !resolution.is_positive() {
            return Err(Error::InvalidResolution(resolution.to_string()));
        }
        if samples.is_empty() {
            return Err(Error::MalformedSpaceFile("space has no sample points".into()));
        }
        for p in &samples {
            metric.validate(p)?;
        }
        let mut dense_order: Vec<usize> = (0..samples.len()).collect();
        dense_order.sort_by_key(|&i| samples[i].dyadic_rank());
        Ok(Self {
            name: name.into(),
            samples,
            metric,
            resolution,
            dense_order,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn metric(&self) -> &Arc<dyn Metric> {
        &self.metric
    }

    pub fn resolution(&self) -> &Q {
        &self.resolution
    }

    /// Sample index of the `i`-th element of the dense sequence; the finite
    /// sample is cycled.
    pub fn dense_index(&self, i: usize) -> usize {
        self.dense_order[i % self.dense_order.len()]
    }

    pub fn dense_point(&self, i: usize) -> &Point {
        &self.samples[self.dense_index(i)]
    }

    pub fn validate_point(&self, p: &Point) -> Result<()> {
        self.metric.validate(p)
    }

    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        self.metric.distance(a, b)
    }

    pub fn within(&self, a: &Point, b: &Point, radius: &Q) -> bool {
        within(self.metric.as_ref(), a, b, radius)
    }

    /// For every sample, the indices of the samples within `radius` of it
    /// (itself included), in increasing order.
    pub fn neighbor_lists(&self, radius: &Q) -> Vec<Vec<u32>> {
        let samples = &self.samples;
        (0..samples.len())
            .into_par_iter()
            .map(|i| {
                (0..samples.len())
                    .filter(|&j| self.within(&samples[i], &samples[j], radius))
                    .map(|j| j as u32)
                    .collect()
            })
            .collect()
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.samples.iter().position(|s| s == p)
    }

    /// Spot-checks the metric axioms on the first `max_points` samples:
    /// symmetry, identity of indiscernibles and the triangle inequality.
    pub fn audit_metric(&self, max_points: usize) -> Result<()> {
        let pts = &self.samples[..self.samples.len().min(max_points)];
        let slack: f64 = if self.metric.is_exact() { 1e-12 } else { 1e-9 };
        let d: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| pts.iter().map(|b| self.metric.distance(a, b)).collect())
            .collect();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                if (d[i][j] - d[j][i]).abs() > 1e-12 {
                    return Err(Error::MetricAxiom(format!(
                        "d({}, {}) != d({}, {})",
                        pts[i], pts[j], pts[j], pts[i]
                    )));
                }
                if (i == j) != (self.metric.cmp_distance(&pts[i], &pts[j], &Q::zero()).is_le()) {
                    return Err(Error::MetricAxiom(format!(
                        "identity of indiscernibles fails for {} and {}",
                        pts[i], pts[j]
                    )));
                }
                for k in 0..pts.len() {
                    // Float distances of exact metrics carry rounding error.
                    if d[i][k] > d[i][j] + d[j][k] + slack {
                        return Err(Error::MetricAxiom(format!(
                            "triangle inequality fails for {}, {}, {}",
                            pts[i], pts[j], pts[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Grid `0, h, 2h, …` on `[0, 1]`, closed with `1` when `h` does not divide it.
fn unit_grid(step: &Q, include_one: bool) -> Vec<Q> {
    let mut out = Vec::new();
    let mut x = Q::zero();
    while x < Q::one() {
        out.push(x);
        x += step;
    }
    if include_one {
        out.push(Q::one());
    }
    out
}

fn product_grid(axis: &[Q]) -> Vec<Point> {
    axis.iter()
        .flat_map(|x| axis.iter().map(move |y| Point::real(vec![*x, *y])))
        .collect()
}

/// A named space sampled on a uniform grid of step `resolution`.
///
/// The interval and square carry the Euclidean metric. The circle and torus
/// are the flat quotients `R/Z` and `R²/Z²` (circumference 1) with their
/// geodesic metrics, which keeps distances rational. `compactified` is the
/// counterexample model of [`compactified_example`]. Finite spaces ignore
/// `resolution` and derive their own covering radius from the file.
pub fn builtin_space(name: &SpaceName, resolution: &Q) -> Result<SpaceModel> {
    if !resolution.is_positive() {
        return Err(Error::InvalidResolution(resolution.to_string()));
    }
    match name {
        SpaceName::Interval => SpaceModel::new(
            "interval",
            unit_grid(resolution, true).into_iter().map(Point::scalar).collect(),
            Arc::new(EuclideanMetric::unit_cube(1)),
            *resolution,
        ),
        SpaceName::Square => SpaceModel::new(
            "square",
            product_grid(&unit_grid(resolution, true)),
            Arc::new(EuclideanMetric::unit_cube(2)),
            *resolution,
        ),
        SpaceName::Circle => SpaceModel::new(
            "circle",
            unit_grid(resolution, false).into_iter().map(Point::scalar).collect(),
            Arc::new(CircleMetric),
            *resolution,
        ),
        SpaceName::Torus => SpaceModel::new(
            "torus",
            product_grid(&unit_grid(resolution, false)),
            Arc::new(TorusMetric),
            *resolution,
        ),
        SpaceName::Compactified => Ok(compactified_example(resolution, 0)?.0),
        SpaceName::Finite(path) => load_finite_space(path),
    }
}

fn json_rational(v: &Value, what: &str) -> Result<Q> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| Q::from_integer(i as i128))
            .map_or_else(|| from_f64_decimal(n.as_f64().unwrap_or(f64::NAN)), Ok)
            .map_err(|_| Error::MalformedSpaceFile(format!("bad number {n} in {what}"))),
        Value::String(s) => {
            parse_rational(s).map_err(|_| Error::MalformedSpaceFile(format!("bad number {s:?} in {what}")))
        }
        other => Err(Error::MalformedSpaceFile(format!(
            "expected a number in {what}, found {other}"
        ))),
    }
}

/// Reads a finite metric space from `{"points": [[...], ...], "metric": [[...], ...]}`.
///
/// Entries may be JSON numbers or `"p/q"` strings; decimals are read exactly
/// as written. Every metric axiom is checked before the model is returned.
pub fn parse_finite_space(text: &str) -> Result<SpaceModel> {
    let root: Value = serde_json::from_str(text)?;
    let malformed = |m: &str| Error::MalformedSpaceFile(m.to_string());
    let points = root
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing \"points\" array"))?;
    let rows = root
        .get("metric")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing \"metric\" array"))?;
    let n = points.len();
    if n == 0 {
        return Err(malformed("\"points\" is empty"));
    }
    if rows.len() != n {
        return Err(malformed("metric must be a square matrix matching \"points\""));
    }
    let mut parsed = Vec::with_capacity(n);
    for (i, p) in points.iter().enumerate() {
        let coords = match p {
            Value::Array(cs) => cs
                .iter()
                .map(|c| json_rational(c, &format!("point {i}")))
                .collect::<Result<Vec<_>>>()?,
            scalar => vec![json_rational(scalar, &format!("point {i}"))?],
        };
        parsed.push(Point::real(coords));
    }
    let mut matrix = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| malformed("metric must be a square matrix matching \"points\""))?;
        matrix.push(
            row.iter()
                .map(|v| json_rational(v, &format!("metric row {i}")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let metric = FiniteMetric::new(parsed.clone(), matrix)?;
    let resolution = metric.covering_radius();
    SpaceModel::new("finite", parsed, Arc::new(metric), resolution)
}

pub fn load_finite_space(path: &Path) -> Result<SpaceModel> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_finite_space(&text)
}

/// Builds the sample index used by [`FiniteMetric`].
pub(crate) fn index_points(points: &[Point]) -> Result<HashMap<Point, usize>> {
    let mut index = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if index.insert(p.clone(), i).is_some() {
            return Err(Error::MalformedSpaceFile(format!("duplicate point {p}")));
        }
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn interval_grid_has_nine_points_at_one_eighth() {
        let m = builtin_space(&SpaceName::Interval, &q(1, 8)).unwrap();
        let xs: Vec<_> = m.samples().iter().map(|p| *p.as_scalar().unwrap()).collect();
        assert_eq!(xs, (0..=8).map(|k| q(k, 8)).collect::<Vec<_>>());
    }

    #[test]
    fn square_grid_is_five_by_five_at_one_quarter() {
        let m = builtin_space(&SpaceName::Square, &q(1, 4)).unwrap();
        assert_eq!(m.len(), 25);
        assert!(m.samples().contains(&Point::real(vec![q(3, 4), q(1, 1)])));
    }

    #[test]
    fn grid_closes_with_one_when_step_does_not_divide() {
        let m = builtin_space(&SpaceName::Interval, &(q(1, 3) + q(1, 30))).unwrap();
        let last = *m.samples().last().unwrap().as_scalar().unwrap();
        assert_eq!(last, Q::one());
    }

    #[test]
    fn circle_and_torus_exclude_the_identified_endpoint() {
        let c = builtin_space(&SpaceName::Circle, &q(1, 8)).unwrap();
        assert_eq!(c.len(), 8);
        let t = builtin_space(&SpaceName::Torus, &q(1, 4)).unwrap();
        assert_eq!(t.len(), 16);
    }

    #[test]
    fn finite_three_point_file_is_accepted() {
        let m =
            parse_finite_space(r#"{"points": [[0], [5], [7]], "metric": [[0, 5, 4], [5, 0, 2], [4, 2, 0]]}"#).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.resolution(), &q(4, 1));
        assert!(m.within(&m.samples()[0], &m.samples()[2], &q(4, 1)));
        assert!(!m.within(&m.samples()[0], &m.samples()[1], &q(49, 10)));
    }

    #[test]
    fn finite_file_rejects_axiom_violations() {
        let triangle = r#"{"points": [[0], [1], [2]], "metric": [[0, 5, 1], [5, 0, 1], [1, 1, 0]]}"#;
        assert!(matches!(parse_finite_space(triangle), Err(Error::MetricAxiom(_))));
        let asym = r#"{"points": [[0], [1]], "metric": [[0, 1], [2, 0]]}"#;
        assert!(matches!(parse_finite_space(asym), Err(Error::MetricAxiom(_))));
        let zero = r#"{"points": [[0], [1]], "metric": [[0, 0], [0, 0]]}"#;
        assert!(matches!(parse_finite_space(zero), Err(Error::MetricAxiom(_))));
        let negative = r#"{"points": [[0], [1]], "metric": [[0, -1], [-1, 0]]}"#;
        assert!(matches!(parse_finite_space(negative), Err(Error::MetricAxiom(_))));
    }

    #[test]
    fn finite_file_rejects_malformed_shapes() {
        for bad in [
            r#"{"metric": [[0]]}"#,
            r#"{"points": [], "metric": []}"#,
            r#"{"points": [[0], [1]], "metric": [[0, 1]]}"#,
            r#"{"points": [[0], [1]], "metric": [[0, 1], [1]]}"#,
            r#"{"points": [[0], [0]], "metric": [[0, 1], [1, 0]]}"#,
            r#"{"points": [["x"]], "metric": [[0]]}"#,
        ] {
            assert!(
                matches!(parse_finite_space(bad), Err(Error::MalformedSpaceFile(_))),
                "{bad}"
            );
        }
        assert!(parse_finite_space("not json").is_err());
    }

    #[test]
    fn finite_entries_accept_decimals_and_fraction_strings() {
        let m = parse_finite_space(r#"{"points": [[0.5, "1/3"], [1, 1]], "metric": [[0, "3/2"], [1.5, 0]]}"#).unwrap();
        assert_eq!(m.samples()[0], Point::real(vec![q(1, 2), q(1, 3)]));
        assert_eq!(m.resolution(), &q(3, 2));
    }

    #[test]
    fn every_builtin_covers_a_twice_finer_grid() {
        for name in [
            SpaceName::Interval,
            SpaceName::Square,
            SpaceName::Circle,
            SpaceName::Torus,
        ] {
            let res = q(1, 8);
            let coarse = builtin_space(&name, &res).unwrap();
            let fine = builtin_space(&name, &(res / 2)).unwrap();
            for p in fine.samples() {
                assert!(
                    coarse.samples().iter().any(|s| coarse.within(p, s, &res)),
                    "{name}: {p} uncovered"
                );
            }
            for s in coarse.samples() {
                assert!(coarse.samples().iter().any(|t| t != s && coarse.within(s, t, &res)));
            }
        }
    }

    #[test]
    fn builtin_metrics_pass_the_axiom_audit() {
        for name in [
            SpaceName::Interval,
            SpaceName::Square,
            SpaceName::Circle,
            SpaceName::Torus,
            SpaceName::Compactified,
        ] {
            let m = builtin_space(&name, &q(1, 8)).unwrap();
            m.audit_metric(200).unwrap();
        }
    }

    #[test]
    fn space_names_parse() {
        assert_eq!("torus".parse::<SpaceName>().unwrap(), SpaceName::Torus);
        assert_eq!(
            "finite:a/b.json".parse::<SpaceName>().unwrap(),
            SpaceName::Finite(PathBuf::from("a/b.json"))
        );
        assert!(matches!("sphere".parse::<SpaceName>(), Err(Error::UnknownSpace(_))));
        assert!("finite:".parse::<SpaceName>().is_err());
    }

    #[test]
    fn points_parse_and_print() {
        assert_eq!(parse_point("1/4").unwrap(), Point::scalar(q(1, 4)));
        assert_eq!(parse_point("0.5, 1/3").unwrap(), Point::real(vec![q(1, 2), q(1, 3)]));
        assert_eq!(parse_point("(1, 0)").unwrap().to_string(), "(1, 0)");
        assert!(parse_point("p").unwrap().is_special("p"));
        assert!(parse_point("1/4,zz").is_err());
    }

    #[test]
    fn dense_sequence_starts_coarse() {
        let m = builtin_space(&SpaceName::Interval, &q(1, 8)).unwrap();
        let first: Vec<_> = (0..3).map(|i| m.dense_point(i).to_string()).collect();
        assert_eq!(first, ["0", "1", "1/2"]);
        assert_eq!(m.dense_point(9), m.dense_point(0));
    }

    #[test]
    fn rejects_nonpositive_resolution() {
        assert!(builtin_space(&SpaceName::Interval, &Q::zero()).is_err());
        assert!(builtin_space(&SpaceName::Square, &q(-1, 4)).is_err());
    }
}
