//! Inductive construction of a dyadic subbase from distance functions.
//!
//! Pair `n` is cut from `f_n = d(x_{n0}, ·)` at a level `c_n` drawn from the
//! base interval `B_{n1}`, where `(n0, n1) = unpair(n)` and `x_i` runs over a
//! dense sequence of the sample. The draw avoids a finite set of values where
//! the new cut would interact badly with the earlier ones: sampled local
//! extrema of `f_n` on the closed cells cut out by pairs `< n`, and, for
//! strong builds, extrema of `f_n` along the sampled boundaries of earlier
//! pairs and levels where `f_n` is tangent to one of those boundaries.
//! The true sets to avoid are countable, so a random draw misses them almost
//! surely; the finite sets here are surrogates and the checkers have the
//! last word.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};
use crate::seq::{BottomedSeq, ExtDigit};
use crate::space::{Metric, Point, SpaceModel};
use crate::subbase::{Cut, CutFunction, FunctionalSubbase};

/// Tolerance when comparing sampled function values for extremality.
const EXTREMUM_SLACK: f64 = 1e-9;

/// Boundary positions of a sample beyond this many are not expanded into
/// separate cells or boundary subsets.
const MAX_EXPANDED: usize = 6;

/// Denominator of the grid a cut level is drawn from inside its interval.
const DRAW_STEPS: i128 = 1 << 20;

/// Inverse of the Cantor pairing along anti-diagonals, ordered so that
/// `unpair(1) = (0, 1)` and `unpair(2) = (1, 0)`.
pub fn unpair(n: usize) -> (usize, usize) {
    let mut w = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as usize;
    while w * (w + 1) / 2 > n {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= n {
        w += 1;
    }
    let t = n - w * (w + 1) / 2;
    (t, w - t)
}

/// The inverse of [`unpair`].
pub fn pair(n0: usize, n1: usize) -> usize {
    let w = n0 + n1;
    w * (w + 1) / 2 + n0
}

/// An open interval `(lo, hi)` of levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelInterval {
    pub lo: Q,
    pub hi: Q,
}

impl LevelInterval {
    pub fn width(&self) -> Q {
        self.hi - self.lo
    }

    pub fn contains(&self, c: &Q) -> bool {
        self.lo < *c && *c < self.hi
    }
}

impl fmt::Display for LevelInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// The intervals `(p/q - 1/r, p/q + 1/r)` for reduced positive `p/q` and
/// `r ≥ 2`, listed by increasing `p + q + r`, then `p`, then `q`. Lower ends
/// are clipped at 0 since distances are never negative. Every positive real
/// has arbitrarily small neighbourhoods in the list, so it is a base.
#[derive(Clone, Debug)]
pub struct IntervalBase {
    cache: Vec<LevelInterval>,
    next_sum: i128,
}

impl Default for IntervalBase {
    fn default() -> Self {
        Self {
            cache: Vec::new(),
            next_sum: 4,
        }
    }
}

impl IntervalBase {
    pub fn get(&mut self, m: usize) -> LevelInterval {
        while self.cache.len() <= m {
            self.extend();
        }
        self.cache[m].clone()
    }

    fn extend(&mut self) {
        let s = self.next_sum;
        self.next_sum += 1;
        for p in 1..s {
            for q in 1..s - p {
                let r = s - p - q;
                if r < 2 || num_integer::gcd(p, q) != 1 {
                    continue;
                }
                let centre = Q::new(p, q);
                let radius = Q::new(1, r);
                let lo = (centre - radius).max(Q::zero());
                self.cache.push(LevelInterval {
                    lo,
                    hi: centre + radius,
                });
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BuilderParams {
    pub count: usize,
    pub avoid_margin: f64,
    pub max_retries: u32,
    pub rng_seed: u64,
    pub strong: bool,
}

impl Default for BuilderParams {
    fn default() -> Self {
        Self {
            count: 8,
            avoid_margin: 1e-4,
            max_retries: 1000,
            rng_seed: 0,
            strong: false,
        }
    }
}

impl BuilderParams {
    fn validate(&self, base: &mut IntervalBase) -> Result<()> {
        if !(self.avoid_margin > 0.0 && self.avoid_margin.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "avoid margin must be positive, got {}",
                self.avoid_margin
            )));
        }
        if self.max_retries == 0 {
            return Err(Error::InvalidParams("max retries must be at least 1".into()));
        }
        for n in 0..self.count {
            let interval = base.get(unpair(n).1);
            if to_f64(&interval.width()) <= self.avoid_margin {
                return Err(Error::InvalidParams(format!(
                    "avoid margin {} is not below the width of {interval}",
                    self.avoid_margin
                )));
            }
        }
        Ok(())
    }
}

/// `x ↦ d(centre, x)`. Signs against a rational level are exact whenever
/// the metric is.
#[derive(Clone, Debug)]
pub struct DistanceCut {
    pub centre: Point,
    metric: Arc<dyn Metric>,
}

impl DistanceCut {
    pub fn new(centre: Point, metric: Arc<dyn Metric>) -> Self {
        Self { centre, metric }
    }
}

impl CutFunction for DistanceCut {
    fn eval(&self, x: &Point) -> f64 {
        self.metric.distance(&self.centre, x)
    }

    fn exact_sign(&self, x: &Point, level: &Q) -> Option<Ordering> {
        self.metric
            .is_exact()
            .then(|| self.metric.cmp_distance(&self.centre, x, level))
    }

    fn has_exact_oracle(&self, _level: &Q) -> bool {
        self.metric.is_exact()
    }
}

/// The candidate for pair `n`: the distance to the `n0`-th dense point and
/// the `n1`-th base interval.
pub fn candidate(model: &SpaceModel, n: usize, base: &mut IntervalBase) -> (DistanceCut, LevelInterval) {
    let (n0, n1) = unpair(n);
    let f = DistanceCut::new(model.dense_point(n0).clone(), model.metric().clone());
    (f, base.get(n1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

/// Why a value was avoided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AvoidTag {
    /// Local extremum of `f_n` on the closed cell `S̄(cell)` of earlier pairs.
    Region { cell: BottomedSeq, extremum: Extremum },
    /// Local extremum of `f_n` along the sampled common boundary of the pairs
    /// marked ∂ in `boundaries`.
    Boundary {
        boundaries: BottomedSeq,
        extremum: Extremum,
    },
    /// A level set of `f_n` touching the boundary of pair `cut` from one side.
    Interaction { cut: usize },
}

impl fmt::Display for AvoidTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ext = |e: &Extremum| match e {
            Extremum::Max => "max",
            Extremum::Min => "min",
        };
        match self {
            AvoidTag::Region { cell, extremum } => write!(f, "region {cell} {}", ext(extremum)),
            AvoidTag::Boundary { boundaries, extremum } => {
                write!(f, "boundary {boundaries} {}", ext(extremum))
            }
            AvoidTag::Interaction { cut } => write!(f, "interaction with cut {cut}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AvoidValue {
    pub value: f64,
    /// Every restriction that produced this value, in discovery order.
    pub tags: Vec<AvoidTag>,
}

/// A finite set of levels a new cut should stay away from.
#[derive(Clone, Debug, Default)]
pub struct AvoidSet {
    values: Vec<AvoidValue>,
    index: HashMap<u64, usize>,
}

impl AvoidSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, value: f64, tag: AvoidTag) {
        if !value.is_finite() {
            return;
        }
        let value = if value == 0.0 { 0.0 } else { value };
        let slot = *self.index.entry(value.to_bits()).or_insert_with(|| {
            self.values.push(AvoidValue {
                value,
                tags: Vec::new(),
            });
            self.values.len() - 1
        });
        let tags = &mut self.values[slot].tags;
        if !tags.contains(&tag) {
            tags.push(tag);
        }
    }

    /// Number of distinct values.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[AvoidValue] {
        &self.values
    }

    pub fn contains_value(&self, value: f64, tol: f64) -> bool {
        self.values.iter().any(|v| (v.value - value).abs() <= tol)
    }

    /// Keeps only the values in the closed interval `[lo, hi]`.
    pub fn restricted_to(&self, interval: &LevelInterval) -> Self {
        let (lo, hi) = (to_f64(&interval.lo), to_f64(&interval.hi));
        let mut out = Self::new();
        for v in self.values.iter().filter(|v| lo <= v.value && v.value <= hi) {
            for tag in &v.tags {
                out.insert(v.value, tag.clone());
            }
        }
        out
    }

    /// The first value closer than `margin` to `c`.
    pub fn blocking(&self, c: f64, margin: f64) -> Option<&AvoidValue> {
        self.values.iter().find(|v| (v.value - c).abs() < margin)
    }
}

/// Sampled data about the pairs fixed so far.
struct Workspace<'a> {
    model: &'a SpaceModel,
    tol: f64,
    neighbors: Vec<Vec<u32>>,
    /// `symbols[x][k]`: symbol of sample `x` for pair `k`.
    symbols: Vec<Vec<ExtDigit>>,
    /// `near_boundary[k][x]`: sample `x` is a best sampled approximation of
    /// a point on the boundary of pair `k`.
    near_boundary: Vec<Vec<bool>>,
    values: Vec<Vec<f64>>,
}

impl<'a> Workspace<'a> {
    fn new(model: &'a SpaceModel, tol: f64) -> Self {
        let radius = model.resolution() * Q::from_integer(2);
        Self {
            model,
            tol,
            neighbors: model.neighbor_lists(&radius),
            symbols: vec![Vec::new(); model.len()],
            near_boundary: Vec::new(),
            values: Vec::new(),
        }
    }

    fn with_cuts(model: &'a SpaceModel, partial: &FunctionalSubbase) -> Self {
        let mut ws = Self::new(model, partial.boundary_tol());
        for cut in partial.cuts() {
            ws.push(cut);
        }
        ws
    }

    fn samples(&self) -> &[Point] {
        self.model.samples()
    }

    fn push(&mut self, cut: &Cut) {
        let f: Vec<f64> = self.samples().iter().map(|x| cut.func.eval(x)).collect();
        for (x, row) in self.symbols.iter_mut().enumerate() {
            row.push(cut.classify(&self.model.samples()[x], self.tol));
        }
        let level = to_f64(&cut.level);
        let band = to_f64(self.model.resolution());
        let gap: Vec<f64> = f.iter().map(|v| (v - level).abs()).collect();
        let near = (0..f.len())
            .map(|x| {
                gap[x] <= band
                    && self.neighbors[x]
                        .iter()
                        .all(|&y| gap[x] <= gap[y as usize] + EXTREMUM_SLACK)
            })
            .collect();
        self.near_boundary.push(near);
        self.values.push(f);
    }

    fn depth(&self) -> usize {
        self.values.len()
    }

    /// Whether `x` is extremal among its neighbours that satisfy `member`.
    /// An isolated sample is both a maximum and a minimum.
    fn extremum(&self, f: &[f64], x: usize, member: impl Fn(usize) -> bool) -> (bool, bool) {
        let (mut is_max, mut is_min) = (true, true);
        for &y in &self.neighbors[x] {
            let y = y as usize;
            if y == x || !member(y) {
                continue;
            }
            is_max &= f[x] >= f[y] - EXTREMUM_SLACK;
            is_min &= f[x] <= f[y] + EXTREMUM_SLACK;
            if !is_max && !is_min {
                break;
            }
        }
        (is_max, is_min)
    }

    /// The finest closed cells of pairs `< depth` containing sample `x`: its
    /// own symbols, with each boundary position resolved both ways.
    fn cells_of(&self, x: usize) -> Vec<Vec<ExtDigit>> {
        let row = &self.symbols[x];
        let mut cells = vec![row.clone()];
        let boundary: Vec<usize> = (0..row.len()).filter(|&k| row[k] == ExtDigit::Boundary).collect();
        for (i, &k) in boundary.iter().enumerate() {
            if i >= MAX_EXPANDED {
                for cell in &mut cells {
                    cell[k] = ExtDigit::Bottom;
                }
                continue;
            }
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    [ExtDigit::Zero, ExtDigit::One].map(|d| {
                        let mut c = c.clone();
                        c[k] = d;
                        c
                    })
                })
                .collect();
        }
        cells
    }

    fn in_closed_cell(&self, y: usize, cell: &[ExtDigit]) -> bool {
        cell.iter()
            .zip(&self.symbols[y])
            .all(|(want, got)| *want == ExtDigit::Bottom || got == want || *got == ExtDigit::Boundary)
    }

    fn collect(&self, f: &[f64], strong: bool) -> AvoidSet {
        let mut avoid = AvoidSet::new();
        let tagged =
            |avoid: &mut AvoidSet, v: f64, (is_max, is_min): (bool, bool), tag: &dyn Fn(Extremum) -> AvoidTag| {
                if is_max {
                    avoid.insert(v, tag(Extremum::Max));
                }
                if is_min {
                    avoid.insert(v, tag(Extremum::Min));
                }
            };
        for x in 0..self.samples().len() {
            for cell in self.cells_of(x) {
                let ext = self.extremum(f, x, |y| self.in_closed_cell(y, &cell));
                let seq = BottomedSeq::from_digits(cell.iter().copied());
                tagged(&mut avoid, f[x], ext, &|extremum| AvoidTag::Region {
                    cell: seq.clone(),
                    extremum,
                });
            }
        }
        if !strong {
            return avoid;
        }
        let band = to_f64(self.model.resolution());
        for x in 0..self.samples().len() {
            let on: Vec<usize> = (0..self.depth())
                .filter(|&k| self.near_boundary[k][x])
                .take(MAX_EXPANDED)
                .collect();
            for mask in 1u32..(1 << on.len()) {
                let subset: Vec<usize> = (0..on.len()).filter(|i| mask >> i & 1 == 1).map(|i| on[i]).collect();
                let ext = self.extremum(f, x, |y| subset.iter().all(|&k| self.near_boundary[k][y]));
                let pattern = BottomedSeq::from_entries(subset.iter().map(|&k| (k, ExtDigit::Boundary)));
                tagged(&mut avoid, f[x], ext, &|extremum| AvoidTag::Boundary {
                    boundaries: pattern.clone(),
                    extremum,
                });
            }
            for &k in &on {
                let fk = &self.values[k];
                let fibre: Vec<usize> = self.neighbors[x]
                    .iter()
                    .map(|&y| y as usize)
                    .filter(|&y| y != x && (f[y] - f[x]).abs() <= band)
                    .collect();
                if fibre.is_empty() {
                    continue;
                }
                let above = fibre.iter().all(|&y| fk[y] >= fk[x] - EXTREMUM_SLACK);
                let below = fibre.iter().all(|&y| fk[y] <= fk[x] + EXTREMUM_SLACK);
                if above || below {
                    avoid.insert(f[x], AvoidTag::Interaction { cut: k });
                }
            }
        }
        avoid
    }
}

/// The values a level for `f` should avoid, given the pairs of `partial`.
///
/// Part (a) collects `f(x)` for every sample `x` that is extremal among the
/// samples within twice the resolution lying in a common closed cell of the
/// earlier pairs. With `strong`, part (b) adds extrema of `f` along sampled
/// boundaries of earlier pairs and their intersections, and `f(x)` wherever
/// `f`'s level set through a boundary sample `x` stays on one side of that
/// boundary.
pub fn collect_avoid(model: &SpaceModel, partial: &FunctionalSubbase, f: &dyn CutFunction, strong: bool) -> AvoidSet {
    let ws = Workspace::with_cuts(model, partial);
    let values: Vec<f64> = model.samples().iter().map(|x| f.eval(x)).collect();
    ws.collect(&values, strong)
}

/// Draws levels uniformly from the grid of step `width / 2^20` strictly
/// inside `interval` until one is at least `margin` from every avoided value.
pub fn choose_cut(
    interval: &LevelInterval,
    avoid: &AvoidSet,
    margin: f64,
    max_retries: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(Q, u32)> {
    let width = interval.width();
    if width <= Q::zero() {
        return Err(Error::InvalidParams(format!("empty interval {interval}")));
    }
    for rejected in 0..max_retries {
        let k = rng.gen_range(1..DRAW_STEPS);
        let c = interval.lo + width * Q::new(k, DRAW_STEPS);
        if avoid.blocking(to_f64(&c), margin).is_none() {
            return Ok((c, rejected));
        }
    }
    Err(Error::Exhausted {
        interval: interval.to_string(),
        retries: max_retries,
    })
}

/// One constructed pair and how it was found.
#[derive(Clone, Debug)]
pub struct BuiltCut {
    pub n: usize,
    pub n0: usize,
    pub n1: usize,
    pub centre_index: usize,
    pub centre: Point,
    pub interval: LevelInterval,
    pub level: Q,
    pub avoid: AvoidSet,
    /// Rejected draws, summed over every interval tried.
    pub retries: u32,
    /// Intervals abandoned because every draw was blocked.
    pub skipped_intervals: u32,
}

impl BuiltCut {
    pub fn log_record(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "n0": self.n0,
            "n1": self.n1,
            "interval": [self.interval.lo.to_string(), self.interval.hi.to_string()],
            "avoid_count": self.avoid.len(),
            "c_n": self.level.to_string(),
            "retries": self.retries,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Build {
    pub subbase: FunctionalSubbase,
    pub cuts: Vec<BuiltCut>,
}

impl Build {
    /// One JSON object per pair.
    pub fn log_lines(&self) -> Vec<String> {
        self.cuts.iter().map(|c| c.log_record().to_string()).collect()
    }
}

/// Builds `params.count` pairs on `model`.
///
/// When every draw in an interval is blocked the builder moves on to the next
/// base interval for the same centre, giving up after `max_retries`
/// abandoned intervals.
pub fn build(model: &SpaceModel, params: &BuilderParams) -> Result<Build> {
    let mut base = IntervalBase::default();
    params.validate(&mut base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut ws = Workspace::new(model, 0.0);
    let mut subbase = FunctionalSubbase::new(Vec::new());
    let mut cuts = Vec::with_capacity(params.count);
    for n in 0..params.count {
        let (n0, mut n1) = unpair(n);
        let (f, _) = candidate(model, n, &mut base);
        let values: Vec<f64> = model.samples().iter().map(|x| f.eval(x)).collect();
        let avoid_all = ws.collect(&values, params.strong);
        let mut retries = 0;
        let mut skipped = 0;
        let (interval, avoid, level) = loop {
            let interval = base.get(n1);
            let avoid = avoid_all.restricted_to(&interval);
            match choose_cut(&interval, &avoid, params.avoid_margin, params.max_retries, &mut rng) {
                Ok((c, rejected)) => {
                    retries += rejected;
                    break (interval, avoid, c);
                }
                Err(Error::Exhausted { .. }) if skipped + 1 < params.max_retries => {
                    retries += params.max_retries;
                    skipped += 1;
                    n1 += 1;
                }
                Err(e) => return Err(e),
            }
        };
        let cut = Cut::new(Arc::new(f.clone()), level);
        subbase.push(cut.clone());
        ws.tol = subbase.boundary_tol();
        ws.push(&cut);
        cuts.push(BuiltCut {
            n,
            n0,
            n1,
            centre_index: model.dense_index(n0),
            centre: f.centre,
            interval,
            level,
            avoid,
            retries,
            skipped_intervals: skipped,
        });
    }
    Ok(Build { subbase, cuts })
}

/// How well the first `depth` pairs tell the samples apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub pairs_total: u64,
    pub pairs_separated: u64,
    /// Some pair of samples with identical symbols, if any.
    pub example: Option<(Point, Point)>,
}

impl Separation {
    pub fn complete(&self) -> bool {
        self.pairs_total == self.pairs_separated
    }
}

/// Counts the sample pairs `x ≠ y` on which some pair `< depth` has
/// different symbols.
pub fn separation(subbase: &FunctionalSubbase, model: &SpaceModel, depth: usize) -> Result<Separation> {
    let mut classes: HashMap<Vec<ExtDigit>, Vec<usize>> = HashMap::new();
    for (i, x) in model.samples().iter().enumerate() {
        classes.entry(subbase.symbols(x, depth)?).or_default().push(i);
    }
    let n = model.len() as u64;
    let pairs_total = n * n.saturating_sub(1) / 2;
    let together: u64 = classes
        .values()
        .map(|c| (c.len() as u64) * (c.len() as u64 - 1) / 2)
        .sum();
    let example = classes
        .values()
        .filter(|c| c.len() > 1)
        .min_by_key(|c| c[0])
        .map(|c| (model.samples()[c[0]].clone(), model.samples()[c[1]].clone()));
    Ok(Separation {
        pairs_total,
        pairs_separated: pairs_total - together,
        example,
    })
}
