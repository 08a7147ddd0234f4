//! Grid tests of the closure identity `S̄(σ) = cl S(σ)`.
//!
//! Closure is read off the sample: `x ∈ cl A` becomes "some sample of `A`
//! lies within `δ` of `x`". A pass therefore only says that no violation is
//! visible at resolution `δ`; a reported violation is always re-checkable
//! against the definitions.

use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::seq::{BottomedSeq, ExtDigit};
use crate::space::{Point, SpaceModel};
use crate::subbase::FunctionalSubbase;

/// Reports stop collecting violations after this many.
pub const MAX_VIOLATIONS: usize = 100;

/// Largest number of σ patterns a single check will enumerate.
const MAX_PATTERNS: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Proper,
    StrongProper,
    ExteriorPair,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Proper => "proper",
            CheckKind::StrongProper => "strong-proper",
            CheckKind::ExteriorPair => "exterior-pair",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// Which half of a check a violation came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x ∈ S̄(σ)` with no sample of `S(σ)` within `δ`.
    Closure,
    /// `x ∉ S(σ)` with no sample outside `S̄(σ)` within `δ`.
    Exterior,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub sigma: BottomedSeq,
    pub point: Point,
    /// Distance from `point` to the nearest sample of the target set, or
    /// `None` when the target set has no samples at all.
    pub nearest: Option<f64>,
    pub side: Side,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub kind: CheckKind,
    pub verdict: Verdict,
    pub depth: usize,
    pub delta: Q,
    pub resolution: Q,
    pub samples: usize,
    pub sigmas_checked: usize,
    pub violations: Vec<Violation>,
    /// True when more violations existed than were kept.
    pub truncated: bool,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.kind.as_str(),
            "verdict": self.verdict.as_str(),
            "depth": self.depth,
            "delta": self.delta.to_string(),
            "resolution": self.resolution.to_string(),
            "samples": self.samples,
            "sigmas_checked": self.sigmas_checked,
            "truncated": self.truncated,
            "violations": self.violations.iter().map(|v| json!({
                "sigma": v.sigma.to_string(),
                "point": v.point.to_string(),
                "nearest": v.nearest,
                "side": match v.side {
                    Side::Closure => "closure",
                    Side::Exterior => "exterior",
                },
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} check: {} (depth {}, delta {}, resolution {}, {} samples, {} patterns)",
            self.kind.as_str(),
            self.verdict.as_str().to_uppercase(),
            self.depth,
            self.delta,
            self.resolution,
            self.samples,
            self.sigmas_checked,
        )?;
        for v in &self.violations {
            let nearest = v
                .nearest
                .map_or_else(|| "none within sample".to_string(), |d| format!("{d:.6}"));
            let target = match v.side {
                Side::Closure => "S(sigma)",
                Side::Exterior => "complement of closed S(sigma)",
            };
            writeln!(
                f,
                "  sigma {:<12} x = {:<16} nearest sample of {target}: {nearest}",
                v.sigma.to_string(),
                v.point.to_string(),
            )?;
        }
        if self.truncated {
            writeln!(f, "  (stopped after {MAX_VIOLATIONS} violations)")?;
        }
        Ok(())
    }
}

/// A set of sample indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits(vec![u64::MAX; n.div_ceil(64)]);
        if !n.is_multiple_of(64) {
            if let Some(last) = b.0.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    /// Indices in `self` but not in `other`, in increasing order.
    fn difference<'a>(&'a self, other: &'a Bits) -> impl Iterator<Item = usize> + 'a {
        self.0.iter().zip(&other.0).enumerate().flat_map(|(w, (a, b))| {
            let mut word = a & !b;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }
}

fn symbol_slot(d: ExtDigit) -> usize {
    match d {
        ExtDigit::Zero => 0,
        ExtDigit::One => 1,
        ExtDigit::Boundary => 2,
        ExtDigit::Bottom => unreachable!("classification never yields ⊥"),
    }
}

/// Symbols of every sample for the first `depth` pairs, stored per pair and
/// symbol as sample sets, plus the `δ`-neighbourhood of every sample.
struct Grid<'a> {
    model: &'a SpaceModel,
    n: usize,
    by_symbol: Vec<[Bits; 3]>,
    neighbors: Vec<Vec<u32>>,
}

impl<'a> Grid<'a> {
    fn new(subbase: &FunctionalSubbase, model: &'a SpaceModel, depth: usize, delta: &Q) -> Result<Self> {
        let n = model.len();
        let symbols = model
            .samples()
            .par_iter()
            .map(|x| subbase.symbols(x, depth))
            .collect::<Result<Vec<_>>>()?;
        let mut by_symbol: Vec<[Bits; 3]> = (0..depth).map(|_| std::array::from_fn(|_| Bits::empty(n))).collect();
        for (i, row) in symbols.iter().enumerate() {
            for (k, d) in row.iter().enumerate() {
                by_symbol[k][symbol_slot(*d)].set(i);
            }
        }
        let neighbors = model.neighbor_lists(delta);
        Ok(Self {
            model,
            n,
            by_symbol,
            neighbors,
        })
    }

    /// Samples of `S(σ)` and of `S̄(σ)`.
    fn sets(&self, sigma: &BottomedSeq) -> (Bits, Bits) {
        let mut open = Bits::full(self.n);
        let mut closed = Bits::full(self.n);
        for (k, d) in sigma.entries() {
            let slots = &self.by_symbol[k];
            let exact = &slots[symbol_slot(d)];
            open.and_with(exact);
            if d == ExtDigit::Boundary {
                closed.and_with(exact);
            } else {
                closed.and_with(&exact.or(&slots[2]));
            }
        }
        (open, closed)
    }

    fn has_neighbor_in(&self, x: usize, set: &Bits) -> bool {
        self.neighbors[x].iter().any(|&j| set.get(j as usize))
    }

    fn nearest_in(&self, x: usize, set: &Bits) -> Option<f64> {
        let p = &self.model.samples()[x];
        (0..self.n)
            .filter(|&j| set.get(j))
            .map(|j| self.model.distance(p, &self.model.samples()[j]))
            .min_by(f64::total_cmp)
    }

    /// First sample of `from` with no `δ`-neighbour in `target`.
    fn first_uncovered(&self, from: impl Iterator<Item = usize>, target: &Bits) -> Option<usize> {
        from.into_iter().find(|&x| !self.has_neighbor_in(x, target))
    }

    fn violation(&self, sigma: &BottomedSeq, x: usize, target: &Bits, side: Side) -> Violation {
        Violation {
            sigma: sigma.clone(),
            point: self.model.samples()[x].clone(),
            nearest: if target.is_empty() {
                None
            } else {
                self.nearest_in(x, target)
            },
            side,
        }
    }

    /// The closure half for one σ: every sample of `S̄(σ)` has a sample of
    /// `S(σ)` within `δ`.
    fn closure_violation(&self, sigma: &BottomedSeq) -> Option<Violation> {
        let (open, closed) = self.sets(sigma);
        let x = self.first_uncovered(closed.difference(&open), &open)?;
        Some(self.violation(sigma, x, &open, Side::Closure))
    }
}

fn validate(subbase: &FunctionalSubbase, model: &SpaceModel, depth: usize, delta: &Q) -> Result<()> {
    if depth > subbase.len() {
        return Err(Error::IndexOutOfRange {
            index: depth - 1,
            len: subbase.len(),
        });
    }
    let resolution = model.resolution();
    if *delta < resolution * Q::from_integer(2) {
        return Err(Error::DeltaTooSmall {
            delta: delta.to_string(),
            resolution: resolution.to_string(),
        });
    }
    Ok(())
}

fn patterns(depth: usize, alphabet: &[ExtDigit]) -> Result<Vec<BottomedSeq>> {
    match alphabet.len().checked_pow(depth as u32) {
        Some(total) if total <= MAX_PATTERNS => Ok(BottomedSeq::enumerate(depth, alphabet)),
        _ => Err(Error::InvalidParams(format!(
            "depth {depth} needs more than {MAX_PATTERNS} patterns"
        ))),
    }
}

fn run(
    kind: CheckKind,
    subbase: &FunctionalSubbase,
    model: &SpaceModel,
    depth: usize,
    delta: &Q,
    alphabet: &[ExtDigit],
) -> Result<CheckReport> {
    validate(subbase, model, depth, delta)?;
    let grid = Grid::new(subbase, model, depth, delta)?;
    let sigmas = patterns(depth, alphabet)?;
    let found: Vec<Violation> = sigmas
        .par_iter()
        .filter_map(|sigma| grid.closure_violation(sigma))
        .collect();
    Ok(report(kind, model, depth, delta, sigmas.len(), found))
}

fn report(
    kind: CheckKind,
    model: &SpaceModel,
    depth: usize,
    delta: &Q,
    sigmas_checked: usize,
    mut violations: Vec<Violation>,
) -> CheckReport {
    let truncated = violations.len() > MAX_VIOLATIONS;
    violations.truncate(MAX_VIOLATIONS);
    CheckReport {
        kind,
        verdict: if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        depth,
        delta: *delta,
        resolution: *model.resolution(),
        samples: model.len(),
        sigmas_checked,
        violations,
        truncated,
    }
}

/// Tests `S̄(σ) ⊆ cl S(σ)` on the sample for every `σ ∈ {0,1,⊥}^depth`.
///
/// Patterns are visited in lexicographic order (⊥ < 0 < 1, index 0 most
/// significant) and at most the first violating sample is kept per pattern.
pub fn check_proper(subbase: &FunctionalSubbase, model: &SpaceModel, depth: usize, delta: &Q) -> Result<CheckReport> {
    run(CheckKind::Proper, subbase, model, depth, delta, &ExtDigit::BINARY)
}

/// As [`check_proper`] with `σ` ranging over `{0,1,∂,⊥}^depth`
/// (⊥ < 0 < 1 < ∂). Every pair involved must be able to report ∂.
pub fn check_strong_proper(
    subbase: &FunctionalSubbase,
    model: &SpaceModel,
    depth: usize,
    delta: &Q,
) -> Result<CheckReport> {
    validate(subbase, model, depth, delta)?;
    if let Some(index) = (0..depth).find(|&n| !subbase.classifies_boundary(n)) {
        return Err(Error::NoBoundaryClassification { index });
    }
    run(
        CheckKind::StrongProper,
        subbase,
        model,
        depth,
        delta,
        &ExtDigit::EXTENDED,
    )
}

/// Tests that `S(σ)` and `U = ⋃_k S_k^{1-σ(k)}` are each other's exteriors
/// on the sample. Since `U` is exactly the complement of `S̄(σ)`, this asks
/// that every sample of `S̄(σ)` is within `δ` of `S(σ)` and every sample
/// outside `S(σ)` is within `δ` of `U`.
pub fn check_exterior_pair(
    subbase: &FunctionalSubbase,
    model: &SpaceModel,
    sigma: &BottomedSeq,
    delta: &Q,
) -> Result<CheckReport> {
    if !sigma.is_binary() {
        return Err(Error::InvalidParams(format!(
            "exterior check needs a pattern over 0, 1 and _, got {sigma}"
        )));
    }
    let depth = sigma.len();
    validate(subbase, model, depth, delta)?;
    let grid = Grid::new(subbase, model, depth, delta)?;
    let (open, closed) = grid.sets(sigma);
    let outside = Bits::full(grid.n)
        .difference(&closed)
        .fold(Bits::empty(grid.n), |mut b, i| {
            b.set(i);
            b
        });
    let mut violations = Vec::new();
    if let Some(x) = grid.first_uncovered(closed.difference(&open), &open) {
        violations.push(grid.violation(sigma, x, &open, Side::Closure));
    }
    if let Some(x) = grid.first_uncovered(Bits::full(grid.n).difference(&open), &outside) {
        violations.push(grid.violation(sigma, x, &outside, Side::Exterior));
    }
    Ok(report(CheckKind::ExteriorPair, model, depth, delta, 1, violations))
}
