//! Functional dyadic subbases and the coding map.
//!
//! Pair `n` of a [`FunctionalSubbase`] is cut from a real function `f_n` at a
//! level `c_n`: `S_n^0 = {f_n < c_n}`, `S_n^1 = {f_n > c_n}` and the
//! boundary `S_n^∂ = f_n^{-1}(c_n)`. The two open halves are disjoint by sign
//! trichotomy. A cut may carry an exact oracle for the sign of `f_n - c_n`;
//! otherwise the sign is read from a floating evaluation and values within
//! `boundary_tol` of the level count as boundary.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};
use crate::seq::{BottomedSeq, ExtDigit};
use crate::space::{Point, SpaceModel};

/// Default boundary half-width for cuts read from floating evaluations.
pub const DEFAULT_FLOAT_BOUNDARY_TOL: f64 = 1e-9;

/// A real function a pair is cut from.
pub trait CutFunction: Send + Sync + fmt::Debug {
    fn eval(&self, x: &Point) -> f64;

    /// Exact sign of `f(x) - level`, or `None` when this function has no
    /// exact oracle at `level`.
    fn exact_sign(&self, _x: &Point, _level: &Q) -> Option<Ordering> {
        None
    }

    fn has_exact_oracle(&self, _level: &Q) -> bool {
        false
    }
}

/// A function given as a closure, classified by floating sign only.
#[derive(Clone)]
pub struct FloatFn {
    name: String,
    f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
}

impl FloatFn {
    pub fn new(name: impl Into<String>, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FloatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FloatFn({})", self.name)
    }
}

impl CutFunction for FloatFn {
    fn eval(&self, x: &Point) -> f64 {
        (self.f)(x)
    }
}

/// One pair of the subbase: the function and the level it is cut at.
#[derive(Clone, Debug)]
pub struct Cut {
    pub func: Arc<dyn CutFunction>,
    pub level: Q,
}

impl Cut {
    pub fn new(func: Arc<dyn CutFunction>, level: Q) -> Self {
        Self { func, level }
    }

    pub fn has_exact_oracle(&self) -> bool {
        self.func.has_exact_oracle(&self.level)
    }

    /// Symbol of `x` for this pair: 0, 1 or ∂.
    pub fn classify(&self, x: &Point, boundary_tol: f64) -> ExtDigit {
        let sign = self.func.exact_sign(x, &self.level).unwrap_or_else(|| {
            let v = self.func.eval(x) - to_f64(&self.level);
            if v.abs() <= boundary_tol {
                Ordering::Equal
            } else if v < 0.0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        });
        match sign {
            Ordering::Less => ExtDigit::Zero,
            Ordering::Greater => ExtDigit::One,
            Ordering::Equal => ExtDigit::Boundary,
        }
    }
}

/// An enumerated family of cuts.
#[derive(Clone, Debug)]
pub struct FunctionalSubbase {
    cuts: Vec<Cut>,
    boundary_tol: f64,
}

impl FunctionalSubbase {
    /// Boundary tolerance defaults to 0 when every cut has an exact oracle and
    /// to [`DEFAULT_FLOAT_BOUNDARY_TOL`] otherwise.
    pub fn new(cuts: Vec<Cut>) -> Self {
        let boundary_tol = if cuts.iter().all(Cut::has_exact_oracle) {
            0.0
        } else {
            DEFAULT_FLOAT_BOUNDARY_TOL
        };
        Self { cuts, boundary_tol }
    }

    pub fn with_boundary_tol(mut self, tol: f64) -> Self {
        self.boundary_tol = tol.max(0.0);
        self
    }

    pub fn boundary_tol(&self) -> f64 {
        self.boundary_tol
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    /// Appends a pair. A pair without an exact oracle switches a zero
    /// boundary tolerance to the floating default.
    pub fn push(&mut self, cut: Cut) {
        if !cut.has_exact_oracle() && self.boundary_tol == 0.0 {
            self.boundary_tol = DEFAULT_FLOAT_BOUNDARY_TOL;
        }
        self.cuts.push(cut);
    }

    /// The first `count` pairs.
    pub fn truncated(&self, count: usize) -> Self {
        Self {
            cuts: self.cuts[..count.min(self.cuts.len())].to_vec(),
            boundary_tol: self.boundary_tol,
        }
    }

    /// True when pair `n` can report ∂ at all.
    pub fn classifies_boundary(&self, n: usize) -> bool {
        self.cuts[n].has_exact_oracle() || self.boundary_tol > 0.0
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n < self.cuts.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: n,
                len: self.cuts.len(),
            })
        }
    }

    /// Which side of pair `n` contains `x`: 0, 1 or ∂.
    pub fn digit(&self, n: usize, x: &Point) -> Result<ExtDigit> {
        self.check_index(n)?;
        Ok(self.cuts[n].classify(x, self.boundary_tol))
    }

    /// The length-`depth` prefix of the code `φ_S(x)`; boundary positions
    /// read ⊥.
    pub fn phi(&self, x: &Point, depth: usize) -> Result<BottomedSeq> {
        if depth > self.cuts.len() {
            return Err(Error::IndexOutOfRange {
                index: depth.saturating_sub(1),
                len: self.cuts.len(),
            });
        }
        Ok(BottomedSeq::from_digits(
            self.cuts[..depth]
                .iter()
                .map(|c| c.classify(x, self.boundary_tol).coded()),
        ))
    }

    /// The raw symbols of `x` for pairs `0..depth`, including ∂.
    pub fn symbols(&self, x: &Point, depth: usize) -> Result<Vec<ExtDigit>> {
        if depth > self.cuts.len() {
            return Err(Error::IndexOutOfRange {
                index: depth.saturating_sub(1),
                len: self.cuts.len(),
            });
        }
        Ok(self.cuts[..depth]
            .iter()
            .map(|c| c.classify(x, self.boundary_tol))
            .collect())
    }

    /// `x ∈ S(σ)`: every defined position of `σ` matches the symbol of `x`.
    pub fn member_open(&self, sigma: &BottomedSeq, x: &Point) -> Result<bool> {
        for (k, want) in sigma.entries() {
            if self.digit(k, x)? != want {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `x ∈ S̄(σ)`: every defined position of `σ` matches the symbol of `x`
    /// or `x` is on that pair's boundary.
    pub fn member_closed(&self, sigma: &BottomedSeq, x: &Point) -> Result<bool> {
        for (k, want) in sigma.entries() {
            let got = self.digit(k, x)?;
            if got != want && got != ExtDigit::Boundary {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Re-enumerates the first `perm.len()` pairs: pair `n` of the result is
    /// pair `perm[n]` of `self`. Later pairs keep their positions.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.cuts.len())?;
        let mut cuts = self.cuts.clone();
        for (n, &from) in perm.iter().enumerate() {
            cuts[n] = self.cuts[from].clone();
        }
        Ok(Self {
            cuts,
            boundary_tol: self.boundary_tol,
        })
    }

    /// Appends a second copy of pair `n`.
    pub fn with_duplicate(&self, n: usize) -> Result<Self> {
        self.check_index(n)?;
        let mut out = self.clone();
        out.cuts.push(self.cuts[n].clone());
        Ok(out)
    }
}

/// Checks that `perm` is a bijection of `{0, …, perm.len() - 1}` fitting in
/// `len` pairs.
pub fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    if perm.len() > len {
        return Err(Error::InvalidPermutation(format!(
            "permutes {} indices of a subbase with {len} pairs",
            perm.len()
        )));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
        }
    }
    Ok(())
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// A finite slice of `K_S`: the prefixes of length at most `depth` of the
/// codes of sample points, under the product order.
#[derive(Clone, Debug)]
pub struct KSlice {
    depth: usize,
    resolution: Option<Q>,
    elements: Vec<BottomedSeq>,
    members: HashSet<BottomedSeq>,
}

/// Outcome of [`is_cusl`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CuslVerdict {
    Cusl,
    /// `left` and `right` have upper bounds in the slice but no least one.
    NotCusl {
        left: BottomedSeq,
        right: BottomedSeq,
        minimal_upper_bounds: Vec<BottomedSeq>,
    },
}

impl CuslVerdict {
    pub fn is_cusl(&self) -> bool {
        matches!(self, CuslVerdict::Cusl)
    }
}

impl KSlice {
    /// A slice with arbitrary elements, deduplicated and sorted by length
    /// then label.
    pub fn from_elements(depth: usize, elements: impl IntoIterator<Item = BottomedSeq>) -> Self {
        let members: HashSet<BottomedSeq> = elements.into_iter().collect();
        let mut elements: Vec<_> = members.iter().cloned().collect();
        elements.sort();
        Self {
            depth,
            resolution: None,
            elements,
            members,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Sample resolution the slice was enumerated at, if any.
    pub fn resolution(&self) -> Option<&Q> {
        self.resolution.as_ref()
    }

    pub fn elements(&self) -> &[BottomedSeq] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, sigma: &BottomedSeq) -> bool {
        self.members.contains(sigma)
    }

    /// Every restriction of every element is again an element.
    pub fn is_downward_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|s| (0..=s.len()).all(|m| self.members.contains(&s.restrict(m))))
    }

    /// Applies the index map `perm` (position `k` moves to `perm[k]`) to every
    /// element.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let mut out = Self::from_elements(
            self.depth,
            self.elements
                .iter()
                .map(|s| s.relabel(|k| perm.get(k).copied().unwrap_or(k))),
        );
        out.resolution = self.resolution;
        out
    }

    /// Covering pairs `(lower, upper)` of the order, as element indices.
    pub fn covering_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (j, upper) in self.elements.iter().enumerate() {
            let below: Vec<usize> = (0..self.elements.len())
                .filter(|&i| i != j && self.elements[i].leq(upper))
                .collect();
            for &i in &below {
                let covered = below
                    .iter()
                    .all(|&m| m == i || !self.elements[i].leq(&self.elements[m]));
                if covered {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// Hasse diagram as a DOT digraph. Nodes follow the slice order (length,
    /// then label) and are labelled with the ASCII codec.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph kslice {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, e) in self.elements.iter().enumerate() {
            let label = if e.is_empty() { "ε".to_string() } else { e.to_string() };
            out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
        }
        for (i, j) in self.covering_edges() {
            out.push_str(&format!("  n{i} -> n{j};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// `{ φ_S(x)|_m : x sampled, m ≤ depth }`.
pub fn enumerate_k(subbase: &FunctionalSubbase, model: &SpaceModel, depth: usize) -> Result<KSlice> {
    let codes = model
        .samples()
        .par_iter()
        .map(|x| subbase.phi(x, depth))
        .collect::<Result<Vec<_>>>()?;
    let mut slice = KSlice::from_elements(
        depth,
        codes.iter().flat_map(|c| (0..=depth).map(move |m| c.restrict(m))),
    );
    slice.resolution = Some(*model.resolution());
    Ok(slice)
}

/// Checks that every pair with an upper bound in the slice has a least one
/// there. Pairs are scanned in slice order, so the reported witness is the
/// first failure by (length, label).
pub fn is_cusl(slice: &KSlice) -> CuslVerdict {
    let elems = slice.elements();
    let mut uppers_of_join: HashMap<BottomedSeq, Option<Vec<BottomedSeq>>> = HashMap::new();
    for (i, left) in elems.iter().enumerate() {
        for right in &elems[i + 1..] {
            let Ok(join) = left.join(right) else {
                continue;
            };
            if slice.contains(&join) {
                continue;
            }
            // Upper bounds of {left, right} are exactly the elements above the join.
            let minimal = uppers_of_join
                .entry(join.clone())
                .or_insert_with(|| {
                    let uppers: Vec<&BottomedSeq> = elems.iter().filter(|u| join.leq(u)).collect();
                    let minimal: Vec<BottomedSeq> = uppers
                        .iter()
                        .filter(|u| !uppers.iter().any(|v| v != *u && v.leq(u)))
                        .map(|u| (*u).clone())
                        .collect();
                    (minimal.len() >= 2).then_some(minimal)
                })
                .clone();
            if let Some(mut minimal_upper_bounds) = minimal {
                minimal_upper_bounds.sort();
                return CuslVerdict::NotCusl {
                    left: left.clone(),
                    right: right.clone(),
                    minimal_upper_bounds,
                };
            }
        }
    }
    CuslVerdict::Cusl
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::space::{builtin_space, gray_subbase, SpaceName};

    fn s(text: &str) -> BottomedSeq {
        text.parse().unwrap()
    }

    fn x(n: i128, d: i128) -> Point {
        Point::scalar(q(n, d))
    }

    #[test]
    fn digit_examples_on_gray() {
        let g = gray_subbase(8);
        assert_eq!(g.digit(0, &x(3, 4)).unwrap(), ExtDigit::One);
        assert_eq!(g.digit(1, &x(3, 4)).unwrap(), ExtDigit::Boundary);
        assert_eq!(g.phi(&x(3, 4), 2).unwrap(), s("1"));
        assert!(matches!(
            g.digit(8, &x(1, 2)),
            Err(Error::IndexOutOfRange { index: 8, len: 8 })
        ));
        assert!(g.phi(&x(1, 2), 9).is_err());
    }

    #[test]
    fn phi_examples_on_gray() {
        let g = gray_subbase(8);
        assert_eq!(g.phi(&x(1, 4), 4).unwrap().to_string(), "0_10");
        assert_eq!(g.phi(&x(0, 1), 4).unwrap().to_string(), "0000");
        assert_eq!(g.phi(&x(1, 2), 4).unwrap().to_string(), "_100");
        assert_eq!(g.phi(&x(1, 2), 0).unwrap(), BottomedSeq::empty());
    }

    #[test]
    fn membership_examples() {
        let g = gray_subbase(8);
        let quarter = x(1, 4);
        assert!(g.member_open(&BottomedSeq::empty(), &quarter).unwrap());
        assert!(g.member_open(&s("0"), &quarter).unwrap());
        assert!(g.member_open(&s("_b"), &quarter).unwrap());
        assert!(g.member_closed(&s("0"), &x(1, 2)).unwrap());
        assert!(!g.member_open(&s("0"), &x(1, 2)).unwrap());
        assert!(g.member_closed(&s("01"), &quarter).unwrap());
        assert!(!g.member_open(&s("01"), &quarter).unwrap());
        assert!(g.member_closed(&BottomedSeq::empty(), &x(1, 3)).unwrap());
        assert!(g.member_open(&s("_______0"), &x(0, 1)).unwrap());
        assert!(g.member_open(&s("________0"), &x(0, 1)).is_err());
    }

    #[test]
    fn float_cuts_need_a_tolerance_band_to_see_boundaries() {
        let f = FloatFn::new("identity", |p: &Point| p.approx().unwrap()[0]);
        let sub = FunctionalSubbase::new(vec![Cut::new(Arc::new(f), q(1, 3))]);
        assert_eq!(sub.boundary_tol(), DEFAULT_FLOAT_BOUNDARY_TOL);
        assert!(sub.classifies_boundary(0));
        assert_eq!(sub.digit(0, &x(1, 3)).unwrap(), ExtDigit::Boundary);
        assert_eq!(sub.digit(0, &x(1, 4)).unwrap(), ExtDigit::Zero);
        let blind = sub.clone().with_boundary_tol(0.0);
        assert!(!blind.classifies_boundary(0));
        let wide = sub.with_boundary_tol(0.1);
        assert_eq!(wide.digit(0, &x(1, 4)).unwrap(), ExtDigit::Boundary);
    }

    #[test]
    fn exact_oracle_ignores_tolerance() {
        let g = gray_subbase(4).with_boundary_tol(0.5);
        assert_eq!(g.digit(0, &x(1, 3)).unwrap(), ExtDigit::Zero);
    }

    #[test]
    fn permute_examples() {
        let g = gray_subbase(4);
        let id = g.permute(&[0, 1, 2, 3]).unwrap();
        let swapped = g.permute(&[1, 0]).unwrap();
        let back = swapped.permute(&inverse_permutation(&[1, 0])).unwrap();
        let three_quarters = x(3, 4);
        assert_eq!(g.phi(&three_quarters, 2).unwrap().to_string(), "1");
        assert_eq!(swapped.phi(&three_quarters, 2).unwrap().to_string(), "_1");
        let model = builtin_space(&SpaceName::Interval, &q(1, 32)).unwrap();
        for p in model.samples() {
            assert_eq!(id.phi(p, 4).unwrap(), g.phi(p, 4).unwrap());
            assert_eq!(back.phi(p, 4).unwrap(), g.phi(p, 4).unwrap());
            for n in 0..4 {
                let pi = [2, 0, 3, 1];
                let permuted = g.permute(&pi).unwrap();
                assert_eq!(permuted.digit(n, p).unwrap(), g.digit(pi[n], p).unwrap());
            }
        }
        assert!(matches!(g.permute(&[0, 0]), Err(Error::InvalidPermutation(_))));
        assert!(matches!(g.permute(&[0, 2]), Err(Error::InvalidPermutation(_))));
        assert!(g.permute(&[0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn enumerate_k_examples() {
        let g = gray_subbase(8);
        let grid = builtin_space(&SpaceName::Interval, &q(1, 16)).unwrap();
        let k1 = enumerate_k(&g, &grid, 1).unwrap();
        let labels: Vec<_> = k1.elements().iter().map(|e| e.to_string()).collect();
        assert_eq!(labels, ["", "0", "1"]);
        let k0 = enumerate_k(&g, &grid, 0).unwrap();
        assert_eq!(k0.elements(), &[BottomedSeq::empty()]);
        assert_eq!(k1.resolution(), Some(&q(1, 16)));

        let single = crate::space::SpaceModel::new(
            "single",
            vec![x(1, 4)],
            Arc::new(crate::space::EuclideanMetric::unit_cube(1)),
            q(1, 1),
        )
        .unwrap();
        let chain = enumerate_k(&g, &single, 5).unwrap();
        let labels: Vec<_> = chain.elements().iter().map(|e| e.to_string()).collect();
        assert_eq!(labels, ["", "0", "0_1", "0_10", "0_100"]);
        assert!(chain.is_downward_closed());
    }

    #[test]
    fn cusl_examples() {
        let diamond = KSlice::from_elements(3, ["", "0__", "_0_", "000", "001"].map(s));
        match is_cusl(&diamond) {
            CuslVerdict::NotCusl {
                left,
                right,
                minimal_upper_bounds,
            } => {
                assert_eq!((left, right), (s("0"), s("_0")));
                assert_eq!(minimal_upper_bounds, vec![s("000"), s("001")]);
            }
            CuslVerdict::Cusl => panic!("expected a witness"),
        }
        let ok = KSlice::from_elements(2, ["", "0_", "_0", "00"].map(s));
        assert!(is_cusl(&ok).is_cusl());
        // The least upper bound may sit strictly above the pointwise join.
        let above = KSlice::from_elements(3, ["", "0", "_0", "000"].map(s));
        assert!(is_cusl(&above).is_cusl());
    }

    #[test]
    fn gray_slice_is_cusl_and_downward_closed() {
        let g = gray_subbase(8);
        let grid = builtin_space(&SpaceName::Interval, &q(1, 64)).unwrap();
        let k = enumerate_k(&g, &grid, 4).unwrap();
        assert!(k.is_downward_closed());
        assert!(k.contains(&BottomedSeq::empty()));
        assert!(is_cusl(&k).is_cusl());
    }

    #[test]
    fn cusl_verdict_is_invariant_under_relabeling() {
        let diamond = KSlice::from_elements(3, ["", "0__", "_0_", "000", "001"].map(s));
        let ok = KSlice::from_elements(3, ["", "0_", "_0", "00"].map(s));
        for perm in [[0, 1, 2], [1, 0, 2], [2, 1, 0], [1, 2, 0], [2, 0, 1], [0, 2, 1]] {
            assert!(!is_cusl(&diamond.relabeled(&perm)).is_cusl());
            assert!(is_cusl(&ok.relabeled(&perm)).is_cusl());
        }
    }

    #[test]
    fn dot_export_draws_covering_edges_only() {
        let k = KSlice::from_elements(2, ["", "0", "00", "01"].map(s));
        let dot = k.to_dot();
        assert!(dot.starts_with("digraph kslice {"));
        assert!(dot.contains("n0 [label=\"ε\"];"));
        assert!(dot.contains("n1 [label=\"0\"];"));
        assert!(dot.contains("n0 -> n1;"));
        assert!(dot.contains("n1 -> n2;") && dot.contains("n1 -> n3;"));
        assert!(!dot.contains("n0 -> n2;"));
        assert_eq!(k.covering_edges().len(), 3);
    }
}
