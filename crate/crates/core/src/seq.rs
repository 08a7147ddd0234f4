//! Bottomed sequences over `{0, 1, ∂, ⊥}`.
//!
//! A [`BottomedSeq`] is stored by its support: only the indices carrying a
//! non-⊥ symbol are materialized, and every index outside the support reads
//! as ⊥. A sequence of length `n` is therefore identified with its infinite
//! ⊥-extension, so `0⊥` and `0` are the same value.
//!
//! The text codec writes `0`, `1`, `b` (for ∂) and `_` (for ⊥):
//!
//! ```
//! use dyadic_core::seq::BottomedSeq;
//!
//! let s: BottomedSeq = "0_10".parse().unwrap();
//! assert_eq!(s.len(), 4);
//! assert_eq!(s.to_string(), "0_10");
//! assert_eq!("0__".parse::<BottomedSeq>().unwrap().to_string(), "0");
//! ```

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::error::Error;

/// A symbol of `T = {0, 1, ⊥}`, ordered by `⊥ ⊑ 0` and `⊥ ⊑ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Digit {
    Zero,
    One,
    Bottom,
}

impl Digit {
    /// Information order on `T`: ⊥ is below both digits, 0 and 1 are
    /// incomparable.
    pub fn leq(self, other: Digit) -> bool {
        self == Digit::Bottom || self == other
    }
}

/// A symbol of `{0, 1, ∂, ⊥}`. The boundary symbol ∂ only appears in
/// subbase indices; codes of points never contain it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtDigit {
    Zero,
    One,
    Boundary,
    Bottom,
}

impl ExtDigit {
    pub const BINARY: [ExtDigit; 3] = [ExtDigit::Bottom, ExtDigit::Zero, ExtDigit::One];
    pub const EXTENDED: [ExtDigit; 4] = [ExtDigit::Bottom, ExtDigit::Zero, ExtDigit::One, ExtDigit::Boundary];

    pub fn to_char(self) -> char {
        match self {
            ExtDigit::Zero => '0',
            ExtDigit::One => '1',
            ExtDigit::Boundary => 'b',
            ExtDigit::Bottom => '_',
        }
    }

    pub fn from_char(c: char) -> Option<ExtDigit> {
        match c {
            '0' => Some(ExtDigit::Zero),
            '1' => Some(ExtDigit::One),
            'b' => Some(ExtDigit::Boundary),
            '_' => Some(ExtDigit::Bottom),
            _ => None,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, ExtDigit::Zero | ExtDigit::One)
    }

    /// The opposite binary digit; ∂ and ⊥ map to themselves.
    pub fn flip(self) -> ExtDigit {
        match self {
            ExtDigit::Zero => ExtDigit::One,
            ExtDigit::One => ExtDigit::Zero,
            other => other,
        }
    }

    /// The symbol a coding map reports: ∂ is undecided, so it becomes ⊥.
    pub fn coded(self) -> ExtDigit {
        match self {
            ExtDigit::Boundary => ExtDigit::Bottom,
            other => other,
        }
    }
}

impl From<Digit> for ExtDigit {
    fn from(d: Digit) -> Self {
        match d {
            Digit::Zero => ExtDigit::Zero,
            Digit::One => ExtDigit::One,
            Digit::Bottom => ExtDigit::Bottom,
        }
    }
}

impl TryFrom<ExtDigit> for Digit {
    type Error = ExtDigit;

    fn try_from(d: ExtDigit) -> Result<Self, ExtDigit> {
        match d {
            ExtDigit::Zero => Ok(Digit::Zero),
            ExtDigit::One => Ok(Digit::One),
            ExtDigit::Bottom => Ok(Digit::Bottom),
            ExtDigit::Boundary => Err(ExtDigit::Boundary),
        }
    }
}

/// Two sequences disagree on a defined index, so they have no common upper
/// bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("sequences clash at index {index}")]
pub struct Incompatible {
    pub index: usize,
}

/// A compact sequence over `{0, 1, ∂, ⊥}`, stored by support.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BottomedSeq {
    // Never holds `ExtDigit::Bottom`.
    entries: BTreeMap<usize, ExtDigit>,
}

impl BottomedSeq {
    /// The empty sequence ε, the least element.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_digits<I: IntoIterator<Item = ExtDigit>>(digits: I) -> Self {
        let entries = digits
            .into_iter()
            .enumerate()
            .filter(|(_, d)| *d != ExtDigit::Bottom)
            .collect();
        Self { entries }
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, ExtDigit)>>(entries: I) -> Self {
        let mut seq = Self::empty();
        for (k, d) in entries {
            seq.set(k, d);
        }
        seq
    }

    /// The single-symbol sequence with `d` at index `k`.
    pub fn singleton(k: usize, d: ExtDigit) -> Self {
        Self::from_entries([(k, d)])
    }

    pub fn get(&self, k: usize) -> ExtDigit {
        self.entries.get(&k).copied().unwrap_or(ExtDigit::Bottom)
    }

    /// Smallest `n` with `dom(σ) ⊆ {0, …, n-1}`.
    pub fn len(&self) -> usize {
        self.entries.keys().next_back().map_or(0, |k| k + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices carrying a non-⊥ symbol, ascending.
    pub fn dom(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    /// `(index, symbol)` pairs of the support, ascending.
    pub fn entries(&self) -> impl Iterator<Item = (usize, ExtDigit)> + '_ {
        self.entries.iter().map(|(k, d)| (*k, *d))
    }

    /// True when no entry is ∂, i.e. the sequence lies in `T*`.
    pub fn is_binary(&self) -> bool {
        self.entries.values().all(|d| d.is_binary())
    }

    fn set(&mut self, n: usize, a: ExtDigit) {
        if a == ExtDigit::Bottom {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, a);
        }
    }

    /// `σ[n ↦ a]`. Writing ⊥ erases index `n`.
    pub fn update(&self, n: usize, a: ExtDigit) -> Self {
        let mut out = self.clone();
        out.set(n, a);
        out
    }

    /// `στ`: `τ` shifted to start at `len(σ)`.
    pub fn concat(&self, other: &BottomedSeq) -> Self {
        let shift = self.len();
        let mut out = self.clone();
        out.entries.extend(other.entries.iter().map(|(k, d)| (k + shift, *d)));
        out
    }

    /// The `n`-fold self-concatenation `σⁿ`.
    pub fn repeat(&self, n: usize) -> Self {
        (0..n).fold(Self::empty(), |acc, _| acc.concat(self))
    }

    /// Product order: `σ ⊑ τ` iff `τ(k) = σ(k)` for every `k ∈ dom(σ)`.
    pub fn leq(&self, other: &BottomedSeq) -> bool {
        self.entries.len() <= other.entries.len() && self.entries.iter().all(|(k, d)| other.entries.get(k) == Some(d))
    }

    /// Least upper bound in the product order. ∂ is treated as an ordinary
    /// symbol: it matches ∂ and clashes with 0 and 1.
    pub fn join(&self, other: &BottomedSeq) -> Result<Self, Incompatible> {
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = large.clone();
        for (k, d) in &small.entries {
            match out.entries.get(k) {
                Some(existing) if existing != d => return Err(Incompatible { index: *k }),
                Some(_) => {}
                None => {
                    out.entries.insert(*k, *d);
                }
            }
        }
        Ok(out)
    }

    /// `σ|ₙ`: keeps the entries with index below `n`.
    pub fn restrict(&self, n: usize) -> Self {
        Self {
            entries: self.entries.range(..n).map(|(k, d)| (*k, *d)).collect(),
        }
    }

    /// Splits `σ` into `(σ_{0,1}, σ_∂)`.
    pub fn decompose(&self) -> (Self, Self) {
        let (binary, boundary): (BTreeMap<_, _>, BTreeMap<_, _>) =
            self.entries.iter().partition(|(_, d)| d.is_binary());
        (Self { entries: binary }, Self { entries: boundary })
    }

    /// Replaces every ∂ with ⊥.
    pub fn coded(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(_, d)| d.is_binary())
                .map(|(k, d)| (*k, *d))
                .collect(),
        }
    }

    /// Moves the symbol at index `k` to index `f(k)`. `f` must be injective
    /// on the support.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Self {
        Self {
            entries: self.entries.iter().map(|(k, d)| (f(*k), *d)).collect(),
        }
    }

    /// Sort key used wherever a deterministic order is needed: length first,
    /// then the ASCII rendering.
    pub fn label_key(&self) -> (usize, String) {
        (self.len(), self.to_string())
    }

    /// All sequences with `dom ⊆ {0, …, len-1}` over `alphabet` (which must
    /// contain ⊥ to reach shorter supports), in lexicographic order with
    /// index 0 most significant and symbols ranked as listed.
    pub fn enumerate(len: usize, alphabet: &[ExtDigit]) -> Vec<BottomedSeq> {
        let base = alphabet.len();
        let total = base.checked_pow(len as u32).expect("enumeration too large");
        let mut out = Vec::with_capacity(total);
        let mut counter = vec![0usize; len];
        for _ in 0..total {
            out.push(Self::from_digits(counter.iter().map(|&i| alphabet[i])));
            for slot in counter.iter_mut().rev() {
                *slot += 1;
                if *slot < base {
                    break;
                }
                *slot = 0;
            }
        }
        out
    }
}

impl Ord for BottomedSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.label_key().cmp(&other.label_key())
    }
}

impl PartialOrd for BottomedSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BottomedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            write!(f, "{}", self.get(k).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for BottomedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BottomedSeq({:?})", self.to_string())
    }
}

impl FromStr for BottomedSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .enumerate()
            .map(|(position, c)| ExtDigit::from_char(c).ok_or(Error::SequenceParse { found: c, position }))
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> BottomedSeq {
        text.parse().unwrap()
    }

    fn all_up_to(max_len: usize, alphabet: &[ExtDigit]) -> Vec<BottomedSeq> {
        // Sequences of every length ≤ max_len are the ones with dom ⊆ max_len.
        BottomedSeq::enumerate(max_len, alphabet)
    }

    #[test]
    fn update_examples() {
        assert_eq!(s("__").update(0, ExtDigit::Zero), s("0_"));
        assert_eq!(s("0_1").update(1, ExtDigit::Boundary), s("0b1"));
        assert_eq!(s("0b1").update(1, ExtDigit::Bottom), s("0_1"));
    }

    #[test]
    fn concat_examples() {
        assert_eq!(s("0_1").concat(&s("1")).to_string(), "0_11");
        assert_eq!(BottomedSeq::empty().concat(&s("1b_0")), s("1b_0"));
        assert_eq!(s("_1").repeat(2).to_string(), "_1_1");
        assert_eq!(s("10").repeat(0), BottomedSeq::empty());
    }

    #[test]
    fn concat_uses_length_not_written_width() {
        // "0_" is the same value as "0", so its length is 1. Word-level
        // juxtaposition with explicit ⊥ padding goes through the codec.
        assert_eq!(s("0_").concat(&s("1")), s("01"));
        assert_eq!(s("0_").repeat(2), s("00"));
        assert_eq!(s(&format!("{}{}", "0_", "1")).to_string(), "0_1");
    }

    #[test]
    fn leq_examples() {
        assert!(s("__").leq(&s("01")));
        assert!(!s("0_").leq(&s("1_")));
        assert!(s("0_1").leq(&s("011")));
    }

    #[test]
    fn join_examples() {
        assert_eq!(s("0_").join(&s("_1")).unwrap(), s("01"));
        assert_eq!(s("0_").join(&s("1_")), Err(Incompatible { index: 0 }));
        let sigma = s("1_b0");
        assert_eq!(sigma.join(&BottomedSeq::empty()).unwrap(), sigma);
        assert_eq!(s("b").join(&s("0")), Err(Incompatible { index: 0 }));
        assert_eq!(s("b").join(&s("b1")).unwrap(), s("b1"));
    }

    #[test]
    fn restrict_examples() {
        assert_eq!(s("011").restrict(2), s("01"));
        assert_eq!(s("011").restrict(0), BottomedSeq::empty());
        assert_eq!(s("0_1").restrict(2).to_string(), "0");
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(s("0b1").decompose(), (s("0_1"), s("_b")));
        assert_eq!(s("01").decompose(), (s("01"), BottomedSeq::empty()));
        assert_eq!(s("bb").decompose(), (BottomedSeq::empty(), s("bb")));
    }

    #[test]
    fn len_and_dom() {
        let sigma = s("_1_b__");
        assert_eq!(sigma.len(), 4);
        assert_eq!(sigma.dom().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(BottomedSeq::empty().len(), 0);
        assert!(BottomedSeq::empty().leq(&sigma));
    }

    #[test]
    fn parse_rejects_unknown_symbols() {
        match "01x".parse::<BottomedSeq>() {
            Err(Error::SequenceParse { found, position }) => {
                assert_eq!((found, position), ('x', 2));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!("⊥".parse::<BottomedSeq>().is_err());
    }

    #[test]
    fn digit_order_on_t() {
        use Digit::*;
        assert!(Bottom.leq(Zero) && Bottom.leq(One) && Bottom.leq(Bottom));
        assert!(!Zero.leq(One) && !One.leq(Zero) && !Zero.leq(Bottom));
    }

    #[test]
    fn enumerate_counts_and_order() {
        let all = BottomedSeq::enumerate(2, &ExtDigit::BINARY);
        let labels: Vec<_> = all.iter().map(|x| x.to_string()).collect();
        assert_eq!(labels, ["", "_0", "_1", "0", "00", "01", "1", "10", "11"]);
        assert_eq!(BottomedSeq::enumerate(3, &ExtDigit::EXTENDED).len(), 64);
        assert_eq!(BottomedSeq::enumerate(0, &ExtDigit::BINARY), vec![BottomedSeq::empty()]);
    }

    #[test]
    fn join_is_least_upper_bound_exhaustively() {
        let all = all_up_to(4, &ExtDigit::EXTENDED);
        for a in &all {
            for b in &all {
                let uppers: Vec<_> = all.iter().filter(|u| a.leq(u) && b.leq(u)).collect();
                match a.join(b) {
                    Ok(j) => {
                        assert!(a.leq(&j) && b.leq(&j));
                        assert!(uppers.iter().all(|u| j.leq(u)), "{a} {b}");
                    }
                    Err(_) => assert!(uppers.is_empty(), "{a} {b}"),
                }
            }
        }
    }

    #[test]
    fn decompose_then_join_is_identity_up_to_length_6() {
        for sigma in all_up_to(6, &ExtDigit::EXTENDED) {
            let (binary, boundary) = sigma.decompose();
            assert!(binary.is_binary());
            assert!(boundary.entries().all(|(_, d)| d == ExtDigit::Boundary));
            assert_eq!(binary.join(&boundary).unwrap(), sigma);
        }
    }

    #[test]
    fn leq_is_a_partial_order() {
        let all = all_up_to(3, &ExtDigit::EXTENDED);
        for a in &all {
            assert!(a.leq(a));
            for b in &all {
                if a.leq(b) && b.leq(a) {
                    assert_eq!(a, b);
                }
                for c in &all {
                    if a.leq(b) && b.leq(c) {
                        assert!(a.leq(c));
                    }
                }
            }
        }
    }

    fn arb_seq() -> impl Strategy<Value = BottomedSeq> {
        prop::collection::vec(prop::sample::select(ExtDigit::EXTENDED.to_vec()), 0..10)
            .prop_map(BottomedSeq::from_digits)
    }

    proptest! {
        #[test]
        fn codec_round_trips(sigma in arb_seq()) {
            let text = sigma.to_string();
            prop_assert_eq!(text.parse::<BottomedSeq>().unwrap(), sigma);
        }

        #[test]
        fn restrict_is_below_and_full_restrict_is_identity(sigma in arb_seq(), n in 0usize..12) {
            prop_assert!(sigma.restrict(n).leq(&sigma));
            prop_assert_eq!(sigma.restrict(sigma.len()), sigma.clone());
            prop_assert!(sigma.restrict(n).len() <= n);
        }

        #[test]
        fn update_then_restore(sigma in arb_seq(), n in 0usize..12,
                               a in prop::sample::select(ExtDigit::EXTENDED.to_vec())) {
            let restored = sigma.update(n, a).update(n, sigma.get(n));
            prop_assert_eq!(restored, sigma);
        }

        #[test]
        fn concat_is_associative(a in arb_seq(), b in arb_seq(), c in arb_seq()) {
            prop_assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
            if !b.is_empty() {
                prop_assert_eq!(a.concat(&b).len(), a.len() + b.len());
            }
        }
    }
}
