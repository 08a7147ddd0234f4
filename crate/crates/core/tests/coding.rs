use std::f64::consts::PI;

use dyadic_core::rational::q;
use dyadic_core::space::{compactified_example, gray_digit, gray_subbase};
use dyadic_core::subbase::inverse_permutation;
use dyadic_core::{builtin_space, enumerate_k, is_cusl, BottomedSeq, ExtDigit, KSlice, Point, SpaceName};
use proptest::prelude::*;

/// Sign of `-cos(2^n π k/d)` in floating point, with the argument reduced
/// mod 2 in integers first.
fn float_gray(k: i128, d: i128, n: u32) -> ExtDigit {
    let mut r = k.rem_euclid(2 * d);
    for _ in 0..n {
        r = (2 * r) % (2 * d);
    }
    let v = -(PI * r as f64 / d as f64).cos();
    if v.abs() < 1e-9 {
        ExtDigit::Boundary
    } else if v < 0.0 {
        ExtDigit::Zero
    } else {
        ExtDigit::One
    }
}

fn seq_strategy(len: usize, extended: bool) -> impl Strategy<Value = BottomedSeq> {
    let symbols = if extended { 4usize } else { 3 };
    prop::collection::vec(0..symbols, len)
        .prop_map(|v| BottomedSeq::from_digits(v.into_iter().map(|i| ExtDigit::EXTENDED[i])))
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn gray_digits_match_a_float_oracle(d in 1i128..2000, k_frac in 0.0f64..=1.0, n in 0u32..12) {
        let k = (k_frac * d as f64).round() as i128;
        prop_assert_eq!(gray_digit(&q(k, d), n).unwrap(), float_gray(k, d, n));
    }

    #[test]
    fn open_membership_is_the_prefix_order(k in 0i128..=96, depth in 0usize..7, sigma in seq_strategy(6, true)) {
        let g = gray_subbase(6);
        let x = Point::scalar(q(k, 96));
        let sigma = sigma.restrict(depth);
        let full = BottomedSeq::from_digits(g.symbols(&x, 6).unwrap());
        prop_assert_eq!(g.member_open(&sigma, &x).unwrap(), sigma.leq(&full));
        if sigma.is_binary() {
            prop_assert_eq!(g.member_open(&sigma, &x).unwrap(), sigma.leq(&g.phi(&x, 6).unwrap()));
        }
    }

    #[test]
    fn open_sets_lie_in_their_closures(k in 0i128..=96, sigma in seq_strategy(5, true)) {
        let g = gray_subbase(5);
        let x = Point::scalar(q(k, 96));
        if g.member_open(&sigma, &x).unwrap() {
            prop_assert!(g.member_closed(&sigma, &x).unwrap());
        }
    }

    #[test]
    fn closed_membership_checks_each_symbol(k in 0i128..=96, sigma in seq_strategy(5, true)) {
        let g = gray_subbase(5);
        let x = q(k, 96);
        let expected = sigma.entries().all(|(n, d)| {
            let actual = gray_digit(&x, n as u32).unwrap();
            match d {
                ExtDigit::Boundary => actual == ExtDigit::Boundary,
                _ => actual == d || actual == ExtDigit::Boundary,
            }
        });
        prop_assert_eq!(g.member_closed(&sigma, &Point::scalar(x)).unwrap(), expected);
    }

    #[test]
    fn decomposition_splits_and_rejoins(sigma in seq_strategy(8, true)) {
        let (binary, boundary) = sigma.decompose();
        prop_assert!(binary.is_binary());
        prop_assert!(boundary.entries().all(|(_, d)| d == ExtDigit::Boundary));
        prop_assert!(binary.leq(&sigma) && boundary.leq(&sigma));
        prop_assert_eq!(binary.join(&boundary).unwrap(), sigma.clone());
        prop_assert_eq!(binary, sigma.coded());
    }

    #[test]
    fn permuted_digits_follow_the_permutation(perm in perm_strategy(5), k in 0i128..=64) {
        let g = gray_subbase(5);
        let p = g.permute(&perm).unwrap();
        let x = Point::scalar(q(k, 64));
        for (n, &from) in perm.iter().enumerate() {
            prop_assert_eq!(p.digit(n, &x).unwrap(), g.digit(from, &x).unwrap());
        }
        let inverse = inverse_permutation(&perm);
        let moved = g.phi(&x, 5).unwrap().relabel(|k| inverse[k]);
        prop_assert_eq!(p.phi(&x, 5).unwrap(), moved);
    }

    #[test]
    fn cusl_is_invariant_under_relabelling(perm in perm_strategy(4)) {
        let model = builtin_space(&SpaceName::Interval, &q(1, 64)).unwrap();
        let slice = enumerate_k(&gray_subbase(4), &model, 4).unwrap();
        let moved = slice.relabeled(&perm);
        prop_assert_eq!(moved.len(), slice.len());
        prop_assert_eq!(is_cusl(&moved).is_cusl(), is_cusl(&slice).is_cusl());
    }

    #[test]
    fn joins_are_least_upper_bounds(a in seq_strategy(6, true), b in seq_strategy(6, true), c in seq_strategy(6, true)) {
        match a.join(&b) {
            Ok(j) => {
                prop_assert!(a.leq(&j) && b.leq(&j));
                if a.leq(&c) && b.leq(&c) {
                    prop_assert!(j.leq(&c));
                }
            }
            Err(_) => prop_assert!(!(a.leq(&c) && b.leq(&c))),
        }
    }
}

fn parse(texts: &[&str]) -> Vec<BottomedSeq> {
    texts.iter().map(|t| t.parse().unwrap()).collect()
}

#[test]
fn one_pair_slice_of_the_gray_subbase() {
    let model = builtin_space(&SpaceName::Interval, &q(1, 16)).unwrap();
    let slice = enumerate_k(&gray_subbase(1), &model, 1).unwrap();
    assert_eq!(slice.elements(), parse(&["", "0", "1"]).as_slice());
}

#[test]
fn two_pair_slice_of_the_gray_subbase() {
    let model = builtin_space(&SpaceName::Interval, &q(1, 16)).unwrap();
    let slice = enumerate_k(&gray_subbase(2), &model, 2).unwrap();
    // 1/2 codes as ∂1, so `_1` is the only element with a bottom inside.
    let mut expected = parse(&["", "0", "1", "00", "01", "11", "10", "_1"]);
    expected.sort_by_key(|s| s.label_key());
    let mut got = slice.elements().to_vec();
    got.sort_by_key(|s| s.label_key());
    assert_eq!(got, expected);
    assert!(slice.is_downward_closed());
    assert!(is_cusl(&slice).is_cusl());
}

#[test]
fn swapping_the_first_two_pairs_moves_the_bottom() {
    let g = gray_subbase(2).permute(&[1, 0]).unwrap();
    let x = Point::scalar(q(3, 4));
    let before = gray_subbase(2).phi(&x, 2).unwrap();
    assert_eq!(before, "1_".parse().unwrap());
    assert_eq!(g.phi(&x, 2).unwrap().to_string(), "_1");
}

#[test]
fn compactified_slice_is_not_a_cusl() {
    let (model, s) = compactified_example(&q(1, 64), 3).unwrap();
    let slice = enumerate_k(&s, &model, 3).unwrap();
    assert!(slice.contains(&"__1".parse().unwrap()));
    assert!(!is_cusl(&slice).is_cusl());
}

#[test]
fn slices_built_from_elements_are_closed_only_when_prefixes_are_present() {
    let slice = KSlice::from_elements(2, parse(&["", "0", "01"]));
    assert!(slice.is_downward_closed());
    let gap = KSlice::from_elements(2, parse(&["", "01"]));
    assert!(!gap.is_downward_closed());
}
