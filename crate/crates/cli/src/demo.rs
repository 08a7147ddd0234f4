use dyadic_core::rational::q;
use dyadic_core::space::{compactified_example, duplicated_subbase, gray_digit, gray_subbase, special_point_p};
use dyadic_core::{builtin_space, check_proper, check_strong_proper, ExtDigit, Point, Result, SpaceName};

use crate::{DemoKind, Outcome};

pub fn run(which: DemoKind, threads: usize) -> Result<Outcome> {
    match which {
        DemoKind::Gray => gray(threads),
        DemoKind::Duplication => duplication(threads),
        DemoKind::Compactification => compactification(threads),
    }
}

fn gray(threads: usize) -> Result<Outcome> {
    let (pairs, step, depth, delta) = (5, q(1, 1024), 5, q(1, 128));
    eprintln!("# dyadic demo gray space=interval resolution={step} depth={depth} delta={delta} threads={threads}");
    let g = gray_subbase(8);
    for x in [q(1, 4), q(3, 4), q(1, 3)] {
        println!("phi({x}) = {}...", g.phi(&Point::scalar(x), 8)?);
    }
    let mut overlaps = 0;
    for n in 0..=16u32 {
        for k in 0..(1i128 << n) {
            let b = q(2 * k + 1, 1 << (n + 1));
            overlaps += (0..=16u32)
                .filter(|&m| m != n && matches!(gray_digit(&b, m), Ok(ExtDigit::Boundary)))
                .count();
        }
    }
    println!("boundary points shared by two of the first 17 pairs: {overlaps}");
    let model = builtin_space(&SpaceName::Interval, &step)?;
    let report = check_strong_proper(&gray_subbase(pairs), &model, depth, &delta)?;
    print!("{report}");
    Ok(if report.passed() && overlaps == 0 {
        Outcome::Success
    } else {
        Outcome::CheckFailed
    })
}

fn duplication(threads: usize) -> Result<Outcome> {
    let (step, delta) = (q(1, 256), q(1, 128));
    let dup = duplicated_subbase(&gray_subbase(3), 0)?;
    let depth = dup.len();
    eprintln!(
        "# dyadic demo duplication space=interval resolution={step} depth={depth} delta={delta} threads={threads}"
    );
    println!("pair 0 of the Gray subbase enumerated again as pair {}", depth - 1);
    let model = builtin_space(&SpaceName::Interval, &step)?;
    let report = check_proper(&dup, &model, depth, &delta)?;
    print!("{report}");
    Ok(if report.passed() {
        Outcome::Success
    } else {
        Outcome::CheckFailed
    })
}

fn compactification(threads: usize) -> Result<Outcome> {
    let (step, depth, delta) = (q(1, 1024), 3, q(1, 64));
    eprintln!(
        "# dyadic demo compactification space=compactified resolution={step} depth={depth} delta={delta} threads={threads}"
    );
    let (model, s) = compactified_example(&step, 8)?;
    println!("phi(p) = {}...", s.phi(&special_point_p(), 8)?);
    let proper = check_proper(&s, &model, depth, &delta)?;
    print!("{proper}");
    let strong = check_strong_proper(&s, &model, depth, &delta)?;
    print!("{strong}");
    Ok(if proper.passed() && strong.passed() {
        Outcome::Success
    } else {
        Outcome::CheckFailed
    })
}
