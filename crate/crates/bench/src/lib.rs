//! Shared fixtures for the benchmarks.

use dyadic_core::rational::q;
use dyadic_core::{builtin_space, SpaceModel, SpaceName};

pub fn interval(step: i128) -> SpaceModel {
    builtin_space(&SpaceName::Interval, &q(1, step)).expect("positive step")
}

pub fn square(step: i128) -> SpaceModel {
    builtin_space(&SpaceName::Square, &q(1, step)).expect("positive step")
}
