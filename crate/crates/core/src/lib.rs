//! Dyadic subbases made computational.
//!
//! Points of concrete metric spaces are coded as bottomed sequences over
//! `{0, 1, ⊥}` by a [`FunctionalSubbase`]: an enumerated family of cuts
//! `(f_n, c_n)` splitting the space into `f_n < c_n`, `f_n > c_n` and the
//! boundary `f_n = c_n`. On top of that the crate provides
//!
//! - [`seq`]: the order, join and decomposition calculus of bottomed
//!   sequences;
//! - [`space`]: sampled space models, the Gray subbase of the unit interval
//!   and two counterexample models;
//! - [`subbase`]: the coding map, membership in `S(σ)` and `S̄(σ)`, finite
//!   slices of `K_S` and their cusl check;
//! - [`checker`]: grid-witness verification of properness and strong
//!   properness;
//! - [`builder`]: a randomized construction of distance-cut subbases that
//!   avoids sampled extremum values;
//! - [`file`]: the JSON format subbases are stored in.

pub mod builder;
pub mod checker;
pub mod error;
pub mod file;
pub mod rational;
pub mod seq;
pub mod space;
pub mod subbase;

pub use builder::{build, BuilderParams};
pub use checker::{check_exterior_pair, check_proper, check_strong_proper, CheckReport, Verdict};
pub use error::{Error, Result};
pub use file::{load_subbase, LoadedSubbase, SubbaseFile};
pub use rational::{parse_rational, Q};
pub use seq::{BottomedSeq, Digit, ExtDigit, Incompatible};
pub use space::{builtin_space, Point, SpaceModel, SpaceName};
pub use subbase::{enumerate_k, is_cusl, CuslVerdict, Cut, CutFunction, FunctionalSubbase, KSlice};
