//! Nim sequences over additively periodic obstruction sequences.
//!
//! A Nim sequence is the greedy permutation `G(x) = mex({G(x') | x' < x} ∪ Y_x)`
//! after a finite seed, where the obstruction sets satisfy `Y_{x+p} = Y_x + p`.
//! This crate generates such sequences, certifies their additive period and
//! preperiod, models the cut-set calculus that explains the period lengths,
//! and computes the period and preperiod bounds together with extremal
//! instances that attain them.
//!
//! Module map:
//! - [`instance`]: problem instances, the mex engine and certificate checks.
//! - [`detect`]: window and cut-signature period detection.
//! - [`wythoff`]: row-by-row certification of Wythoff's game.
//! - [`cutset`]: cut sets, direct successors and the sequence/path converters.
//! - [`optimize`]: optimization paths, binary representations, bounds and
//!   extremal constructions.
//! - [`cli`]: the command line front end.

pub mod cli;
pub mod cutset;
pub mod detect;
pub mod instance;
pub mod optimize;
pub mod wythoff;

mod util;

pub use detect::{detect, DetectMethod};
pub use instance::{
    difference_bounds, generate, mex, simple_instance, verify_certificate, DiffSetSequence,
    DifferenceBounds, PeriodCertificate, ProblemInstance, Seed,
};
