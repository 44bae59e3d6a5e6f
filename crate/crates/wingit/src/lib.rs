//! Estimation of stationary missing mass and small-count mass from a
//! single Markovian trajectory, using leave-a-window-out indicators.
//!
//! The library provides:
//! - [`markov`]: sticky/i.i.d. chain construction, reproducible
//!   stationary sampling, and exact total-variation mixing times;
//! - [`functionals`]: ground-truth missing/small-count mass under a
//!   known stationary distribution;
//! - [`estimators`]: Good-Turing and windowed estimators with exact
//!   rational outputs, plus naive reference implementations;
//! - [`tuning`]: data-dependent window selection by split-and-validate;
//! - [`experiments`]: deterministic Monte-Carlo MSE/variance harness
//!   with CSV output;
//! - [`text`]: corpus tokenization and trajectory extraction.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod functionals;
pub mod markov;
pub mod numeric;
pub mod rng;
pub mod text;
pub mod tuning;

pub use error::{Error, Result};
pub use estimators::{
    good_turing, good_turing_small_count, wingit, wingit_exact_count, wingit_naive,
    wingit_skipped, wingit_small_count, wingit_small_count_naive, EstimateValue, WindowSize,
};
pub use functionals::{
    count_occurrences, exact_count_mass, missing_mass, small_count_mass, CountThreshold,
    OccurrenceIndex,
};
pub use markov::{
    build_sticky_chain, mixing_time, sample_trajectory, sticky_mixing_bounds, Alphabet,
    Distribution, Kernel, MarkovModel, Trajectory,
};
pub use rng::Seed;
pub use tuning::{holdout_mass_estimate, tune_window, TuneConfig, TuneResult};
