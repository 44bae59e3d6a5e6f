//! Data-dependent window selection by split-and-validate: estimate on
//! the first third of the sequence, hold out the last third, and pick
//! the smallest power-of-two window whose estimate matches the holdout.

use crate::error::{Error, Result};
use crate::estimators::{wingit, WindowSize};
use crate::markov::Trajectory;

/// Minimum sequence length for tuning: keeps the thirds and the
/// power-of-two grid nondegenerate.
pub const MIN_TUNE_LENGTH: usize = 18;

/// Tuning configuration: the slack constant and the ascending candidate
/// grid (powers of two up to 2^floor(log2(n/6)) by default).
#[derive(Debug, Clone)]
pub struct TuneConfig {
    pub c_tune: f64,
    pub grid: Vec<usize>,
}

impl TuneConfig {
    /// Default configuration for a sequence of length n: c_tune = 1 and
    /// grid 1, 2, 4, ..., 2^floor(log2(n/6)).
    pub fn default_for(n: usize) -> Result<Self> {
        Ok(TuneConfig { c_tune: 1.0, grid: default_grid(n)? })
    }

    pub fn with_c_tune(n: usize, c_tune: f64) -> Result<Self> {
        if !(c_tune > 0.0) || c_tune.is_nan() {
            return Err(Error::InvalidSpec {
                field: "c_tune",
                reason: format!("must be a positive real, got {c_tune}"),
            });
        }
        Ok(TuneConfig { c_tune, grid: default_grid(n)? })
    }
}

fn default_grid(n: usize) -> Result<Vec<usize>> {
    if n < MIN_TUNE_LENGTH {
        return Err(Error::SequenceTooShort { n, min: MIN_TUNE_LENGTH });
    }
    let cap = n / 6;
    let mut grid = Vec::new();
    let mut tau = 1usize;
    while tau <= cap {
        grid.push(tau);
        tau *= 2;
    }
    Ok(grid)
}

/// Selection outcome: the chosen window, the criterion left-hand side
/// for every grid value evaluated (up to and including the winner), and
/// the holdout mass estimate the criterion compared against.
#[derive(Debug, Clone)]
pub struct TuneResult {
    pub tau_hat: WindowSize,
    pub criterion_values: Vec<(usize, f64)>,
    pub holdout_estimate: f64,
}

/// Fraction of final-third symbols absent from the first third.
/// With m = floor(n/3), compares windows [1, m] and [n-m+1, n]; any
/// middle remainder is discarded.
pub fn holdout_mass_estimate(x: &Trajectory) -> Result<f64> {
    let n = x.len();
    if n < 3 {
        return Err(Error::SequenceTooShort { n, min: 3 });
    }
    let m = n / 3;
    let s = x.symbols();
    let first: std::collections::HashSet<u32> = s[..m].iter().copied().collect();
    let unseen = s[n - m..].iter().filter(|sym| !first.contains(sym)).count();
    Ok(unseen as f64 / m as f64)
}

/// Pick the smallest grid window whose first-third estimate is within
/// sqrt(c_tune * tau / m) of the holdout estimate; fall back to
/// floor(n/6) when no grid value qualifies.
pub fn tune_window(x: &Trajectory, cfg: &TuneConfig) -> Result<TuneResult> {
    let n = x.len();
    if n < MIN_TUNE_LENGTH {
        return Err(Error::SequenceTooShort { n, min: MIN_TUNE_LENGTH });
    }
    if cfg.grid.is_empty() || cfg.grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec {
            field: "grid",
            reason: "must be nonempty and strictly increasing".into(),
        });
    }
    if *cfg.grid.last().unwrap() > n / 6 {
        return Err(Error::InvalidSpec {
            field: "grid",
            reason: format!("maximum entry exceeds n/6 = {}", n / 6),
        });
    }
    let m = n / 3;
    let holdout = holdout_mass_estimate(x)?;
    let first_third = x.slice(0..m);
    let mut criterion_values = Vec::new();
    for &tau in &cfg.grid {
        let est = wingit(&first_third, WindowSize(tau))?.value();
        let lhs = (est - holdout).powi(2);
        criterion_values.push((tau, lhs));
        if lhs <= cfg.c_tune * tau as f64 / m as f64 {
            return Ok(TuneResult { tau_hat: WindowSize(tau), criterion_values, holdout_estimate: holdout });
        }
    }
    Ok(TuneResult {
        tau_hat: WindowSize(n / 6),
        criterion_values,
        holdout_estimate: holdout,
    })
}
