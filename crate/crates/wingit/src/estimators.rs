//! Estimators of missing and small-count mass from a single trajectory:
//! Good-Turing, the leave-a-window-out estimator (naive reference and
//! linear-time form), small-count and exact-count variants, and the
//! skipped decomposition.
//!
//! Every whole-trajectory estimator is an average of n 0/1 indicators,
//! so results are returned as exact rationals (count / scale). Identity
//! tests can then demand exact equality instead of float tolerances.

use crate::error::{Error, Result};
use crate::functionals::{count_occurrences, CountThreshold, OccurrenceIndex};
use crate::markov::Trajectory;

/// Half-width of the excluded neighborhood around each index.
/// tau = 1 excludes only the index itself (leave-one-out).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSize(pub usize);

impl WindowSize {
    fn validate(self, n: usize) -> Result<usize> {
        if self.0 < 1 || self.0 > n {
            return Err(Error::InvalidWindow { tau: self.0, n });
        }
        Ok(self.0)
    }
}

/// An estimate as an exact rational count/scale in [0, 1].
///
/// Equality compares cross-multiplied integers, so 3/6 == 1/2 and the
/// algebraic identities between estimators hold exactly, with no float
/// round-off in the comparison.
#[derive(Debug, Clone, Copy)]
pub struct EstimateValue {
    count: u64,
    scale: u64,
}

impl EstimateValue {
    pub fn new(count: u64, scale: u64) -> Self {
        debug_assert!(scale >= 1 && count <= scale);
        EstimateValue { count, scale }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn value(&self) -> f64 {
        self.count as f64 / self.scale as f64
    }
}

impl PartialEq for EstimateValue {
    fn eq(&self, other: &Self) -> bool {
        self.count as u128 * other.scale as u128 == other.count as u128 * self.scale as u128
    }
}

impl Eq for EstimateValue {}

/// Inclusive 1-based window (i - tau, i + tau) intersected with [1, n]:
/// the excluded neighborhood of index i.
fn excluded_range(i: usize, tau: usize, n: usize) -> (usize, usize) {
    let lo = i.saturating_sub(tau - 1).max(1);
    let hi = (i + tau - 1).min(n);
    (lo, hi)
}

/// Good-Turing estimator phi_1 / n: the fraction of positions holding
/// singleton symbols.
pub fn good_turing(x: &Trajectory) -> EstimateValue {
    let index = OccurrenceIndex::build(x);
    let singles = index.iter().filter(|(_, list)| list.len() == 1).count() as u64;
    EstimateValue::new(singles, x.len() as u64)
}

/// Small-count Good-Turing: sum_{s=0}^{zeta} (s+1) phi_{s+1} / n.
pub fn good_turing_small_count(x: &Trajectory, zeta: CountThreshold) -> EstimateValue {
    let index = OccurrenceIndex::build(x);
    let mut count = 0u64;
    for (_, list) in index.iter() {
        let c = list.len();
        if c >= 1 && c <= zeta.0 + 1 {
            count += c as u64;
        }
    }
    EstimateValue::new(count, x.len() as u64)
}

/// Literal-definition reference: for each i, test membership of X_i in
/// the multiset of symbols outside the excluded window. O(n^2); kept as
/// the correctness oracle for [`wingit`].
pub fn wingit_naive(x: &Trajectory, tau: WindowSize) -> Result<EstimateValue> {
    let n = x.len();
    let tau = tau.validate(n)?;
    let s = x.symbols();
    let mut count = 0u64;
    for i in 1..=n {
        let absent = !(1..=n).any(|k| {
            let dist = k.abs_diff(i);
            dist >= tau && s[k - 1] == s[i - 1]
        });
        count += absent as u64;
    }
    Ok(EstimateValue::new(count, n as u64))
}

/// Linear-time leave-a-window-out estimator.
///
/// All occurrences of X_i lie inside the open window (i - tau, i + tau)
/// exactly when the symbol's first occurrence is > i - tau and its last
/// is < i + tau, so one pass recording first/last positions per symbol
/// suffices.
pub fn wingit(x: &Trajectory, tau: WindowSize) -> Result<EstimateValue> {
    let n = x.len();
    let tau = tau.validate(n)? as i64;
    let s = x.symbols();
    // Dense first/last tables keyed by symbol id keep this allocation-light
    // for synthetic chains; corpus ids are also dense by construction.
    let max_sym = s.iter().copied().max().unwrap() as usize;
    let mut first_at = vec![0i64; max_sym + 1];
    let mut last_at = vec![0i64; max_sym + 1];
    for (idx, &sym) in s.iter().enumerate() {
        let i = idx as i64 + 1;
        if first_at[sym as usize] == 0 {
            first_at[sym as usize] = i;
        }
        last_at[sym as usize] = i;
    }
    let mut count = 0u64;
    for (idx, &sym) in s.iter().enumerate() {
        let i = idx as i64 + 1;
        let inside = first_at[sym as usize] > i - tau && last_at[sym as usize] < i + tau;
        count += inside as u64;
    }
    Ok(EstimateValue::new(count, n as u64))
}

/// Small-count leave-a-window-out estimator (threshold zeta on the count
/// of X_i outside the excluded window). O(n log n) via binary search on
/// per-symbol position lists.
pub fn wingit_small_count(
    x: &Trajectory,
    tau: WindowSize,
    zeta: CountThreshold,
) -> Result<EstimateValue> {
    let n = x.len();
    let tau = tau.validate(n)?;
    let index = OccurrenceIndex::build(x);
    let mut count = 0u64;
    for (idx, &sym) in x.symbols().iter().enumerate() {
        let i = idx + 1;
        let total = count_occurrences(&index, sym, None);
        let inside = count_occurrences(&index, sym, Some(excluded_range(i, tau, n)));
        count += (total - inside <= zeta.0) as u64;
    }
    Ok(EstimateValue::new(count, n as u64))
}

/// Literal-definition reference for [`wingit_small_count`]. O(n^2).
pub fn wingit_small_count_naive(
    x: &Trajectory,
    tau: WindowSize,
    zeta: CountThreshold,
) -> Result<EstimateValue> {
    let n = x.len();
    let tau = tau.validate(n)?;
    let s = x.symbols();
    let mut count = 0u64;
    for i in 1..=n {
        let occurrences = (1..=n)
            .filter(|&k| k.abs_diff(i) >= tau && s[k - 1] == s[i - 1])
            .count();
        count += (occurrences <= zeta.0) as u64;
    }
    Ok(EstimateValue::new(count, n as u64))
}

/// Exact-count estimator: difference of consecutive small-count
/// estimates; zeta = 0 reduces to the missing-mass estimator.
pub fn wingit_exact_count(
    x: &Trajectory,
    tau: WindowSize,
    zeta: CountThreshold,
) -> Result<EstimateValue> {
    let upper = wingit_small_count(x, tau, zeta)?;
    if zeta.0 == 0 {
        return Ok(upper);
    }
    let lower = wingit_small_count(x, tau, CountThreshold(zeta.0 - 1))?;
    Ok(EstimateValue::new(upper.count - lower.count, upper.scale))
}

/// Skipped estimator: sub-average of the per-index indicators over
/// indices 2*tau*j - ell only, j = 1..n/(2 tau).
pub fn wingit_skipped(x: &Trajectory, tau: WindowSize, ell: usize) -> Result<EstimateValue> {
    let n = x.len();
    let tau = tau.validate(n)?;
    let two_tau = 2 * tau;
    if n % two_tau != 0 {
        return Err(Error::NotDivisible { n, two_tau });
    }
    if ell > two_tau - 1 {
        return Err(Error::InvalidSkipOffset { ell, max: two_tau - 1 });
    }
    let index = OccurrenceIndex::build(x);
    let n0 = n / two_tau;
    let mut count = 0u64;
    for j in 1..=n0 {
        let i = two_tau * j - ell;
        let sym = x.symbols()[i - 1];
        let total = count_occurrences(&index, sym, None);
        let inside = count_occurrences(&index, sym, Some(excluded_range(i, tau, n)));
        count += (total == inside) as u64;
    }
    Ok(EstimateValue::new(count, n0 as u64))
}
