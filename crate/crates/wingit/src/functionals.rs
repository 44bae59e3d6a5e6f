//! Exact ground-truth functionals of a trajectory under a known
//! stationary distribution: missing mass, small-count mass, exact-count
//! mass, and occurrence counting.
//!
//! Everything here is computed from an [`OccurrenceIndex`] (one pass over
//! the trajectory plus per-symbol position lists), never by iterating the
//! full alphabet, so corpora with far more symbols than observations cost
//! O(n) rather than O(|alphabet|).

use std::collections::HashMap;

use crate::markov::{Distribution, Trajectory};
use crate::numeric::KahanSum;

/// Count threshold zeta for small-count / exact-count functionals.
///
/// Values above n are allowed (the threshold simply never binds); they
/// are not rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountThreshold(pub usize);

/// Per-symbol occurrence positions, 1-based and strictly ascending.
#[derive(Debug, Clone)]
pub struct OccurrenceIndex {
    positions: HashMap<u32, Vec<u32>>,
    n: usize,
}

impl OccurrenceIndex {
    pub fn build(x: &Trajectory) -> Self {
        let mut positions: HashMap<u32, Vec<u32>> = HashMap::new();
        for (i, &s) in x.symbols().iter().enumerate() {
            positions.entry(s).or_default().push(i as u32 + 1);
        }
        OccurrenceIndex { positions, n: x.len() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn positions(&self, x: u32) -> &[u32] {
        self.positions.get(&x).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Iterate (symbol, positions) pairs in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &[u32])> {
        self.positions.iter().map(|(&s, v)| (s, v.as_slice()))
    }

    /// Number of distinct observed symbols.
    pub fn distinct(&self) -> usize {
        self.positions.len()
    }
}

/// N_x over the whole trajectory, or restricted to the inclusive 1-based
/// window [lo, hi]. Unknown symbols count 0.
pub fn count_occurrences(index: &OccurrenceIndex, x: u32, window: Option<(usize, usize)>) -> usize {
    let list = index.positions(x);
    match window {
        None => list.len(),
        Some((lo, hi)) => {
            if lo > hi {
                return 0;
            }
            let start = list.partition_point(|&p| (p as usize) < lo);
            let end = list.partition_point(|&p| (p as usize) <= hi);
            end - start
        }
    }
}

/// Stationary missing mass: sum of pi_x over symbols absent from x,
/// obtained as 1 minus the mass of seen symbols.
pub fn missing_mass(pi: &Distribution, x: &Trajectory) -> f64 {
    let index = OccurrenceIndex::build(x);
    let mut seen = KahanSum::new();
    for (s, _) in index.iter() {
        seen.add(pi.prob(s));
    }
    (1.0 - seen.value()).clamp(0.0, 1.0)
}

/// Stationary mass of symbols occurring at most zeta times:
/// (sum over seen symbols with N_x <= zeta) + (unseen mass).
pub fn small_count_mass(pi: &Distribution, x: &Trajectory, zeta: CountThreshold) -> f64 {
    let index = OccurrenceIndex::build(x);
    let mut seen = KahanSum::new();
    let mut seen_small = KahanSum::new();
    for (s, list) in index.iter() {
        let p = pi.prob(s);
        seen.add(p);
        if list.len() <= zeta.0 {
            seen_small.add(p);
        }
    }
    let unseen = (1.0 - seen.value()).clamp(0.0, 1.0);
    (seen_small.value() + unseen).clamp(0.0, 1.0)
}

/// Stationary mass of symbols occurring exactly zeta times.
pub fn exact_count_mass(pi: &Distribution, x: &Trajectory, zeta: CountThreshold) -> f64 {
    if zeta.0 == 0 {
        return missing_mass(pi, x);
    }
    let index = OccurrenceIndex::build(x);
    let mut mass = KahanSum::new();
    for (s, list) in index.iter() {
        if list.len() == zeta.0 {
            mass.add(pi.prob(s));
        }
    }
    mass.value().clamp(0.0, 1.0)
}
