//! Finite-state Markov chains: sticky family, stationary sampling, and
//! exact total-variation mixing times for small alphabets.

use crate::error::{Error, Result};
use crate::numeric::{kahan_sum, KahanSum};
use crate::rng::{CounterRng, Seed};

/// Dense computation cap for exact mixing-time evaluation.
pub const MIXING_ALPHABET_CAP: usize = 4096;
/// Iteration cap for mixing-time search.
pub const MIXING_STEP_CAP: usize = 1_000_000;

const DISTRIBUTION_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-9;

/// Finite symbol alphabet; symbols are dense ids `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidDistribution { reason: "alphabet size must be >= 1".into() });
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// Probability distribution over a finite alphabet.
///
/// Carries a cumulative table so stationary draws can use inverse-CDF
/// lookup in O(log k).
#[derive(Debug, Clone)]
pub struct Distribution {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution { reason: "empty probability vector".into() });
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::InvalidDistribution {
                    reason: format!("entry {i} = {p} outside [0,1]"),
                });
            }
        }
        let total = kahan_sum(probs.iter().copied());
        if (total - 1.0).abs() > DISTRIBUTION_SUM_TOL {
            return Err(Error::InvalidDistribution {
                reason: format!("entries sum to {total}, expected 1 within {DISTRIBUTION_SUM_TOL}"),
            });
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = KahanSum::new();
        for &p in &probs {
            acc.add(p);
            cumulative.push(acc.value());
        }
        // Clamp the final entry so a uniform draw in [0,1) always lands.
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Distribution { probs, cumulative })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k.max(1)])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, x: u32) -> f64 {
        self.probs.get(x as usize).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse-CDF draw: smallest x with u < F(x).
    pub fn sample(&self, u: f64) -> u32 {
        let mut lo = 0usize;
        let mut hi = self.cumulative.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if u < self.cumulative[mid] {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo as u32
    }
}

/// Transition kernel. The sticky family is kept in structured form so
/// chains over alphabets of size ~10^4 and beyond never materialize a
/// dense matrix.
#[derive(Debug, Clone)]
pub enum Kernel {
    /// (1-p) I + p 1 pi^T: stay put with probability 1-p, else resample
    /// from the stationary law.
    Sticky { p: f64 },
    /// Explicit row-stochastic matrix, for small test chains.
    Dense { rows: Vec<Vec<f64>> },
}

/// A stationary finite-state Markov chain.
#[derive(Debug, Clone)]
pub struct MarkovModel {
    alphabet: Alphabet,
    kernel: Kernel,
    stationary: Distribution,
}

/// An observed symbol sequence X^n. Indices are 1-based in the estimator
/// definitions; storage is 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    symbols: Vec<u32>,
}

impl Trajectory {
    pub fn new(symbols: Vec<u32>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::SequenceTooShort { n: 0, min: 1 });
        }
        Ok(Trajectory { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Contiguous sub-trajectory over 0-based `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Trajectory {
        Trajectory { symbols: self.symbols[range].to_vec() }
    }
}

impl MarkovModel {
    /// Sticky (lazy) chain (1-p) I + p 1 pi^T with stationary law `pi`.
    pub fn sticky(p: f64, pi: Distribution) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability { value: p, range: "(0, 1]" });
        }
        let alphabet = Alphabet::new(pi.len())?;
        Ok(MarkovModel { alphabet, kernel: Kernel::Sticky { p }, stationary: pi })
    }

    /// I.i.d. samples from `pi` (sticky chain with p = 1).
    pub fn iid(pi: Distribution) -> Result<Self> {
        Self::sticky(1.0, pi)
    }

    /// General chain from an explicit transition matrix and its
    /// stationary distribution. Validates row sums and pi^T P = pi^T.
    pub fn dense(rows: Vec<Vec<f64>>, stationary: Distribution) -> Result<Self> {
        let k = stationary.len();
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidDistribution {
                reason: "transition matrix shape does not match stationary distribution".into(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) || p.is_nan() {
                    return Err(Error::InvalidDistribution {
                        reason: format!("transition entry ({i},{j}) = {p} outside [0,1]"),
                    });
                }
            }
            let s = kahan_sum(row.iter().copied());
            if (s - 1.0).abs() > DISTRIBUTION_SUM_TOL {
                return Err(Error::InvalidDistribution {
                    reason: format!("row {i} sums to {s}, expected 1"),
                });
            }
        }
        for y in 0..k {
            let lhs = kahan_sum((0..k).map(|x| stationary.prob(x as u32) * rows[x][y]));
            if (lhs - stationary.prob(y as u32)).abs() > STATIONARY_TOL {
                return Err(Error::InvalidDistribution {
                    reason: format!("stationary equation violated at coordinate {y}"),
                });
            }
        }
        let alphabet = Alphabet::new(k)?;
        Ok(MarkovModel { alphabet, kernel: Kernel::Dense { rows }, stationary })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn stationary(&self) -> &Distribution {
        &self.stationary
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Materialize transition row `x`.
    pub fn transition_row(&self, x: usize) -> Vec<f64> {
        let k = self.alphabet.size();
        match &self.kernel {
            Kernel::Dense { rows } => rows[x].clone(),
            Kernel::Sticky { p } => {
                let mut row: Vec<f64> =
                    self.stationary.probs().iter().map(|&pi| p * pi).collect();
                row[x] += 1.0 - p;
                let _ = k;
                row
            }
        }
    }

    /// One step of the kernel applied to a row distribution, in place.
    fn step_distribution(&self, dist: &mut Vec<f64>, scratch: &mut Vec<f64>) {
        match &self.kernel {
            Kernel::Sticky { p } => {
                let pi = self.stationary.probs();
                for (d, &s) in dist.iter_mut().zip(pi) {
                    *d = (1.0 - p) * *d + p * s;
                }
            }
            Kernel::Dense { rows } => {
                scratch.clear();
                scratch.resize(dist.len(), 0.0);
                for (x, &mass) in dist.iter().enumerate() {
                    if mass == 0.0 {
                        continue;
                    }
                    for (y, &pxy) in rows[x].iter().enumerate() {
                        scratch[y] += mass * pxy;
                    }
                }
                std::mem::swap(dist, scratch);
            }
        }
    }
}

/// Sticky chain constructor matching the published parameterization.
pub fn build_sticky_chain(p: f64, pi: Distribution) -> Result<MarkovModel> {
    MarkovModel::sticky(p, pi)
}

/// Sample a stationary trajectory of length `n`.
///
/// X_1 ~ pi by inverse CDF; each subsequent step either holds (sticky) or
/// redraws from the appropriate row. Identical (model, n, seed) give
/// byte-identical output on every platform.
pub fn sample_trajectory(model: &MarkovModel, n: usize, seed: Seed) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::SequenceTooShort { n: 0, min: 1 });
    }
    let mut rng = CounterRng::new(seed);
    let mut symbols = Vec::with_capacity(n);
    let mut state = model.stationary.sample(rng.next_f64());
    symbols.push(state);
    match model.kernel() {
        Kernel::Sticky { p } => {
            let hold = 1.0 - p;
            for _ in 1..n {
                let u = rng.next_f64();
                if u >= hold {
                    state = model.stationary.sample(rng.next_f64());
                }
                symbols.push(state);
            }
        }
        Kernel::Dense { rows } => {
            for _ in 1..n {
                let u = rng.next_f64();
                let row = &rows[state as usize];
                let mut acc = 0.0;
                let mut next = row.len() - 1;
                for (y, &pxy) in row.iter().enumerate() {
                    acc += pxy;
                    if u < acc {
                        next = y;
                        break;
                    }
                }
                state = next as u32;
                symbols.push(state);
            }
        }
    }
    Trajectory::new(symbols)
}

/// Half-L1 distance between a row distribution and the stationary law.
fn tv_to_stationary(dist: &[f64], pi: &[f64]) -> f64 {
    0.5 * kahan_sum(dist.iter().zip(pi).map(|(&d, &s)| (d - s).abs()))
}

/// Exact mixing time: min { t : max_x || e_x^T P^t - pi^T ||_TV <= epsilon }.
///
/// Computed by iterating the kernel on each start state's row
/// distribution; TV to stationarity is nonincreasing in t, so per-start
/// first passage times compose by max.
pub fn mixing_time(model: &MarkovModel, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidProbability { value: epsilon, range: "(0, 1/2]" });
    }
    let k = model.alphabet.size();
    if k > MIXING_ALPHABET_CAP {
        return Err(Error::AlphabetTooLarge { size: k, cap: MIXING_ALPHABET_CAP });
    }
    let pi = model.stationary.probs();
    let mut worst = 0usize;
    let mut scratch = Vec::new();
    for x in 0..k {
        let mut dist = vec![0.0; k];
        dist[x] = 1.0;
        let mut t = 0usize;
        loop {
            model.step_distribution(&mut dist, &mut scratch);
            t += 1;
            if tv_to_stationary(&dist, pi) <= epsilon {
                break;
            }
            if t >= MIXING_STEP_CAP {
                return Err(Error::MixingDidNotConverge(MIXING_STEP_CAP));
            }
        }
        worst = worst.max(t);
    }
    Ok(worst)
}

/// Sandwich bounds 1/(2p) <= Tmix <= 2/p for sticky chains with
/// p in (0, 1/2] and alphabet size >= 2.
pub fn sticky_mixing_bounds(p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::InvalidProbability { value: p, range: "(0, 1/2]" });
    }
    Ok((1.0 / (2.0 * p), 2.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_model(p: f64, k: usize) -> MarkovModel {
        build_sticky_chain(p, Distribution::uniform(k).unwrap()).unwrap()
    }

    #[test]
    fn sticky_p1_rows_are_stationary() {
        let model = uniform_model(1.0, 4);
        for x in 0..4 {
            assert_eq!(model.transition_row(x), vec![0.25; 4]);
        }
    }

    #[test]
    fn sticky_half_uniform_two() {
        let model = uniform_model(0.5, 2);
        let r0 = model.transition_row(0);
        let r1 = model.transition_row(1);
        assert!((r0[0] - 0.75).abs() < 1e-15 && (r0[1] - 0.25).abs() < 1e-15);
        assert!((r1[0] - 0.25).abs() < 1e-15 && (r1[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sticky_half_skewed_rows() {
        let pi = Distribution::new(vec![0.2, 0.8]).unwrap();
        let model = build_sticky_chain(0.5, pi).unwrap();
        let r0 = model.transition_row(0);
        let r1 = model.transition_row(1);
        assert!((r0[0] - 0.6).abs() < 1e-15 && (r0[1] - 0.4).abs() < 1e-15);
        assert!((r1[0] - 0.1).abs() < 1e-15 && (r1[1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn sticky_rejects_bad_p() {
        let pi = Distribution::uniform(3).unwrap();
        assert!(build_sticky_chain(0.0, pi.clone()).is_err());
        assert!(build_sticky_chain(1.5, pi).is_err());
    }

    #[test]
    fn distribution_rejects_bad_mass() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
    }

    #[test]
    fn rows_sum_to_one_and_stationary_holds() {
        let pi = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let model = build_sticky_chain(0.3, pi.clone()).unwrap();
        let k = model.alphabet().size();
        for x in 0..k {
            let row = model.transition_row(x);
            assert!((kahan_sum(row.iter().copied()) - 1.0).abs() < 1e-12);
        }
        for y in 0..k {
            let lhs = kahan_sum(
                (0..k).map(|x| pi.prob(x as u32) * model.transition_row(x)[y]),
            );
            assert!((lhs - pi.prob(y as u32)).abs() < 1e-9);
        }
    }

    #[test]
    fn single_state_chain_is_constant() {
        let model = uniform_model(1.0, 1);
        let traj = sample_trajectory(&model, 5, Seed(9)).unwrap();
        assert_eq!(traj.symbols(), &[0, 0, 0, 0, 0]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let model = uniform_model(0.5, 16);
        let a = sample_trajectory(&model, 1000, Seed(3)).unwrap();
        let b = sample_trajectory(&model, 1000, Seed(3)).unwrap();
        assert_eq!(a, b);
        let c = sample_trajectory(&model, 1000, Seed(4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn iid_unigram_frequencies_chi_square() {
        // k = 8, n = 1e5; chi-square critical value at df = 7,
        // significance 0.001 is 24.322.
        let k = 8;
        let n = 100_000;
        let model = uniform_model(1.0, k);
        let traj = sample_trajectory(&model, n, Seed(2024)).unwrap();
        let mut counts = vec![0u64; k];
        for &s in traj.symbols() {
            counts[s as usize] += 1;
        }
        let expected = n as f64 / k as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(stat < 24.322, "chi-square statistic {stat} too large");
    }

    #[test]
    fn mixing_time_iid_is_one() {
        let model = uniform_model(1.0, 10);
        assert_eq!(mixing_time(&model, 0.25).unwrap(), 1);
    }

    #[test]
    fn mixing_time_sticky_paper_range() {
        // Sticky(0.5) over uniform(600): paper bounds Tmix in [1, 4].
        let model = uniform_model(0.5, 600);
        let t = mixing_time(&model, 0.25).unwrap();
        assert!((1..=4).contains(&t), "Tmix = {t}");

        let model = uniform_model(0.25, 16);
        let t = mixing_time(&model, 0.25).unwrap();
        assert!((2..=8).contains(&t), "Tmix = {t}");
    }

    #[test]
    fn mixing_time_monotone_in_epsilon() {
        let model = uniform_model(0.3, 32);
        let coarse = mixing_time(&model, 0.25).unwrap();
        let fine = mixing_time(&model, 0.05).unwrap();
        assert!(fine >= coarse);
    }

    #[test]
    fn mixing_time_log_epsilon_bound() {
        // t_mix(eps) <= Tmix * ceil(log(1/eps)) for eps < 1/4.
        for &p in &[0.1, 0.25, 0.5] {
            let model = uniform_model(p, 64);
            let tmix = mixing_time(&model, 0.25).unwrap();
            for &eps in &[0.2, 0.1, 0.01] {
                let t = mixing_time(&model, eps).unwrap();
                let bound = tmix * (1.0 / eps).ln().ceil() as usize;
                assert!(t <= bound, "p={p} eps={eps}: {t} > {bound}");
            }
        }
    }

    #[test]
    fn mixing_time_rejects_out_of_contract() {
        let model = uniform_model(0.5, 4);
        assert!(mixing_time(&model, 0.0).is_err());
        assert!(mixing_time(&model, 0.6).is_err());
        let big = uniform_model(0.5, MIXING_ALPHABET_CAP + 1);
        assert!(matches!(
            mixing_time(&big, 0.25),
            Err(Error::AlphabetTooLarge { .. })
        ));
    }

    #[test]
    fn sticky_bounds_values() {
        assert_eq!(sticky_mixing_bounds(0.5).unwrap(), (1.0, 4.0));
        assert_eq!(sticky_mixing_bounds(0.25).unwrap(), (2.0, 8.0));
        assert_eq!(sticky_mixing_bounds(0.1).unwrap(), (5.0, 20.0));
        assert!(sticky_mixing_bounds(0.6).is_err());
        assert!(sticky_mixing_bounds(0.0).is_err());
    }

    #[test]
    fn sticky_mixing_within_lemma_bounds() {
        for &p in &[0.5, 0.25, 0.125] {
            let model = uniform_model(p, 32);
            let t = mixing_time(&model, 0.25).unwrap() as f64;
            let (lo, hi) = sticky_mixing_bounds(p).unwrap();
            assert!(t >= lo.ceil() && t <= hi.floor(), "p={p}: Tmix={t}");
        }
    }

    #[test]
    fn dense_constructor_validates() {
        let pi = Distribution::new(vec![0.5, 0.5]).unwrap();
        let ok = MarkovModel::dense(vec![vec![0.75, 0.25], vec![0.25, 0.75]], pi.clone());
        assert!(ok.is_ok());
        // Rows stochastic but stationary law wrong.
        let bad = MarkovModel::dense(vec![vec![0.9, 0.1], vec![0.5, 0.5]], pi);
        assert!(bad.is_err());
    }
}
