//! Monte-Carlo harness: MSE-vs-n tables per (estimator, window, count
//! threshold), bias demonstrations, variance probes, and
//! bounded-difference fuzzing, emitted as deterministic CSV.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{good_turing, wingit, wingit_small_count, WindowSize};
use crate::functionals::{missing_mass, small_count_mass, CountThreshold};
use crate::markov::{build_sticky_chain, sample_trajectory, Distribution, MarkovModel, Trajectory};
use crate::numeric::KahanSum;
use crate::rng::{derive_trial_seed, Seed};
use crate::text::{extract_trajectories, tokenize, Corpus};
use crate::tuning::{tune_window, TuneConfig};

/// Chain (or corpus) under study. Synthetic sources re-derive their
/// alphabet per grid point as floor(alphabet_scale * n), defaulting to
/// the 1.2n used throughout the reference experiments.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    Sticky {
        p: f64,
        #[serde(default = "default_alphabet_scale")]
        alphabet_scale: f64,
    },
    IidUniform {
        #[serde(default = "default_alphabet_scale")]
        alphabet_scale: f64,
    },
    Corpus { path: String },
}

fn default_alphabet_scale() -> f64 {
    1.2
}

/// Window column entry: a fixed window size or the data-tuned choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauLabel {
    Fixed(usize),
    #[serde(rename = "tuned")]
    Tuned(TunedMarker),
}

/// Serde shim so "tuned" round-trips as a JSON string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TunedMarker {
    #[serde(rename = "tuned")]
    Tuned,
}

pub const TUNED: TauLabel = TauLabel::Tuned(TunedMarker::Tuned);

impl std::fmt::Display for TauLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TauLabel::Fixed(tau) => write!(f, "{tau}"),
            TauLabel::Tuned(_) => write!(f, "tuned"),
        }
    }
}

/// Full description of one study; identical specs produce byte-identical
/// output tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub source: SourceSpec,
    pub n_grid: Vec<usize>,
    pub tau_list: Vec<TauLabel>,
    #[serde(default)]
    pub zeta: usize,
    pub trials: usize,
    pub base_seed: Seed,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidSpec { field: "n_grid", reason: "must be nonempty".into() });
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec {
                field: "n_grid",
                reason: "must be strictly increasing".into(),
            });
        }
        if self.tau_list.is_empty() {
            return Err(Error::InvalidSpec { field: "tau_list", reason: "must be nonempty".into() });
        }
        if self.trials == 0 {
            return Err(Error::InvalidSpec { field: "trials", reason: "must be at least 1".into() });
        }
        match &self.source {
            SourceSpec::Sticky { p, alphabet_scale } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(Error::InvalidSpec {
                        field: "source.p",
                        reason: format!("must lie in (0, 1], got {p}"),
                    });
                }
                if !(*alphabet_scale > 0.0) {
                    return Err(Error::InvalidSpec {
                        field: "source.alphabet_scale",
                        reason: "must be positive".into(),
                    });
                }
            }
            SourceSpec::IidUniform { alphabet_scale } => {
                if !(*alphabet_scale > 0.0) {
                    return Err(Error::InvalidSpec {
                        field: "source.alphabet_scale",
                        reason: "must be positive".into(),
                    });
                }
            }
            SourceSpec::Corpus { path } => {
                if path.is_empty() {
                    return Err(Error::InvalidSpec {
                        field: "source.path",
                        reason: "must be nonempty".into(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// One aggregate row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct MseRow {
    pub n: usize,
    pub tau_label: TauLabel,
    pub zeta: usize,
    pub estimator: &'static str,
    pub mse: f64,
    pub mean_estimate: f64,
    pub mean_true: f64,
    pub est_p5: f64,
    pub est_p95: f64,
    pub true_p5: f64,
    pub true_p95: f64,
    pub trials: usize,
}

pub const CSV_HEADER: &str =
    "n,tau,zeta,estimator,mse,mean_estimate,mean_true,est_p5,est_p95,true_p5,true_p95,trials";

/// Serialize a float with 10 significant digits (scientific notation,
/// round-half-even), byte-stable across platforms.
pub fn format_float(v: f64) -> String {
    format!("{v:.9e}")
}

impl MseRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.tau_label,
            self.zeta,
            self.estimator,
            format_float(self.mse),
            format_float(self.mean_estimate),
            format_float(self.mean_true),
            format_float(self.est_p5),
            format_float(self.est_p95),
            format_float(self.true_p5),
            format_float(self.true_p95),
            self.trials
        )
    }
}

/// Nearest-rank percentile of an unsorted sample.
fn percentile(values: &[f64], p: f64) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

fn mean(values: &[f64]) -> f64 {
    kahan_mean(values)
}

fn kahan_mean(values: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value() / values.len() as f64
}

fn aggregate(
    n: usize,
    tau_label: TauLabel,
    zeta: usize,
    estimator: &'static str,
    estimates: &[f64],
    truths: &[f64],
) -> MseRow {
    let mut sq = KahanSum::new();
    for (e, t) in estimates.iter().zip(truths) {
        sq.add((e - t) * (e - t));
    }
    MseRow {
        n,
        tau_label,
        zeta,
        estimator,
        mse: sq.value() / estimates.len() as f64,
        mean_estimate: mean(estimates),
        mean_true: mean(truths),
        est_p5: percentile(estimates, 5.0),
        est_p95: percentile(estimates, 95.0),
        true_p5: percentile(truths, 5.0),
        true_p95: percentile(truths, 95.0),
        trials: estimates.len(),
    }
}

/// Trial parallelism: WINGIT_THREADS if set, else available cores.
fn thread_count() -> usize {
    std::env::var("WINGIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
        })
}

/// Run `work(trial)` for trial = 0..trials across threads, returning
/// results in trial order regardless of scheduling.
fn run_trials<T, F>(trials: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let threads = thread_count().min(trials).max(1);
    if threads == 1 {
        return (0..trials).map(&work).collect();
    }
    let mut slots: Vec<Option<Result<T>>> = (0..trials).map(|_| None).collect();
    let chunk = trials.div_ceil(threads);
    std::thread::scope(|scope| {
        for (c, slice) in slots.chunks_mut(chunk).enumerate() {
            let work = &work;
            scope.spawn(move || {
                for (off, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(work(c * chunk + off));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("trial slot filled")).collect()
}

fn synthetic_model(source: &SourceSpec, n: usize) -> Result<MarkovModel> {
    match source {
        SourceSpec::Sticky { p, alphabet_scale } => {
            let k = ((alphabet_scale * n as f64).floor() as usize).max(1);
            build_sticky_chain(*p, Distribution::uniform(k)?)
        }
        SourceSpec::IidUniform { alphabet_scale } => {
            let k = ((alphabet_scale * n as f64).floor() as usize).max(1);
            build_sticky_chain(1.0, Distribution::uniform(k)?)
        }
        SourceSpec::Corpus { .. } => Err(Error::InvalidSpec {
            field: "source",
            reason: "corpus sources carry their own trajectories".into(),
        }),
    }
}

fn estimate_for_label(x: &Trajectory, label: TauLabel, zeta: usize) -> Result<f64> {
    let tau = match label {
        TauLabel::Fixed(tau) => WindowSize(tau),
        TauLabel::Tuned(_) => tune_window(x, &TuneConfig::default_for(x.len())?)?.tau_hat,
    };
    let est = if zeta == 0 {
        wingit(x, tau)?
    } else {
        wingit_small_count(x, tau, CountThreshold(zeta))?
    };
    Ok(est.value())
}

fn true_functional(pi: &Distribution, x: &Trajectory, zeta: usize) -> f64 {
    if zeta == 0 {
        missing_mass(pi, x)
    } else {
        small_count_mass(pi, x, CountThreshold(zeta))
    }
}

fn estimator_name(zeta: usize) -> &'static str {
    if zeta == 0 {
        "wingit"
    } else {
        "wingit-small-count"
    }
}

/// Monte-Carlo MSE study over the (n, window) grid. Per-trial seeds are
/// a mixing hash of (base_seed, n, trial); trial results are aggregated
/// in ascending trial order with compensated sums, so the output is
/// byte-identical however trials are scheduled.
pub fn run_mse_experiment(spec: &ExperimentSpec) -> Result<Vec<MseRow>> {
    spec.validate()?;
    if let SourceSpec::Corpus { path } = &spec.source {
        let text = std::fs::read_to_string(path)?;
        let corpus = tokenize(&text, &[])?;
        return run_corpus_experiment(&corpus, spec);
    }
    let mut rows = Vec::new();
    for &n in &spec.n_grid {
        let model = synthetic_model(&spec.source, n)?;
        // (truth, per-label estimates) per trial.
        let per_trial = run_trials(spec.trials, |trial| {
            let seed = derive_trial_seed(spec.base_seed, n, trial);
            let x = sample_trajectory(&model, n, seed)?;
            let truth = true_functional(model.stationary(), &x, spec.zeta);
            let ests = spec
                .tau_list
                .iter()
                .map(|&label| estimate_for_label(&x, label, spec.zeta))
                .collect::<Result<Vec<f64>>>()?;
            Ok((truth, ests))
        })?;
        let truths: Vec<f64> = per_trial.iter().map(|(t, _)| *t).collect();
        for (li, &label) in spec.tau_list.iter().enumerate() {
            let estimates: Vec<f64> = per_trial.iter().map(|(_, e)| e[li]).collect();
            rows.push(aggregate(
                n,
                label,
                spec.zeta,
                estimator_name(spec.zeta),
                &estimates,
                &truths,
            ));
        }
    }
    Ok(rows)
}

/// Corpus variant: "trials" are the overlapping windows extracted from
/// the token stream, and the true functional is computed against the
/// corpus-wide empirical distribution.
pub fn run_corpus_experiment(corpus: &Corpus, spec: &ExperimentSpec) -> Result<Vec<MseRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &n in &spec.n_grid {
        let windows = extract_trajectories(corpus, n)?;
        let per_window = run_trials(windows.len(), |w| {
            let x = &windows[w];
            let truth = true_functional(corpus.empirical_pi(), x, spec.zeta);
            let ests = spec
                .tau_list
                .iter()
                .map(|&label| estimate_for_label(x, label, spec.zeta))
                .collect::<Result<Vec<f64>>>()?;
            Ok((truth, ests))
        })?;
        let truths: Vec<f64> = per_window.iter().map(|(t, _)| *t).collect();
        for (li, &label) in spec.tau_list.iter().enumerate() {
            let estimates: Vec<f64> = per_window.iter().map(|(_, e)| e[li]).collect();
            rows.push(aggregate(
                n,
                label,
                spec.zeta,
                estimator_name(spec.zeta),
                &estimates,
                &truths,
            ));
        }
    }
    Ok(rows)
}

/// Write the rows as CSV at `out` and the spec as a JSON provenance
/// sidecar next to it (same stem, .json extension).
pub fn write_results(out: &Path, spec: &ExperimentSpec, rows: &[MseRow]) -> Result<()> {
    let mut csv = String::with_capacity(rows.len() * 128);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row.to_csv_line());
        csv.push('\n');
    }
    let mut f = std::fs::File::create(out)?;
    f.write_all(csv.as_bytes())?;
    let sidecar = out.with_extension("json");
    let mut j = std::fs::File::create(&sidecar)?;
    serde_json::to_writer_pretty(&mut j, spec)?;
    j.write_all(b"\n")?;
    Ok(())
}

/// Summary of the singleton-fraction estimator's behavior on a slowly
/// moving chain: on sticky data with a huge alphabet the estimator
/// concentrates near p while the true missing mass stays near 1.
#[derive(Debug, Clone)]
pub struct BiasDemo {
    pub mean_true: f64,
    pub mean_estimate: f64,
    pub mean_abs_error: f64,
}

pub fn run_bias_demo(
    p: f64,
    k: usize,
    n: usize,
    trials: usize,
    seed: Seed,
) -> Result<BiasDemo> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let model = build_sticky_chain(p, Distribution::uniform(k)?)?;
    let per_trial = run_trials(trials, |trial| {
        let x = sample_trajectory(&model, n, derive_trial_seed(seed, n, trial))?;
        let truth = missing_mass(model.stationary(), &x);
        let est = good_turing(&x).value();
        Ok((truth, est))
    })?;
    let truths: Vec<f64> = per_trial.iter().map(|(t, _)| *t).collect();
    let ests: Vec<f64> = per_trial.iter().map(|(_, e)| *e).collect();
    let errs: Vec<f64> = per_trial.iter().map(|(t, e)| (t - e).abs()).collect();
    Ok(BiasDemo {
        mean_true: mean(&truths),
        mean_estimate: mean(&ests),
        mean_abs_error: mean(&errs),
    })
}

/// Per-n sample variance of the TRUE missing mass under the spec's
/// synthetic source.
pub fn variance_probe(spec: &ExperimentSpec) -> Result<Vec<(usize, f64)>> {
    spec.validate()?;
    let mut out = Vec::new();
    for &n in &spec.n_grid {
        let model = synthetic_model(&spec.source, n)?;
        let truths = run_trials(spec.trials, |trial| {
            let x = sample_trajectory(&model, n, derive_trial_seed(spec.base_seed, n, trial))?;
            Ok(missing_mass(model.stationary(), &x))
        })?;
        let m = mean(&truths);
        let mut sq = KahanSum::new();
        for &t in &truths {
            sq.add((t - m) * (t - m));
        }
        out.push((n, sq.value() / truths.len() as f64));
    }
    Ok(out)
}

/// Result of single-coordinate perturbation fuzzing: the largest
/// observed |estimate change| normalized by the 4*tau/n bound, plus the
/// ratio achieved by the hand-constructed near-tight sequence (exactly
/// 0.25, i.e. a change of tau/n).
#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub max_normalized: f64,
    pub witness_ratio: f64,
}

/// The near-tightness construction: symbol `x` at positions 1..tau,
/// another symbol elsewhere; flipping position 2*tau+1 between the two
/// changes the estimate by exactly tau/n.
fn witness_ratio(tau: usize, n: usize) -> Result<f64> {
    debug_assert!(n >= 3 * tau + 1);
    let mut base: Vec<u32> = vec![1; n];
    for slot in base.iter_mut().take(tau) {
        *slot = 0;
    }
    let mut flipped = base.clone();
    flipped[2 * tau] = 0;
    let a = wingit(&Trajectory::new(base)?, WindowSize(tau))?.value();
    let b = wingit(&Trajectory::new(flipped)?, WindowSize(tau))?.value();
    Ok((a - b).abs() * n as f64 / (4.0 * tau as f64))
}

pub fn bounded_difference_fuzz(trials: usize, seed: Seed) -> Result<FuzzReport> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let normalized = run_trials(trials, |trial| {
        let mut rng = crate::rng::CounterRng::new(derive_trial_seed(seed, 0x5eed, trial));
        let n = 8 + rng.next_below(120) as usize;
        let k = 1 + rng.next_below(24);
        let tau = 1 + rng.next_below(n as u64) as usize;
        let mut symbols: Vec<u32> = (0..n).map(|_| rng.next_below(k) as u32).collect();
        let before = wingit(&Trajectory::new(symbols.clone())?, WindowSize(tau))?.value();
        let i = rng.next_below(n as u64) as usize;
        symbols[i] = rng.next_below(k + 1) as u32;
        let after = wingit(&Trajectory::new(symbols)?, WindowSize(tau))?.value();
        Ok((before - after).abs() * n as f64 / (4.0 * tau as f64))
    })?;
    let max_normalized = normalized.iter().copied().fold(0.0f64, f64::max);
    Ok(FuzzReport { max_normalized, witness_ratio: witness_ratio(8, 64)? })
}
