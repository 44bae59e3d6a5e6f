//! End-to-end acceptance gate: one pass/fail line per criterion.
//!
//! Each criterion exercises a contract the library must uphold — exact
//! algebraic identities, statistical behavior on synthetic chains with
//! pinned seeds and tolerances, runtime scaling, and the bundled-corpus
//! trend. Statistical checks are deterministic given the seeds below.

use std::time::{Duration, Instant};

use wingit::estimators::{
    good_turing, good_turing_small_count, wingit, wingit_naive, wingit_skipped,
    wingit_small_count, wingit_small_count_naive, EstimateValue, WindowSize,
};
use wingit::experiments::{
    bounded_difference_fuzz, run_mse_experiment, variance_probe, ExperimentSpec, MseRow,
    SourceSpec, TauLabel, TUNED,
};
use wingit::functionals::{missing_mass, CountThreshold};
use wingit::markov::{build_sticky_chain, mixing_time, sample_trajectory, Distribution, Trajectory};
use wingit::rng::{CounterRng, Seed};
use wingit::text::{extract_trajectories, tokenize};

type Outcome = Result<String, String>;

fn random_trajectory(rng: &mut CounterRng, max_n: usize, max_k: u64) -> Trajectory {
    let n = 1 + rng.next_below(max_n as u64) as usize;
    let k = 1 + rng.next_below(max_k);
    Trajectory::new((0..n).map(|_| rng.next_below(k) as u32).collect()).unwrap()
}

/// 1. Linear-time estimator and its small-count variant agree exactly
/// with the literal-definition references on random and adversarial
/// inputs.
fn oracle_equivalence() -> Outcome {
    let mut rng = CounterRng::new(Seed(0xACCE01));
    let mut cases = 0usize;
    let mut check = |x: &Trajectory, tau: WindowSize, zeta: CountThreshold| -> Result<(), String> {
        cases += 1;
        let fast = wingit(x, tau).map_err(|e| e.to_string())?;
        let slow = wingit_naive(x, tau).map_err(|e| e.to_string())?;
        if fast != slow {
            return Err(format!(
                "wingit {}/{} != naive {}/{} (n={}, tau={})",
                fast.count(), fast.scale(), slow.count(), slow.scale(), x.len(), tau.0
            ));
        }
        let fast_sc = wingit_small_count(x, tau, zeta).map_err(|e| e.to_string())?;
        let slow_sc = wingit_small_count_naive(x, tau, zeta).map_err(|e| e.to_string())?;
        if fast_sc != slow_sc {
            return Err(format!(
                "small-count mismatch at n={}, tau={}, zeta={}",
                x.len(), tau.0, zeta.0
            ));
        }
        Ok(())
    };
    for _ in 0..500 {
        let x = random_trajectory(&mut rng, 512, 64);
        let tau = WindowSize(1 + rng.next_below(16.min(x.len() as u64)) as usize);
        let zeta = CountThreshold(rng.next_below(4) as usize);
        check(&x, tau, zeta)?;
    }
    let constant = Trajectory::new(vec![0; 64]).unwrap();
    let distinct = Trajectory::new((0..64).collect()).unwrap();
    let alternating = Trajectory::new((0..64).map(|i| i % 2).collect()).unwrap();
    for x in [&constant, &distinct, &alternating] {
        for tau in [1usize, 2, 8, 64] {
            for zeta in 0..3 {
                check(x, WindowSize(tau), CountThreshold(zeta))?;
            }
        }
    }
    Ok(format!("{cases} cases, exact agreement"))
}

/// 2. Window 1 reproduces the singleton-fraction estimator and its
/// small-count extension exactly.
fn good_turing_identities() -> Outcome {
    let mut rng = CounterRng::new(Seed(0xACCE02));
    for _ in 0..200 {
        let x = random_trajectory(&mut rng, 256, 32);
        if wingit(&x, WindowSize(1)).unwrap() != good_turing(&x) {
            return Err(format!("wingit(tau=1) mismatch at n={}", x.len()));
        }
        for zeta in 0..=4usize {
            let a = wingit_small_count(&x, WindowSize(1), CountThreshold(zeta)).unwrap();
            let b = good_turing_small_count(&x, CountThreshold(zeta));
            if a != b {
                return Err(format!("small-count mismatch at zeta={zeta}, n={}", x.len()));
            }
        }
    }
    Ok("200 trajectories, zeta 0..4, exact agreement".into())
}

/// 3. Averaging the skipped sub-estimators over all offsets recovers
/// the full estimator exactly.
fn skipped_decomposition() -> Outcome {
    let mut rng = CounterRng::new(Seed(0xACCE03));
    let mut cases = 0;
    for &n in &[96usize, 192] {
        for &tau in &[2usize, 4, 8] {
            for _ in 0..20 {
                let k = 1 + rng.next_below(24);
                let x = Trajectory::new(
                    (0..n).map(|_| rng.next_below(k) as u32).collect(),
                )
                .unwrap();
                let mut total = 0u64;
                for ell in 0..2 * tau {
                    total += wingit_skipped(&x, WindowSize(tau), ell).unwrap().count();
                }
                let avg = EstimateValue::new(total, n as u64);
                if avg != wingit(&x, WindowSize(tau)).unwrap() {
                    return Err(format!("decomposition failed at n={n}, tau={tau}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (n, tau) cases, exact recovery"))
}

/// 4. Single-coordinate substitutions never move the estimate by more
/// than 4*tau/n, and the constructed witness moves it by exactly tau/n.
fn bounded_differences() -> Outcome {
    let report = bounded_difference_fuzz(10_000, Seed(0xACCE04)).map_err(|e| e.to_string())?;
    if report.max_normalized > 1.0 {
        return Err(format!("normalized change {} > 1", report.max_normalized));
    }
    if report.witness_ratio != 0.25 {
        return Err(format!("witness ratio {} != 0.25", report.witness_ratio));
    }
    Ok(format!(
        "10000 perturbations, max normalized {:.3}, witness exactly tau/n",
        report.max_normalized
    ))
}

fn sticky_experiment(tau_list: Vec<TauLabel>, n_grid: Vec<usize>, trials: usize) -> Vec<MseRow> {
    run_mse_experiment(&ExperimentSpec {
        source: SourceSpec::Sticky { p: 0.5, alphabet_scale: 1.2 },
        n_grid,
        tau_list,
        zeta: 0,
        trials,
        base_seed: Seed(0xACCE05),
    })
    .unwrap()
}

fn row<'a>(rows: &'a [MseRow], n: usize, label: TauLabel) -> &'a MseRow {
    rows.iter()
        .find(|r| r.n == n && r.tau_label == label)
        .expect("row present")
}

/// 5. The singleton-fraction estimator stays badly biased on slowly
/// mixing chains: MSE bounded away from zero at every n.
fn gt_inconsistency_on_sticky(rows: &[MseRow]) -> Outcome {
    let mut seen = Vec::new();
    for &n in &[500usize, 2000, 8000] {
        let mse = row(rows, n, TauLabel::Fixed(1)).mse;
        if mse < 0.05 {
            return Err(format!("MSE {mse:.4} < 0.05 at n={n}"));
        }
        seen.push(format!("{mse:.3}"));
    }
    Ok(format!("tau=1 MSE stays >= 0.05: [{}]", seen.join(", ")))
}

/// 6. With a window longer than the mixing time, the MSE decays in n.
fn wingit_consistency(rows: &[MseRow]) -> Outcome {
    let early = row(rows, 500, TauLabel::Fixed(16)).mse;
    let late = row(rows, 8000, TauLabel::Fixed(16)).mse;
    if late > early / 4.0 {
        return Err(format!("tau=16 MSE {late:.5} at n=8000 vs {early:.5} at n=500"));
    }
    Ok(format!("tau=16 MSE {early:.4} -> {late:.6} (factor {:.1})", early / late))
}

/// 7. On i.i.d. data every window is consistent and leave-one-out is
/// near-optimal.
fn iid_sanity() -> Outcome {
    let rows = run_mse_experiment(&ExperimentSpec {
        source: SourceSpec::IidUniform { alphabet_scale: 1.2 },
        n_grid: vec![500, 2000, 8000],
        tau_list: vec![TauLabel::Fixed(1), TauLabel::Fixed(4), TauLabel::Fixed(16)],
        zeta: 0,
        trials: 100,
        base_seed: Seed(0xACCE07),
    })
    .unwrap();
    for tau in [1usize, 4, 16] {
        let early = row(&rows, 500, TauLabel::Fixed(tau)).mse;
        let late = row(&rows, 8000, TauLabel::Fixed(tau)).mse;
        if late > early / 4.0 {
            return Err(format!("tau={tau} decays only {early:.6} -> {late:.6}"));
        }
    }
    for &n in &[500usize, 2000, 8000] {
        let m1 = row(&rows, n, TauLabel::Fixed(1)).mse;
        let best = [1usize, 4, 16]
            .iter()
            .map(|&t| row(&rows, n, TauLabel::Fixed(t)).mse)
            .fold(f64::INFINITY, f64::min);
        if m1 > 3.0 * best {
            return Err(format!("tau=1 MSE {m1:.6} > 3x best {best:.6} at n={n}"));
        }
    }
    Ok("all windows decay >= 4x; tau=1 within 3x of best at every n".into())
}

/// 8. Small-count MSE at fixed n grows at most linearly in (zeta + 1),
/// within a factor-3 slack.
fn small_count_rate_shape() -> Outcome {
    let mut mses = Vec::new();
    for zeta in 0..=3usize {
        let rows = run_mse_experiment(&ExperimentSpec {
            source: SourceSpec::IidUniform { alphabet_scale: 1.2 },
            n_grid: vec![4000],
            tau_list: vec![TauLabel::Fixed(1)],
            zeta,
            trials: 100,
            base_seed: Seed(0xACCE08),
        })
        .unwrap();
        mses.push(rows[0].mse);
    }
    for (zeta, &mse) in mses.iter().enumerate().skip(1) {
        let allowed = 3.0 * (zeta as f64 + 1.0) * mses[0];
        if mse > allowed {
            return Err(format!(
                "zeta={zeta}: MSE {mse:.3e} > 3(zeta+1) x zeta=0 MSE {:.3e}",
                mses[0]
            ));
        }
    }
    Ok(format!(
        "MSE by zeta: [{}]",
        mses.iter().map(|m| format!("{m:.2e}")).collect::<Vec<_>>().join(", ")
    ))
}

/// 9. The true missing mass concentrates: its variance decays in n and
/// sits below the mixing-time bound.
fn variance_probe_criterion() -> Outcome {
    let spec = ExperimentSpec {
        source: SourceSpec::Sticky { p: 0.5, alphabet_scale: 1.2 },
        n_grid: vec![500, 2000, 8000],
        tau_list: vec![TauLabel::Fixed(1)],
        zeta: 0,
        trials: 200,
        base_seed: Seed(0xACCE09),
    };
    let vars = variance_probe(&spec).unwrap();
    let v500 = vars[0].1;
    let v8000 = vars[2].1;
    if v8000 > v500 / 4.0 {
        return Err(format!("variance {v500:.3e} -> {v8000:.3e}, factor < 4"));
    }
    // The sticky family's mixing time does not depend on the alphabet
    // size (beyond 2 states), so compute it on a small representative.
    let model = build_sticky_chain(0.5, Distribution::uniform(600).unwrap()).unwrap();
    let tmix = mixing_time(&model, 0.25).unwrap() as f64;
    for &(n, v) in &vars {
        let bound = 10.0 * tmix * tmix * (1.0 + n as f64 / tmix).ln() / n as f64;
        if v > bound {
            return Err(format!("Var {v:.3e} > bound {bound:.3e} at n={n}"));
        }
    }
    Ok(format!(
        "Var {v500:.2e} -> {v8000:.2e} (factor {:.0}), all below Tmix bound (Tmix={tmix})",
        v500 / v8000
    ))
}

/// 10. The data-tuned window is competitive with the best fixed one.
fn tuning_competitiveness() -> Outcome {
    let grid: Vec<usize> = std::iter::successors(Some(1usize), |t| Some(t * 2))
        .take_while(|&t| t <= 8000 / 6)
        .collect();
    let mut labels: Vec<TauLabel> = grid.iter().map(|&t| TauLabel::Fixed(t)).collect();
    labels.push(TUNED);
    let rows = run_mse_experiment(&ExperimentSpec {
        source: SourceSpec::Sticky { p: 0.5, alphabet_scale: 1.2 },
        n_grid: vec![8000],
        tau_list: labels,
        zeta: 0,
        trials: 100,
        base_seed: Seed(0xACCE10),
    })
    .unwrap();
    let tuned = row(&rows, 8000, TUNED).mse;
    let best = grid
        .iter()
        .map(|&t| row(&rows, 8000, TauLabel::Fixed(t)).mse)
        .fold(f64::INFINITY, f64::min);
    if tuned > 3.0 * best {
        return Err(format!("tuned MSE {tuned:.3e} > 3x best fixed {best:.3e}"));
    }
    Ok(format!("tuned MSE {tuned:.2e} vs best fixed {best:.2e}"))
}

fn time_wingit(x: &Trajectory, tau: WindowSize) -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..3 {
        let start = Instant::now();
        let est = wingit(x, tau).unwrap();
        let elapsed = start.elapsed();
        assert!(est.value() <= 1.0);
        best = best.min(elapsed);
    }
    best
}

/// 11. Runtime scales linearly: 10x the input costs at most 20x the time.
fn linear_runtime() -> Outcome {
    let pi = Distribution::uniform(100_000).unwrap();
    let model = build_sticky_chain(1.0, pi).unwrap();
    let small = sample_trajectory(&model, 1_000_000, Seed(0xACCE11)).unwrap();
    let large = sample_trajectory(&model, 10_000_000, Seed(0xACCE12)).unwrap();
    let t_small = time_wingit(&small, WindowSize(8));
    let t_large = time_wingit(&large, WindowSize(8));
    // Floor the denominator so sub-millisecond timer noise at n = 10^6
    // cannot fail a genuinely linear implementation.
    let denom = t_small.max(Duration::from_micros(500));
    if t_large > denom * 20 {
        return Err(format!("n=10^7 took {t_large:?}, n=10^6 took {t_small:?}"));
    }
    Ok(format!(
        "n=10^6 in {t_small:?}, n=10^7 in {t_large:?} (ratio {:.1})",
        t_large.as_secs_f64() / t_small.as_secs_f64()
    ))
}

/// 12. On the bundled corpus the mean true missing mass decreases as
/// the window length doubles (at most one inversion allowed).
fn corpus_trend() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../assets/corpus.txt");
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let corpus = tokenize(&text, &[]).map_err(|e| e.to_string())?;
    let mut means = Vec::new();
    let mut n = 600usize;
    while n <= 19200 {
        let windows = extract_trajectories(&corpus, n).map_err(|e| e.to_string())?;
        let mean: f64 = windows
            .iter()
            .map(|w| missing_mass(corpus.empirical_pi(), w))
            .sum::<f64>()
            / windows.len() as f64;
        means.push((n, mean));
        n *= 2;
    }
    let inversions = means.windows(2).filter(|w| w[1].1 >= w[0].1).count();
    if inversions > 1 {
        return Err(format!("{inversions} inversions in {means:?}"));
    }
    Ok(format!(
        "mean missing mass {:.3} -> {:.3} over doubling grid, {inversions} inversions",
        means.first().unwrap().1,
        means.last().unwrap().1
    ))
}

#[test]
fn acceptance() {
    let shared_sticky = sticky_experiment(
        vec![TauLabel::Fixed(1), TauLabel::Fixed(16)],
        vec![500, 2000, 8000],
        100,
    );
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("good-turing identities", Box::new(good_turing_identities)),
        ("skipped decomposition", Box::new(skipped_decomposition)),
        ("bounded differences", Box::new(bounded_differences)),
        ("gt inconsistency on sticky chains", {
            let rows = shared_sticky.clone();
            Box::new(move || gt_inconsistency_on_sticky(&rows))
        }),
        ("windowed consistency", {
            let rows = shared_sticky;
            Box::new(move || wingit_consistency(&rows))
        }),
        ("iid sanity", Box::new(iid_sanity)),
        ("small-count rate shape", Box::new(small_count_rate_shape)),
        ("variance probe", Box::new(variance_probe_criterion)),
        ("tuning competitiveness", Box::new(tuning_competitiveness)),
        ("linear runtime", Box::new(linear_runtime)),
        ("corpus trend", Box::new(corpus_trend)),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{elapsed:.1?}]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{elapsed:.1?}]", i + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
