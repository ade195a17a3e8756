//! Acceptance gate: every release criterion as one test, each printing a
//! single `acceptance N <name>: PASS` / `FAIL` line.
//!
//! Criteria 1-3 pin the estimator against naive transcriptions, 4-6 check
//! calibration (size, limit law, spectral vs empirical quantiles), 7 checks
//! desk-scale power behavior, and 8 checks byte-level determinism across
//! thread counts.

use gmmd_cli::harness::{
    emit_csv, run_power_experiment, ExperimentConfig, Method, PowerCurve,
};
use gmmd_core::calibration::{
    estimate_spectrum, simulate_limit_law, LimitLawConfig, Spectrum, Truncation,
};
use gmmd_core::estimator::{gmmd_statistic, mmd2_unbiased, GroupedSamples};
use gmmd_core::kernel::KernelSpec;
use gmmd_core::samplers::{case_config, DistributionSpec};
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

fn report(number: usize, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {number} {name}: {verdict} ({detail})");
    assert!(pass, "acceptance {number} {name} failed: {detail}");
}

fn normal_points(rng: &mut ChaCha12Rng, n: usize, dim: usize, shift: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    shift + z
                })
                .collect()
        })
        .collect()
}

/// Naive transcription of the pairwise estimator: plain f64 quadruple loops,
/// no shared machinery beyond kernel evaluation.
fn naive_gamma(kernel: &KernelSpec, a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut within_a = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            if i != j {
                within_a += kernel.eval(&a[i], &a[j]).unwrap();
            }
        }
    }
    let mut within_b = 0.0;
    for i in 0..b.len() {
        for j in 0..b.len() {
            if i != j {
                within_b += kernel.eval(&b[i], &b[j]).unwrap();
            }
        }
    }
    let mut cross = 0.0;
    for x in a {
        for y in b {
            cross += kernel.eval(x, y).unwrap();
        }
    }
    within_a / (na * (na - 1.0)) + within_b / (nb * (nb - 1.0)) - 2.0 * cross / (na * nb)
}

/// Naive combined statistic: the full ordered double sum with empirical
/// weights, each pairwise term recomputed from scratch.
fn naive_t_hat(kernel: &KernelSpec, groups: &[Vec<Vec<f64>>]) -> f64 {
    let n: usize = groups.iter().map(Vec::len).sum();
    let mut t = 0.0;
    for j in 0..groups.len() {
        for l in 0..groups.len() {
            if l != j {
                let weight = groups[l].len() as f64 / n as f64;
                t += weight * naive_gamma(kernel, &groups[j], &groups[l]);
            }
        }
    }
    t
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() as f64 * q).ceil() as usize).saturating_sub(1);
    sorted[idx.min(sorted.len() - 1)]
}

#[test]
fn a1_statistic_matches_naive_transcription() {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let k = rng.gen_range(2..=4usize);
        let dim = rng.gen_range(1..=3usize);
        let gamma = rng.gen_range(0.1..3.0);
        let kernel = KernelSpec::gaussian(gamma).unwrap();
        let groups: Vec<Vec<Vec<f64>>> = (0..k)
            .map(|j| {
                let n = rng.gen_range(2..=6usize);
                let shift = j as f64 * rng.gen_range(0.0..1.5);
                normal_points(&mut rng, n, dim, shift)
            })
            .collect();
        let expected = naive_t_hat(&kernel, &groups);
        let data = GroupedSamples::new(groups).unwrap();
        let got = gmmd_statistic(&kernel, &data).unwrap().t_hat;
        worst = worst.max((got - expected).abs());
    }
    report(
        1,
        "statistic matches naive transcription",
        worst <= 1e-12,
        &format!("max |difference| = {worst:.3e} over 200 instances"),
    );
}

#[test]
fn a2_pairwise_estimator_is_unbiased_under_the_null() {
    let kernel = KernelSpec::gaussian(2.0).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(202);
    let mut gammas = Vec::with_capacity(5000);
    for _ in 0..5000 {
        let a = normal_points(&mut rng, 20, 1, 0.0);
        let b = normal_points(&mut rng, 20, 1, 0.0);
        gammas.push(mmd2_unbiased(&kernel, &a, &b).unwrap());
    }
    let (mean, se) = mean_and_se(&gammas);
    report(
        2,
        "pairwise estimator unbiased under the null",
        mean.abs() <= 3.0 * se,
        &format!("mean = {mean:.3e}, 3 SE = {:.3e}", 3.0 * se),
    );
}

#[test]
fn a3_two_group_statistic_collapses_to_the_pairwise_estimator() {
    let mut rng = ChaCha12Rng::seed_from_u64(303);
    let mut all_bitwise = true;
    for _ in 0..100 {
        let dim = rng.gen_range(1..=3usize);
        let gamma = rng.gen_range(0.2..3.0);
        let kernel = KernelSpec::gaussian(gamma).unwrap();
        let na = rng.gen_range(2..=25usize);
        let nb = rng.gen_range(2..=25usize);
        let a = normal_points(&mut rng, na, dim, 0.0);
        let b = normal_points(&mut rng, nb, dim, 0.7);
        let gamma12 = mmd2_unbiased(&kernel, &a, &b).unwrap();
        let data = GroupedSamples::new(vec![a, b]).unwrap();
        let t = gmmd_statistic(&kernel, &data).unwrap().t_hat;
        all_bitwise &= t.to_bits() == gamma12.to_bits();
    }
    report(
        3,
        "two-group statistic equals pairwise estimator bitwise",
        all_bitwise,
        "100 random two-group datasets",
    );
}

fn null_size_config() -> ExperimentConfig {
    ExperimentConfig {
        case: "null".into(),
        distributions: vec![
            DistributionSpec::Normal {
                mean: 0.0,
                variance: 1.0,
            };
            3
        ],
        grid: vec![vec![50, 50, 50]],
        methods: vec![Method::GmmdPermutation],
        alpha: 0.05,
        replications: 500,
        kernel: KernelSpec::gaussian(2.0).unwrap(),
        permutation_b: 200,
        subsampling_b: 199,
        subsample_fraction: 0.5,
        spectral_draws: 10_000,
        master_seed: 404,
    }
}

#[test]
fn a4_permutation_test_holds_its_size() {
    let curve = run_power_experiment(&null_size_config()).unwrap();
    let rate = curve.rows[0].power;
    report(
        4,
        "permutation test holds its size",
        (0.03..=0.075).contains(&rate),
        &format!(
            "rejection rate {rate} over {} null replicates at alpha 0.05",
            curve.rows[0].replications
        ),
    );
}

#[test]
fn a5_limit_law_moments_and_two_group_reduction() {
    // mean 0 across assorted configurations
    let configs: [(Vec<f64>, Vec<f64>); 3] = [
        (vec![0.5, 0.5], vec![1.0]),
        (vec![0.3, 0.3, 0.4], vec![0.6, 0.3, 0.1]),
        (vec![0.1, 0.2, 0.3, 0.4], vec![0.5, 0.25, 0.125, 0.0625]),
    ];
    let mut mean_ok = true;
    let mut mean_detail = String::new();
    for (i, (rho, eigs)) in configs.iter().enumerate() {
        let spectrum =
            Spectrum::new(eigs.clone(), Truncation::Threshold(0.0), eigs.len()).unwrap();
        let config =
            LimitLawConfig::new(rho.clone(), spectrum, 100_000, 500 + i as u64).unwrap();
        let draws = simulate_limit_law(&config);
        let (mean, se) = mean_and_se(&draws);
        mean_ok &= mean.abs() <= 3.0 * se;
        mean_detail.push_str(&format!("k={} mean {mean:.3e} (3SE {:.3e}); ", rho.len(), 3.0 * se));
    }

    // two-group reduction: general simulator vs an independent draw of the
    // closed two-group form lambda * ((Y1/sqrt(rho1) - Y2/sqrt(rho2))^2 - 1/(rho1 rho2))
    let rho = [0.35, 0.65];
    let eigs = [0.7, 0.2, 0.05];
    let spectrum = Spectrum::new(eigs.to_vec(), Truncation::Threshold(0.0), 3).unwrap();
    let config = LimitLawConfig::new(rho.to_vec(), spectrum, 100_000, 510).unwrap();
    let mut general = simulate_limit_law(&config);
    let mut rng = ChaCha12Rng::seed_from_u64(511);
    let constant = 1.0 / (rho[0] * rho[1]);
    let mut closed: Vec<f64> = (0..100_000)
        .map(|_| {
            eigs.iter()
                .map(|lambda| {
                    let y1: f64 = StandardNormal.sample(&mut rng);
                    let y2: f64 = StandardNormal.sample(&mut rng);
                    let q = y1 / rho[0].sqrt() - y2 / rho[1].sqrt();
                    lambda * (q * q - constant)
                })
                .sum()
        })
        .collect();
    let d = ks_two_sample(&mut general, &mut closed);
    // two-sample KS critical value at alpha = 0.01, n = m = 1e5
    let d_crit = 1.6276 * (2.0 / 100_000.0f64).sqrt();
    report(
        5,
        "limit law has mean zero and the two-group reduction",
        mean_ok && d <= d_crit,
        &format!("{mean_detail}KS {d:.5} vs critical {d_crit:.5}"),
    );
}

#[test]
fn a6_spectral_quantile_tracks_the_empirical_null() {
    let kernel = KernelSpec::gaussian(2.0).unwrap();
    let sizes = [200usize, 200, 200];

    // spectrum from one null dataset, as the spectral calibration would use
    let mut rng = ChaCha12Rng::seed_from_u64(600);
    let groups: Vec<Vec<Vec<f64>>> =
        sizes.iter().map(|&n| normal_points(&mut rng, n, 1, 0.0)).collect();
    let data = GroupedSamples::new(groups).unwrap();
    let spectrum =
        estimate_spectrum(&kernel, &data.pooled_points(), Truncation::default()).unwrap();
    let config = LimitLawConfig::new(data.weights(), spectrum, 200_000, 601).unwrap();
    let mut sim = simulate_limit_law(&config);
    sim.sort_by(f64::total_cmp);
    let spectral_95 = percentile(&sim, 0.95);

    // empirical 95th percentile of the scaled statistic over fresh null data
    let mut stats: Vec<f64> = (0..1000)
        .map(|_| {
            let groups: Vec<Vec<Vec<f64>>> =
                sizes.iter().map(|&n| normal_points(&mut rng, n, 1, 0.0)).collect();
            let data = GroupedSamples::new(groups).unwrap();
            gmmd_statistic(&kernel, &data).unwrap().scaled
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let empirical_95 = percentile(&stats, 0.95);

    let rel = (spectral_95 - empirical_95).abs() / empirical_95.abs();
    report(
        6,
        "spectral 95th percentile tracks the empirical null",
        rel <= 0.15,
        &format!("spectral {spectral_95:.5}, empirical {empirical_95:.5}, relative gap {rel:.3}"),
    );
}

fn case_power_config(case: u8, with_kw: bool) -> ExperimentConfig {
    let mut methods = vec![Method::GmmdPermutation];
    if with_kw {
        methods.push(Method::KruskalWallis);
    }
    ExperimentConfig {
        case: format!("case-{case}"),
        distributions: case_config(case).unwrap().to_vec(),
        grid: (1..=5).map(|i| vec![20 * i; 3]).collect(),
        methods,
        alpha: 0.05,
        replications: 300,
        kernel: KernelSpec::gaussian(2.0).unwrap(),
        permutation_b: 199,
        subsampling_b: 199,
        subsample_fraction: 0.5,
        spectral_draws: 10_000,
        master_seed: 700 + case as u64,
    }
}

fn method_powers(curve: &PowerCurve, method: Method) -> Vec<(f64, usize)> {
    curve
        .rows
        .iter()
        .filter(|r| r.method == method)
        .map(|r| (r.power, r.replications))
        .collect()
}

fn nondecreasing_within_noise(points: &[(f64, usize)]) -> bool {
    points.windows(2).all(|w| {
        let (p0, n0) = w[0];
        let (p1, n1) = w[1];
        let se0 = (p0 * (1.0 - p0) / n0 as f64).sqrt();
        let se1 = (p1 * (1.0 - p1) / n1 as f64).sqrt();
        p1 >= p0 - 2.0 * (se0 * se0 + se1 * se1).sqrt()
    })
}

#[test]
fn a7_power_behaves_across_the_four_cases() {
    let mut all_ok = true;
    let mut detail = String::new();
    for case in 1..=4u8 {
        let curve = run_power_experiment(&case_power_config(case, case == 2)).unwrap();
        let gmmd = method_powers(&curve, Method::GmmdPermutation);
        let monotone = nondecreasing_within_noise(&gmmd);
        all_ok &= monotone;
        let powers: Vec<f64> = gmmd.iter().map(|&(p, _)| p).collect();
        detail.push_str(&format!("case {case} power {powers:.3?} monotone {monotone}; "));
        if case == 2 || case == 4 {
            let top = powers[powers.len() - 1];
            all_ok &= top > 0.8;
            detail.push_str(&format!("top {top} > 0.8; "));
        }
        if case == 2 {
            let kw = method_powers(&curve, Method::KruskalWallis);
            let gap = powers[2] - kw[2].0;
            all_ok &= gap >= 0.2;
            detail.push_str(&format!("gap over rank test at n_j=60: {gap:.3}; "));
        }
    }
    report(7, "power behaves across the four cases", all_ok, detail.trim_end());
}

#[test]
fn a8_csv_output_is_identical_across_thread_counts() {
    let config = case_power_config(4, false);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_power_experiment(&config))
        .unwrap();
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_power_experiment(&config))
        .unwrap();
    let csv_single = emit_csv(&single).unwrap();
    let csv_many = emit_csv(&many).unwrap();
    report(
        8,
        "CSV output identical on 1 and 4 threads",
        csv_single == csv_many,
        &format!("{} bytes each", csv_single.len()),
    );
}
