//! Monte Carlo property tests for the test statistics: target-variable
//! moments, feedback behavior of the TAB recursion, and harness-level
//! calibration. Everything is seeded; the statistical bounds leave four-sigma
//! margins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tabdev::matrix::Matrix;
use tabdev::sim::{
    ar1_covariance, cholesky_factor, empirical_rejection_rate, generate_sample, MuSpec, NoiseKind,
    SigmaSpec, SimulationConfig, TestMode,
};
use tabdev::tab::{compute_targets, estimate_moments, run_tab, split_sample, NuisanceEstimates};
use tabdev::two_sample::{
    compute_delta0, compute_pair_targets, two_sample_deviation_test, TwoSampleConfig,
};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn stderr_of_mean(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

/// E[X_t] = ||mu||^2 - d0^2; with mu = 0 and d0 = 1 the target mean is -1.
#[test]
fn target_mean_matches_theory_under_the_null_mean() {
    let (n, t1, t2, d0) = (50, 100, 100, 1.0);
    let gamma = Matrix::identity(n);
    let mu = vec![0.0; n];
    let mut per_rep = Vec::with_capacity(100);
    for rep in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + rep);
        let head = generate_sample(&mu, &gamma, t1, NoiseKind::Gaussian, &mut rng).unwrap();
        let tail = generate_sample(&mu, &gamma, t2, NoiseKind::Gaussian, &mut rng).unwrap();
        let targets = compute_targets(&head, &tail, d0).unwrap();
        per_rep.push(mean(&targets));
    }
    let m = mean(&per_rep);
    let se = stderr_of_mean(&per_rep);
    assert!(
        (m - (-1.0)).abs() <= 4.0 * se,
        "pooled target mean {m} vs -1 (stderr {se})"
    );
}

/// tau_hat is within sampling noise of tau_1 under the grid design.
#[test]
fn tau_hat_tracks_tau_under_the_grid_design() {
    let (n, t, d0) = (100, 200, 1.2);
    let tau_true = 1.0 - d0 * d0;
    let gamma = cholesky_factor(&ar1_covariance(n, 0.5).unwrap()).unwrap();
    let mu = vec![1.0 / (n as f64).sqrt(); n];
    let mut taus = Vec::with_capacity(100);
    for rep in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + rep);
        let data = generate_sample(&mu, &gamma, t, NoiseKind::Gaussian, &mut rng).unwrap();
        let (head, tail) = split_sample(&data, 0.5).unwrap();
        let targets = compute_targets(&head, &tail, d0).unwrap();
        taus.push(estimate_moments(&targets).unwrap().tau_hat);
    }
    let m = mean(&taus);
    let se = stderr_of_mean(&taus);
    assert!(
        (m - tau_true).abs() <= 4.0 * se,
        "tau_hat mean {m} vs {tau_true} (stderr {se})"
    );
}

/// Negative feedback keeps the whole trajectory inside a six-sigma tube when
/// the target mean is positive; positive feedback blows past the same bound
/// when it is negative.
#[test]
fn feedback_regimes_of_the_tab_recursion() {
    let t2 = 10_000usize;
    let runs = 200u64;
    let run_once = |m: f64, seed: u64| -> (f64, f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let targets: Vec<f64> = (0..t2)
            .map(|_| m + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let nuisance = estimate_moments(&targets).unwrap();
        let traj = run_tab(&targets, &nuisance).unwrap();
        let scale = 1.0 / t2 as f64 + 1.0 / (t2 as f64 * nuisance.scale_sq()).sqrt();
        let bound = 6.0 * scale * (t2 as f64).sqrt();
        let max_abs = traj.partials.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        (max_abs, traj.final_stat.abs(), bound)
    };

    let mut contained = 0;
    for rep in 0..runs {
        let (max_abs, _, bound) = run_once(0.5, 3000 + rep);
        if max_abs < bound {
            contained += 1;
        }
    }
    assert!(
        contained >= 198,
        "H0-side trajectories inside the tube: {contained}/200"
    );

    let mut escaped = 0;
    for rep in 0..runs {
        let (_, final_abs, bound) = run_once(-0.5, 4000 + rep);
        if final_abs > bound {
            escaped += 1;
        }
    }
    assert!(
        escaped >= 190,
        "H1-side final statistics beyond the tube: {escaped}/200"
    );
}

/// Rejection-rate spot checks at the corners of the (100, 200) design.
#[test]
fn one_sample_rejection_rate_corners() {
    let cfg = SimulationConfig::table1_cell(100, 200, vec![0.5, 1.0, 1.5], 200, 555);
    let grid = empirical_rejection_rate(&cfg, 0.05).unwrap();
    assert!(
        grid.rows[0].rejection_rate <= 0.03,
        "d0=0.5: {}",
        grid.rows[0].rejection_rate
    );
    assert!(
        (0.02..=0.25).contains(&grid.rows[1].rejection_rate),
        "d0=1.0: {}",
        grid.rows[1].rejection_rate
    );
    assert!(
        grid.rows[2].rejection_rate >= 0.95,
        "d0=1.5: {}",
        grid.rows[2].rejection_rate
    );
}

/// Empirical rejection rate is nondecreasing in d0 up to one stderr of slack.
#[test]
fn rejection_rate_monotone_in_d0() {
    let d0s: Vec<f64> = (0..11).map(|i| 0.5 + 0.1 * i as f64).collect();
    let cfg = SimulationConfig::table1_cell(50, 100, d0s, 100, 31337);
    let grid = empirical_rejection_rate(&cfg, 0.05).unwrap();
    for w in grid.rows.windows(2) {
        let slack = w[0].stderr.max(w[1].stderr).max(1e-6);
        assert!(
            w[1].rejection_rate >= w[0].rejection_rate - slack,
            "rate dropped from {} (d0={}) to {} (d0={})",
            w[0].rejection_rate,
            w[0].d0,
            w[1].rejection_rate,
            w[1].d0
        );
    }
}

/// Gaussian and Rademacher noise lead to nearly the same power (the theory
/// only needs bounded fourth moments).
#[test]
fn noise_robustness_at_full_power() {
    let mut cfg = SimulationConfig::table1_cell(100, 200, vec![1.5], 100, 777);
    let gaussian = empirical_rejection_rate(&cfg, 0.05).unwrap().rows[0].rejection_rate;
    cfg.noise = NoiseKind::Rademacher;
    let rademacher = empirical_rejection_rate(&cfg, 0.05).unwrap().rows[0].rejection_rate;
    assert!(
        (gaussian - rademacher).abs() <= 0.1,
        "gaussian {gaussian} vs rademacher {rademacher}"
    );
}

/// E||Delta0 - (mu1 - mu2)||^2 = Tr(Sigma1)/m1 + Tr(Sigma2)/m2.
#[test]
fn delta0_error_matches_the_trace_identity() {
    let n = 40;
    let (m1, m2) = (60, 45);
    let sigma = ar1_covariance(n, 0.3).unwrap();
    let gamma = cholesky_factor(&sigma).unwrap();
    let mu1: Vec<f64> = (0..n).map(|j| (j as f64 / n as f64) - 0.5).collect();
    let mu2 = vec![0.1; n];
    let expect = sigma.trace() / m1 as f64 + sigma.trace() / m2 as f64;
    let mut errs = Vec::with_capacity(200);
    for rep in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + rep);
        let x = generate_sample(&mu1, &gamma, m1, NoiseKind::Gaussian, &mut rng).unwrap();
        let z = generate_sample(&mu2, &gamma, m2, NoiseKind::Gaussian, &mut rng).unwrap();
        let d0v = compute_delta0(&x, &z).unwrap();
        let err: f64 = d0v
            .iter()
            .zip(mu1.iter().zip(&mu2))
            .map(|(d, (a, b))| (d - (a - b)) * (d - (a - b)))
            .sum();
        errs.push(err);
    }
    let m = mean(&errs);
    assert!(
        (m - expect).abs() <= 0.1 * expect,
        "mean squared error {m} vs {expect}"
    );
}

/// E[Y_i] = ||mu1 - mu2||^2 - d0^2.
#[test]
fn pair_target_mean_matches_theory() {
    let n = 30;
    let (m_head, n0, d0) = (80usize, 50usize, 1.1f64);
    let gamma = Matrix::identity(n);
    let mu1: Vec<f64> = vec![1.2 / (n as f64).sqrt(); n];
    let mu2 = vec![0.0; n];
    let want = 1.2f64 * 1.2 - d0 * d0;
    let mut per_rep = Vec::with_capacity(200);
    for rep in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(6000 + rep);
        let x_head = generate_sample(&mu1, &gamma, m_head, NoiseKind::Gaussian, &mut rng).unwrap();
        let z_head = generate_sample(&mu2, &gamma, m_head, NoiseKind::Gaussian, &mut rng).unwrap();
        let x_tail = generate_sample(&mu1, &gamma, n0, NoiseKind::Gaussian, &mut rng).unwrap();
        let z_tail = generate_sample(&mu2, &gamma, n0, NoiseKind::Gaussian, &mut rng).unwrap();
        let delta0 = compute_delta0(&x_head, &z_head).unwrap();
        let y = compute_pair_targets(&x_tail, &z_tail, &delta0, d0).unwrap();
        per_rep.push(mean(&y));
    }
    let m = mean(&per_rep);
    let se = stderr_of_mean(&per_rep);
    assert!(
        (m - want).abs() <= 4.0 * se,
        "mean Y {m} vs {want} (stderr {se})"
    );
}

/// Two groups from the same distribution with d0 = 1 reject the deviation
/// hypothesis nearly always (the full-power regime).
#[test]
fn two_sample_full_power_for_identical_groups() {
    let n = 60;
    let (m1, m2, n0) = (150, 150, 100);
    let gamma = cholesky_factor(&ar1_covariance(n, 0.5).unwrap()).unwrap();
    let mu = vec![0.0; n];
    let cfg = TwoSampleConfig::new(1.0, 0.05, n0);
    let mut rejections = 0;
    for rep in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + rep);
        let x = generate_sample(&mu, &gamma, m1, NoiseKind::Gaussian, &mut rng).unwrap();
        let z = generate_sample(&mu, &gamma, m2, NoiseKind::Gaussian, &mut rng).unwrap();
        let (res, _) = two_sample_deviation_test(&x, &z, &cfg).unwrap();
        if res.reject_h0 {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / 200.0;
    assert!(rate >= 0.9, "rejection rate {rate}");
}

/// Two-sample mode of the harness: same-distribution groups at d0 = 1 reject,
/// well-separated groups at small d0 do not.
#[test]
fn harness_two_sample_mode() {
    let cfg = SimulationConfig {
        n: 40,
        t: 0,
        d0_values: vec![1.0],
        replications: 100,
        seed: 808,
        mu_spec: MuSpec::Zero,
        sigma_spec: SigmaSpec::Ar1 { rho: 0.5 },
        noise: NoiseKind::Gaussian,
        mode: TestMode::TwoSample {
            n0: 60,
            m1: 120,
            m2: 110,
        },
        split_fraction: 0.5,
    };
    let grid = empirical_rejection_rate(&cfg, 0.05).unwrap();
    assert!(
        grid.rows[0].rejection_rate >= 0.9,
        "rate {}",
        grid.rows[0].rejection_rate
    );

    let cfg = SimulationConfig {
        mu_spec: MuSpec::UniformUnitNorm,
        d0_values: vec![0.5],
        ..cfg
    };
    let grid = empirical_rejection_rate(&cfg, 0.05).unwrap();
    assert!(
        grid.rows[0].rejection_rate <= 0.05,
        "rate {}",
        grid.rows[0].rejection_rate
    );
}

/// The recursion identity survives adversarial nuisance values.
#[test]
fn recursion_identity_with_custom_nuisance() {
    let targets: Vec<f64> = (0..101)
        .map(|i| ((i * 7919 % 997) as f64 / 499.0) - 1.0)
        .collect();
    for (tau, s2) in [(0.0, 1.0), (3.0, 0.0), (-0.7, 2.5), (1e-3, 1e-3)] {
        let nuisance = NuisanceEstimates {
            tau_hat: tau,
            sigma2_hat: s2,
        };
        let traj = run_tab(&targets, &nuisance).unwrap();
        let t2 = targets.len() as f64;
        let weighted: f64 = traj
            .thetas
            .iter()
            .zip(&targets)
            .map(|(&th, &x)| th as f64 * x)
            .sum();
        let closed = weighted / t2 + weighted / (t2 * nuisance.scale_sq()).sqrt();
        assert!(
            (traj.final_stat - closed).abs() <= 1e-10 * closed.abs().max(1.0),
            "tau={tau}, s2={s2}"
        );
    }
}
