//! One-sample deviation test of `||mu - mu0||_2` against a radius `d0`.
//!
//! The pipeline: subtract the reference mean, split the sample into a head of
//! `T1` rows and a tail of `T2` rows, form the target variables
//! `X_t = mean(head)' x_{T1+t} - d0^2` (each has expectation
//! `||mu||^2 - d0^2` and O(1) variance), estimate the nuisance moments from
//! the targets, and run the sequential two-armed-bandit recursion
//!
//! ```text
//! M_t = M_{t-1} + theta_t * X_t * (1/T2 + 1/sqrt(T2 * (tau^2 + sigma^2)))
//! ```
//!
//! where `theta_1 = +1` and `theta_t` flips against the sign of `M_{t-1}`.
//! Under the null (`||mu|| > d0`) the recursion is a negative feedback loop
//! that keeps `M_t` near zero; under the alternative it diverges. The final
//! `M_{T2}` is compared against the two-sided normal critical value.

use crate::error::{Error, Result};
use crate::matrix::SampleMatrix;
use crate::normal;
use serde::Serialize;

/// Scale estimates below this are treated as degenerate (constant targets).
pub(crate) const MIN_SCALE: f64 = 1e-12;

/// Configuration of the one-sample deviation test.
#[derive(Debug, Clone)]
pub struct OneSampleConfig {
    /// Deviation radius `d0 > 0`, in the units of the data.
    pub d0: f64,
    /// Reference mean; `None` means the zero vector.
    pub mu0: Option<Vec<f64>>,
    /// Two-sided significance level in (0,1).
    pub alpha: f64,
    /// Head fraction `c1 = T1/T` in (0,1).
    pub split_fraction: f64,
}

impl OneSampleConfig {
    pub fn new(d0: f64, alpha: f64) -> Self {
        OneSampleConfig {
            d0,
            mu0: None,
            alpha,
            split_fraction: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.d0.is_finite() || self.d0 <= 0.0 {
            return Err(Error::config(format!("d0 must be > 0, got {}", self.d0)));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::config(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if !self.split_fraction.is_finite()
            || self.split_fraction <= 0.0
            || self.split_fraction >= 1.0
        {
            return Err(Error::config(format!(
                "split fraction must lie in (0,1), got {}",
                self.split_fraction
            )));
        }
        Ok(())
    }
}

/// Moment estimates of the target variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuisanceEstimates {
    /// Mean of the targets (estimates `||mu||^2 - d0^2`).
    pub tau_hat: f64,
    /// Variance of the targets with the population divisor, clamped at 0.
    pub sigma2_hat: f64,
}

impl NuisanceEstimates {
    /// `tau^2 + sigma^2`, the squared scale of the statistic's second term.
    pub fn scale_sq(&self) -> f64 {
        self.tau_hat * self.tau_hat + self.sigma2_hat
    }
}

/// Full audit trail of one TAB run.
#[derive(Debug, Clone, PartialEq)]
pub struct TabTrajectory {
    /// Control signs `theta_t` in {+1, -1}; `thetas[0] == +1`.
    pub thetas: Vec<i8>,
    /// Partial statistics `M_t`.
    pub partials: Vec<f64>,
    /// Target variables `X_t`.
    pub targets: Vec<f64>,
    /// Moment estimates the statistic was scaled by.
    pub nuisance: NuisanceEstimates,
    /// Final statistic `M_{T2}`.
    pub final_stat: f64,
}

/// Outcome of a deviation test.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    /// The TAB statistic.
    pub statistic: f64,
    /// `P(|N(0,1)| > |statistic|)`.
    pub p_value: f64,
    /// True iff `|statistic| > critical_value`, i.e. the deviation hypothesis
    /// `||mu - mu0|| > d0` is rejected in favor of `<= d0`.
    pub reject_h0: bool,
    /// Two-sided normal critical value `z_{alpha/2}`.
    pub critical_value: f64,
    /// Echo of the tested radius.
    pub d0: f64,
    /// Echo of the significance level.
    pub alpha: f64,
}

impl TestResult {
    pub(crate) fn from_statistic(statistic: f64, d0: f64, alpha: f64) -> Self {
        let critical_value = normal::quantile(1.0 - alpha / 2.0);
        TestResult {
            statistic,
            p_value: 2.0 * normal::cdf(-statistic.abs()),
            reject_h0: statistic.abs() > critical_value,
            critical_value,
            d0,
            alpha,
        }
    }
}

/// Splits a sample into a head of `T1 = floor(split_fraction * T)` rows and a
/// tail with the remaining `T2` rows, preserving row order.
pub fn split_sample(s: &SampleMatrix, split_fraction: f64) -> Result<(SampleMatrix, SampleMatrix)> {
    if !split_fraction.is_finite() || split_fraction <= 0.0 || split_fraction >= 1.0 {
        return Err(Error::config(format!(
            "split fraction must lie in (0,1), got {split_fraction}"
        )));
    }
    let t = s.rows();
    let t1 = (split_fraction * t as f64).floor() as usize;
    let t2 = t - t1;
    if t1 < 1 || t2 < 2 {
        return Err(Error::config(format!(
            "degenerate split: T={t} with fraction {split_fraction} gives T1={t1}, T2={t2} (need T1 >= 1, T2 >= 2)"
        )));
    }
    Ok((s.slice_rows(0, t1), s.slice_rows(t1, t)))
}

/// Target variables `X_t = mean(head)' tail_t - d0^2` for `t = 1..T2`.
///
/// Algebraically identical to averaging the inner products against every head
/// row, but O((T1+T2) n) instead of O(T1 T2 n).
pub fn compute_targets(head: &SampleMatrix, tail: &SampleMatrix, d0: f64) -> Result<Vec<f64>> {
    if head.cols() != tail.cols() {
        return Err(Error::dim(format!(
            "head has dimension {}, tail has {}",
            head.cols(),
            tail.cols()
        )));
    }
    let mean = head.col_means();
    let d0sq = d0 * d0;
    let mut targets = Vec::with_capacity(tail.rows());
    for t in 0..tail.rows() {
        let row = tail.row(t);
        let mut dot = 0.0;
        for j in 0..row.len() {
            dot += mean[j] * row[j];
        }
        targets.push(dot - d0sq);
    }
    Ok(targets)
}

/// First and second moments of the targets, population divisor `1/T2`.
pub fn estimate_moments(targets: &[f64]) -> Result<NuisanceEstimates> {
    if targets.len() < 2 {
        return Err(Error::config(format!(
            "moment estimation needs at least 2 targets, got {}",
            targets.len()
        )));
    }
    let n = targets.len() as f64;
    let tau_hat = targets.iter().sum::<f64>() / n;
    let second = targets.iter().map(|x| x * x).sum::<f64>() / n;
    let sigma2_hat = (second - tau_hat * tau_hat).max(0.0);
    Ok(NuisanceEstimates {
        tau_hat,
        sigma2_hat,
    })
}

/// Runs the TAB recursion over the targets and records the whole trajectory.
pub fn run_tab(targets: &[f64], nuisance: &NuisanceEstimates) -> Result<TabTrajectory> {
    if targets.is_empty() {
        return Err(Error::config(
            "TAB recursion needs at least one target".to_string(),
        ));
    }
    let scale_sq = nuisance.scale_sq();
    // Written to also reject NaN.
    if !scale_sq.is_finite() || scale_sq <= MIN_SCALE {
        return Err(Error::DegenerateScale(format!(
            "tau_hat^2 + sigma2_hat = {scale_sq:e} (constant targets?)"
        )));
    }
    let t2 = targets.len() as f64;
    let increment = 1.0 / t2 + 1.0 / (t2 * scale_sq).sqrt();
    let mut thetas = Vec::with_capacity(targets.len());
    let mut partials = Vec::with_capacity(targets.len());
    let mut m = 0.0f64;
    for &x in targets {
        // theta_1 = +1 (M_0 = 0 hits the <= 0 branch); afterwards the sign
        // opposes the current partial statistic, ties resolved to +1.
        let theta: i8 = if m <= 0.0 { 1 } else { -1 };
        m += theta as f64 * x * increment;
        thetas.push(theta);
        partials.push(m);
    }
    Ok(TabTrajectory {
        thetas,
        partials,
        targets: targets.to_vec(),
        nuisance: *nuisance,
        final_stat: m,
    })
}

/// Full one-sample deviation test: `H0: ||mu - mu0|| > d0` against
/// `H1: ||mu - mu0|| <= d0`.
pub fn one_sample_deviation_test(
    s: &SampleMatrix,
    cfg: &OneSampleConfig,
) -> Result<(TestResult, TabTrajectory)> {
    cfg.validate()?;
    if s.cols() == 0 {
        return Err(Error::dim("samples must have dimension n >= 1".to_string()));
    }
    if s.rows() < 4 {
        return Err(Error::config(format!(
            "need T >= 4 observations, got {}",
            s.rows()
        )));
    }
    let shifted;
    let data = match &cfg.mu0 {
        Some(mu0) => {
            shifted = s.shift_rows(mu0)?;
            &shifted
        }
        None => s,
    };
    let (head, tail) = split_sample(data, cfg.split_fraction)?;
    let targets = compute_targets(&head, &tail, cfg.d0)?;
    let nuisance = estimate_moments(&targets)?;
    let trajectory = run_tab(&targets, &nuisance)?;
    let result = TestResult::from_statistic(trajectory.final_stat, cfg.d0, cfg.alpha);
    Ok((result, trajectory))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_rows(row: &[f64], t: usize) -> SampleMatrix {
        SampleMatrix::from_rows(&vec![row.to_vec(); t]).unwrap()
    }

    #[test]
    fn split_follows_the_floor_rule() {
        let m = constant_rows(&[1.0], 200);
        let (head, tail) = split_sample(&m, 0.5).unwrap();
        assert_eq!((head.rows(), tail.rows()), (100, 100));

        let m = constant_rows(&[1.0], 5);
        let (head, tail) = split_sample(&m, 0.5).unwrap();
        assert_eq!((head.rows(), tail.rows()), (2, 3));

        let m = constant_rows(&[1.0], 4);
        assert!(split_sample(&m, 0.9).is_err());
        assert!(split_sample(&m, 0.1).is_err());
    }

    #[test]
    fn targets_from_constant_vectors() {
        // head = tail = e1: inner product 1, so X_t = 1 - d0^2.
        let head = constant_rows(&[1.0, 0.0], 10);
        let tail = constant_rows(&[1.0, 0.0], 5);
        let x = compute_targets(&head, &tail, 0.5).unwrap();
        assert_eq!(x, vec![0.75; 5]);

        // orthogonal head/tail: X_t = -d0^2.
        let tail = constant_rows(&[0.0, 1.0], 5);
        let x = compute_targets(&head, &tail, 1.0).unwrap();
        assert_eq!(x, vec![-1.0; 5]);

        let bad = constant_rows(&[0.0, 1.0, 2.0], 5);
        assert!(compute_targets(&head, &bad, 1.0).is_err());
    }

    #[test]
    fn moments_of_simple_sequences() {
        let m = estimate_moments(&[2.5; 8]).unwrap();
        assert_eq!(m.tau_hat, 2.5);
        assert_eq!(m.sigma2_hat, 0.0);

        let m = estimate_moments(&[1.0, -1.0]).unwrap();
        assert_eq!(m.tau_hat, 0.0);
        assert_eq!(m.sigma2_hat, 1.0);

        assert!(estimate_moments(&[1.0]).is_err());
    }

    #[test]
    fn tab_recursion_hand_example() {
        // targets = [1, 1], tau = 1, sigma^2 = 0, T2 = 2:
        // increment = 1/2 + 1/sqrt(2), M1 = increment > 0 so theta_2 = -1 and
        // M2 = 0 exactly.
        let nuisance = NuisanceEstimates {
            tau_hat: 1.0,
            sigma2_hat: 0.0,
        };
        let traj = run_tab(&[1.0, 1.0], &nuisance).unwrap();
        let increment = 0.5 + 1.0 / 2.0f64.sqrt();
        assert_eq!(traj.thetas, vec![1, -1]);
        assert!((traj.partials[0] - increment).abs() < 1e-15);
        assert_eq!(traj.partials[1], 0.0);
        assert_eq!(traj.final_stat, 0.0);
    }

    #[test]
    fn tab_zero_targets_stay_at_zero() {
        let nuisance = NuisanceEstimates {
            tau_hat: 1.0,
            sigma2_hat: 0.5,
        };
        let traj = run_tab(&[0.0; 16], &nuisance).unwrap();
        assert!(traj.partials.iter().all(|&m| m == 0.0));
        assert!(traj.thetas.iter().all(|&t| t == 1));
        assert_eq!(traj.final_stat, 0.0);
    }

    #[test]
    fn tab_rejects_degenerate_scale() {
        let nuisance = NuisanceEstimates {
            tau_hat: 0.0,
            sigma2_hat: 0.0,
        };
        assert!(matches!(
            run_tab(&[0.0; 4], &nuisance),
            Err(Error::DegenerateScale(_))
        ));
    }

    #[test]
    fn control_rule_and_recursion_identity() {
        // Deterministic pseudo-random targets; checks theta_t = +1 iff
        // M_{t-1} <= 0 and the closed-form value of M_{T2}.
        let targets: Vec<f64> = (0..257)
            .map(|i| ((i * 2654435761u64 % 1000) as f64 / 500.0) - 1.0 + 0.1)
            .collect();
        let nuisance = estimate_moments(&targets).unwrap();
        let traj = run_tab(&targets, &nuisance).unwrap();
        for t in 1..traj.thetas.len() {
            let expect = if traj.partials[t - 1] <= 0.0 { 1 } else { -1 };
            assert_eq!(traj.thetas[t], expect, "control rule broken at t={t}");
        }
        let t2 = targets.len() as f64;
        let weighted: f64 = traj
            .thetas
            .iter()
            .zip(&targets)
            .map(|(&th, &x)| th as f64 * x)
            .sum();
        let closed = weighted / t2 + weighted / (t2 * nuisance.scale_sq()).sqrt();
        let rel = (traj.final_stat - closed).abs() / closed.abs().max(1e-300);
        assert!(rel < 1e-10, "recursion vs closed form: {rel}");
    }

    #[test]
    fn full_test_is_shift_equivariant_and_deterministic() {
        let rows: Vec<Vec<f64>> = (0..24)
            .map(|i| {
                (0..3)
                    .map(|j| ((i * 7 + j * 13) % 11) as f64 / 3.0 - 1.5)
                    .collect()
            })
            .collect();
        let data = SampleMatrix::from_rows(&rows).unwrap();
        let mu0 = vec![0.25, -1.0, 0.5];
        let mut cfg = OneSampleConfig::new(1.0, 0.05);
        cfg.mu0 = Some(mu0.clone());
        let (res_a, traj_a) = one_sample_deviation_test(&data, &cfg).unwrap();

        let shifted = data.shift_rows(&mu0).unwrap();
        let cfg_zero = OneSampleConfig::new(1.0, 0.05);
        let (res_b, traj_b) = one_sample_deviation_test(&shifted, &cfg_zero).unwrap();
        assert_eq!(res_a.statistic.to_bits(), res_b.statistic.to_bits());
        assert_eq!(traj_a, traj_b);

        let (res_c, traj_c) = one_sample_deviation_test(&data, &cfg).unwrap();
        assert_eq!(res_a.statistic.to_bits(), res_c.statistic.to_bits());
        assert_eq!(traj_a, traj_c);
    }

    #[test]
    fn test_result_decision_rule() {
        let r = TestResult::from_statistic(-2.5, 1.0, 0.05);
        assert!(r.reject_h0);
        assert!((r.critical_value - 1.959963984540054).abs() < 1e-12);
        assert!((r.p_value - 2.0 * normal::cdf(-2.5)).abs() < 1e-16);
        let r = TestResult::from_statistic(1.2, 1.0, 0.05);
        assert!(!r.reject_h0);
    }

    #[test]
    fn full_test_rejects_bad_inputs() {
        let data = constant_rows(&[1.0, 0.0], 3);
        assert!(one_sample_deviation_test(&data, &OneSampleConfig::new(1.0, 0.05)).is_err());
        let data = constant_rows(&[1.0, 0.0], 10);
        assert!(one_sample_deviation_test(&data, &OneSampleConfig::new(-1.0, 0.05)).is_err());
        assert!(one_sample_deviation_test(&data, &OneSampleConfig::new(1.0, 1.5)).is_err());
        let mut cfg = OneSampleConfig::new(1.0, 0.05);
        cfg.split_fraction = 1.0;
        assert!(one_sample_deviation_test(&data, &cfg).is_err());
        // Constant data has degenerate scale only when targets are constant
        // AND equal to zero; here X_t = 1 - 1 = 0 for d0 = 1.
        let cfg = OneSampleConfig::new(1.0, 0.05);
        assert!(matches!(
            one_sample_deviation_test(&data, &cfg),
            Err(Error::DegenerateScale(_))
        ));
    }
}
