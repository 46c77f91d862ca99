//! Theoretical size and power of the deviation tests.
//!
//! The final TAB statistic converges to `B(-kappa)` with
//!
//! ```text
//! kappa = tau * (1 + sqrt(T2 / (tau^2 + sigma^2)))
//! ```
//!
//! where one-sample `tau = ||mu||^2 - d0^2` and
//! `sigma^2 = mu' Sigma mu + Tr(Sigma^2)/T1`; the two-sample analogue replaces
//! `T2` by `N0`, `tau` by `||mu1 - mu2||^2 - d0^2` and
//! `sigma^2 = (mu1-mu2)'(Sigma1+Sigma2)(mu1-mu2)
//!            + Tr({Sigma1+Sigma2}{Sigma1/m1 + Sigma2/m2})`.
//! The predicted rejection probability is the closed-form tail `g(kappa)` at
//! `z_{alpha/2}`, so it is at most `alpha` whenever `kappa >= 0`.

use crate::bandit::bandit_tail_prob;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::normal;
use serde::Serialize;

/// Population parameters `(mu, Sigma)`, with optional second-group
/// parameters for two-sample calculations.
#[derive(Debug, Clone)]
pub struct PopulationSpec {
    pub mu: Vec<f64>,
    pub sigma: Matrix,
    pub mu2: Option<Vec<f64>>,
    pub sigma2: Option<Matrix>,
}

const SYM_TOL: f64 = 1e-10;

impl PopulationSpec {
    pub fn new(mu: Vec<f64>, sigma: Matrix) -> Result<Self> {
        check_covariance(&mu, &sigma)?;
        Ok(PopulationSpec {
            mu,
            sigma,
            mu2: None,
            sigma2: None,
        })
    }

    pub fn two_sample(
        mu1: Vec<f64>,
        sigma1: Matrix,
        mu2: Vec<f64>,
        sigma2: Matrix,
    ) -> Result<Self> {
        check_covariance(&mu1, &sigma1)?;
        check_covariance(&mu2, &sigma2)?;
        if mu1.len() != mu2.len() {
            return Err(Error::dim("group dimensions differ".to_string()));
        }
        Ok(PopulationSpec {
            mu: mu1,
            sigma: sigma1,
            mu2: Some(mu2),
            sigma2: Some(sigma2),
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

fn check_covariance(mu: &[f64], sigma: &Matrix) -> Result<()> {
    if !sigma.is_square() || sigma.rows() != mu.len() {
        return Err(Error::dim(format!(
            "covariance must be {0}x{0} to match mu, got {1}x{2}",
            mu.len(),
            sigma.rows(),
            sigma.cols()
        )));
    }
    if sigma.max_asymmetry() > SYM_TOL {
        return Err(Error::domain(format!(
            "covariance is asymmetric beyond {SYM_TOL:e} (worst deviation {:e})",
            sigma.max_asymmetry()
        )));
    }
    // PSD up to rounding: Cholesky on Sigma + tol*I must succeed.
    let n = sigma.rows();
    let slack = sigma.add_scaled(&Matrix::identity(n), SYM_TOL)?;
    crate::sim::cholesky_factor(&slack)
        .map_err(|e| Error::domain(format!("covariance is not PSD: {e}")))?;
    Ok(())
}

/// Shared drift map: `kappa = tau (1 + sqrt(steps / (tau^2 + sigma^2)))`.
fn kappa_from_moments(tau: f64, sigma_sq: f64, steps: usize) -> Result<f64> {
    let denom = tau * tau + sigma_sq;
    // The comparison is written to also reject NaN.
    if !denom.is_finite() || denom <= 0.0 {
        return Err(Error::DegenerateScale(format!(
            "tau^2 + sigma^2 = {denom} must be positive"
        )));
    }
    Ok(tau * (1.0 + (steps as f64 / denom).sqrt()))
}

/// One-sample drift parameter; the limiting law of the statistic is
/// `B(-kappa)`.
pub fn kappa_one_sample(pop: &PopulationSpec, d0: f64, t1: usize, t2: usize) -> Result<f64> {
    if t1 < 1 || t2 < 1 {
        return Err(Error::config(format!("need t1, t2 >= 1, got {t1}, {t2}")));
    }
    let mu_norm_sq: f64 = pop.mu.iter().map(|v| v * v).sum();
    let tau = mu_norm_sq - d0 * d0;
    // Tr(Sigma^2) as the squared Frobenius norm (Sigma symmetric).
    let sigma_sq = pop.sigma.quad_form(&pop.mu)? + pop.sigma.frobenius_sq() / t1 as f64;
    kappa_from_moments(tau, sigma_sq, t2)
}

/// Two-sample drift parameter for group head sizes `m1`, `m2` and TAB length
/// `n0`; the limiting law is `B(-kappa)`.
pub fn kappa_two_sample(
    pop: &PopulationSpec,
    d0: f64,
    m1: usize,
    m2: usize,
    n0: usize,
) -> Result<f64> {
    if m1 < 1 || m2 < 1 || n0 < 1 {
        return Err(Error::config(format!(
            "need m1, m2, n0 >= 1, got {m1}, {m2}, {n0}"
        )));
    }
    let mu2 = pop.mu2.as_deref().unwrap_or(&[]);
    let zeros;
    let mu2: &[f64] = if mu2.is_empty() {
        zeros = vec![0.0; pop.dim()];
        &zeros
    } else {
        mu2
    };
    let sigma2 = pop
        .sigma2
        .clone()
        .unwrap_or_else(|| Matrix::zeros(pop.dim(), pop.dim()));
    if mu2.len() != pop.dim() || sigma2.rows() != pop.dim() {
        return Err(Error::dim(
            "second-group parameters do not match dimension".to_string(),
        ));
    }
    let delta: Vec<f64> = pop.mu.iter().zip(mu2).map(|(a, b)| a - b).collect();
    let tau = delta.iter().map(|v| v * v).sum::<f64>() - d0 * d0;
    let sum = pop.sigma.add_scaled(&sigma2, 1.0)?;
    let weighted = pop
        .sigma
        .scale(1.0 / m1 as f64)
        .add_scaled(&sigma2.scale(1.0 / m2 as f64), 1.0)?;
    let sigma_sq = sum.quad_form(&delta)? + sum.trace_product_sym(&weighted)?;
    kappa_from_moments(tau, sigma_sq, n0)
}

/// Predicted rejection probability `P(|B(-kappa)| > z_{alpha/2}) = g(kappa)`.
pub fn theoretical_rejection_prob(kappa: f64, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::config(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    bandit_tail_prob(kappa, normal::quantile(1.0 - alpha / 2.0))
}

/// Sample-size layout for a power-curve calculation.
#[derive(Debug, Clone, Copy)]
pub enum SampleSizes {
    OneSample { t1: usize, t2: usize },
    TwoSample { m1: usize, m2: usize, n0: usize },
}

/// One row of a predicted power curve.
#[derive(Debug, Clone, Serialize)]
pub struct PowerCurveRow {
    pub d0: f64,
    pub kappa: f64,
    pub predicted_power: f64,
}

/// Tabulates `(d0, kappa, g(kappa))` over a grid of radii.
pub fn power_curve(
    pop: &PopulationSpec,
    d0_grid: &[f64],
    sizes: SampleSizes,
    alpha: f64,
) -> Result<Vec<PowerCurveRow>> {
    if d0_grid.is_empty() {
        return Err(Error::config(
            "power curve needs a nonempty d0 grid".to_string(),
        ));
    }
    let mut rows = Vec::with_capacity(d0_grid.len());
    for &d0 in d0_grid {
        if !d0.is_finite() || d0 <= 0.0 {
            return Err(Error::config(format!("grid radii must be > 0, got {d0}")));
        }
        let kappa = match sizes {
            SampleSizes::OneSample { t1, t2 } => kappa_one_sample(pop, d0, t1, t2)?,
            SampleSizes::TwoSample { m1, m2, n0 } => kappa_two_sample(pop, d0, m1, m2, n0)?,
        };
        rows.push(PowerCurveRow {
            d0,
            kappa,
            predicted_power: theoretical_rejection_prob(kappa, alpha)?,
        });
    }
    Ok(rows)
}
