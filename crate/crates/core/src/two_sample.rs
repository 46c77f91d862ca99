//! Two-sample deviation test of `||mu1 - mu2||_2` against `d0`.
//!
//! Each group is split into a head (first `m_i = M_i - N0` rows) used for the
//! direction estimate `Delta_0 = mean(x_head) - mean(z_head)` and a tail of
//! `N0` rows consumed pairwise: `Y_i = Delta_0' (x_tail_i - z_tail_i) - d0^2`.
//! The TAB recursion over the `Y_i` is the one from [`crate::tab`], with `T2`
//! replaced by `N0`.

use crate::error::{Error, Result};
use crate::matrix::SampleMatrix;
use crate::tab::{estimate_moments, run_tab, TabTrajectory, TestResult};

/// Configuration of the two-sample deviation test.
#[derive(Debug, Clone)]
pub struct TwoSampleConfig {
    /// Deviation radius `d0 > 0`.
    pub d0: f64,
    /// Two-sided significance level in (0,1).
    pub alpha: f64,
    /// TAB-phase length `N0`; must satisfy `1 <= n0 < min(M1, M2)`.
    pub n0: usize,
}

impl TwoSampleConfig {
    pub fn new(d0: f64, alpha: f64, n0: usize) -> Self {
        TwoSampleConfig { d0, alpha, n0 }
    }

    /// Default TAB-phase length: a third of the smaller group.
    pub fn default_n0(m1: usize, m2: usize) -> usize {
        (m1.min(m2) / 3).max(1)
    }

    fn validate(&self, m1: usize, m2: usize) -> Result<()> {
        if !self.d0.is_finite() || self.d0 <= 0.0 {
            return Err(Error::config(format!("d0 must be > 0, got {}", self.d0)));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::config(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if self.n0 < 1 || self.n0 >= m1.min(m2) {
            return Err(Error::config(format!(
                "n0 must satisfy 1 <= n0 < min(M1, M2) = {}, got {}",
                m1.min(m2),
                self.n0
            )));
        }
        Ok(())
    }
}

/// Direction estimate `Delta_0`: difference of the head column means.
pub fn compute_delta0(x_head: &SampleMatrix, z_head: &SampleMatrix) -> Result<Vec<f64>> {
    if x_head.cols() != z_head.cols() {
        return Err(Error::dim(format!(
            "groups have dimensions {} and {}",
            x_head.cols(),
            z_head.cols()
        )));
    }
    let mx = x_head.col_means();
    let mz = z_head.col_means();
    Ok(mx.iter().zip(&mz).map(|(a, b)| a - b).collect())
}

/// Pair targets `Y_i = Delta_0' (x_tail_i - z_tail_i) - d0^2`, pairing the
/// i-th tail row of each group in file order.
pub fn compute_pair_targets(
    x_tail: &SampleMatrix,
    z_tail: &SampleMatrix,
    delta0: &[f64],
    d0: f64,
) -> Result<Vec<f64>> {
    if x_tail.rows() != z_tail.rows() {
        return Err(Error::dim(format!(
            "tails must have the same number of rows, got {} and {}",
            x_tail.rows(),
            z_tail.rows()
        )));
    }
    if x_tail.cols() != delta0.len() || z_tail.cols() != delta0.len() {
        return Err(Error::dim(
            "tail dimension does not match delta0".to_string(),
        ));
    }
    let d0sq = d0 * d0;
    let mut targets = Vec::with_capacity(x_tail.rows());
    for i in 0..x_tail.rows() {
        let xr = x_tail.row(i);
        let zr = z_tail.row(i);
        let mut dot = 0.0;
        for j in 0..delta0.len() {
            dot += delta0[j] * (xr[j] - zr[j]);
        }
        targets.push(dot - d0sq);
    }
    Ok(targets)
}

/// Two-sample deviation test: `H0: ||mu1 - mu2|| > d0` against `<= d0`.
///
/// Heads are the first `M_i - n0` rows of each group, tails the last `n0`.
pub fn two_sample_deviation_test(
    x: &SampleMatrix,
    z: &SampleMatrix,
    cfg: &TwoSampleConfig,
) -> Result<(TestResult, TabTrajectory)> {
    if x.cols() != z.cols() {
        return Err(Error::dim(format!(
            "groups have dimensions {} and {}",
            x.cols(),
            z.cols()
        )));
    }
    if x.cols() == 0 {
        return Err(Error::dim("samples must have dimension n >= 1".to_string()));
    }
    cfg.validate(x.rows(), z.rows())?;
    let (m1, m2) = (x.rows() - cfg.n0, z.rows() - cfg.n0);
    let x_head = x.slice_rows(0, m1);
    let x_tail = x.slice_rows(m1, x.rows());
    let z_head = z.slice_rows(0, m2);
    let z_tail = z.slice_rows(m2, z.rows());

    let delta0 = compute_delta0(&x_head, &z_head)?;
    let targets = compute_pair_targets(&x_tail, &z_tail, &delta0, cfg.d0)?;
    let nuisance = estimate_moments(&targets)?;
    let trajectory = run_tab(&targets, &nuisance)?;
    let result = TestResult::from_statistic(trajectory.final_stat, cfg.d0, cfg.alpha);
    Ok((result, trajectory))
}
