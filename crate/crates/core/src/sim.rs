//! Data generation and grid Monte Carlo experiments.
//!
//! Samples are drawn as `x = mu + Gamma y` with independent mean-zero,
//! unit-variance noise coordinates (Gaussian or Rademacher), `Gamma Gamma' =
//! Sigma`. Replications are embarrassingly parallel: every replication gets
//! its own RNG seeded from `(master seed, cell, replication)` through a
//! splitmix-style hash, so results are bit-identical regardless of worker
//! count or execution order.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SampleMatrix};
use crate::tab::{one_sample_deviation_test, OneSampleConfig};
use crate::two_sample::{two_sample_deviation_test, TwoSampleConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// AR(1)-type Toeplitz covariance `Sigma[i][j] = rho^|i-j|`.
pub fn ar1_covariance(n: usize, rho: f64) -> Result<Matrix> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(Error::domain(format!(
            "AR(1) parameter must satisfy |rho| < 1, got {rho}"
        )));
    }
    if n == 0 {
        return Err(Error::dim("covariance dimension must be >= 1".to_string()));
    }
    // Powers precomputed once; the matrix is symmetric Toeplitz with unit
    // diagonal.
    let mut powers = Vec::with_capacity(n);
    let mut p = 1.0;
    for _ in 0..n {
        powers.push(p);
        p *= rho;
    }
    Ok(Matrix::from_fn(n, n, |i, j| powers[i.abs_diff(j)]))
}

/// Lower-triangular `Gamma` with `Gamma Gamma' = Sigma`.
///
/// Plain Cholesky for positive-definite inputs; diagonally pivoted Cholesky
/// as a fallback for semi-definite ones. Indefinite matrices are rejected.
pub fn cholesky_factor(sigma: &Matrix) -> Result<Matrix> {
    if !sigma.is_square() {
        return Err(Error::dim(format!(
            "Cholesky needs a square matrix, got {}x{}",
            sigma.rows(),
            sigma.cols()
        )));
    }
    let n = sigma.rows();
    let max_diag = (0..n).map(|i| sigma.get(i, i)).fold(0.0f64, f64::max);
    let tol = 1e-12 * max_diag.max(1.0);

    match plain_cholesky(sigma, tol) {
        Some(l) => Ok(l),
        None => pivoted_cholesky(sigma, tol),
    }
}

fn plain_cholesky(sigma: &Matrix, tol: f64) -> Option<Matrix> {
    let n = sigma.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = sigma.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d <= tol {
            return None;
        }
        let root = d.sqrt();
        l.set(j, j, root);
        for i in (j + 1)..n {
            let mut v = sigma.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / root);
        }
    }
    Some(l)
}

/// Rank-revealing Cholesky with symmetric diagonal pivoting; handles PSD
/// matrices with (numerically) zero eigenvalues.
fn pivoted_cholesky(sigma: &Matrix, tol: f64) -> Result<Matrix> {
    let n = sigma.rows();
    let mut a = sigma.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut l = Matrix::zeros(n, n);

    for k in 0..n {
        // Largest remaining diagonal entry becomes the pivot.
        let (jmax, dmax) = (k..n)
            .map(|i| (i, a.get(i, i)))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if dmax <= tol {
            // Remaining block must be numerically zero, otherwise the input
            // was indefinite.
            for i in k..n {
                if a.get(i, i) < -tol {
                    return Err(Error::Factorization(format!(
                        "matrix is indefinite: pivot {} at elimination step {k}",
                        a.get(i, i)
                    )));
                }
            }
            break;
        }
        if jmax != k {
            swap_sym(&mut a, k, jmax);
            piv.swap(k, jmax);
            for c in 0..k {
                let tmp = l.get(k, c);
                l.set(k, c, l.get(jmax, c));
                l.set(jmax, c, tmp);
            }
        }
        let root = dmax.sqrt();
        l.set(k, k, root);
        for i in (k + 1)..n {
            let v = a.get(i, k) / root;
            l.set(i, k, v);
        }
        for i in (k + 1)..n {
            for j in (k + 1)..=i {
                let v = a.get(i, j) - l.get(i, k) * l.get(j, k);
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
    }
    // Undo the permutation: Gamma[piv[r]] = L[r].
    let mut gamma = Matrix::zeros(n, n);
    for (r, &dest) in piv.iter().enumerate() {
        for c in 0..n {
            gamma.set(dest, c, l.get(r, c));
        }
    }
    Ok(gamma)
}

fn swap_sym(a: &mut Matrix, i: usize, j: usize) {
    let n = a.rows();
    for c in 0..n {
        let tmp = a.get(i, c);
        a.set(i, c, a.get(j, c));
        a.set(j, c, tmp);
    }
    for r in 0..n {
        let tmp = a.get(r, i);
        a.set(r, i, a.get(r, j));
        a.set(r, j, tmp);
    }
}

/// Noise law for the factor-model coordinates; both are mean zero, unit
/// variance with bounded fourth moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    Rademacher,
}

impl NoiseKind {
    #[inline]
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            NoiseKind::Gaussian => rng.sample(StandardNormal),
            NoiseKind::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Draws `t` i.i.d. rows `x = mu + gamma * y`.
pub fn generate_sample<R: Rng + ?Sized>(
    mu: &[f64],
    gamma: &Matrix,
    t: usize,
    noise: NoiseKind,
    rng: &mut R,
) -> Result<SampleMatrix> {
    if gamma.rows() != mu.len() {
        return Err(Error::dim(format!(
            "factor has {} rows but mu has dimension {}",
            gamma.rows(),
            mu.len()
        )));
    }
    if t == 0 {
        return Err(Error::config("need at least one observation".to_string()));
    }
    let n = mu.len();
    let m = gamma.cols();
    let mut data = Vec::with_capacity(t * n);
    let mut y = vec![0.0; m];
    for _ in 0..t {
        for v in &mut y {
            *v = noise.draw(rng);
        }
        let start = data.len();
        data.extend_from_slice(mu);
        gamma.matvec_add(&y, &mut data[start..start + n]);
    }
    Ok(SampleMatrix::from_parts_unchecked(data, t, n))
}

/// Internal sampler that exploits structure in the covariance.
enum RowSampler<'a> {
    Dense(&'a Matrix),
    /// AR(1) rows in O(n) per row: `z_1 = y_1`, `z_i = rho z_{i-1} +
    /// sqrt(1-rho^2) y_i` applies the closed-form Cholesky factor exactly.
    Ar1 {
        rho: f64,
    },
    Identity,
}

impl RowSampler<'_> {
    fn sample<R: Rng + ?Sized>(
        &self,
        mu: &[f64],
        t: usize,
        noise: NoiseKind,
        rng: &mut R,
    ) -> SampleMatrix {
        let n = mu.len();
        let mut data = Vec::with_capacity(t * n);
        match self {
            RowSampler::Dense(gamma) => {
                let mut y = vec![0.0; gamma.cols()];
                for _ in 0..t {
                    for v in &mut y {
                        *v = noise.draw(rng);
                    }
                    let start = data.len();
                    data.extend_from_slice(mu);
                    gamma.matvec_add(&y, &mut data[start..start + n]);
                }
            }
            RowSampler::Ar1 { rho } => {
                let scale = (1.0 - rho * rho).sqrt();
                for _ in 0..t {
                    let mut z = noise.draw(rng);
                    data.push(mu[0] + z);
                    for &m in &mu[1..] {
                        z = rho * z + scale * noise.draw(rng);
                        data.push(m + z);
                    }
                }
            }
            RowSampler::Identity => {
                for _ in 0..t {
                    for &m in mu {
                        data.push(m + noise.draw(rng));
                    }
                }
            }
        }
        SampleMatrix::from_parts_unchecked(data, t, n)
    }
}

/// Mean-vector design of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuSpec {
    /// `mu = (n^{-1/2}, ..., n^{-1/2})`, so `||mu||_2 = 1`.
    UniformUnitNorm,
    Zero,
    Custom(Vec<f64>),
}

impl MuSpec {
    pub fn build(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            MuSpec::UniformUnitNorm => Ok(vec![1.0 / (n as f64).sqrt(); n]),
            MuSpec::Zero => Ok(vec![0.0; n]),
            MuSpec::Custom(v) => {
                if v.len() != n {
                    return Err(Error::dim(format!(
                        "custom mu has length {}, expected {n}",
                        v.len()
                    )));
                }
                Ok(v.clone())
            }
        }
    }
}

/// Covariance design of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSpec {
    Ar1 {
        rho: f64,
    },
    Identity,
    #[serde(skip)]
    Custom(Matrix),
}

impl SigmaSpec {
    /// The covariance matrix itself (used by power predictions).
    pub fn build(&self, n: usize) -> Result<Matrix> {
        match self {
            SigmaSpec::Ar1 { rho } => ar1_covariance(n, *rho),
            SigmaSpec::Identity => Ok(Matrix::identity(n)),
            SigmaSpec::Custom(m) => {
                if m.rows() != n || m.cols() != n {
                    return Err(Error::dim(format!(
                        "custom sigma is {}x{}, expected {n}x{n}",
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok(m.clone())
            }
        }
    }
}

/// Which test the experiment drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMode {
    OneSample,
    /// Group sizes `m1`, `m2` and TAB-phase length `n0`; group one has mean
    /// `mu_spec`, group two has mean zero, both share `sigma_spec`.
    TwoSample {
        n0: usize,
        m1: usize,
        m2: usize,
    },
}

/// Design of one grid experiment.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub t: usize,
    pub d0_values: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub mu_spec: MuSpec,
    pub sigma_spec: SigmaSpec,
    pub noise: NoiseKind,
    pub mode: TestMode,
    pub split_fraction: f64,
}

impl SimulationConfig {
    /// The design used throughout: AR(1) covariance with `rho = 0.5`,
    /// `||mu|| = 1`, halves split, Gaussian noise, one-sample test.
    pub fn table1_cell(
        n: usize,
        t: usize,
        d0_values: Vec<f64>,
        replications: usize,
        seed: u64,
    ) -> Self {
        SimulationConfig {
            n,
            t,
            d0_values,
            replications,
            seed,
            mu_spec: MuSpec::UniformUnitNorm,
            sigma_spec: SigmaSpec::Ar1 { rho: 0.5 },
            noise: NoiseKind::Gaussian,
            mode: TestMode::OneSample,
            split_fraction: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("dimension n must be >= 1".to_string()));
        }
        if self.replications == 0 {
            return Err(Error::config("need at least one replication".to_string()));
        }
        if self.d0_values.is_empty() {
            return Err(Error::config("need at least one d0 value".to_string()));
        }
        for &d0 in &self.d0_values {
            if !d0.is_finite() || d0 <= 0.0 {
                return Err(Error::config(format!("d0 values must be > 0, got {d0}")));
            }
        }
        match self.mode {
            TestMode::OneSample => {
                if self.t < 4 {
                    return Err(Error::config(format!("need T >= 4, got {}", self.t)));
                }
            }
            TestMode::TwoSample { n0, m1, m2 } => {
                if n0 < 2 || n0 >= m1.min(m2) {
                    return Err(Error::config(format!(
                        "two-sample mode needs 2 <= n0 < min(m1, m2), got n0={n0}, m1={m1}, m2={m2}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One cell of the output grid.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub n: usize,
    pub t: usize,
    pub d0: f64,
    pub rejection_rate: f64,
    pub replications: usize,
    pub mean_statistic: f64,
    pub stderr: f64,
}

/// Result of a grid experiment, one row per `d0`.
#[derive(Debug, Clone, Serialize)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
}

impl GridResult {
    /// Deterministic CSV rendering (shortest round-trip float formatting).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,t,d0,rejection_rate,replications,mean_statistic,stderr\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n, r.t, r.d0, r.rejection_rate, r.replications, r.mean_statistic, r.stderr
            ));
        }
        out
    }

    pub fn extend(&mut self, other: GridResult) {
        self.rows.extend(other.rows);
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for one replication; independent of execution order.
pub(crate) fn child_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ stream.wrapping_mul(0xA076_1D64_78BD_642F)) ^ index)
}

/// Runs the configured test over the `d0` grid and returns empirical
/// rejection rates.
///
/// Each replication draws data from its own child-seeded RNG, so the result
/// is bit-identical across runs and across any number of rayon workers.
pub fn empirical_rejection_rate(cfg: &SimulationConfig, alpha: f64) -> Result<GridResult> {
    cfg.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let mu = cfg.mu_spec.build(cfg.n)?;
    let zero_mu = vec![0.0; cfg.n];
    let dense_factor;
    let sampler = match &cfg.sigma_spec {
        SigmaSpec::Ar1 { rho } => {
            if !rho.is_finite() || rho.abs() >= 1.0 {
                return Err(Error::domain(format!("|rho| < 1 required, got {rho}")));
            }
            RowSampler::Ar1 { rho: *rho }
        }
        SigmaSpec::Identity => RowSampler::Identity,
        SigmaSpec::Custom(sigma) => {
            if sigma.rows() != cfg.n || sigma.cols() != cfg.n {
                return Err(Error::dim("custom sigma does not match n".to_string()));
            }
            dense_factor = cholesky_factor(sigma)?;
            RowSampler::Dense(&dense_factor)
        }
    };

    let mut rows = Vec::with_capacity(cfg.d0_values.len());
    for (cell, &d0) in cfg.d0_values.iter().enumerate() {
        // Stream id folds the cell geometry in, so different (n, t, d0) cells
        // never share a replication stream.
        let stream = splitmix64((cfg.n as u64) << 32 | cfg.t as u64) ^ cell as u64;
        let outcomes: Result<Vec<(bool, f64)>> = (0..cfg.replications)
            .into_par_iter()
            .map(|rep| {
                let mut rng = ChaCha8Rng::seed_from_u64(child_seed(cfg.seed, stream, rep as u64));
                let (reject, stat) = match cfg.mode {
                    TestMode::OneSample => {
                        let data = sampler.sample(&mu, cfg.t, cfg.noise, &mut rng);
                        let mut test_cfg = OneSampleConfig::new(d0, alpha);
                        test_cfg.split_fraction = cfg.split_fraction;
                        let (res, _) = one_sample_deviation_test(&data, &test_cfg)?;
                        (res.reject_h0, res.statistic)
                    }
                    TestMode::TwoSample { n0, m1, m2 } => {
                        let x = sampler.sample(&mu, m1, cfg.noise, &mut rng);
                        let z = sampler.sample(&zero_mu, m2, cfg.noise, &mut rng);
                        let test_cfg = TwoSampleConfig::new(d0, alpha, n0);
                        let (res, _) = two_sample_deviation_test(&x, &z, &test_cfg)?;
                        (res.reject_h0, res.statistic)
                    }
                };
                Ok((reject, stat))
            })
            .map(|r: Result<(bool, f64)>| {
                r.map_err(|e| {
                    Error::config(format!(
                        "cell (n={}, t={}, d0={d0}) failed: {e}",
                        cfg.n, cfg.t
                    ))
                })
            })
            .collect();
        let outcomes = outcomes?;
        let rejections = outcomes.iter().filter(|(r, _)| *r).count();
        let rate = rejections as f64 / cfg.replications as f64;
        let mean_statistic = outcomes.iter().map(|(_, s)| s).sum::<f64>() / cfg.replications as f64;
        rows.push(GridRow {
            n: cfg.n,
            t: cfg.t,
            d0,
            rejection_rate: rate,
            replications: cfg.replications,
            mean_statistic,
            stderr: (rate * (1.0 - rate) / cfg.replications as f64).sqrt(),
        });
    }
    Ok(GridResult { rows })
}
