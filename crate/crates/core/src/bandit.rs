//! The bandit distribution family `B(kappa)`.
//!
//! `B(kappa)` is the limiting law of the two-armed-bandit test statistic. Its
//! density is
//!
//! ```text
//! f_kappa(x) = phi(|x| - kappa) - kappa * exp(2*kappa*|x|) * Phi(-|x| - kappa)
//! ```
//!
//! with `phi`/`Phi` the standard normal density/CDF. At `kappa = 0` this is
//! exactly the standard normal; for `kappa < 0` the law is unimodal and more
//! concentrated than the normal, and for `kappa > 0` it is bimodal with modes
//! near `|x| = kappa`.
//!
//! Tail probabilities have the closed form
//!
//! ```text
//! g(kappa) = P(|B(-kappa)| > z) = 1 - Phi(kappa + z) + exp(-2*z*kappa) * Phi(kappa - z)
//! ```
//!
//! which is what a rejection-probability calculation needs; `g` is strictly
//! decreasing in `kappa` since `g'(kappa) = -2z exp(-2z*kappa) Phi(kappa-z)`.
//! The exponential factors are assembled in log space, so the formulas stay
//! finite for arbitrarily large `|kappa|`.

use crate::error::{Error, Result};
use crate::normal;
use rand::Rng;

/// Parameter of the bandit distribution `B(kappa)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BanditParams {
    kappa: f64,
}

impl BanditParams {
    /// Creates the parameter set; `kappa` must be finite.
    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::domain(format!("kappa must be finite, got {kappa}")));
        }
        Ok(BanditParams { kappa })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Density of `B(kappa)` at `x`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!(
                "pdf argument must be finite, got {x}"
            )));
        }
        Ok(pdf_raw(x, self.kappa))
    }

    /// CDF of `B(kappa)` at `x`, derived from the closed-form tail by
    /// symmetry of the density.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!(
                "cdf argument must be finite, got {x}"
            )));
        }
        if x == 0.0 {
            return Ok(0.5);
        }
        Ok(if x > 0.0 {
            1.0 - 0.5 * tail_raw(-self.kappa, x)
        } else {
            0.5 * tail_raw(-self.kappa, -x)
        })
    }

    /// Quantile of `B(kappa)`: the `x` with `cdf(x) = q`, for `q` in (0,1).
    ///
    /// Bracketed bisection with safeguarded Newton refinement; the returned
    /// point satisfies `|cdf(x) - q| <= 1e-12`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !q.is_finite() || q <= 0.0 || q >= 1.0 {
            return Err(Error::domain(format!(
                "quantile requires q in (0,1), got {q}"
            )));
        }
        if q == 0.5 {
            return Ok(0.0);
        }
        let k = self.kappa;
        // All of the mass lies well inside |x| <= |kappa| + 45.
        let bound = k.abs() + 45.0;
        let (mut lo, mut hi) = (-bound, bound);
        let mut x = normal::quantile(q).clamp(lo + 1.0, hi - 1.0);
        for _ in 0..200 {
            let f = self.cdf(x)? - q;
            if f.abs() <= 1e-15 {
                return Ok(x);
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = pdf_raw(x, k);
            let newton = x - f / d;
            x = if d > 1e-300 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        Ok(x)
    }

    /// Draws `count` i.i.d. variates by inverse-CDF sampling; deterministic
    /// given the state of `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::config("sample count must be >= 1".to_string()));
        }
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut u: f64 = rng.random();
            while u <= 0.0 {
                u = rng.random();
            }
            out.push(self.quantile(u)?);
        }
        Ok(out)
    }
}

/// `g(kappa) = P(|B(-kappa)| > z)` for `z >= 0`, exact closed form.
pub fn bandit_tail_prob(kappa: f64, z: f64) -> Result<f64> {
    if !kappa.is_finite() || !z.is_finite() {
        return Err(Error::domain(format!(
            "tail probability requires finite arguments, got kappa={kappa}, z={z}"
        )));
    }
    if z < 0.0 {
        return Err(Error::domain(format!(
            "tail threshold must be >= 0, got {z}"
        )));
    }
    Ok(tail_raw(kappa, z))
}

fn pdf_raw(x: f64, kappa: f64) -> f64 {
    let ax = x.abs();
    let gauss = normal::pdf(ax - kappa);
    // kappa * exp(2*kappa*|x|) * Phi(-|x| - kappa); the naive product
    // overflows near kappa*|x| > 350.
    let spike = kappa * (2.0 * kappa * ax + normal::log_cdf(-ax - kappa)).exp();
    (gauss - spike).max(0.0)
}

fn tail_raw(kappa: f64, z: f64) -> f64 {
    let first = normal::cdf(-(kappa + z));
    let second = (-2.0 * z * kappa + normal::log_cdf(kappa - z)).exp();
    (first + second).min(1.0)
}
