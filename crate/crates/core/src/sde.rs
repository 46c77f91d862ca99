//! Independent distributional check of the bandit limit law.
//!
//! The diffusion `dY_s = alpha * sign(Y_s) ds + beta dB_s` started at
//! `Y_t = x` has the closed-form transition density [`spiked_density`]; at
//! `(x = 0, t = 0, s = 1, beta = 1, alpha = kappa)` that density is exactly
//! the bandit density with parameter `kappa`. Euler–Maruyama simulation of
//! the SDE therefore provides a route to the same law that shares no code
//! with the closed-form implementation, which is what the validation tests
//! exploit.

use crate::error::{Error, Result};
use crate::normal;
use crate::quad::NumericCdf;
use crate::sim::child_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Euler–Maruyama endpoints `Y_1` of the reflected-drift diffusion on
/// `[0, 1]` with uniform step `1/steps`.
///
/// `sign(0) = +1`, mirroring the tie rule of the TAB control. Each path runs
/// on its own child-seeded RNG (seeds drawn sequentially from `rng`), so the
/// output is deterministic for a given input stream regardless of worker
/// count.
pub fn simulate_endpoints<R: Rng + ?Sized>(
    alpha: f64,
    beta: f64,
    x0: f64,
    steps: usize,
    paths: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !alpha.is_finite() || !beta.is_finite() || !x0.is_finite() {
        return Err(Error::domain("SDE parameters must be finite".to_string()));
    }
    if beta <= 0.0 {
        return Err(Error::domain(format!("beta must be > 0, got {beta}")));
    }
    if steps < 100 {
        return Err(Error::config(format!(
            "need at least 100 Euler steps, got {steps}"
        )));
    }
    if paths < 1 {
        return Err(Error::config("need at least one path".to_string()));
    }
    let master: u64 = rng.random();
    let h = 1.0 / steps as f64;
    let noise_scale = beta * h.sqrt();
    (0..paths)
        .into_par_iter()
        .map(|p| {
            let mut path_rng = ChaCha8Rng::seed_from_u64(child_seed(master, 0, p as u64));
            let mut y = x0;
            for _ in 0..steps {
                let sign = if y >= 0.0 { 1.0 } else { -1.0 };
                let z: f64 = path_rng.sample(StandardNormal);
                y += alpha * sign * h + noise_scale * z;
            }
            Ok(y)
        })
        .collect()
}

/// Transition density `p_{x,t}(w; s)` of the diffusion: the density of `Y_s`
/// given `Y_t = x`, for `s > t` and `beta > 0`.
///
/// Two terms: a Gaussian-type kernel with a reflected drift correction, and a
/// spike term `alpha e^{2 alpha |w| / beta^2} * (Gaussian tail integral)`
/// evaluated through the normal log-CDF so large drifts cannot overflow.
pub fn spiked_density(w: f64, x: f64, t: f64, s: f64, alpha: f64, beta: f64) -> Result<f64> {
    for (name, v) in [
        ("w", w),
        ("x", x),
        ("t", t),
        ("s", s),
        ("alpha", alpha),
        ("beta", beta),
    ] {
        if !v.is_finite() {
            return Err(Error::domain(format!("{name} must be finite, got {v}")));
        }
    }
    if s <= t {
        return Err(Error::domain(format!("need s > t, got s={s}, t={t}")));
    }
    if beta <= 0.0 {
        return Err(Error::domain(format!("beta must be > 0, got {beta}")));
    }
    let dt = s - t;
    let b2 = beta * beta;
    let quad = (w - x) * (w - x) - 2.0 * alpha * dt * (w.abs() - x.abs()) + alpha * alpha * dt * dt;
    let gauss = (-quad / (2.0 * dt * b2)).exp() / ((2.0 * std::f64::consts::PI * dt).sqrt() * beta);
    let tail_arg = -(w.abs() + x.abs() + alpha * dt) / (beta * dt.sqrt());
    let spike = alpha / b2 * (2.0 * alpha * w.abs() / b2 + normal::log_cdf(tail_arg)).exp();
    Ok((gauss - spike).max(0.0))
}

/// Tabulated CDF of the endpoint law `Y_1` (started at `x0` at time 0),
/// obtained by quadrature of [`spiked_density`].
pub fn endpoint_law_cdf(alpha: f64, beta: f64, x0: f64, points: usize) -> Result<NumericCdf> {
    let reach = x0.abs() + alpha.abs() + 12.0 * beta + 3.0;
    let pdf = move |w: f64| spiked_density(w, x0, 0.0, 1.0, alpha, beta).unwrap_or(0.0);
    // Validate parameters once up front so the closure's unwrap_or never
    // masks a domain error.
    spiked_density(0.0, x0, 0.0, 1.0, alpha, beta)?;
    Ok(NumericCdf::from_pdf(pdf, -reach, reach, points.max(1001)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::BanditParams;
    use crate::ks::ks_statistic;
    use crate::quad::simpson;

    fn rel_close(got: f64, want: f64, tol: f64) -> bool {
        (got - want).abs() <= tol * want.abs().max(1e-300)
    }

    // Reference values computed with 60-digit arithmetic (mpmath).
    #[test]
    fn spiked_density_reference_values() {
        let cases = [
            ((0.8, 0.3, 0.2, 0.9, -1.5, 1.3), 0.2361930691517436584228392),
            (
                (-0.4, 0.1, 0.0, 1.0, 2.0, 0.7),
                0.006386732981212784721308248,
            ),
            (
                (1.0, 0.0, 0.0, 1.0, -2.0, 1.0),
                0.03525138151178838532638753,
            ),
        ];
        for ((w, x, t, s, a, b), want) in cases {
            let got = spiked_density(w, x, t, s, a, b).unwrap();
            assert!(
                rel_close(got, want, 1e-13),
                "p({w};{x},{t},{s},{a},{b}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn zero_drift_reduces_to_a_gaussian() {
        // alpha = 0 kills the spike term and the kernel collapses to
        // N(x, beta^2 (s-t)).
        let (x, t, s, beta) = (0.4f64, 0.1f64, 0.7f64, 1.5f64);
        let sd = beta * (s - t).sqrt();
        let mut w = -4.0;
        while w <= 4.0 {
            let got = spiked_density(w, x, t, s, 0.0, beta).unwrap();
            let want = normal::pdf((w - x) / sd) / sd;
            assert!((got - want).abs() < 1e-14, "w={w}: {got} vs {want}");
            w += 0.25;
        }
    }

    #[test]
    fn bridge_identity_with_the_bandit_density() {
        for kappa in [-4.0, -1.0, 0.0, 1.0] {
            let p = BanditParams::new(kappa).unwrap();
            for i in 0..33 {
                let w = -4.0 + 0.25 * i as f64;
                let lhs = spiked_density(w, 0.0, 0.0, 1.0, kappa, 1.0).unwrap();
                let rhs = p.pdf(w).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-10,
                    "kappa={kappa}, w={w}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn spiked_density_normalizes() {
        let cases: [(f64, f64, f64, f64); 3] = [
            (-2.0, 1.0, 1.0, 0.0),
            (1.0, 2.0, 0.5, 0.0),
            (1.0, 2.0, 0.5, 0.7),
        ];
        for (alpha, beta, dt, x) in cases {
            let reach = x.abs() + alpha.abs() * dt + 30.0 * beta * dt.sqrt();
            let mass = simpson(
                |w| spiked_density(w, x, 0.0, dt, alpha, beta).unwrap(),
                -reach,
                reach,
                400_000,
            );
            assert!(
                (mass - 1.0).abs() < 1e-6,
                "alpha={alpha}, beta={beta}, dt={dt}, x={x}: mass = {mass}"
            );
        }
    }

    #[test]
    fn spiked_density_domain_errors() {
        assert!(spiked_density(0.0, 0.0, 0.5, 0.5, 1.0, 1.0).is_err());
        assert!(spiked_density(0.0, 0.0, 0.6, 0.5, 1.0, 1.0).is_err());
        assert!(spiked_density(0.0, 0.0, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(spiked_density(f64::NAN, 0.0, 0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn driftless_endpoints_are_standard_normal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ys = simulate_endpoints(0.0, 1.0, 0.0, 400, 10_000, &mut rng).unwrap();
        let d = ks_statistic(&ys, normal::cdf);
        assert!(d < 0.02, "KS = {d}");
    }

    #[test]
    fn negative_drift_concentrates_mass_near_zero() {
        // Coupled seeds: identical Brownian increments for both drifts.
        let frac_small = |alpha: f64| {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            let ys = simulate_endpoints(alpha, 1.0, 0.0, 400, 10_000, &mut rng).unwrap();
            ys.iter().filter(|y| y.abs() < 0.5).count() as f64 / ys.len() as f64
        };
        let neg = frac_small(-1.5);
        let pos = frac_small(1.5);
        assert!(
            neg > pos + 0.2,
            "P(|Y|<0.5): drift -1.5 gives {neg}, drift +1.5 gives {pos}"
        );
    }

    #[test]
    fn euler_bias_shrinks_with_the_step_count() {
        let cdf = endpoint_law_cdf(-2.0, 1.0, 0.0, 40_001).unwrap();
        assert!((cdf.total_mass() - 1.0).abs() < 1e-4);
        let ks_at = |steps: usize| {
            let mut rng = ChaCha8Rng::seed_from_u64(123);
            let ys = simulate_endpoints(-2.0, 1.0, 0.0, steps, 20_000, &mut rng).unwrap();
            ks_statistic(&ys, |x| cdf.eval(x))
        };
        let coarse = ks_at(250);
        let fine = ks_at(2000);
        assert!(
            fine < coarse,
            "KS at 2000 steps ({fine}) vs 250 steps ({coarse})"
        );
    }

    #[test]
    fn endpoints_are_deterministic_and_validated() {
        let a =
            simulate_endpoints(-1.0, 1.0, 0.0, 128, 50, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let b =
            simulate_endpoints(-1.0, 1.0, 0.0, 128, 50, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(simulate_endpoints(0.0, 1.0, 0.0, 50, 10, &mut rng).is_err());
        assert!(simulate_endpoints(0.0, -1.0, 0.0, 200, 10, &mut rng).is_err());
        assert!(simulate_endpoints(0.0, 1.0, 0.0, 200, 0, &mut rng).is_err());
    }
}
