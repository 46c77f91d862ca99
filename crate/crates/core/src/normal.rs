//! Standard normal density, distribution function, log-CDF and quantile.
//!
//! The CDF is evaluated through `libm::erfc`, which is accurate to a few ulp
//! over the whole real line. The log-CDF switches to an asymptotic expansion
//! in the far left tail where `erfc` underflows, and the quantile uses
//! Wichura's AS 241 (PPND16) rational approximation polished with one Newton
//! step against our own CDF, so that `cdf(quantile(p)) == p` holds to
//! essentially machine precision.

/// sqrt(2*pi)
pub const SQRT_2PI: f64 = 2.5066282746310002;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal density phi(x).
#[inline]
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal CDF Phi(x).
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// ln Phi(x), finite for all finite `x`.
///
/// For x >= -20 the direct `erfc` route keeps full relative accuracy; below
/// that the classical asymptotic expansion
/// `Phi(-t) ~ phi(t)/t * (1 - 1/t^2 + 3/t^4 - ...)` is summed until the terms
/// stop improving.
pub fn log_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        // ln(1 - Phi(-x)), safe because Phi(-x) <= 1/2 here.
        return (-cdf(-x)).ln_1p();
    }
    let t = -x;
    if t < 20.0 {
        return (0.5 * libm::erfc(t * FRAC_1_SQRT_2)).ln();
    }
    // Asymptotic series in 1/t^2; at t >= 20 the truncation error is below
    // double precision long before the terms turn divergent.
    let inv_t2 = 1.0 / (t * t);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        term *= -((2 * k - 1) as f64) * inv_t2;
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
    }
    -0.5 * t * t - t.ln() - SQRT_2PI.ln() + sum.ln()
}

/// Standard normal quantile Phi^{-1}(p) for p in (0,1).
///
/// Panics on p outside (0,1); public callers validate their probabilities
/// before reaching this function.
pub fn quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1), got {p}");
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        return -quantile_lower(1.0 - p);
    }
    quantile_lower(p)
}

/// Quantile for p in (0, 0.5]; refined in the lower tail where the CDF is
/// relatively accurate, so the Newton step never loses precision to
/// cancellation.
fn quantile_lower(p: f64) -> f64 {
    let mut z = ppnd16(p);
    // One Newton step: z <- z - (Phi(z) - p)/phi(z), in log space when the
    // density underflows.
    let f = pdf(z);
    if f > 1e-280 {
        z -= (cdf(z) - p) / f;
    } else {
        // Far tail: work with logs. d/dz logPhi = phi/Phi, so
        // z <- z - (logPhi(z) - ln p) * Phi(z)/phi(z); the Mills ratio
        // Phi(z)/phi(z) ~ 1/|z| there.
        let log_phi = log_cdf(z);
        let mills = 1.0 / -z;
        z -= (log_phi - p.ln()) * mills;
    }
    z
}

/// Wichura (1988), algorithm AS 241, PPND16. Absolute error ~ 1e-16.
fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = horner(
            r,
            &[
                3.387_132_872_796_366_608,
                1.331_416_678_917_843_774_5e2,
                1.971_590_950_306_551_442_7e3,
                1.373_169_376_550_946_112_5e4,
                4.592_195_393_154_987_145_7e4,
                6.726_577_092_700_870_085_3e4,
                3.343_057_558_358_812_810_5e4,
                2.509_080_928_730_122_672_7e3,
            ],
        );
        let den = horner(
            r,
            &[
                1.0,
                4.231_333_070_160_091_125_2e1,
                6.871_870_074_920_579_083e2,
                5.394_196_021_424_751_107_7e3,
                2.121_379_430_158_659_586_7e4,
                3.930_789_580_009_271_061e4,
                2.872_908_573_572_194_267_4e4,
                5.226_495_278_852_854_561e3,
            ],
        );
        return q * num / den;
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        let num = horner(
            r,
            &[
                1.423_437_110_749_683_577_3,
                4.630_337_846_156_545_295_9,
                5.769_497_221_460_691_405_5,
                3.647_848_324_763_204_605,
                1.270_458_252_452_368_382_6,
                2.417_807_251_774_506_117_7e-1,
                2.272_384_498_926_918_458_3e-2,
                7.745_450_142_783_414_076_4e-4,
            ],
        );
        let den = horner(
            r,
            &[
                1.0,
                2.053_191_626_637_758_821_9,
                1.676_384_830_183_803_849_4,
                6.897_673_349_851_000_045_5e-1,
                1.481_039_764_274_800_745_9e-1,
                1.519_866_656_361_645_719_7e-2,
                5.475_938_084_995_344_946e-4,
                1.050_750_071_644_416_843_2e-9,
            ],
        );
        num / den
    } else {
        let r = r - 5.0;
        let num = horner(
            r,
            &[
                6.657_904_643_501_103_777,
                5.463_784_911_164_114_37,
                1.784_826_539_917_291_335_8,
                2.965_605_718_285_048_912_3e-1,
                2.653_218_952_657_612_309_3e-2,
                1.242_660_947_388_078_438_6e-3,
                2.711_555_568_743_487_578_2e-5,
                2.010_334_399_292_288_132_7e-7,
            ],
        );
        let den = horner(
            r,
            &[
                1.0,
                5.998_322_065_558_879_376_9e-1,
                1.369_298_809_227_358_053_1e-1,
                1.487_536_129_085_061_485_3e-2,
                7.868_691_311_456_132_591e-4,
                1.846_318_317_510_054_681_8e-5,
                1.421_511_758_316_445_888_7e-7,
                2.044_263_103_389_939_785_6e-15,
            ],
        );
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[inline]
fn horner(x: f64, coeffs: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}
