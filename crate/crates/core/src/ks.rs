//! Kolmogorov–Smirnov distance between a sample and a reference CDF.

/// Two-sided KS statistic `sup_x |F_n(x) - F(x)|`.
///
/// Evaluates the usual discrete supremum
/// `max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)` over the order statistics.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    assert!(!samples.is_empty(), "KS statistic of an empty sample");
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in KS sample"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let hi = (i + 1) as f64 / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}
