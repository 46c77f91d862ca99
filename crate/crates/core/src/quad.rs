//! Small quadrature helpers: composite Simpson integration and a tabulated
//! CDF built by cumulative trapezoid integration of a density.

/// Composite Simpson rule over `[a, b]` with `intervals` subintervals
/// (rounded up to the next even number).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    acc * h / 3.0
}

/// A CDF tabulated on a uniform grid, evaluated by linear interpolation.
///
/// Built from a density with [`NumericCdf::from_pdf`]; the grid must cover
/// essentially all of the mass, the table is not renormalized.
#[derive(Debug, Clone)]
pub struct NumericCdf {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl NumericCdf {
    /// Tabulates `x -> integral of pdf from lo to x` on `points` grid nodes
    /// over `[lo, hi]` using the cumulative trapezoid rule.
    pub fn from_pdf<F: Fn(f64) -> f64>(pdf: F, lo: f64, hi: f64, points: usize) -> Self {
        let n = points.max(3);
        let step = (hi - lo) / (n - 1) as f64;
        let mut values = Vec::with_capacity(n);
        let mut acc = 0.0;
        let mut prev = pdf(lo);
        values.push(0.0);
        for i in 1..n {
            let x = lo + step * i as f64;
            let cur = pdf(x);
            acc += 0.5 * (prev + cur) * step;
            values.push(acc);
            prev = cur;
        }
        NumericCdf { lo, step, values }
    }

    /// Total mass accumulated over the grid; close to 1 when the grid covers
    /// the support of a proper density.
    pub fn total_mass(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// CDF value at `x`, clamped to the tabulated range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let pos = (x - self.lo) / self.step;
        if pos <= 0.0 {
            return 0.0;
        }
        if pos >= (n - 1) as f64 {
            return self.values[n - 1];
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}
