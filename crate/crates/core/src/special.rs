//! Log-Gamma differences, evaluated without forming the large log-Gamma
//! values themselves.
//!
//! `ln Γ(x + b) − ln Γ(x)` is shifted upward with the recurrence
//! `Γ(y + 1) = y Γ(y)` until both arguments exceed [`SHIFT`], then evaluated
//! from the difference of two Stirling series written so that the leading
//! `x ln x` terms cancel analytically.

/// Stirling coefficients `B_{2k} / (2k (2k − 1))`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const SHIFT: f64 = 25.0;

/// `ln Γ(x + b) − ln Γ(x)` for `x > 0` and `x + b > 0`.
pub fn ln_gamma_ratio(x: f64, b: f64) -> f64 {
    debug_assert!(x > 0.0 && x + b > 0.0, "ln_gamma_ratio({x}, {b})");
    if b == 0.0 {
        return 0.0;
    }
    let mut y = x;
    let mut correction = 0.0;
    while y.min(y + b) < SHIFT {
        correction += (b / y).ln_1p();
        y += 1.0;
    }
    stirling_difference(y, b) - correction
}

/// `ln Γ(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> f64 {
    ln_gamma_ratio(1.0, z - 1.0)
}

fn stirling_difference(y: f64, b: f64) -> f64 {
    let yb = y + b;
    let lead = (y - 0.5) * (b / y).ln_1p() + b * yb.ln() - b;
    let (inv_y, inv_yb) = (1.0 / y, 1.0 / yb);
    let (sq_y, sq_yb) = (inv_y * inv_y, inv_yb * inv_yb);
    let (mut py, mut pyb) = (inv_y, inv_yb);
    let mut series = 0.0;
    for c in STIRLING {
        series += c * (pyb - py);
        py *= sq_y;
        pyb *= sq_yb;
    }
    lead + series
}

/// `ln |(β)_n / n!|`, the log-magnitude of the n-th Taylor coefficient of
/// `(1 − z)^{−β}`. Returns `None` when the coefficient vanishes (β a
/// nonpositive integer and `n > −β`).
pub fn ln_abs_rising_over_factorial(beta: f64, n: u64) -> Option<f64> {
    // Factors (β + i)/(i + 1) are multiplied directly until β + i ≥ 1; the
    // remaining block is a ratio of Gamma functions with positive arguments.
    let k0 = if beta >= 1.0 {
        0
    } else {
        (1.0 - beta).ceil() as u64
    };
    let direct = n.min(k0);
    let mut acc = 0.0;
    for i in 0..direct {
        let factor = (beta + i as f64) / (i as f64 + 1.0);
        if factor == 0.0 {
            return None;
        }
        acc += factor.abs().ln();
    }
    if n > k0 {
        let b = beta - 1.0;
        acc += ln_gamma_ratio(n as f64 + 1.0, b) - ln_gamma_ratio(k0 as f64 + 1.0, b);
    }
    Some(acc)
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
