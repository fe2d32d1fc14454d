//! Independent standard normal CDF and quantile for tests.
//!
//! Power series `Phi(x) = 1/2 + phi(x) * sum x^(2k+1) / (2k+1)!!` near the
//! origin, Laplace continued fraction for the Mills ratio in the tails, and
//! plain bisection for the inverse. Shares no code with the library.

#![allow(dead_code)]

pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn cdf(x: f64) -> f64 {
    if x.abs() <= 5.0 {
        let mut term = x;
        let mut sum = x;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum.abs().max(1e-300) {
            term *= x * x / (2.0 * k + 1.0);
            sum += term;
            k += 1.0;
        }
        0.5 + phi(x) * sum
    } else {
        let t = x.abs();
        // Evaluate the continued fraction t + 1/(t + 2/(t + 3/(t + ...))) backwards.
        let mut cf = t;
        for k in (1..200).rev() {
            cf = t + k as f64 / cf;
        }
        let upper = phi(t) / cf;
        if x > 0.0 { 1.0 - upper } else { upper }
    }
}

/// `cdf^{-1}(alpha)` by bisection to width `tol`.
pub fn quantile_bisect(alpha: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < alpha { lo = mid } else { hi = mid }
    }
    0.5 * (lo + hi)
}
