//! Small-sample statistics: mean, sample standard deviation, and Student's t
//! distribution evaluated through the regularized incomplete beta function.
//!
//! Critical values are computed numerically (continued fraction + bisection,
//! absolute tolerance 1e-8) rather than from a lookup table, so any alpha and
//! fractional degrees of freedom work.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Arithmetic mean. Empty input returns 0.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n−1 denominator); 0 for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    // Constant input has zero spread exactly, not rounding residue.
    if values.windows(2).all(|w| w[0] == w[1]) {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    libm::sqrt(ss / (values.len() - 1) as f64)
}

// Lanczos approximation (g=7, n=9), standard coefficients.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Reflection keeps precision for small arguments.
        let pi = core::f64::consts::PI;
        return libm::log(pi / libm::sin(pi * x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (x + 0.5) * libm::log(t) - t + libm::log(acc)
}

/// Continued fraction for the incomplete beta function (Lentz's method).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0 && (0.0..=1.0).contains(&x));
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * libm::log(x) + b * libm::log(1.0 - x);
    let front = libm::exp(ln_front);
    // Symmetry keeps the continued fraction in its fast-converging region.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    debug_assert!(df > 0.0);
    let x = df / (df + t * t);
    let tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Quantile of Student's t distribution, bisected to 1e-8 absolute.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64, StatsError> {
    if !(0.0 < p && p < 1.0) {
        return Err(StatsError::InvalidParameter("p must be in (0, 1)"));
    }
    if !(df > 0.0) || !df.is_finite() {
        return Err(StatsError::InvalidParameter("df must be positive and finite"));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve on the upper half and mirror.
    let target = if p > 0.5 { p } else { 1.0 - p };
    let mut lo = 0.0f64;
    let mut hi = 2.0f64;
    while student_t_cdf(hi, df) < target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(StatsError::InvalidParameter("quantile out of range"));
        }
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if student_t_cdf(mid, df) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    Ok(if p > 0.5 { q } else { -q })
}

/// Welch's t statistic and degrees of freedom for two samples given their
/// summary statistics.
///
/// Returns `None` when both variances are zero (degenerate case; the caller
/// decides the verdict from the means).
pub fn welch_t(
    mean_a: f64,
    var_a: f64,
    n_a: usize,
    mean_b: f64,
    var_b: f64,
    n_b: usize,
) -> Option<(f64, f64)> {
    let sa = var_a / n_a as f64;
    let sb = var_b / n_b as f64;
    let se_sq = sa + sb;
    if se_sq <= 0.0 {
        return None;
    }
    let t = (mean_a - mean_b) / libm::sqrt(se_sq);
    let df = se_sq * se_sq
        / (sa * sa / (n_a as f64 - 1.0) + sb * sb / (n_b as f64 - 1.0));
    Some((t, df))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_std_basics() {
        assert_eq!(mean(&[0.4, 0.4, 0.4, 0.4, 0.4]), 0.4);
        assert_eq!(sample_std(&[0.4, 0.4, 0.4]), 0.0);
        assert_eq!(sample_std(&[0.7]), 0.0);
        // Hand sample-std of {0.3, 0.5}.
        assert!((sample_std(&[0.3, 0.5]) - 0.14142135623730953).abs() < 1e-15);
    }

    #[test]
    fn ln_gamma_spot_values() {
        // ln Γ(0.5) = ln sqrt(pi), ln Γ(5) = ln 24.
        assert!((ln_gamma(0.5) - 0.5723649429247001).abs() < 1e-12);
        assert!((ln_gamma(5.0) - 3.1780538303479458).abs() < 1e-12);
        assert!((ln_gamma(1.0)).abs() < 1e-13);
    }

    // Reference quantiles from standard statistics tables (0.975 quantile,
    // i.e. two-sided 5%).
    #[test]
    fn t_quantile_matches_reference_table() {
        let table = [
            (1.0, 12.706204736432095),
            (2.0, 4.302652729696142),
            (3.0, 3.182446305284263),
            (4.0, 2.7764451051977987),
            (5.0, 2.570581835636314),
            (6.0, 2.4469118511449692),
            (7.0, 2.3646242515927844),
            (8.0, 2.306004135204166),
            (10.0, 2.2281388519649385),
            (20.0, 2.0859634472658364),
            (30.0, 2.0422724563012373),
            (120.0, 1.9799304050527766),
            // Fractional degrees of freedom, as produced by Welch's formula.
            (5.5761, 2.492718000683027),
            (6.687, 2.38724749078557),
            (7.9259, 2.309762173256535),
        ];
        for (df, expected) in table {
            let q = student_t_quantile(0.975, df).unwrap();
            assert!(
                (q - expected).abs() < 5e-8,
                "df={df}: got {q}, want {expected}"
            );
        }
        let q995 = student_t_quantile(0.995, 5.0).unwrap();
        assert!((q995 - 4.032142983557536).abs() < 5e-8);
    }

    #[test]
    fn t_cdf_reference_values() {
        assert!((student_t_cdf(2.0, 7.0) - 0.9571903357185121).abs() < 1e-10);
        assert!((student_t_cdf(-1.5, 3.3) - 0.11125159835964586).abs() < 1e-10);
        assert!((student_t_cdf(0.0, 9.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn t_quantile_mirrors_and_roundtrips() {
        let q = student_t_quantile(0.025, 6.0).unwrap();
        assert!((q + 2.4469118511449692).abs() < 5e-8);
        for df in [1.5, 4.0, 11.25] {
            for p in [0.6, 0.9, 0.975, 0.999] {
                let q = student_t_quantile(p, df).unwrap();
                assert!((student_t_cdf(q, df) - p).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn welch_known_case() {
        // Groups with exact stats 0.3706 +/- 0.0082 vs 0.3841 +/- 0.0132, n=5.
        let (t, df) = welch_t(0.3706, 0.0082 * 0.0082, 5, 0.3841, 0.0132 * 0.0132, 5).unwrap();
        assert!((t - (-1.942577)).abs() < 1e-5);
        assert!((df - 6.687071).abs() < 1e-5);
    }

    #[test]
    fn welch_degenerate_variances() {
        assert!(welch_t(1.0, 0.0, 3, 0.0, 0.0, 3).is_none());
    }
}
