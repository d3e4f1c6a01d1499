//! Small statistical helpers shared by the experiment harness and tests.

use crate::error::{CovlabError, Result};

/// Sample mean and standard error of the mean (unbiased sample variance).
/// Empty input yields `(0, 0)`; a single observation has zero standard error.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Wilson score interval for a binomial proportion.
///
/// Returns `(lo, hi)` at the given confidence level. The degenerate counts
/// 0 and `trials` are pinned to exact 0 / 1 endpoints so callers can rely on
/// them without worrying about floating rounding.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(CovlabError::invalid("trials", "must be positive"));
    }
    if successes > trials {
        return Err(CovlabError::invalid(
            "successes",
            format!("{successes} exceeds trials {trials}"),
        ));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(CovlabError::invalid("level", format!("must lie in (0,1), got {level}")));
    }
    let z = standard_normal_quantile(0.5 + level / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = n + z2;
    let center = (successes as f64 + z2 / 2.0) / denom;
    let half = z * (p * (1.0 - p) * n + z2 / 4.0).sqrt() / denom;
    let mut lo = (center - half).max(0.0);
    let mut hi = (center + half).min(1.0);
    if successes == 0 {
        lo = 0.0;
    }
    if successes == trials {
        hi = 1.0;
    }
    Ok((lo, hi))
}

/// Standard normal quantile (inverse CDF), Acklam's rational approximation.
/// Absolute error below 1.2e-9 over (0,1) — plenty for confidence bounds.
pub fn standard_normal_quantile(p: f64) -> f64 {
    assert!(0.0 < p && p < 1.0, "quantile argument must lie in (0,1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -standard_normal_quantile(1.0 - p)
    }
}
