//! Three-valued divergence verdicts and the ratio-based series diagnostic.
//!
//! Coverage dichotomies in this crate reduce to "does a series diverge?".
//! When a closed-form answer exists the classifiers return it directly; when
//! only numerical terms are available we fit the term-ratio model
//! `e_{m+1} / e_m = 1 - c/m` (Gauss's test) and refuse to call the result
//! near the undecidable boundary `c = 1`.

use serde::Serialize;

/// Divergence status of a nonnegative series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Divergence {
    Diverges,
    Converges,
    Indeterminate,
}

/// Outcome of a divergence test, with enough evidence to audit it:
/// the fitted ratio exponent (when a fit was performed) and a partial-sum
/// or probe trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceVerdict {
    pub status: Divergence,
    /// Fitted exponent `c` from the ratio model, or the analytically known
    /// decisive exponent; `None` when the verdict needed no exponent.
    pub fitted_c: Option<f64>,
    /// Diagnostic trace (partial sums for series tests, probe values for
    /// integral tests).
    pub evidence: Vec<f64>,
}

/// The band of fitted exponents on which the ratio test refuses to decide.
/// Gauss's test separates divergence (`c <= 1`) from convergence (`c > 1`);
/// fits inside `(INDETERMINATE_LO, INDETERMINATE_HI)` are too close to call.
pub const INDETERMINATE_LO: f64 = 0.9;
pub const INDETERMINATE_HI: f64 = 1.1;

/// Classify a positive series from consecutive terms `terms[0..]`, where
/// `terms[t]` is the series term with index `m_start + t`.
///
/// Fits `c_m = m * (1 - e_{m+1}/e_m)` over all consecutive pairs and takes
/// the median as a robust estimate of the ratio exponent. Verdict:
/// `c <= 0.9` diverges, `c >= 1.1` converges, otherwise indeterminate.
///
/// A degenerate sequence (all terms zero) converges trivially. Zero terms
/// followed by nonzero terms cannot arise from the product-form sequences
/// this diagnostic is applied to; zero pairs are skipped defensively.
pub fn gauss_ratio_test(terms: &[f64], m_start: u64) -> DivergenceVerdict {
    let mut partial = 0.0;
    let evidence: Vec<f64> = terms
        .iter()
        .map(|&e| {
            partial += e;
            partial
        })
        .collect();

    let mut fits: Vec<f64> = Vec::with_capacity(terms.len().saturating_sub(1));
    for (t, pair) in terms.windows(2).enumerate() {
        let (e_m, e_next) = (pair[0], pair[1]);
        if e_m <= 0.0 {
            continue;
        }
        let m = (m_start + t as u64) as f64;
        fits.push(m * (1.0 - e_next / e_m));
    }

    if fits.is_empty() {
        // Nothing left to fit: an all-zero tail sums to a finite value.
        return DivergenceVerdict { status: Divergence::Converges, fitted_c: None, evidence };
    }

    fits.sort_by(|a, b| a.partial_cmp(b).expect("ratio fits are finite"));
    let mid = fits.len() / 2;
    let fitted = if fits.len() % 2 == 1 { fits[mid] } else { (fits[mid - 1] + fits[mid]) / 2.0 };

    let status = if fitted <= INDETERMINATE_LO {
        Divergence::Diverges
    } else if fitted >= INDETERMINATE_HI {
        Divergence::Converges
    } else {
        Divergence::Indeterminate
    };
    DivergenceVerdict { status, fitted_c: Some(fitted), evidence }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64, lo: u64, hi: u64) -> Vec<f64> {
        (lo..=hi).map(|m| f(m as f64)).collect()
    }

    #[test]
    fn harmonic_terms_are_indeterminate() {
        // e_m = 1/m has c = 1 exactly; the fit must land inside the band.
        let v = gauss_ratio_test(&synthetic(|m| 1.0 / m, 10, 200), 10);
        assert_eq!(v.status, Divergence::Indeterminate);
        let c = v.fitted_c.unwrap();
        assert!(c > INDETERMINATE_LO && c < INDETERMINATE_HI, "fitted c = {c}");
    }

    #[test]
    fn inverse_square_terms_converge() {
        let v = gauss_ratio_test(&synthetic(|m| 1.0 / (m * m), 10, 200), 10);
        assert_eq!(v.status, Divergence::Converges);
        assert!(v.fitted_c.unwrap() >= INDETERMINATE_HI);
    }

    #[test]
    fn inverse_sqrt_terms_diverge() {
        let v = gauss_ratio_test(&synthetic(|m| 1.0 / m.sqrt(), 10, 200), 10);
        assert_eq!(v.status, Divergence::Diverges);
        assert!(v.fitted_c.unwrap() <= INDETERMINATE_LO);
    }

    #[test]
    fn all_zero_terms_converge() {
        let v = gauss_ratio_test(&[0.0; 50], 1);
        assert_eq!(v.status, Divergence::Converges);
        assert_eq!(v.fitted_c, None);
    }

    #[test]
    fn constant_terms_diverge() {
        // Ratio exactly 1 => fitted c = 0 => diverges (terms do not vanish).
        let v = gauss_ratio_test(&[0.25; 40], 5);
        assert_eq!(v.status, Divergence::Diverges);
        assert!(v.fitted_c.unwrap().abs() < 1e-12);
    }

    #[test]
    fn evidence_is_partial_sums() {
        let v = gauss_ratio_test(&[1.0, 2.0, 3.0], 1);
        assert_eq!(v.evidence, vec![1.0, 3.0, 6.0]);
    }
}
