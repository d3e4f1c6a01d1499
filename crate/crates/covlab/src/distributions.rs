//! Radius laws for covering shapes.
//!
//! All models in this crate are driven by a nonnegative radius variable ρ.
//! The quantities the theory consumes are:
//!
//! * the strict tail `G(x) = P(ρ > x)` (right-continuous, nonincreasing) —
//!   integer laws translate `P(ρ >= k)` to `G(k-1)`, which [`prob_geq`]
//!   does uniformly via the point mass at `x`;
//! * the d-th moment `E ρ^d`, an extended real: infinite moments are
//!   first-class values here, not errors, because the complete-coverage
//!   dichotomy turns exactly on their finiteness;
//! * the tail regime `(liminf, limsup)` of `x * G(x)`, which decides the
//!   eventual-coverage dichotomies.
//!
//! Sampling is inverse-CDF throughout: one uniform draw per sample, so
//! streams stay aligned across coupled runs.
//!
//! [`prob_geq`]: RadiusDistribution::prob_geq

use serde::{Serialize, Serializer};

use crate::error::{CovlabError, Result};
use crate::rng::RandomStream;

/// A nonnegative extended real. Infinite values print and serialize as
/// `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::Infinity => None,
        }
    }

    /// Reciprocal with the conventions used by threshold classifiers:
    /// `1/inf = 0` and `1/0 = inf`.
    pub fn recip(&self) -> ExtendedReal {
        match self {
            ExtendedReal::Infinity => ExtendedReal::Finite(0.0),
            ExtendedReal::Finite(v) if *v == 0.0 => ExtendedReal::Infinity,
            ExtendedReal::Finite(v) => ExtendedReal::Finite(1.0 / v),
        }
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => serializer.serialize_f64(*v),
            ExtendedReal::Infinity => serializer.serialize_str("inf"),
        }
    }
}

/// Whether a law lives on the continuum or on the positive integers.
/// Lattice and chain models require integer-valued radii; validation of
/// those specs rejects continuous kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportKind {
    Continuous,
    PositiveInteger,
}

/// Liminf and limsup of `x * G(x)` as `x -> inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRegime {
    pub liminf: ExtendedReal,
    pub limsup: ExtendedReal,
}

/// A radius law. Constructors validate parameters; all laws put no mass on
/// `(-inf, 0]` (a radius of zero covers nothing and is rejected outright).
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusDistribution {
    /// ρ ≡ value.
    Degenerate { value: f64 },
    /// Uniform on `[lo, hi]`.
    BoundedUniform { lo: f64, hi: f64 },
    /// Continuous law with tail `G(x) = min(1, c/x)`: support `[c, inf)`.
    ParetoTail { c: f64 },
    /// Continuous law with tail `G(x) = min(1, x^-alpha)`, `alpha` in (0,1]:
    /// so heavy that `x * G(x)` diverges for `alpha < 1`.
    Heavy { alpha: f64 },
    /// Finite table on positive integers; masses sum to one.
    DiscreteTable { entries: Vec<(u64, f64)> },
    /// Integer law with tail `G(j) = min(1, c/j)` at integer `j`.
    DiscretePareto { c: f64 },
}

use RadiusDistribution::*;

/// Tolerance on a discrete table's total mass.
const MASS_SUM_TOL: f64 = 1e-12;

impl RadiusDistribution {
    pub fn degenerate(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(CovlabError::invalid("rho", format!("degenerate value must be a positive finite real, got {value}")));
        }
        Ok(Degenerate { value })
    }

    pub fn bounded_uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi.is_finite() && lo < hi) {
            return Err(CovlabError::invalid("rho", format!("uniform bounds must satisfy 0 <= lo < hi < inf, got [{lo}, {hi}]")));
        }
        Ok(BoundedUniform { lo, hi })
    }

    pub fn pareto_tail(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(CovlabError::invalid("rho", format!("pareto constant must be a positive finite real, got {c}")));
        }
        Ok(ParetoTail { c })
    }

    pub fn heavy(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(CovlabError::invalid("rho", format!("heavy exponent must lie in (0, 1], got {alpha}")));
        }
        Ok(Heavy { alpha })
    }

    pub fn discrete_table(entries: Vec<(u64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(CovlabError::invalid("rho", "table needs at least one entry"));
        }
        let mut entries = entries;
        entries.sort_by_key(|&(v, _)| v);
        let mut total = 0.0;
        for window in entries.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(CovlabError::invalid("rho", format!("duplicate table value {}", window[0].0)));
            }
        }
        for &(value, mass) in &entries {
            if value == 0 {
                return Err(CovlabError::invalid("rho", "table values must be positive integers"));
            }
            if !(mass > 0.0 && mass.is_finite()) {
                return Err(CovlabError::invalid("rho", format!("table mass for value {value} must be positive, got {mass}")));
            }
            total += mass;
        }
        if (total - 1.0).abs() > MASS_SUM_TOL {
            return Err(CovlabError::invalid("rho", format!("table masses must sum to 1 (within {MASS_SUM_TOL}), got {total}")));
        }
        Ok(DiscreteTable { entries })
    }

    pub fn discrete_pareto(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(CovlabError::invalid("rho", format!("discrete-pareto constant must be a positive finite real, got {c}")));
        }
        Ok(DiscretePareto { c })
    }

    /// Continuum vs positive-integer support. A degenerate law counts as
    /// integer-valued exactly when its value is a positive integer.
    pub fn support_kind(&self) -> SupportKind {
        match self {
            Degenerate { value } => {
                if value.fract() == 0.0 && *value >= 1.0 {
                    SupportKind::PositiveInteger
                } else {
                    SupportKind::Continuous
                }
            }
            DiscreteTable { .. } | DiscretePareto { .. } => SupportKind::PositiveInteger,
            BoundedUniform { .. } | ParetoTail { .. } | Heavy { .. } => SupportKind::Continuous,
        }
    }

    /// Strict tail `G(x) = P(ρ > x)`.
    pub fn tail_probability(&self, x: f64) -> f64 {
        match self {
            Degenerate { value } => {
                if x < *value {
                    1.0
                } else {
                    0.0
                }
            }
            BoundedUniform { lo, hi } => {
                if x <= *lo {
                    1.0
                } else if x >= *hi {
                    0.0
                } else {
                    (hi - x) / (hi - lo)
                }
            }
            ParetoTail { c } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (c / x).min(1.0)
                }
            }
            Heavy { alpha } => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(-alpha)
                }
            }
            DiscreteTable { entries } => {
                entries.iter().filter(|&&(v, _)| v as f64 > x).map(|&(_, m)| m).sum()
            }
            DiscretePareto { c } => {
                // Integer-valued: no mass in (floor(x), x], so G(x) = G(floor(x)).
                let j = x.floor();
                if j < 1.0 {
                    1.0
                } else {
                    (c / j).min(1.0)
                }
            }
        }
    }

    /// Mass at the single point `x` (zero for continuous laws).
    pub fn point_mass(&self, x: f64) -> f64 {
        match self {
            Degenerate { value } => {
                if x == *value {
                    1.0
                } else {
                    0.0
                }
            }
            DiscreteTable { entries } => entries
                .iter()
                .find(|&&(v, _)| v as f64 == x)
                .map(|&(_, m)| m)
                .unwrap_or(0.0),
            DiscretePareto { c } => {
                if x >= 1.0 && x.fract() == 0.0 {
                    let below = if x == 1.0 { 1.0 } else { (c / (x - 1.0)).min(1.0) };
                    below - (c / x).min(1.0)
                } else {
                    0.0
                }
            }
            BoundedUniform { .. } | ParetoTail { .. } | Heavy { .. } => 0.0,
        }
    }

    /// `P(ρ >= x) = G(x) + P(ρ = x)`. For an integer law at integer `k`
    /// this equals `G(k - 1)`, the translation used throughout the lattice
    /// and chain models.
    pub fn prob_geq(&self, x: f64) -> f64 {
        (self.tail_probability(x) + self.point_mass(x)).min(1.0)
    }

    /// `E ρ^d` as an extended real.
    pub fn d_moment(&self, d: u32) -> ExtendedReal {
        if d == 0 {
            return ExtendedReal::Finite(1.0);
        }
        match self {
            Degenerate { value } => ExtendedReal::Finite(value.powi(d as i32)),
            BoundedUniform { lo, hi } => {
                let k = d as i32 + 1;
                ExtendedReal::Finite((hi.powi(k) - lo.powi(k)) / (k as f64 * (hi - lo)))
            }
            // Tail ~ c/x integrates against d*x^(d-1) to a divergent integral
            // for every d >= 1; same for the integer variant.
            ParetoTail { .. } | DiscretePareto { .. } => ExtendedReal::Infinity,
            // alpha <= 1 <= d always diverges.
            Heavy { .. } => ExtendedReal::Infinity,
            DiscreteTable { entries } => ExtendedReal::Finite(
                entries.iter().map(|&(v, m)| m * (v as f64).powi(d as i32)).sum(),
            ),
        }
    }

    /// Liminf and limsup of `x * G(x)`.
    pub fn tail_regime(&self) -> TailRegime {
        let both = |v: ExtendedReal| TailRegime { liminf: v, limsup: v };
        match self {
            Degenerate { .. } | BoundedUniform { .. } | DiscreteTable { .. } => {
                both(ExtendedReal::Finite(0.0))
            }
            ParetoTail { c } | DiscretePareto { c } => both(ExtendedReal::Finite(*c)),
            Heavy { alpha } => {
                if *alpha == 1.0 {
                    both(ExtendedReal::Finite(1.0))
                } else {
                    both(ExtendedReal::Infinity)
                }
            }
        }
    }

    /// Lower quantile: the smallest `x` with `F(x) >= p`, for `p` in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!((0.0..1.0).contains(&p), "quantile level must lie in [0,1), got {p}");
        match self {
            Degenerate { value } => *value,
            BoundedUniform { lo, hi } => lo + p * (hi - lo),
            ParetoTail { c } => c / (1.0 - p),
            Heavy { alpha } => (1.0 - p).powf(-1.0 / alpha),
            DiscreteTable { entries } => {
                let mut cum = 0.0;
                for &(value, mass) in entries {
                    cum += mass;
                    if cum >= p {
                        return value as f64;
                    }
                }
                entries.last().expect("table is nonempty").0 as f64
            }
            DiscretePareto { c } => (c / (1.0 - p)).ceil().max(1.0),
        }
    }

    /// Inverse-CDF sample; consumes exactly one uniform from the stream.
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        // open_closed() is in (0,1], so the quantile level is in [0,1).
        self.quantile(1.0 - stream.open_closed())
    }

    /// Canonical literal form, identical to the config-file grammar. Used
    /// for provenance hashing, so formatting must stay stable.
    pub fn canonical(&self) -> String {
        match self {
            Degenerate { value } => format!("degenerate({value})"),
            BoundedUniform { lo, hi } => format!("uniform({lo},{hi})"),
            ParetoTail { c } => format!("pareto(c={c})"),
            Heavy { alpha } => format!("heavy(alpha={alpha})"),
            DiscreteTable { entries } => {
                let body: Vec<String> =
                    entries.iter().map(|(v, m)| format!("{v}:{m}")).collect();
                format!("table({})", body.join(","))
            }
            DiscretePareto { c } => format!("discrete-pareto(c={c})"),
        }
    }
}
