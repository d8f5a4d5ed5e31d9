//! Special functions and integration kernels backing the closed forms and
//! the independent quadrature oracles.

mod quad;
mod special;

pub use quad::{integrate_semi_infinite, IntegralEstimate};
pub use special::{hyp_u_1, hyp_u_1_with, ln_gamma, upper_incomplete_gamma};

use crate::error::{Error, Result};

/// Controls for the adaptive quadrature.
///
/// Defaults are tight enough that oracle-vs-closed-form comparisons at 1e-6
/// are never quadrature limited.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-12,
            max_subdivisions: 500,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) || !(self.absolute_tolerance > 0.0) {
            return Err(Error::Domain(
                "quadrature tolerances must be strictly positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Domain("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    /// Spec for an inner integral of a nested quadrature, one decade tighter
    /// so the outer error estimate stays meaningful.
    pub(crate) fn inner(&self) -> Self {
        Self {
            relative_tolerance: self.relative_tolerance * 0.1,
            absolute_tolerance: self.absolute_tolerance * 0.1,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Truncation controls for infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSpec {
    pub relative_term_cutoff: f64,
    pub max_terms: usize,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self {
            relative_term_cutoff: 1e-14,
            max_terms: 500,
        }
    }
}

impl SeriesSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_term_cutoff > 0.0 && self.relative_term_cutoff < 1.0) {
            return Err(Error::Domain("series cutoff must be in (0, 1)".into()));
        }
        if self.max_terms < 1 {
            return Err(Error::Domain("max_terms must be >= 1".into()));
        }
        Ok(())
    }
}

/// A truncated series value plus bookkeeping about how it was reached.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSum {
    pub value: f64,
    pub terms_used: usize,
    /// Sum of absolute term magnitudes; `abs_sum / |value|` measures how much
    /// cancellation the summation survived.
    pub abs_sum: f64,
}

/// Sums `term(0) + term(1) + ...`, truncating once a term falls below
/// `cutoff * |partial sum|`. Terms must eventually decrease in magnitude.
pub fn sum_alternating_series<F>(mut term: F, spec: &SeriesSpec) -> Result<SeriesSum>
where
    F: FnMut(usize) -> f64,
{
    spec.validate()?;
    let mut sum = 0.0_f64;
    let mut abs_sum = 0.0_f64;
    let mut last = f64::INFINITY;
    for k in 0..spec.max_terms {
        let t = term(k);
        sum += t;
        abs_sum += t.abs();
        last = t.abs();
        if !sum.is_finite() {
            return Err(Error::Accuracy {
                context: "series summation overflowed".into(),
                estimate: sum,
                error_bound: f64::INFINITY,
            });
        }
        if k >= 1 && last <= spec.relative_term_cutoff * sum.abs().max(f64::MIN_POSITIVE) {
            return Ok(SeriesSum {
                value: sum,
                terms_used: k + 1,
                abs_sum,
            });
        }
    }
    Err(Error::Accuracy {
        context: "series did not converge within max_terms".into(),
        estimate: sum,
        error_bound: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_exponential_series() {
        // sum (-1)^k / k! = 1/e
        let spec = SeriesSpec::default();
        let mut fact = 1.0;
        let s = sum_alternating_series(
            |k| {
                if k > 0 {
                    fact *= k as f64;
                }
                if k % 2 == 0 {
                    1.0 / fact
                } else {
                    -1.0 / fact
                }
            },
            &spec,
        )
        .unwrap();
        assert!((s.value - (-1.0_f64).exp()).abs() < 1e-15, "got {}", s.value);
        assert!(s.terms_used < 25);
    }

    #[test]
    fn zero_series() {
        let s = sum_alternating_series(|_| 0.0, &SeriesSpec::default()).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn derived_series_value() {
        // sum (-0.6)^k / (k! (1+k)) = (1 - e^{-0.6}) / 0.6, brute-forced to
        // extended precision beforehand.
        let mut fact = 1.0;
        let s = sum_alternating_series(
            |k| {
                if k > 0 {
                    fact *= k as f64;
                }
                (-0.6_f64).powi(k as i32) / (fact * (1.0 + k as f64))
            },
            &SeriesSpec::default(),
        )
        .unwrap();
        assert!((s.value - 0.75198060650995595).abs() < 1e-15, "got {}", s.value);
    }

    #[test]
    fn max_terms_reached_is_accuracy_failure() {
        let spec = SeriesSpec {
            relative_term_cutoff: 1e-14,
            max_terms: 5,
        };
        let err = sum_alternating_series(|k| 1.0 / (k + 1) as f64, &spec).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(QuadratureSpec {
            relative_tolerance: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SeriesSpec {
            relative_term_cutoff: 1.5,
            max_terms: 10
        }
        .validate()
        .is_err());
        assert!(SeriesSpec {
            relative_term_cutoff: 1e-14,
            max_terms: 0
        }
        .validate()
        .is_err());
    }
}
