//! Numerical differentiation of EC curves with respect to the linear SNR.

use crate::error::{Error, Result};

/// Central difference `(f(rho(1+h)) - f(rho(1-h))) / (2 rho h)` with one
/// Richardson extrapolation step.
///
/// `ec_fn` should be quadrature backed; Monte Carlo estimates are far too
/// noisy to differentiate.
pub fn d_ec_drho<F>(ec_fn: F, rho: f64, step_rel: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::Domain(format!("derivative needs rho > 0, got {rho}")));
    }
    if !step_rel.is_finite() || step_rel <= 0.0 || step_rel >= 1.0 {
        return Err(Error::Domain(format!(
            "relative step must lie in (0, 1), got {step_rel}"
        )));
    }
    let diff = |h: f64| -> Result<f64> {
        let hi = ec_fn(rho * (1.0 + h))?;
        let lo = ec_fn(rho * (1.0 - h))?;
        Ok((hi - lo) / (2.0 * rho * h))
    };
    let d1 = diff(step_rel)?;
    let d2 = diff(0.5 * step_rel)?;
    Ok((4.0 * d2 - d1) / 3.0)
}
