//! Effective capacities of the two-user uplink: instantaneous rates,
//! closed forms, quadrature oracles, Monte Carlo estimators and sum ECs.
//!
//! The effective capacity of a user with normalized delay exponent
//! `beta < 0` over a block-fading channel is
//! `EC = (1/beta) log2 E[(1 + SINR)^beta]` in b/s/Hz. The expectation runs
//! over the ordered channel gains of [`crate::channel`].

mod closed;
mod monte_carlo;
mod quadrature;
mod rates;

pub use closed::{ec1_noma_closed, ec2_noma_closed, ec_oma_closed};
pub use monte_carlo::{ec_mc, ec_monte_carlo, sample_rates};
pub use quadrature::{
    ec1_noma_quadrature, ec2_high_snr_limit, ec2_noma_quadrature, ec_oma_quadrature,
    ergodic_rate_noma, ergodic_rate_oma,
};
pub use rates::{rate_noma, rate_oma};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

pub(crate) const LN_2: f64 = std::f64::consts::LN_2;

/// Normalized per-user transmit power coefficients, `p1 + p2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    p1: f64,
    p2: f64,
}

impl PowerAllocation {
    /// Weak-user coefficient in (0, 1); the strong user gets the rest.
    pub fn new(p1: f64) -> Result<Self> {
        if !p1.is_finite() || p1 <= 0.0 || p1 >= 1.0 {
            return Err(Error::Domain(format!(
                "power coefficient p1 must lie in (0, 1), got {p1}"
            )));
        }
        Ok(Self { p1, p2: 1.0 - p1 })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }
}

/// Statistical delay constraint: exponent `theta`, block-length-bandwidth
/// product `tf_b`, and the derived normalized negative exponent
/// `beta = -theta * tf_b / ln 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosExponent {
    theta: f64,
    tf_b: f64,
    beta: f64,
}

impl QosExponent {
    pub fn from_theta(theta: f64, tf_b: f64) -> Result<Self> {
        let beta = beta_from_theta(theta, tf_b)?;
        Ok(Self { theta, tf_b, beta })
    }

    /// Builds the constraint straight from `beta < 0`, taking `tf_b = 1`.
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta >= 0.0 {
            return Err(Error::Domain(format!(
                "normalized delay exponent must be negative, got {beta}"
            )));
        }
        Ok(Self {
            theta: -beta * LN_2,
            tf_b: 1.0,
            beta,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tf_b(&self) -> f64 {
        self.tf_b
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `beta = -theta * tf_b / ln 2` for `theta > 0`, `tf_b > 0`.
pub fn beta_from_theta(theta: f64, tf_b: f64) -> Result<f64> {
    if !(theta.is_finite() && tf_b.is_finite()) || theta <= 0.0 || tf_b <= 0.0 {
        return Err(Error::Domain(format!(
            "beta needs theta > 0 and tf_b > 0, got theta={theta}, tf_b={tf_b}"
        )));
    }
    Ok(-theta * tf_b / LN_2)
}

/// Linear transmit SNR with its dB twin kept consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr {
    rho: f64,
    rho_db: f64,
}

impl Snr {
    pub fn from_db(rho_db: f64) -> Result<Self> {
        if !rho_db.is_finite() {
            return Err(Error::Domain(format!("SNR must be finite, got {rho_db} dB")));
        }
        Ok(Self {
            rho: 10f64.powf(rho_db / 10.0),
            rho_db,
        })
    }

    pub fn from_linear(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::Domain(format!("linear SNR must be > 0, got {rho}")));
        }
        Ok(Self {
            rho,
            rho_db: 10.0 * rho.log10(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_db(&self) -> f64 {
        self.rho_db
    }
}

/// Which of the two users a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum User {
    /// User 1, the weaker channel.
    Weak,
    /// User 2, the stronger channel.
    Strong,
}

impl User {
    pub fn index(self) -> u8 {
        match self {
            User::Weak => 1,
            User::Strong => 2,
        }
    }
}

/// Multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Noma,
    Oma,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Noma => write!(f, "NOMA"),
            Scheme::Oma => write!(f, "OMA"),
        }
    }
}

/// How an EC value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::ClosedForm => write!(f, "closed_form"),
            Method::Quadrature => write!(f, "quadrature"),
            Method::MonteCarlo => write!(f, "monte_carlo"),
        }
    }
}

/// An EC value in b/s/Hz annotated with provenance and uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcEstimate {
    pub value: f64,
    pub method: Method,
    /// Monte Carlo standard error; zero for deterministic methods.
    pub std_error: f64,
    /// Sample count; zero for deterministic methods.
    pub samples: u64,
}

impl EcEstimate {
    pub(crate) fn deterministic(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            std_error: 0.0,
            samples: 0,
        }
    }
}

/// Evaluation method selector for the high-level entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo {
        samples: u64,
        seed: u64,
        /// First RNG stream id; an evaluation consumes a contiguous block of
        /// streams starting here.
        stream_base: u64,
    },
}

impl EvalMethod {
    pub fn method(&self) -> Method {
        match self {
            EvalMethod::ClosedForm => Method::ClosedForm,
            EvalMethod::Quadrature => Method::Quadrature,
            EvalMethod::MonteCarlo { .. } => Method::MonteCarlo,
        }
    }
}

/// Per-user EC under the requested scheme and method.
pub fn ec(
    snr: &Snr,
    pa: &PowerAllocation,
    qos: &QosExponent,
    scheme: Scheme,
    user: User,
    method: &EvalMethod,
) -> Result<EcEstimate> {
    let beta = qos.beta();
    match (method, scheme, user) {
        (EvalMethod::ClosedForm, Scheme::Noma, User::Weak) => ec1_noma_closed(snr, pa, beta),
        (EvalMethod::ClosedForm, Scheme::Noma, User::Strong) => ec2_noma_closed(snr, pa, beta),
        (EvalMethod::ClosedForm, Scheme::Oma, u) => ec_oma_closed(snr, beta, u),
        (EvalMethod::Quadrature, Scheme::Noma, User::Weak) => ec1_noma_quadrature(snr, pa, beta),
        (EvalMethod::Quadrature, Scheme::Noma, User::Strong) => ec2_noma_quadrature(snr, pa, beta),
        (EvalMethod::Quadrature, Scheme::Oma, u) => ec_oma_quadrature(snr, beta, u),
        (
            EvalMethod::MonteCarlo {
                samples,
                seed,
                stream_base,
            },
            scheme,
            user,
        ) => ec_mc(snr, pa, scheme, user, beta, *samples, *seed, *stream_base),
    }
}

/// Sum EC of both users. Monte Carlo uncertainties combine in quadrature;
/// the strong user's Monte Carlo run uses the stream block after the weak
/// user's so the two are independent.
pub fn sum_ec(
    snr: &Snr,
    pa: &PowerAllocation,
    qos1: &QosExponent,
    qos2: &QosExponent,
    scheme: Scheme,
    method: &EvalMethod,
) -> Result<EcEstimate> {
    let method2 = match *method {
        EvalMethod::MonteCarlo {
            samples,
            seed,
            stream_base,
        } => EvalMethod::MonteCarlo {
            samples,
            seed,
            stream_base: stream_base + monte_carlo::MC_BATCHES as u64,
        },
        m => m,
    };
    let e1 = ec(snr, pa, qos1, scheme, User::Weak, method)?;
    let e2 = ec(snr, pa, qos2, scheme, User::Strong, &method2)?;
    Ok(EcEstimate {
        value: e1.value + e2.value,
        method: e1.method,
        std_error: (e1.std_error * e1.std_error + e2.std_error * e2.std_error).sqrt(),
        samples: e1.samples.max(e2.samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_from_theta_values() {
        assert!((beta_from_theta(LN_2, 1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((beta_from_theta(2.0 * LN_2, 1.0).unwrap() + 2.0).abs() < 1e-15);
        // theta -> 0+ gives beta -> 0-
        let b = beta_from_theta(1e-12, 1.0).unwrap();
        assert!(b < 0.0 && b > -1e-11);
        assert!(beta_from_theta(0.0, 1.0).is_err());
        assert!(beta_from_theta(1.0, 0.0).is_err());
    }

    #[test]
    fn qos_consistency() {
        let q = QosExponent::from_theta(LN_2, 1.0).unwrap();
        assert!((q.beta() + 1.0).abs() < 1e-12);
        let q = QosExponent::from_beta(-2.0).unwrap();
        assert!((q.theta() * q.tf_b() / LN_2 - 2.0).abs() < 1e-12);
        assert!(QosExponent::from_beta(0.0).is_err());
    }

    #[test]
    fn snr_representations_agree() {
        let s = Snr::from_db(10.0).unwrap();
        assert!((s.rho() - 10.0).abs() < 1e-12);
        let s = Snr::from_linear(100.0).unwrap();
        assert!((s.rho_db() - 20.0).abs() < 1e-12);
        assert!(Snr::from_linear(0.0).is_err());
    }

    #[test]
    fn power_allocation_bounds() {
        let pa = PowerAllocation::new(0.2).unwrap();
        assert!((pa.p1() + pa.p2() - 1.0).abs() < 1e-15);
        assert!(PowerAllocation::new(0.0).is_err());
        assert!(PowerAllocation::new(1.0).is_err());
        assert!(PowerAllocation::new(f64::NAN).is_err());
    }

    #[test]
    fn sum_ec_adds_per_user_values() {
        let snr = Snr::from_db(10.0).unwrap();
        let pa = PowerAllocation::new(0.2).unwrap();
        let q = QosExponent::from_beta(-1.0).unwrap();
        let v = sum_ec(&snr, &pa, &q, &q, Scheme::Noma, &EvalMethod::Quadrature).unwrap();
        let e1 = ec1_noma_quadrature(&snr, &pa, -1.0).unwrap();
        let e2 = ec2_noma_quadrature(&snr, &pa, -1.0).unwrap();
        assert!((v.value - (e1.value + e2.value)).abs() < 1e-15);
    }
}
