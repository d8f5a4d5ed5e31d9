//! Quadrature oracles: ECs computed by direct numerical integration of the
//! defining expectations over the fading densities.
//!
//! These never share code with the closed forms, so the two routes
//! cross-validate each other. The strong-user expectation is a double
//! integral, evaluated as an outer adaptive integral over the weak gain of
//! an inner adaptive integral over the strong gain.

use super::{EcEstimate, Method, PowerAllocation, Snr, User, LN_2};
use crate::error::{Error, Result};
use crate::numerics::{integrate_semi_infinite, QuadratureSpec};

fn require_negative_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta >= 0.0 {
        return Err(Error::Domain(format!(
            "normalized delay exponent must be negative, got {beta}"
        )));
    }
    Ok(())
}

fn phi_to_ec(phi: f64, beta: f64) -> f64 {
    phi.ln() / (beta * LN_2)
}

/// Weak-user NOMA EC: `(1/b) log2 E[(1 + rho P1 x)^b]` over the weak-gain
/// density `2 e^{-2x}`.
pub fn ec1_noma_quadrature(snr: &Snr, pa: &PowerAllocation, beta1: f64) -> Result<EcEstimate> {
    require_negative_beta(beta1)?;
    let rho_p1 = snr.rho() * pa.p1();
    let spec = QuadratureSpec::default();
    let phi = integrate_semi_infinite(
        |x| {
            let w = 2.0 * (-2.0 * x).exp();
            if w == 0.0 {
                0.0
            } else {
                w * (beta1 * (rho_p1 * x).ln_1p()).exp()
            }
        },
        0.0,
        &spec,
    )?
    .value;
    Ok(EcEstimate::deterministic(
        phi_to_ec(phi, beta1),
        Method::Quadrature,
    ))
}

/// Strong-user NOMA EC over the joint ordered density `2 e^{-(x1+x2)}`:
/// outer integral over `x1`, inner over `x2 in [x1, inf)`.
pub fn ec2_noma_quadrature(snr: &Snr, pa: &PowerAllocation, beta2: f64) -> Result<EcEstimate> {
    require_negative_beta(beta2)?;
    let rho = snr.rho();
    let (p1, p2) = (pa.p1(), pa.p2());
    let spec = QuadratureSpec::default();
    let inner_spec = spec.inner();

    let phi = integrate_semi_infinite(
        |x1| {
            let w1 = (-x1).exp();
            if w1 == 0.0 {
                return 0.0;
            }
            let denom = 1.0 + rho * p1 * x1;
            let inner = integrate_semi_infinite(
                |x2| {
                    let w2 = (-x2).exp();
                    if w2 == 0.0 {
                        0.0
                    } else {
                        w2 * (beta2 * (rho * p2 * x2 / denom).ln_1p()).exp()
                    }
                },
                x1,
                &inner_spec,
            )
            .map(|e| e.value)
            .unwrap_or(f64::NAN);
            2.0 * w1 * inner
        },
        0.0,
        &spec,
    )?;

    if !phi.value.is_finite() || phi.value <= 0.0 {
        return Err(Error::Accuracy {
            context: "strong-user double quadrature degenerated".into(),
            estimate: phi.value,
            error_bound: phi.error_bound,
        });
    }
    Ok(EcEstimate::deterministic(
        phi_to_ec(phi.value, beta2),
        Method::Quadrature,
    ))
}

/// OMA EC for either user: `(1/b) log2 E[(1 + rho x)^{b/2}]` over that
/// user's ordered-gain density.
pub fn ec_oma_quadrature(snr: &Snr, beta: f64, user: User) -> Result<EcEstimate> {
    require_negative_beta(beta)?;
    let rho = snr.rho();
    let half_beta = 0.5 * beta;
    let spec = QuadratureSpec::default();
    let phi = integrate_semi_infinite(
        |x| {
            let w = match user {
                User::Weak => 2.0 * (-2.0 * x).exp(),
                User::Strong => 2.0 * (-x).exp() * (-(-x).exp_m1()),
            };
            if w == 0.0 {
                0.0
            } else {
                w * (half_beta * (rho * x).ln_1p()).exp()
            }
        },
        0.0,
        &spec,
    )?
    .value;
    Ok(EcEstimate::deterministic(
        phi_to_ec(phi, beta),
        Method::Quadrature,
    ))
}

/// High-SNR ceiling of the strong-user NOMA EC:
/// `(1/b) log2 E[(1 + P2 x2 / (P1 x1))^b]` by double quadrature.
///
/// The integrand stays bounded as `x1 -> 0` because `b < 0` pushes the
/// power toward zero there.
pub fn ec2_high_snr_limit(pa: &PowerAllocation, beta2: f64) -> Result<f64> {
    require_negative_beta(beta2)?;
    let (p1, p2) = (pa.p1(), pa.p2());
    let spec = QuadratureSpec::default();
    let inner_spec = spec.inner();

    let phi = integrate_semi_infinite(
        |x1| {
            let w1 = (-x1).exp();
            if w1 == 0.0 || x1 == 0.0 {
                return 0.0;
            }
            let scale = p2 / (p1 * x1);
            let inner = integrate_semi_infinite(
                |x2| {
                    let w2 = (-x2).exp();
                    if w2 == 0.0 {
                        0.0
                    } else {
                        w2 * (beta2 * (scale * x2).ln_1p()).exp()
                    }
                },
                x1,
                &inner_spec,
            )
            .map(|e| e.value)
            .unwrap_or(f64::NAN);
            2.0 * w1 * inner
        },
        0.0,
        &spec,
    )?;

    if !phi.value.is_finite() || phi.value <= 0.0 {
        return Err(Error::Accuracy {
            context: "high-SNR limit quadrature degenerated".into(),
            estimate: phi.value,
            error_bound: phi.error_bound,
        });
    }
    Ok(phi_to_ec(phi.value, beta2))
}

/// Ergodic (delay-unconstrained) NOMA rate `E[R_i]` by quadrature.
pub fn ergodic_rate_noma(snr: &Snr, pa: &PowerAllocation, user: User) -> Result<f64> {
    let rho = snr.rho();
    let (p1, p2) = (pa.p1(), pa.p2());
    let spec = QuadratureSpec::default();
    match user {
        User::Weak => Ok(integrate_semi_infinite(
            |x| {
                let w = 2.0 * (-2.0 * x).exp();
                if w == 0.0 {
                    0.0
                } else {
                    w * (rho * p1 * x).ln_1p() / LN_2
                }
            },
            0.0,
            &spec,
        )?
        .value),
        User::Strong => {
            let inner_spec = spec.inner();
            let est = integrate_semi_infinite(
                |x1| {
                    let w1 = (-x1).exp();
                    if w1 == 0.0 {
                        return 0.0;
                    }
                    let denom = 1.0 + rho * p1 * x1;
                    let inner = integrate_semi_infinite(
                        |x2| {
                            let w2 = (-x2).exp();
                            if w2 == 0.0 {
                                0.0
                            } else {
                                w2 * (rho * p2 * x2 / denom).ln_1p() / LN_2
                            }
                        },
                        x1,
                        &inner_spec,
                    )
                    .map(|e| e.value)
                    .unwrap_or(f64::NAN);
                    2.0 * w1 * inner
                },
                0.0,
                &spec,
            )?;
            Ok(est.value)
        }
    }
}

/// Ergodic OMA rate `E[(1/2) log2(1 + rho x)]` by quadrature.
pub fn ergodic_rate_oma(snr: &Snr, user: User) -> Result<f64> {
    let rho = snr.rho();
    let spec = QuadratureSpec::default();
    Ok(integrate_semi_infinite(
        |x| {
            let w = match user {
                User::Weak => 2.0 * (-2.0 * x).exp(),
                User::Strong => 2.0 * (-x).exp() * (-(-x).exp_m1()),
            };
            if w == 0.0 {
                0.0
            } else {
                w * 0.5 * (rho * x).ln_1p() / LN_2
            }
        },
        0.0,
        &spec,
    )?
    .value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snr_db(db: f64) -> Snr {
        Snr::from_db(db).unwrap()
    }

    fn pa(p1: f64) -> PowerAllocation {
        PowerAllocation::new(p1).unwrap()
    }

    #[test]
    fn weak_user_reference_value() {
        // rho = 10, P1 = 0.2, beta = -1: EC = -log2(e E1(1)), reference
        // 0.745775173729268 computed by independent high-precision quadrature.
        let e = ec1_noma_quadrature(&snr_db(10.0), &pa(0.2), -1.0).unwrap();
        assert!((e.value - 0.745_775_173_729_268_1).abs() < 1e-9, "got {}", e.value);
    }

    #[test]
    fn strong_user_reference_values() {
        let cases = [
            (10.0, 0.2, -1.0, 2.400_510_537_882_737),
            (10.0, 0.2, -2.0, 2.198_441_409_155_472),
            (10.0, 0.2, -3.0, 2.009_882_519_308_978),
            (0.0, 0.2, -1.0, 0.889_938_576_106_257_6),
            (-10.0, 0.2, -1.0, 0.153_452_665_667_581_2),
            (40.0, 0.2, -1.0, 3.563_374_004_903_25),
            (10.0, 0.5, -1.0, 1.493_298_391_335_929),
            (-40.0, 0.2, -1.0, 1.730_991_736_872_001e-4),
        ];
        for (db, p1, b2, expect) in cases {
            let e = ec2_noma_quadrature(&snr_db(db), &pa(p1), b2).unwrap();
            assert!(
                (e.value - expect).abs() < 1e-8 * expect.max(1.0),
                "rho={db}dB p1={p1} b2={b2}: got {} want {expect}",
                e.value
            );
        }
    }

    #[test]
    fn oma_reference_values() {
        let e = ec_oma_quadrature(&snr_db(10.0), -1.0, User::Weak).unwrap();
        assert!((e.value - 0.970_557_782_063_669_6).abs() < 1e-9);
        let e = ec_oma_quadrature(&snr_db(10.0), -1.0, User::Strong).unwrap();
        assert!((e.value - 1.733_020_740_258_216).abs() < 1e-9);
    }

    #[test]
    fn degenerate_allocation_matches_single_user() {
        // P1 -> 1: weak user effectively owns the whole power budget
        let snr = snr_db(10.0);
        let nearly_one = pa(1.0 - 1e-12);
        let e = ec1_noma_quadrature(&snr, &nearly_one, -1.0).unwrap();
        let full = integrate_semi_infinite(
            |x| {
                let w = 2.0 * (-2.0 * x).exp();
                if w == 0.0 {
                    0.0
                } else {
                    w * (-(snr.rho() * x).ln_1p()).exp()
                }
            },
            0.0,
            &QuadratureSpec::default(),
        )
        .unwrap()
        .value;
        let expect = full.ln() / (-LN_2);
        assert!((e.value - expect).abs() < 1e-9, "{} vs {expect}", e.value);
    }

    #[test]
    fn jensen_limit_as_beta_vanishes() {
        // beta -> 0-: EC approaches the ergodic rate
        let snr = snr_db(10.0);
        let alloc = pa(0.2);
        let e = ec1_noma_quadrature(&snr, &alloc, -1e-6).unwrap();
        let er = ergodic_rate_noma(&snr, &alloc, User::Weak).unwrap();
        assert!((er - 0.860_347_382_271).abs() < 1e-9, "E[R1] = {er}");
        assert!((e.value - er).abs() < 1e-4, "{} vs {er}", e.value);
        assert!(e.value <= er);
    }

    #[test]
    fn high_snr_limit_values() {
        // P = (0.2, 0.8), beta2 = -1: reference 3.56579856414382;
        // P1 = P2 = 0.5: exactly 2 (min/sum of two unit exponentials is
        // uniform-folded with mean 1/4).
        let l = ec2_high_snr_limit(&pa(0.2), -1.0).unwrap();
        assert!((l - 3.565_798_564_143_82).abs() < 1e-8, "got {l}");
        let l = ec2_high_snr_limit(&pa(0.5), -1.0).unwrap();
        assert!((l - 2.0).abs() < 1e-9, "got {l}");
        // P1 -> 1 starves the strong user entirely
        let l = ec2_high_snr_limit(&pa(0.999_999), -1.0).unwrap();
        assert!(l < 1e-4, "got {l}");
    }

    #[test]
    fn strong_user_approaches_ceiling() {
        let alloc = pa(0.2);
        let limit = ec2_high_snr_limit(&alloc, -1.0).unwrap();
        let at_60 = ec2_noma_quadrature(&snr_db(60.0), &alloc, -1.0).unwrap();
        assert!(((at_60.value - limit) / limit).abs() < 0.01);
        assert!(at_60.value <= limit);
    }

    #[test]
    fn nonnegative_beta_rejected() {
        let snr = snr_db(0.0);
        let alloc = pa(0.2);
        assert!(ec1_noma_quadrature(&snr, &alloc, 0.0).is_err());
        assert!(ec2_noma_quadrature(&snr, &alloc, 1.0).is_err());
        assert!(ec_oma_quadrature(&snr, f64::NAN, User::Weak).is_err());
    }
}
