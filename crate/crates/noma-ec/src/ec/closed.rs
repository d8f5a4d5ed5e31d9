//! Closed-form effective capacities.
//!
//! Weak user (NOMA): `EC1 = (1/b1) log2( (2/(P1 rho)) U(1, 2+b1, 2/(rho P1)) )`.
//!
//! OMA users: `EC1~ = (1/b1) log2( (2/rho) U(1, 2+b1/2, 2/rho) )` and
//! `EC2~ = (1/b2) log2( (2/rho) [U(1, 2+b2/2, 1/rho) - U(1, 2+b2/2, 2/rho)] )`.
//!
//! Strong user (NOMA), for negative integer `b2` and `x0 = 1/(rho P2)`:
//!
//! ```text
//! E = 2 P2^{1-b2} (rho P2)^{b2} e^{2/rho}
//!     * sum_{j=0}^{-b2} C(-b2, j) (rho P1)^j
//!       * sum_{k>=0} (-1)^k (P2-P1)^k / (k! (1+j+k))
//!         * [ Gamma(2+b2+j+k, x0) - (rho P2)^{-1-j-k} Gamma(1+b2, x0) ]
//! EC2 = (1/b2) log2 E
//! ```
//!
//! The inner sum is summed literally for small `x0`. For large `x0` the sum
//! cancels like `e^{-(P2-P1) x0}` against terms of size `e^{+(P2-P1) x0}`,
//! which no floating-point width survives, so that regime instead expands
//! `Gamma(1+b2, y)` and the remaining exponential integrals asymptotically;
//! the huge `e^{2/rho}` prefactor then cancels analytically. Both paths
//! track their own error estimate and report an accuracy failure rather
//! than return digits they cannot back.

use super::{EcEstimate, Method, PowerAllocation, Snr, User, LN_2};
use crate::error::{Error, Result};
use crate::numerics::{hyp_u_1_with, upper_incomplete_gamma, QuadratureSpec, SeriesSpec};

/// Largest supported `-beta2`; beyond this the binomial sum is numerically
/// pointless and the quadrature path is the right tool anyway.
const MAX_NEG_BETA2: i32 = 40;

/// Switch point between the literal inner sum and the asymptotic expansion.
const ASYMPTOTIC_X0: f64 = 18.0;

/// Largest estimated relative error either strong-user path may silently
/// accept.
const HEALTH_LIMIT: f64 = 5e-7;

fn require_negative_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta >= 0.0 {
        return Err(Error::Domain(format!(
            "normalized delay exponent must be negative, got {beta}"
        )));
    }
    Ok(())
}

fn finish(phi: f64, beta: f64, context: &str) -> Result<EcEstimate> {
    if !phi.is_finite() || phi <= 0.0 {
        return Err(Error::Accuracy {
            context: context.into(),
            estimate: phi,
            error_bound: f64::INFINITY,
        });
    }
    Ok(EcEstimate::deterministic(
        phi.ln() / (beta * LN_2),
        Method::ClosedForm,
    ))
}

/// Closed-form weak-user NOMA EC.
pub fn ec1_noma_closed(snr: &Snr, pa: &PowerAllocation, beta1: f64) -> Result<EcEstimate> {
    require_negative_beta(beta1)?;
    let z = 2.0 / (snr.rho() * pa.p1());
    let u = hyp_u_1_with(2.0 + beta1, z, &QuadratureSpec::default())?;
    finish(z * u, beta1, "weak-user closed form degenerated")
}

/// Closed-form OMA EC for either user.
pub fn ec_oma_closed(snr: &Snr, beta: f64, user: User) -> Result<EcEstimate> {
    require_negative_beta(beta)?;
    let rho = snr.rho();
    let b = 2.0 + 0.5 * beta;
    let spec = QuadratureSpec::default();
    let phi = match user {
        User::Weak => 2.0 / rho * hyp_u_1_with(b, 2.0 / rho, &spec)?,
        User::Strong => {
            2.0 / rho * (hyp_u_1_with(b, 1.0 / rho, &spec)? - hyp_u_1_with(b, 2.0 / rho, &spec)?)
        }
    };
    finish(phi, beta, "OMA closed form degenerated")
}

/// Closed-form strong-user NOMA EC; `beta2` must be a negative integer.
pub fn ec2_noma_closed(snr: &Snr, pa: &PowerAllocation, beta2: f64) -> Result<EcEstimate> {
    require_negative_beta(beta2)?;
    let m_real = -beta2;
    if (m_real - m_real.round()).abs() > 1e-9 {
        return Err(Error::NonIntegerBeta2 { beta2 });
    }
    let m = m_real.round() as i32;
    if m > MAX_NEG_BETA2 {
        return Err(Error::Domain(format!(
            "strong-user closed form supports beta2 down to -{MAX_NEG_BETA2}, got {beta2}"
        )));
    }

    let rho = snr.rho();
    let (p1, p2) = (pa.p1(), pa.p2());
    let x0 = 1.0 / (rho * p2);

    let ln_e = if x0 >= ASYMPTOTIC_X0 {
        ec2_ln_e_asymptotic(p1, p2, m, x0)?
    } else {
        ec2_ln_e_literal(rho, p1, p2, m, x0)?
    };
    let ec = ln_e / (beta2 * LN_2);
    if !ec.is_finite() {
        return Err(Error::Accuracy {
            context: "strong-user closed form degenerated".into(),
            estimate: ec,
            error_bound: f64::INFINITY,
        });
    }
    Ok(EcEstimate::deterministic(ec, Method::ClosedForm))
}

fn binomial(n: i32, k: i32) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Literal evaluation: `ln E` via the binomial sum over `j` and the inner
/// `k` sum, with the incomplete gamma functions advanced by their order
/// recurrence (already divided by `k!` so nothing overflows).
fn ec2_ln_e_literal(rho: f64, p1: f64, p2: f64, m: i32, x0: f64) -> Result<f64> {
    let series = SeriesSpec::default();
    let c = p1 - p2; // (-1)^k (P2-P1)^k = c^k
    let gamma_low = upper_incomplete_gamma((1 - m) as f64, x0)?;

    let mut total = 0.0_f64;
    let mut abs_total = 0.0_f64;
    for j in 0..=m {
        let coeff_j = binomial(m, j) * (rho * p1).powi(j);

        // g = Gamma(2 - m + j + k, x0) / k!, advanced in k
        let mut g = upper_incomplete_gamma((2 - m + j) as f64, x0)?;
        // q = x0^{2 - m + j + k} e^{-x0} / k!
        let mut q = (-x0 + (2 - m + j) as f64 * x0.ln()).exp();
        // r = x0^{1 + j + k} Gamma(1 - m, x0) / k!
        let mut r = x0.powi(1 + j) * gamma_low;
        let mut c_pow = 1.0_f64;

        let mut sum_k = 0.0_f64;
        let mut abs_k = 0.0_f64;
        let mut prev_mag = f64::INFINITY;
        let mut converged = false;
        for k in 0..series.max_terms {
            let denom = (1 + j + k as i32) as f64;
            let term = c_pow * (g - r) / denom;
            let mag = c_pow.abs() * (g.abs() + r.abs()) / denom;
            sum_k += term;
            abs_k += mag;
            if !sum_k.is_finite() {
                return Err(Error::Accuracy {
                    context: "strong-user closed form overflowed".into(),
                    estimate: f64::NAN,
                    error_bound: f64::INFINITY,
                });
            }
            let t_mag = term.abs();
            if k >= 1
                && t_mag <= prev_mag
                && t_mag <= series.relative_term_cutoff * sum_k.abs().max(f64::MIN_POSITIVE)
            {
                converged = true;
                break;
            }
            prev_mag = t_mag;

            let order = (2 - m + j) as f64 + k as f64;
            let kp1 = (k + 1) as f64;
            g = (order * g + q) / kp1;
            q *= x0 / kp1;
            r *= x0 / kp1;
            c_pow *= c;
        }
        if !converged {
            return Err(Error::Accuracy {
                context: "strong-user closed form series did not converge".into(),
                estimate: f64::NAN,
                error_bound: f64::INFINITY,
            });
        }
        total += coeff_j * sum_k;
        abs_total += coeff_j * abs_k;
    }

    let health = f64::EPSILON * abs_total / total.abs().max(f64::MIN_POSITIVE);
    if total <= 0.0 || !total.is_finite() || health > HEALTH_LIMIT {
        return Err(Error::Accuracy {
            context: "strong-user closed form lost too many digits to cancellation".into(),
            estimate: ec2_finish_literal(rho, p2, m, total),
            error_bound: health,
        });
    }
    Ok(ec2_ln_e_from_literal(rho, p2, m, total))
}

fn ec2_ln_e_from_literal(rho: f64, p2: f64, m: i32, total: f64) -> f64 {
    // prefactor 2 P2^{1+m} (rho P2)^{-m} e^{2/rho}, kept in log space
    2.0_f64.ln() + (1 + m) as f64 * p2.ln() - m as f64 * (rho * p2).ln() + 2.0 / rho + total.ln()
}

fn ec2_finish_literal(rho: f64, p2: f64, m: i32, total: f64) -> f64 {
    if total > 0.0 {
        ec2_ln_e_from_literal(rho, p2, m, total) / (-(m as f64) * LN_2)
    } else {
        f64::NAN
    }
}

/// Large-`x0` evaluation. Expanding `Gamma(1+b2, y) ~ y^{b2} e^{-y}
/// sum_i fall(b2, i) y^{-i}` inside the integral leaves scaled exponential
/// integrals `J(q) = int_{x0} y^q e^{-2 P2 y} dy`, themselves expanded in
/// `1/(2 P2 x0)`. Factoring `e^{-2/rho} x0^{b2+j}` out of every term makes
/// the prefactor exponential cancel exactly:
/// `ln E = ln 2 + (1+m) ln P2 + ln S`, with `S -> P2^{-m-1}/2` as
/// `x0 -> inf` (so `E -> 1`, pinning the low-SNR limit).
fn ec2_ln_e_asymptotic(p1: f64, p2: f64, m: i32, x0: f64) -> Result<f64> {
    let a = 2.0 * p2;
    let ax0 = a * x0;
    let power_ratio = p1 / p2; // (rho P1)^j x0^j

    // scaled exponential integral: J_hat(q) = x0^{-q} e^{a x0} J(q)
    //   = (1/a) sum_l fall(q, l) / (a x0)^l, truncated at its smallest term
    let j_hat = |q: f64| -> (f64, f64) {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut prev = term.abs();
        for l in 0..60 {
            term *= (q - l as f64) / ax0;
            let mag = term.abs();
            if mag >= prev {
                return (sum, mag);
            }
            sum += term;
            if mag < 1e-17 * sum.abs() {
                return (sum, mag);
            }
            prev = mag;
        }
        (sum, prev)
    };

    let beta2 = -(m as f64);
    let mut s = 0.0_f64;
    let mut s_err = 0.0_f64;
    for j in 0..=m {
        let coeff_j = binomial(m, j) * power_ratio.powi(j);

        // K_j = sum_i fall(b2, i) x0^{-i} J_hat(b2 + j - i)
        let mut fall = 1.0_f64;
        let mut scale = 1.0_f64;
        let mut k_sum = 0.0_f64;
        let mut k_err = 0.0_f64;
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let (jh, jh_err) = j_hat(beta2 + (j - i) as f64);
            let term = fall * scale * jh;
            let mag = term.abs();
            if mag >= prev {
                // divergence onset of the asymptotic series
                k_err += mag;
                break;
            }
            k_sum += term;
            k_err += (fall * scale).abs() * jh_err;
            if mag < 1e-17 * k_sum.abs() {
                break;
            }
            prev = mag;
            fall *= beta2 - i as f64;
            scale /= x0;
        }
        s += coeff_j * k_sum;
        s_err += coeff_j * k_err;
    }

    let health = s_err / s.abs().max(f64::MIN_POSITIVE);
    if s <= 0.0 || !s.is_finite() || health > HEALTH_LIMIT {
        let estimate = if s > 0.0 {
            (2.0_f64.ln() + (1 + m) as f64 * p2.ln() + s.ln()) / (-(m as f64) * LN_2)
        } else {
            f64::NAN
        };
        return Err(Error::Accuracy {
            context: "strong-user closed form asymptotic expansion not accurate here".into(),
            estimate,
            error_bound: health,
        });
    }
    Ok(2.0_f64.ln() + (1 + m) as f64 * p2.ln() + s.ln())
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
    fn weak_user_reference_values() {
        // (rho, p1, b1, expected) with expectations fixed by independent
        // high-precision evaluation of the defining integral
        let cases = [
            (10.0, 0.2, -1.0, 0.745_775_173_729_268_1),
            (-10.0, 0.5, -2.0, 0.034_411_225_550_441_7),
            (40.0, 0.2, -3.0, 3.655_739_516_262_842),
        ];
        for (db, p1, b1, expect) in cases {
            let e = ec1_noma_closed(&snr_db(db), &pa(p1), b1).unwrap();
            assert!(
                (e.value - expect).abs() < 1e-8,
                "rho={db}dB: got {} want {expect}",
                e.value
            );
            assert_eq!(e.method, Method::ClosedForm);
        }
    }

    #[test]
    fn weak_user_low_snr_limit() {
        let e = ec1_noma_closed(&Snr::from_linear(1e-8).unwrap(), &pa(0.2), -1.0).unwrap();
        assert!(e.value.abs() < 1e-6, "got {}", e.value);
    }

    #[test]
    fn oma_reference_values() {
        let cases = [
            (10.0, -1.0, User::Weak, 0.970_557_782_063_669_6),
            (10.0, -1.0, User::Strong, 1.733_020_740_258_216),
            (0.0, -2.0, User::Weak, 0.234_308_287_747_685_1),
            (40.0, -3.0, User::Strong, 6.138_857_889_233_848),
        ];
        for (db, beta, user, expect) in cases {
            let e = ec_oma_closed(&snr_db(db), beta, user).unwrap();
            assert!(
                (e.value - expect).abs() < 1e-8,
                "rho={db}dB user{:?}: got {} want {expect}",
                user,
                e.value
            );
        }
    }

    #[test]
    fn oma_low_snr_limit() {
        for user in [User::Weak, User::Strong] {
            let e = ec_oma_closed(&Snr::from_linear(1e-8).unwrap(), -1.0, user).unwrap();
            assert!(e.value.abs() < 1e-6, "got {}", e.value);
        }
    }

    #[test]
    fn strong_user_literal_branch_values() {
        let cases = [
            (10.0, 0.2, -1.0, 2.400_510_537_882_737),
            (10.0, 0.2, -2.0, 2.198_441_409_155_472),
            (10.0, 0.2, -3.0, 2.009_882_519_308_978),
            (0.0, 0.2, -1.0, 0.889_938_576_106_257_6),
            (-10.0, 0.2, -1.0, 0.153_452_665_667_581_2),
            (40.0, 0.2, -1.0, 3.563_374_004_903_25),
            (10.0, 0.5, -1.0, 1.493_298_391_335_929),
            (0.0, 0.5, -3.0, 0.524_581_231_681_859_7),
        ];
        for (db, p1, b2, expect) in cases {
            let e = ec2_noma_closed(&snr_db(db), &pa(p1), b2).unwrap();
            assert!(
                (e.value - expect).abs() < 1e-7,
                "rho={db}dB p1={p1} b2={b2}: got {} want {expect}",
                e.value
            );
        }
    }

    #[test]
    fn strong_user_asymptotic_branch_values() {
        // large-x0 references from extended-precision evaluation
        let cases = [
            (-12.0, 0.2, -1.0, 0.100_842_180_681_219_86),
            (-15.0, 0.2, -2.0, 0.052_006_686_654_594_466),
            (-18.0, 0.2, -1.0, 0.026_852_274_867_888_98),
            (-40.0, 0.2, -1.0, 1.730_991_736_872_001e-4),
            (-40.0, 0.2, -3.0, 1.730_876_392_320_425e-4),
            (-40.0, 0.5, -2.0, 1.081_877_043_162_87e-4),
        ];
        for (db, p1, b2, expect) in cases {
            let e = ec2_noma_closed(&snr_db(db), &pa(p1), b2).unwrap();
            assert!(
                ((e.value - expect) / expect).abs() < 1e-6,
                "rho={db}dB p1={p1} b2={b2}: got {} want {expect}",
                e.value
            );
        }
    }

    #[test]
    fn strong_user_low_snr_limit() {
        let e = ec2_noma_closed(&Snr::from_linear(1e-8).unwrap(), &pa(0.2), -1.0).unwrap();
        assert!(e.value.abs() < 1e-6, "got {}", e.value);
    }

    #[test]
    fn strong_user_non_integer_exponent_redirected() {
        let err = ec2_noma_closed(&snr_db(10.0), &pa(0.2), -1.5).unwrap_err();
        assert!(matches!(err, Error::NonIntegerBeta2 { .. }));
    }

    #[test]
    fn strong_user_pathological_allocation_fails_honestly() {
        // p1 -> 0 makes the literal sum cancel beyond repair in the band
        // where the asymptotic expansion has not kicked in yet
        let r = ec2_noma_closed(&snr_db(-11.0), &pa(0.01), -1.0);
        match r {
            Err(Error::Accuracy { .. }) => {}
            Ok(e) => {
                // if it claims success it must actually be close to the oracle
                let q = super::super::ec2_noma_quadrature(&snr_db(-11.0), &pa(0.01), -1.0)
                    .unwrap();
                assert!(
                    (e.value - q.value).abs() < 1e-6,
                    "claimed {} vs oracle {}",
                    e.value,
                    q.value
                );
            }
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn nonnegative_beta_rejected() {
        assert!(ec1_noma_closed(&snr_db(0.0), &pa(0.2), 0.0).is_err());
        assert!(ec2_noma_closed(&snr_db(0.0), &pa(0.2), 2.0).is_err());
        assert!(ec_oma_closed(&snr_db(0.0), f64::INFINITY, User::Weak).is_err());
    }
}
