//! NOMA/OMA crossover detection and the adaptive scheme-selection policy.

use serde::Serialize;
use std::fmt;

use crate::ec::{
    ec1_noma_quadrature, ec2_noma_quadrature, ec_oma_quadrature, PowerAllocation, QosExponent,
    Scheme, Snr, User,
};
use crate::error::{Error, Result};

/// Which EC gap a crossover query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapTarget {
    /// Weak-user gap `EC1_NOMA - EC1_OMA`.
    Weak,
    /// Strong-user gap `EC2_NOMA - EC2_OMA`.
    Strong,
    /// Sum gap `V_N - V_O`.
    Sum,
}

impl fmt::Display for GapTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapTarget::Weak => write!(f, "user 1 (weak)"),
            GapTarget::Strong => write!(f, "user 2 (strong)"),
            GapTarget::Sum => write!(f, "sum"),
        }
    }
}

/// Bisection tolerance on the crossover SNR, in dB.
pub const ROOT_TOL_DB: f64 = 0.1;

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverOutcome {
    /// The gap changes sign inside the bracket.
    Root {
        rho_star_db: f64,
        /// Gap value at the returned root, b/s/Hz.
        achieved_gap: f64,
    },
    /// The gap is single-signed over the bracket; not an error.
    NoCrossover { gap_at_lo: f64, gap_at_hi: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverResult {
    pub target: GapTarget,
    pub bracket_db: (f64, f64),
    pub outcome: CrossoverOutcome,
}

impl fmt::Display for CrossoverResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.outcome {
            CrossoverOutcome::Root {
                rho_star_db,
                achieved_gap,
            } => write!(
                f,
                "{}: NOMA-OMA gap crosses zero at rho* = {:.2} dB (gap there {:+.2e} b/s/Hz, bracket [{}, {}] dB)",
                self.target, rho_star_db, achieved_gap, self.bracket_db.0, self.bracket_db.1
            ),
            CrossoverOutcome::NoCrossover { gap_at_lo, gap_at_hi } => write!(
                f,
                "{}: no crossover in [{}, {}] dB (gap {:+.3e} at the low end, {:+.3e} at the high end)",
                self.target, self.bracket_db.0, self.bracket_db.1, gap_at_lo, gap_at_hi
            ),
        }
    }
}

fn gap_fn<'a>(
    target: GapTarget,
    pa: &'a PowerAllocation,
    qos1: &'a QosExponent,
    qos2: &'a QosExponent,
) -> impl Fn(f64) -> Result<f64> + 'a {
    let (b1, b2) = (qos1.beta(), qos2.beta());
    move |rho_db: f64| {
        let snr = Snr::from_db(rho_db)?;
        Ok(match target {
            GapTarget::Weak => {
                ec1_noma_quadrature(&snr, pa, b1)?.value
                    - ec_oma_quadrature(&snr, b1, User::Weak)?.value
            }
            GapTarget::Strong => {
                ec2_noma_quadrature(&snr, pa, b2)?.value
                    - ec_oma_quadrature(&snr, b2, User::Strong)?.value
            }
            GapTarget::Sum => {
                ec1_noma_quadrature(&snr, pa, b1)?.value
                    + ec2_noma_quadrature(&snr, pa, b2)?.value
                    - ec_oma_quadrature(&snr, b1, User::Weak)?.value
                    - ec_oma_quadrature(&snr, b2, User::Strong)?.value
            }
        })
    }
}

/// Locates the zero of the quadrature-backed NOMA-minus-OMA gap by
/// bisection to [`ROOT_TOL_DB`]. A single-signed bracket yields a
/// `NoCrossover` outcome rather than an error.
pub fn find_crossover(
    target: GapTarget,
    pa: &PowerAllocation,
    qos1: &QosExponent,
    qos2: &QosExponent,
    bracket_db: (f64, f64),
) -> Result<CrossoverResult> {
    let (mut lo, mut hi) = bracket_db;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::Domain(format!(
            "crossover bracket must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let gap = gap_fn(target, pa, qos1, qos2);
    let gap_lo = gap(lo)?;
    let gap_hi = gap(hi)?;
    if gap_lo == 0.0 {
        return Ok(CrossoverResult {
            target,
            bracket_db,
            outcome: CrossoverOutcome::Root {
                rho_star_db: lo,
                achieved_gap: 0.0,
            },
        });
    }
    if gap_lo.signum() == gap_hi.signum() {
        return Ok(CrossoverResult {
            target,
            bracket_db,
            outcome: CrossoverOutcome::NoCrossover {
                gap_at_lo: gap_lo,
                gap_at_hi: gap_hi,
            },
        });
    }

    let mut f_lo = gap_lo;
    while hi - lo > ROOT_TOL_DB {
        let mid = 0.5 * (lo + hi);
        let f_mid = gap(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let rho_star_db = 0.5 * (lo + hi);
    Ok(CrossoverResult {
        target,
        bracket_db,
        outcome: CrossoverOutcome::Root {
            rho_star_db,
            achieved_gap: gap(rho_star_db)?,
        },
    })
}

/// Picks the scheme with the larger per-user EC at this operating point.
/// Ties go to NOMA. Returns the chosen scheme and the NOMA-minus-OMA gap.
pub fn select_scheme(
    user: User,
    snr: &Snr,
    pa: &PowerAllocation,
    qos1: &QosExponent,
    qos2: &QosExponent,
) -> Result<(Scheme, f64)> {
    let target = match user {
        User::Weak => GapTarget::Weak,
        User::Strong => GapTarget::Strong,
    };
    let gap = gap_fn(target, pa, qos1, qos2)(snr.rho_db())?;
    Ok((if gap >= 0.0 { Scheme::Noma } else { Scheme::Oma }, gap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(p1: f64, b1: f64, b2: f64) -> (PowerAllocation, QosExponent, QosExponent) {
        (
            PowerAllocation::new(p1).unwrap(),
            QosExponent::from_beta(b1).unwrap(),
            QosExponent::from_beta(b2).unwrap(),
        )
    }

    #[test]
    fn weak_user_crossover_at_default_exponent() {
        // quadrature and Monte Carlo both put this crossing near 18.2 dB
        let (pa, q1, q2) = setup(0.2, -1.0, -1.0);
        let r = find_crossover(GapTarget::Weak, &pa, &q1, &q2, (0.0, 40.0)).unwrap();
        match r.outcome {
            CrossoverOutcome::Root {
                rho_star_db,
                achieved_gap,
            } => {
                assert!(
                    (rho_star_db - 18.25).abs() < 0.2,
                    "rho* = {rho_star_db} dB"
                );
                assert!(achieved_gap.abs() < 2e-3);
            }
            other => panic!("expected a root, got {other:?}"),
        }
    }

    #[test]
    fn weak_user_crossover_moves_with_stricter_delay() {
        let (pa, q1, q2) = setup(0.2, -2.0, -2.0);
        let r = find_crossover(GapTarget::Weak, &pa, &q1, &q2, (0.0, 40.0)).unwrap();
        match r.outcome {
            CrossoverOutcome::Root { rho_star_db, .. } => {
                assert!((rho_star_db - 25.0).abs() < 2.0, "rho* = {rho_star_db} dB");
            }
            other => panic!("expected a root, got {other:?}"),
        }
    }

    #[test]
    fn sum_crossover_in_documented_band() {
        let (pa, q1, q2) = setup(0.2, -1.0, -1.0);
        let r = find_crossover(GapTarget::Sum, &pa, &q1, &q2, (0.0, 40.0)).unwrap();
        match r.outcome {
            CrossoverOutcome::Root { rho_star_db, .. } => {
                assert!(
                    (18.0..=27.0).contains(&rho_star_db),
                    "rho* = {rho_star_db} dB"
                );
            }
            other => panic!("expected a root, got {other:?}"),
        }
    }

    #[test]
    fn strong_user_gap_single_signed_at_low_snr() {
        let (pa, q1, q2) = setup(0.2, -1.0, -1.0);
        let r = find_crossover(GapTarget::Strong, &pa, &q1, &q2, (-20.0, 0.0)).unwrap();
        match r.outcome {
            CrossoverOutcome::NoCrossover { gap_at_lo, gap_at_hi } => {
                assert!(gap_at_lo > 0.0 && gap_at_hi > 0.0);
            }
            other => panic!("expected no crossover, got {other:?}"),
        }
    }

    #[test]
    fn bad_bracket_rejected() {
        let (pa, q1, q2) = setup(0.2, -1.0, -1.0);
        assert!(find_crossover(GapTarget::Weak, &pa, &q1, &q2, (10.0, 10.0)).is_err());
    }

    #[test]
    fn scheme_selection_matches_abstract_claims() {
        let (pa, q1, q2) = setup(0.2, -1.0, -1.0);
        let at = |db: f64| Snr::from_db(db).unwrap();
        let (s, gap) = select_scheme(User::Weak, &at(5.0), &pa, &q1, &q2).unwrap();
        assert_eq!(s, Scheme::Oma);
        assert!(gap < 0.0);
        let (s, _) = select_scheme(User::Weak, &at(30.0), &pa, &q1, &q2).unwrap();
        assert_eq!(s, Scheme::Noma);
        let (s, _) = select_scheme(User::Strong, &at(30.0), &pa, &q1, &q2).unwrap();
        assert_eq!(s, Scheme::Oma);
        let (s, _) = select_scheme(User::Strong, &at(0.0), &pa, &q1, &q2).unwrap();
        assert_eq!(s, Scheme::Noma);
    }

    #[test]
    fn selection_flips_exactly_once_along_rho() {
        let (pa, q1, q2) = setup(0.2, -1.0, -1.0);
        let root = match find_crossover(GapTarget::Weak, &pa, &q1, &q2, (0.0, 40.0))
            .unwrap()
            .outcome
        {
            CrossoverOutcome::Root { rho_star_db, .. } => rho_star_db,
            _ => panic!("expected a root"),
        };
        let mut flips = 0;
        let mut prev = None;
        for i in 0..=40 {
            let db = i as f64;
            if (db - root).abs() <= ROOT_TOL_DB {
                continue;
            }
            let (s, _) =
                select_scheme(User::Weak, &Snr::from_db(db).unwrap(), &pa, &q1, &q2).unwrap();
            if let Some(p) = prev {
                if p != s {
                    flips += 1;
                    assert!(
                        db > root && db - 1.0 < root,
                        "flip at {db} dB away from root {root} dB"
                    );
                }
            }
            prev = Some(s);
        }
        assert_eq!(flips, 1);
    }
}
