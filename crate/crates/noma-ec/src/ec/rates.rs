//! Instantaneous achievable rates for one fading block.

use super::{PowerAllocation, Snr, User, LN_2};
use crate::channel::OrderedChannelPair;

/// Uplink NOMA rate with successive interference cancellation, in b/s/Hz.
///
/// The receiver decodes the strong user first, treating the weak user as
/// interference, then subtracts it; the weak user is decoded clean:
/// `R1 = log2(1 + rho P1 x1)`,
/// `R2 = log2(1 + rho P2 x2 / (1 + rho P1 x1))`.
pub fn rate_noma(snr: &Snr, pa: &PowerAllocation, pair: &OrderedChannelPair, user: User) -> f64 {
    let rho = snr.rho();
    match user {
        User::Weak => (rho * pa.p1() * pair.x1).ln_1p() / LN_2,
        User::Strong => {
            let interference = 1.0 + rho * pa.p1() * pair.x1;
            (rho * pa.p2() * pair.x2 / interference).ln_1p() / LN_2
        }
    }
}

/// OMA rate with equal resource split and full transmit power:
/// `R = (1/2) log2(1 + rho x)`.
pub fn rate_oma(snr: &Snr, pair: &OrderedChannelPair, user: User) -> f64 {
    let x = match user {
        User::Weak => pair.x1,
        User::Strong => pair.x2,
    };
    0.5 * (snr.rho() * x).ln_1p() / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelRng;
    use crate::ec::PowerAllocation;

    fn pair(x1: f64, x2: f64) -> OrderedChannelPair {
        OrderedChannelPair::new(x1, x2).unwrap()
    }

    #[test]
    fn vanishing_snr_gives_zero_rate() {
        let snr = Snr::from_linear(1e-300).unwrap();
        let pa = PowerAllocation::new(0.2).unwrap();
        let p = pair(1.0, 2.0);
        assert!(rate_noma(&snr, &pa, &p, User::Weak) < 1e-290);
        assert!(rate_noma(&snr, &pa, &p, User::Strong) < 1e-290);
        assert!(rate_oma(&snr, &p, User::Weak) < 1e-290);
    }

    #[test]
    fn strong_user_hand_value() {
        // rho=1, P=(0.2,0.8), (x1,x2)=(1,2): R2 = log2(1 + 1.6/1.2) = log2(7/3)
        let snr = Snr::from_linear(1.0).unwrap();
        let pa = PowerAllocation::new(0.2).unwrap();
        let r = rate_noma(&snr, &pa, &pair(1.0, 2.0), User::Strong);
        assert!((r - (7.0_f64 / 3.0).log2()).abs() < 1e-14, "got {r}");
    }

    #[test]
    fn oma_hand_values() {
        let snr = Snr::from_linear(3.0).unwrap();
        let r = rate_oma(&snr, &pair(1.0, 1.0), User::Weak);
        assert!((r - 1.0).abs() < 1e-14);
        let snr = Snr::from_linear(10.0).unwrap();
        let r = rate_oma(&snr, &pair(0.5, 2.0), User::Strong);
        assert!((r - 0.5 * 21.0_f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn sic_sum_rate_identity() {
        // R1 + R2 = log2(1 + rho P1 x1 + rho P2 x2) for every draw
        let pa = PowerAllocation::new(0.3).unwrap();
        let mut rng = ChannelRng::new(5, 0);
        for &rho_db in &[-10.0, 0.0, 10.0, 30.0] {
            let snr = Snr::from_db(rho_db).unwrap();
            for _ in 0..1000 {
                let p = rng.sample_pair();
                let lhs = rate_noma(&snr, &pa, &p, User::Weak)
                    + rate_noma(&snr, &pa, &p, User::Strong);
                let rhs =
                    (snr.rho() * (pa.p1() * p.x1 + pa.p2() * p.x2)).ln_1p() / LN_2;
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                    "identity failed at rho_db={rho_db}: {lhs} vs {rhs}"
                );
            }
        }
    }
}
