//! Seeded Monte Carlo EC estimation.
//!
//! The estimator is `(1/b) log2( mean exp(b ln2 R) )` over simulated rate
//! samples. Standard errors come from 32-batch batch means on the
//! log-domain estimator, which avoids the delta-method bias a nonlinear
//! function of a sample mean picks up at small N. Parallel runs assign a
//! fixed sample count to each of 32 RNG streams and reduce in stream
//! order, so results do not depend on the worker count.

use rayon::prelude::*;

use super::{rate_noma, rate_oma, EcEstimate, Method, PowerAllocation, Scheme, Snr, User, LN_2};
use crate::channel::ChannelRng;
use crate::error::{Error, Result};

pub(crate) const MC_BATCHES: usize = 32;

fn require_negative_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta >= 0.0 {
        return Err(Error::Domain(format!(
            "normalized delay exponent must be negative, got {beta}"
        )));
    }
    Ok(())
}

/// Draws `n` rate samples for one user under one scheme.
pub fn sample_rates(
    snr: &Snr,
    pa: &PowerAllocation,
    scheme: Scheme,
    user: User,
    n: usize,
    rng: &mut ChannelRng,
) -> Vec<f64> {
    let mut rates = Vec::with_capacity(n);
    for _ in 0..n {
        let pair = rng.sample_pair();
        let r = match scheme {
            Scheme::Noma => rate_noma(snr, pa, &pair, user),
            Scheme::Oma => rate_oma(snr, &pair, user),
        };
        rates.push(r);
    }
    rates
}

/// Batch sizes for splitting `n` samples across `MC_BATCHES` streams:
/// as even as possible, fixed by `n` alone.
fn batch_sizes(n: u64) -> Vec<u64> {
    let nb = (MC_BATCHES as u64).min(n.max(1));
    let base = n / nb;
    let extra = n % nb;
    (0..nb)
        .map(|b| if b < extra { base + 1 } else { base })
        .collect()
}

fn combine_batches(batch_sums: &[(f64, u64)], beta: f64) -> EcEstimate {
    let mut total = 0.0;
    let mut n = 0u64;
    for &(s, c) in batch_sums {
        total += s;
        n += c;
    }
    let value = (total / n as f64).ln() / (beta * LN_2);

    let batch_ecs: Vec<f64> = batch_sums
        .iter()
        .filter(|&&(_, c)| c > 0)
        .map(|&(s, c)| (s / c as f64).ln() / (beta * LN_2))
        .collect();
    let std_error = if batch_ecs.len() < 2 {
        0.0
    } else {
        let nb = batch_ecs.len() as f64;
        let mean = batch_ecs.iter().sum::<f64>() / nb;
        let var = batch_ecs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (nb - 1.0);
        (var / nb).sqrt()
    };

    EcEstimate {
        value,
        method: Method::MonteCarlo,
        std_error,
        samples: n,
    }
}

/// EC from a sequence of rate samples.
///
/// The exponentiation runs through `exp(beta ln2 R)`, so large rates at
/// high SNR cannot overflow for `beta < 0`.
pub fn ec_monte_carlo(rate_samples: &[f64], beta: f64) -> Result<EcEstimate> {
    require_negative_beta(beta)?;
    if rate_samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let sizes = batch_sizes(rate_samples.len() as u64);
    let mut batch_sums = Vec::with_capacity(sizes.len());
    let mut offset = 0usize;
    for &sz in &sizes {
        let chunk = &rate_samples[offset..offset + sz as usize];
        let s: f64 = chunk.iter().map(|&r| (beta * LN_2 * r).exp()).sum();
        batch_sums.push((s, sz));
        offset += sz as usize;
    }
    Ok(combine_batches(&batch_sums, beta))
}

/// Parallel, reproducible Monte Carlo EC: batch `b` draws its fixed share
/// of `samples` from stream `stream_base + b` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn ec_mc(
    snr: &Snr,
    pa: &PowerAllocation,
    scheme: Scheme,
    user: User,
    beta: f64,
    samples: u64,
    seed: u64,
    stream_base: u64,
) -> Result<EcEstimate> {
    require_negative_beta(beta)?;
    if samples == 0 {
        return Err(Error::EmptySamples);
    }
    let sizes = batch_sizes(samples);
    let batch_sums: Vec<(f64, u64)> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &sz)| {
            let mut rng = ChannelRng::new(seed, stream_base + b as u64);
            let mut s = 0.0_f64;
            for _ in 0..sz {
                let pair = rng.sample_pair();
                let r = match scheme {
                    Scheme::Noma => rate_noma(snr, pa, &pair, user),
                    Scheme::Oma => rate_oma(snr, &pair, user),
                };
                s += (beta * LN_2 * r).exp();
            }
            (s, sz)
        })
        .collect();
    Ok(combine_batches(&batch_sums, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::ec1_noma_closed;

    #[test]
    fn constant_rates_reproduce_the_rate() {
        let e = ec_monte_carlo(&vec![1.75; 4096], -2.0).unwrap();
        assert!((e.value - 1.75).abs() < 1e-12);
        assert!(e.std_error.abs() < 1e-12);
        assert_eq!(e.samples, 4096);
        assert_eq!(e.method, Method::MonteCarlo);
    }

    #[test]
    fn zero_rates_give_zero() {
        let e = ec_monte_carlo(&vec![0.0; 100], -1.0).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(
            ec_monte_carlo(&[], -1.0),
            Err(Error::EmptySamples)
        ));
    }

    #[test]
    fn mc_matches_closed_form_within_three_sigma() {
        // 10^7 weak-user samples at 10 dB against the closed form
        let snr = Snr::from_db(10.0).unwrap();
        let pa = PowerAllocation::new(0.2).unwrap();
        let mc = ec_mc(&snr, &pa, Scheme::Noma, User::Weak, -1.0, 10_000_000, 11, 0).unwrap();
        let cf = ec1_noma_closed(&snr, &pa, -1.0).unwrap();
        assert!(
            (mc.value - cf.value).abs() < 3.0 * mc.std_error,
            "mc {} +/- {} vs closed {}",
            mc.value,
            mc.std_error,
            cf.value
        );
        assert!(mc.std_error > 0.0);
        assert_eq!(mc.samples, 10_000_000);
    }

    #[test]
    fn parallel_path_equals_sequential_path() {
        // same streams, same batching: ec_mc must equal ec_monte_carlo on
        // the concatenated per-stream samples
        let snr = Snr::from_db(5.0).unwrap();
        let pa = PowerAllocation::new(0.3).unwrap();
        let n = 10_000u64;
        let par = ec_mc(&snr, &pa, Scheme::Oma, User::Strong, -1.5, n, 99, 16).unwrap();

        let sizes = batch_sizes(n);
        let mut rates = Vec::new();
        for (b, &sz) in sizes.iter().enumerate() {
            let mut rng = ChannelRng::new(99, 16 + b as u64);
            rates.extend(sample_rates(
                &snr,
                &pa,
                Scheme::Oma,
                User::Strong,
                sz as usize,
                &mut rng,
            ));
        }
        let seq = ec_monte_carlo(&rates, -1.5).unwrap();
        assert_eq!(par.value, seq.value);
        assert_eq!(par.std_error, seq.std_error);
    }

    #[test]
    fn determinism_across_repeats() {
        let snr = Snr::from_db(10.0).unwrap();
        let pa = PowerAllocation::new(0.2).unwrap();
        let a = ec_mc(&snr, &pa, Scheme::Noma, User::Strong, -1.0, 50_000, 7, 0).unwrap();
        let b = ec_mc(&snr, &pa, Scheme::Noma, User::Strong, -1.0, 50_000, 7, 0).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn tiny_sample_counts_still_work() {
        let e = ec_monte_carlo(&[0.5], -1.0).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
        assert_eq!(e.std_error, 0.0);
        let e = ec_monte_carlo(&[0.5, 0.7, 0.9], -1.0).unwrap();
        assert_eq!(e.samples, 3);
    }
}
