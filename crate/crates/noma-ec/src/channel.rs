//! Rayleigh block-fading channel model through exponential order statistics.
//!
//! Both users see unit-mean exponential power gains; sorting a pair of
//! i.i.d. draws gives the weak/strong gains with densities
//! `f_weak(x) = 2 e^{-2x}`, `f_strong(x) = 2 e^{-x}(1 - e^{-x})` and joint
//! density `2 e^{-(x1+x2)}` on `x1 <= x2`. Sampling draws the two i.i.d.
//! gains by inverse CDF and sorts, which preserves the exact joint law.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One block-fading draw of ordered power gains, `x1 <= x2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedChannelPair {
    /// Weak-user gain.
    pub x1: f64,
    /// Strong-user gain.
    pub x2: f64,
}

impl OrderedChannelPair {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !(x1.is_finite() && x2.is_finite()) || x1 < 0.0 || x2 < x1 {
            return Err(Error::Domain(format!(
                "ordered gains need 0 <= x1 <= x2, got ({x1}, {x2})"
            )));
        }
        Ok(Self { x1, x2 })
    }
}

/// Density of the weaker of two unit-mean exponential gains.
pub fn pdf_weak(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("density needs x >= 0, got {x}")));
    }
    Ok(2.0 * (-2.0 * x).exp())
}

/// Density of the stronger of two unit-mean exponential gains.
pub fn pdf_strong(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("density needs x >= 0, got {x}")));
    }
    // 1 - e^{-x} via exp_m1 keeps small x accurate
    Ok(2.0 * (-x).exp() * (-(-x).exp_m1()))
}

/// Joint density of the ordered pair; zero off the ordered support.
pub fn joint_pdf(x1: f64, x2: f64) -> Result<f64> {
    if !(x1.is_finite() && x2.is_finite()) || x1 < 0.0 || x2 < 0.0 {
        return Err(Error::Domain(format!(
            "joint density needs x1, x2 >= 0, got ({x1}, {x2})"
        )));
    }
    if x1 > x2 {
        return Ok(0.0);
    }
    Ok(2.0 * (-(x1 + x2)).exp())
}

/// Deterministic, stream-addressable gain sampler.
///
/// ChaCha8 is counter based: equal `(seed, stream_id)` reproduce the same
/// gain sequence bit for bit, and distinct stream ids give statistically
/// independent streams. Parallel sweep workers each own one stream and
/// never share an instance.
#[derive(Debug, Clone)]
pub struct ChannelRng {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl ChannelRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    fn draw_exponential(&mut self) -> f64 {
        let u: f64 = self.rng.random();
        -(-u).ln_1p()
    }

    /// Draws two i.i.d. unit-mean exponentials and returns them sorted.
    pub fn sample_pair(&mut self) -> OrderedChannelPair {
        let a = self.draw_exponential();
        let b = self.draw_exponential();
        if a <= b {
            OrderedChannelPair { x1: a, x2: b }
        } else {
            OrderedChannelPair { x1: b, x2: a }
        }
    }
}
