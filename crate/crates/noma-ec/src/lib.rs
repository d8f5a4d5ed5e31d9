//! Effective-capacity analysis for a two-user uplink NOMA network under
//! statistical delay-QoS constraints.
//!
//! The library evaluates the per-user effective capacity (EC) three ways
//! and cross-validates them: closed forms built on the confluent
//! hypergeometric function U(1, b, z) and the upper incomplete gamma
//! function, adaptive quadrature of the defining expectations over the
//! Rayleigh order-statistics densities, and seeded Monte Carlo. On top of
//! that sit numerical checks of the asymptotic EC behaviour, NOMA/OMA
//! crossover detection and an adaptive scheme-selection rule. The
//! `noma-ec` binary exposes all of it as subcommands.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod ec;
pub mod error;
pub mod numerics;

pub use error::{Error, Result};
