//! Outage analysis of a downlink NOMA network served through a full-duplex
//! amplify-and-forward relay with MRT at the source and MRC at the users,
//! under residual hardware impairments, imperfect channel estimation and
//! imperfect successive interference cancellation over Nakagami-m fading.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what tail probabilities need.

pub mod analytic;
pub mod baselines;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod params;
pub mod quadrature;
pub mod real;
pub mod sidnr;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
pub use real::Real;

/// Double-precision system configuration.
pub type Config = params::SystemConfig<f64>;
/// Single-precision system configuration.
pub type ConfigF32 = params::SystemConfig<f32>;
/// Double-precision derived constants.
pub type Constants = params::DerivedConstants<f64>;
/// Double-precision channel realisation.
pub type Draw = channel::ChannelDraw<f64>;
