//! Spectrum co-existence of a primary and a secondary point-to-multipoint
//! network.
//!
//! The crate covers unit-mean fading gain laws ([`gain`]), concentration of
//! extreme order statistics ([`order_stats`]), random realizations of the two
//! networks ([`network`]), user activation ([`scheduler`]), sum-rates
//! ([`rates`]), closed-form throughput factors ([`asymptotics`]) and Monte
//! Carlo sweeps that compare them ([`experiments`]).

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod gain;
pub mod network;
pub mod order_stats;
pub mod rates;
pub mod rng;
pub mod sampling;
pub mod scheduler;
pub mod special;

pub use asymptotics::{AsymptoticConfig, FactorResult};
pub use error::{Error, Result};
pub use exact::{Rational, Scalar};
pub use gain::{FadingModel, LowGainParams, TailParams};
pub use network::{CoexistenceLevel, LinkMode, NetworkInstance, Scenario, Strategy, SystemParams};
pub use rates::RatePair;
pub use rng::StreamKey;
pub use scheduler::{ActivationExponents, Activity, ScheduleDecision, Verdict};
