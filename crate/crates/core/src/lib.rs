//! Link-level simulation and analytical performance models for an N-user
//! Walsh-coded DCSK multiple-access system with decode-and-forward
//! cooperation over Nakagami-m multipath fading channels.
//!
//! The crate has two independent evaluation routes that cross-validate each
//! other:
//!
//! * a chip-level Monte Carlo simulator ([`modem`], [`channel`],
//!   [`cooperation`]) driven by the sweep engine in [`sweep`], and
//! * closed-form/series BER and throughput models in [`analysis`].
//!
//! All random sampling goes through explicit, seedable streams ([`rng`]), so
//! sweeps are reproducible bit-for-bit regardless of worker count.

pub mod analysis;
pub mod channel;
pub mod chaos;
pub mod cooperation;
pub mod error;
pub mod modem;
pub mod rng;
pub mod sweep;
pub mod walsh;

pub use error::{Error, Result};
