//! Capra conjugacy, `ℓ0` envelopes and coordinate-k norms on sampled grids.

pub mod conjugacy;
pub mod envelope;
pub mod error;
pub mod norms;
pub mod numerics;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
