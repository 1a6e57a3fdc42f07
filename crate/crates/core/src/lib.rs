//! Spectrum of the quantum Rabi model from orthogonal polynomial systems.
//!
//! The parity recurrences of the model define three monic polynomial families.
//! Their zeros are the poles of the quantization function `F`, and the
//! eigenvalues are the zeros of `F`, exactly one per gap between consecutive
//! poles. Braak's `G±` functions and the closed-form displaced oscillator are
//! provided as independent checks.

pub mod error;
pub mod scaled;
pub mod model;
pub mod ops;

pub use error::{Error, Result};
pub use model::{EnergyValue, ModelParams, MonicCoefficients, MonicRecurrence, Parity, Repr};
pub use scaled::ScaledValue;
pub mod spectrum;
pub mod braak;
pub mod dho;
pub mod analysis;
