//! Multiple-quantum coherence spectra, echo protocols and entanglement
//! witnesses for collective spin-1/2 ensembles.

pub mod blocks;
pub mod dicke;
pub mod error;
pub mod exact;
pub mod integrate;
pub mod math;
pub mod moments;
pub mod parallel;
pub mod protocol;
pub mod params;
pub mod spectrum;
pub mod spin;
pub mod sym;
pub mod witness;

pub use error::{Error, Result};
pub use params::{DecoherenceRates, Direction, ModelParams, SpinAxis};
pub use spectrum::{MqcSpectrum, Source};
