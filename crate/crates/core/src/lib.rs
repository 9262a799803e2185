//! Quantized distributed detection of a point source.
//!
//! Sensors observe an unknown-amplitude signal in Gaussian noise, quantize
//! their observations with a common threshold vector, and report to a fusion
//! center either error-free or over a Rayleigh-fading non-coherent M-FSK link.
//! The crate designs quantizers by maximum average entropy (MAE) or maximum
//! J-divergence (MJD) and estimates ROC curves by Monte Carlo simulation.

pub mod channel;
pub mod error;
pub mod experiment;
pub mod fusion;
pub mod model;
pub mod quadrature;
pub mod quantizer;
pub mod signal;

pub use error::{Error, Result};
pub use model::{CellPmf, Hypothesis, RocCurve, ScenarioConfig, ThresholdVector};
