//! Early-warning feature pipeline for medium-voltage grid waveforms.
//!
//! The crate covers the full path from raw eight-channel recordings to
//! fault-precursor predictions: window selection, a 1556-feature extraction
//! bank, a deterministic random forest with recursive feature elimination,
//! hourly aggregation with horizon labelling, and event-level evaluation.
//! A synthetic event generator provides labelled transients for the
//! surrogate classification task and long recordings for end-to-end runs.
//!
//! All numeric kernels are generic over [`Scalar`] (f32 or f64); the
//! crate-root aliases fix f64, which the pipeline uses throughout.

pub mod decompose;
pub mod error;
pub mod features;
pub mod fp;
pub mod io;
pub mod learn;
pub mod scalar;
pub mod seed;
pub mod select;
pub mod signal;
pub mod synth;
pub mod window_select;

pub use error::{CoreError, Result};
pub use scalar::Scalar;

/// Pipeline scalar type.
pub type Real = f64;

/// Eight-channel window of [`Real`] samples.
pub type Window = signal::WaveformWindow<Real>;

/// Fundamental-frequency phasor of [`Real`] parts.
pub type Phasor = signal::Phasor<Real>;

/// Registry-ordered feature vector of [`Real`] values.
pub type FeatureVector = features::FeatureVector<Real>;
