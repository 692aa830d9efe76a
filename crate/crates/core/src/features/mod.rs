//! The 1556-candidate feature bank: registry, per-cycle kernels,
//! whole-window kernels, the stationary wavelet transform and the
//! extraction pipeline that binds them in registry order.

pub mod cycle_stats;
pub mod extract;
pub mod harmonics;
pub mod registry;
pub mod swt;
pub mod sym;
pub mod whole;

pub use extract::{extract_window, extract_windows, FeatureVector};
pub use registry::{build_registry, Agg, Family, FeatureId, FeatureRegistry};
