//! Parametric generator of labeled transient windows (34 surrogate
//! classes) and multi-day recordings with planted precursor symptoms.
//!
//! Events are built as parametric waveform signatures added onto a
//! steady-state carrier, not as solved network transients: the surrogate
//! task needs class-discriminative shapes, and slightly idealized
//! parameters do not hurt that purpose. Every random draw flows through
//! one caller-supplied stream, so a seed pins the output bit for bit.

pub mod arc;
pub mod events;
pub mod gen;

pub use arc::{ArcParams, ArcState, G_FLOOR};
pub use events::{
    class_from_label, class_label, class_name, inject_event, synth_base, Direction, EventSpec,
    EventType, GridScenario, N_EVENT_CLASSES,
};
pub use gen::{
    fp_feature_rows, gen_surrogate_dataset, materialize_fp_window, plan_fp_recording,
    surrogate_feature_dataset, surrogate_window, FpPlan, FpSlot, SlotKind, WindowSpec,
};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// 20 kV distribution class, line-to-line RMS.
pub const V_LL_RMS: f64 = 20_000.0;

/// Phase-to-ground RMS of the 20 kV class.
pub const V_PHASE_RMS: f64 = V_LL_RMS / SQRT3;

/// Phase-to-ground peak of the 20 kV class.
pub const V_PHASE_PEAK: f64 = V_PHASE_RMS * std::f64::consts::SQRT_2;

/// Internal integration step for arc-driven signatures. Arc time
/// constants (0.2 to 0.4 ms) are too fast for the 4 kHz recording grid,
/// so those events integrate on this finer grid and keep every
/// recording-grid sample.
pub const SIM_DT_S: f64 = 50e-6;
