//! Dataset-scale generation: the balanced 34-class surrogate corpus and
//! multi-day recordings with planted precursor symptoms.
//!
//! Every window derives its own stream from `mix(seed, index)`, so
//! generation parallelizes across windows with byte-identical output at
//! any worker count, and a single window can be rebuilt without its
//! neighbors. Recordings are planned first (slot times, fault times,
//! slot kinds) and materialized per slot on demand, because a multi-day
//! stream of raw windows does not fit in memory comfortably.

use chrono::{DateTime, Duration, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::features::extract::{extract_window, FeatureVector};
use crate::features::registry::FeatureRegistry;
use crate::learn::dataset::{Dataset, Matrix};
use crate::seed;
use crate::signal::{WaveformWindow, WindowKind};
use crate::synth::events::{
    class_from_label, inject_event, synth_base, Direction, EventSpec, EventType, GridScenario,
    N_EVENT_CLASSES,
};

/// Window geometry of generated data: 500 ms at 4 kHz and 50 Hz by
/// default, the shape the feature bank is built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub samples: usize,
    pub sample_rate_hz: f64,
    pub fundamental_hz: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec { samples: 2000, sample_rate_hz: 4000.0, fundamental_hz: 50.0 }
    }
}

impl WindowSpec {
    pub fn duration_s(&self) -> f64 {
        self.samples as f64 / self.sample_rate_hz
    }
}

// ---------------------------------------------------------------------------
// Surrogate corpus
// ---------------------------------------------------------------------------

/// Earliest and latest onset sample drawn for generated events: at least
/// two cycles of pre-event carrier, at least half the window after it.
const ONSET_RANGE: std::ops::RangeInclusive<usize> = 160..=1000;

/// Build window `index` of the surrogate corpus: label `index /
/// per_class`, scenario and event parameters drawn from the window's own
/// stream, faulted phase rotating with the index so no phase is
/// preferred.
pub fn surrogate_window(
    spec: &WindowSpec,
    per_class: usize,
    seed_value: u64,
    index: usize,
) -> Result<(WaveformWindow<f64>, usize)> {
    if per_class < 1 {
        return Err(CoreError::InvalidParam("per_class must be at least 1".into()));
    }
    let total = N_EVENT_CLASSES * per_class;
    if index >= total {
        return Err(CoreError::InvalidParam(format!("window index {index} outside [0, {total})")));
    }
    let label = index / per_class;
    let (event, direction) = class_from_label(label)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed_value, index as u64));
    let scenario = GridScenario::draw(&mut rng);
    let onset_sample = rng.gen_range(ONSET_RANGE);
    let base = synth_base(spec, &scenario, None, &mut rng)?;
    let ev = EventSpec { event, direction, onset_sample, faulted_phase: index % 3, scenario };
    Ok((inject_event(&base, &ev, &mut rng)?, label))
}

/// Generate the full corpus: `per_class` windows per class, exactly
/// balanced labels, deterministic in the seed.
pub fn gen_surrogate_dataset(
    spec: &WindowSpec,
    per_class: usize,
    seed_value: u64,
) -> Result<(Vec<WaveformWindow<f64>>, Vec<usize>)> {
    if per_class < 1 {
        return Err(CoreError::InvalidParam("per_class must be at least 1".into()));
    }
    let total = N_EVENT_CLASSES * per_class;
    let pairs: Vec<(WaveformWindow<f64>, usize)> = (0..total)
        .into_par_iter()
        .map(|i| surrogate_window(spec, per_class, seed_value, i))
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

/// Generate the corpus and extract features window by window, keeping
/// only the feature matrix. Labels are `index / per_class`.
pub fn surrogate_feature_dataset(
    spec: &WindowSpec,
    per_class: usize,
    seed_value: u64,
    registry: &FeatureRegistry,
) -> Result<Dataset<f64>> {
    if per_class < 1 {
        return Err(CoreError::InvalidParam("per_class must be at least 1".into()));
    }
    let total = N_EVENT_CLASSES * per_class;
    let rows: Vec<(Vec<f64>, usize)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let (window, label) = surrogate_window(spec, per_class, seed_value, i)?;
            let fv = extract_window(&window, WindowKind::Synthetic, registry)?;
            Ok((fv.values, label))
        })
        .collect::<Result<_>>()?;
    let y: Vec<usize> = rows.iter().map(|(_, l)| *l).collect();
    let x: Vec<Vec<f64>> = rows.into_iter().map(|(v, _)| v).collect();
    Dataset::new(Matrix::from_rows(&x)?, y, N_EVENT_CLASSES)
}

// ---------------------------------------------------------------------------
// Recording plans
// ---------------------------------------------------------------------------

/// Default recording cadence: pre-selected windows per hour.
pub const DEFAULT_CADENCE_PER_HOUR: u32 = 4;

/// Minimum spacing between planted faults, hours.
const FAULT_GAP_H: f64 = 48.0;

/// Lead-in before the first fault and margin after the last, hours.
const FAULT_HEAD_H: f64 = 48.0;
const FAULT_TAIL_H: f64 = 24.0;

/// Length of the escalating-precursor window before each fault, hours.
const PRECURSOR_WINDOW_H: f64 = 168.0;

/// Precursor probability floor inside the window and its quadratic ramp
/// gain toward the fault instant.
const PRECURSOR_P_MIN: f64 = 0.05;
const PRECURSOR_P_GAIN: f64 = 0.85;

/// Background rates: stray precursor symptoms (only when the recording
/// has faults at all) and benign switching events.
const BASELINE_PRECURSOR_P: f64 = 0.01;
const BENIGN_P: f64 = 0.04;

/// What one recording slot holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Quiet,
    Benign(EventType),
    PrecursorHif,
    PrecursorIncipient,
}

impl SlotKind {
    pub fn is_precursor(self) -> bool {
        matches!(self, SlotKind::PrecursorHif | SlotKind::PrecursorIncipient)
    }
}

/// One planned window: its stream index, timestamp, and kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpSlot {
    pub index: u64,
    pub time: DateTime<Utc>,
    pub kind: SlotKind,
}

/// A planned multi-day recording: slot schedule plus ground-truth fault
/// times. Windows are materialized per slot from the plan.
#[derive(Debug, Clone, PartialEq)]
pub struct FpPlan {
    pub spec: WindowSpec,
    pub seed: u64,
    pub start: DateTime<Utc>,
    pub cadence_per_hour: u32,
    pub slots: Vec<FpSlot>,
    pub fault_times: Vec<DateTime<Utc>>,
}

/// Plan a recording of `days` days with `n_faults` planted faults at
/// least 48 h apart. Slot kinds are decided here: inside the 168 h
/// before a fault the precursor probability ramps quadratically from
/// 0.05 up to 0.9, elsewhere stray precursors appear at 0.01 (zero for a
/// fault-free recording) and benign switching at 0.04.
pub fn plan_fp_recording(
    spec: &WindowSpec,
    days: usize,
    n_faults: usize,
    seed_value: u64,
    start: DateTime<Utc>,
) -> Result<FpPlan> {
    if days == 0 {
        return Err(CoreError::InvalidParam("recording needs at least one day".into()));
    }
    let cadence = DEFAULT_CADENCE_PER_HOUR;
    let total_h = days as f64 * 24.0;

    // Faults: sorted uniform draws over the slack that remains after the
    // margins and the mandatory gaps, so spacing holds by construction.
    let plan_stream = u64::MAX; // distinct from every slot index
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed_value, plan_stream));
    let mut fault_times = Vec::with_capacity(n_faults);
    if n_faults > 0 {
        let slack =
            total_h - FAULT_HEAD_H - FAULT_TAIL_H - FAULT_GAP_H * (n_faults as f64 - 1.0);
        if slack < 0.0 {
            return Err(CoreError::InvalidParam(format!(
                "{days} days cannot hold {n_faults} faults {FAULT_GAP_H} h apart"
            )));
        }
        let mut draws: Vec<f64> = (0..n_faults).map(|_| rng.gen_range(0.0..=slack)).collect();
        draws.sort_by(f64::total_cmp);
        for (i, d) in draws.iter().enumerate() {
            let hour = FAULT_HEAD_H + d + FAULT_GAP_H * i as f64;
            fault_times.push(start + Duration::seconds((hour * 3600.0).round() as i64));
        }
    }

    let n_slots = days as u64 * 24 * cadence as u64;
    let slot_step = Duration::seconds(3600 / cadence as i64);
    let benign: Vec<EventType> =
        EventType::ALL.iter().copied().filter(|e| !e.is_fault()).collect();
    let mut slots = Vec::with_capacity(n_slots as usize);
    for i in 0..n_slots {
        let time = start + slot_step * i as i32;
        let to_fault_h = fault_times
            .iter()
            .map(|f| (*f - time).num_seconds() as f64 / 3600.0)
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min);
        let p_precursor = if to_fault_h <= PRECURSOR_WINDOW_H {
            let x = to_fault_h / PRECURSOR_WINDOW_H;
            PRECURSOR_P_MIN + PRECURSOR_P_GAIN * (1.0 - x) * (1.0 - x)
        } else if n_faults > 0 {
            BASELINE_PRECURSOR_P
        } else {
            0.0
        };
        let kind = if rng.gen::<f64>() < p_precursor {
            if rng.gen::<bool>() {
                SlotKind::PrecursorHif
            } else {
                SlotKind::PrecursorIncipient
            }
        } else if rng.gen::<f64>() < BENIGN_P {
            SlotKind::Benign(benign[rng.gen_range(0..benign.len())])
        } else {
            SlotKind::Quiet
        };
        slots.push(FpSlot { index: i, time, kind });
    }

    Ok(FpPlan { spec: *spec, seed: seed_value, start, cadence_per_hour: cadence, slots, fault_times })
}

/// Materialize one slot of a plan into its timestamped window. Precursor
/// slots re-draw the symptom's severity from the detectable end of the
/// range: high-impedance resistance from the low decades, incipient
/// duration from the upper half.
pub fn materialize_fp_window(plan: &FpPlan, slot_index: usize) -> Result<WaveformWindow<f64>> {
    let slot = plan.slots.get(slot_index).ok_or_else(|| {
        CoreError::InvalidParam(format!(
            "slot {slot_index} outside plan of {} slots",
            plan.slots.len()
        ))
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(plan.seed, slot.index));
    let mut scenario = GridScenario::draw(&mut rng);
    let base = synth_base(&plan.spec, &scenario, Some(slot.time), &mut rng)?;
    let event = match slot.kind {
        SlotKind::Quiet => return Ok(base),
        SlotKind::Benign(e) => e,
        SlotKind::PrecursorHif => {
            let log_r = rng.gen_range(20.0f64.log10()..=2000.0f64.log10());
            scenario.hif_resistance_ohm = 10.0f64.powf(log_r);
            EventType::Hif1Phg
        }
        SlotKind::PrecursorIncipient => {
            scenario.incipient_duration_s = rng.gen_range(0.02..=0.08);
            EventType::Incipient
        }
    };
    let direction = if rng.gen::<bool>() { Direction::Downstream } else { Direction::Upstream };
    let ev = EventSpec {
        event,
        direction,
        onset_sample: rng.gen_range(ONSET_RANGE),
        faulted_phase: rng.gen_range(0..3),
        scenario,
    };
    inject_event(&base, &ev, &mut rng)
}

/// Materialize and extract every slot of a plan in slot order. Quiet
/// slots are tagged as continuous windows, event slots as transient, the
/// tagging the window selector would apply.
pub fn fp_feature_rows(plan: &FpPlan, registry: &FeatureRegistry) -> Result<Vec<FeatureVector<f64>>> {
    (0..plan.slots.len())
        .into_par_iter()
        .map(|i| {
            let window = materialize_fp_window(plan, i)?;
            let kind = match plan.slots[i].kind {
                SlotKind::Quiet => WindowKind::Continuous,
                _ => WindowKind::Transient,
            };
            extract_window(&window, kind, registry)
        })
        .collect()
}
