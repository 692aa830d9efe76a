//! Event vocabulary, per-event scenario draws, the steady-state carrier,
//! and the parametric waveform signature of each of the 17 event types.
//!
//! An event is injected as per-phase delta series added onto an existing
//! base window. Voltages always carry the source-impedance drop of the
//! injected current; ground-involved events add a common-mode neutral
//! displacement on top. Direction flips the sign of the measured current
//! deltas and leaves voltages untouched, which is the polarity relation a
//! relay actually sees for upstream versus downstream events.
//!
//! The network is treated as resonant-grounded: single-phase ground-fault
//! current is capped by the coil residual (detuning plus damping), which
//! is why high-impedance and single-phase faults stay small while
//! phase-to-phase loops do not.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, TAU};

use chrono::{DateTime, Utc};

use crate::error::{CoreError, Result};
use crate::signal::{derive_zero_sequence, fundamental_phasor, ChannelId, WaveformWindow};
use crate::synth::arc::{ArcParams, ArcState};
use crate::synth::gen::WindowSpec;
use crate::synth::{SIM_DT_S, V_PHASE_PEAK, V_PHASE_RMS};

/// Source impedance behind the measuring point, ohms. Sets the voltage
/// dip that any injected current produces at the relay.
const Z_SOURCE_OHM: f64 = 2.0;

/// Damping component of the coil residual current, amperes. Combined
/// with the drawn detuning it caps ground-fault current.
const RESIDUAL_DAMPING_A: f64 = 5.0;

/// Conductance of a fresh breakdown channel; arcs ignite here instead of
/// bootstrapping up from the extinguished floor.
const G_IGNITE_S: f64 = 1e-4;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_3: f64 = 1.732_050_807_568_877_2;

// ---------------------------------------------------------------------------
// Event vocabulary
// ---------------------------------------------------------------------------

/// The 17 simulated event types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventType {
    InrushLv,
    InrushHv,
    LoadOn,
    LoadOff,
    CapacitorOn,
    CapacitorOff,
    OhlOn,
    OhlOff,
    CableOn,
    CableOff,
    MotorStart,
    Shc1Phg,
    Shc2Ph,
    Shc2Phg,
    Shc3Ph,
    Hif1Phg,
    Incipient,
}

impl EventType {
    pub const ALL: [EventType; 17] = [
        EventType::InrushLv,
        EventType::InrushHv,
        EventType::LoadOn,
        EventType::LoadOff,
        EventType::CapacitorOn,
        EventType::CapacitorOff,
        EventType::OhlOn,
        EventType::OhlOff,
        EventType::CableOn,
        EventType::CableOff,
        EventType::MotorStart,
        EventType::Shc1Phg,
        EventType::Shc2Ph,
        EventType::Shc2Phg,
        EventType::Shc3Ph,
        EventType::Hif1Phg,
        EventType::Incipient,
    ];

    /// Types that are faults rather than routine switching.
    pub fn is_fault(self) -> bool {
        matches!(
            self,
            EventType::Shc1Phg
                | EventType::Shc2Ph
                | EventType::Shc2Phg
                | EventType::Shc3Ph
                | EventType::Hif1Phg
                | EventType::Incipient
        )
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&e| e == self).expect("event listed in ALL")
    }

    pub fn name(self) -> &'static str {
        match self {
            EventType::InrushLv => "inrush_lv",
            EventType::InrushHv => "inrush_hv",
            EventType::LoadOn => "load_on",
            EventType::LoadOff => "load_off",
            EventType::CapacitorOn => "capacitor_on",
            EventType::CapacitorOff => "capacitor_off",
            EventType::OhlOn => "ohl_on",
            EventType::OhlOff => "ohl_off",
            EventType::CableOn => "cable_on",
            EventType::CableOff => "cable_off",
            EventType::MotorStart => "motor_start",
            EventType::Shc1Phg => "shc_1phg",
            EventType::Shc2Ph => "shc_2ph",
            EventType::Shc2Phg => "shc_2phg",
            EventType::Shc3Ph => "shc_3ph",
            EventType::Hif1Phg => "hif_1phg",
            EventType::Incipient => "incipient",
        }
    }
}

/// Which side of the measuring point the event sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Downstream,
    Upstream,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Downstream, Direction::Upstream];

    pub fn index(self) -> usize {
        match self {
            Direction::Downstream => 0,
            Direction::Upstream => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Downstream => "down",
            Direction::Upstream => "up",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Direction::Downstream => 1.0,
            Direction::Upstream => -1.0,
        }
    }
}

/// Number of (event, direction) classes.
pub const N_EVENT_CLASSES: usize = EventType::ALL.len() * 2;

/// Class label of an (event, direction) pair: event index times two plus
/// direction index.
pub fn class_label(event: EventType, direction: Direction) -> usize {
    event.index() * 2 + direction.index()
}

/// Inverse of [`class_label`].
pub fn class_from_label(label: usize) -> Result<(EventType, Direction)> {
    if label >= N_EVENT_CLASSES {
        return Err(CoreError::InvalidParam(format!(
            "class label {label} outside [0, {N_EVENT_CLASSES})"
        )));
    }
    Ok((EventType::ALL[label / 2], Direction::ALL[label % 2]))
}

/// Human-readable class name, `event/direction`.
pub fn class_name(label: usize) -> Result<String> {
    let (e, d) = class_from_label(label)?;
    Ok(format!("{}/{}", e.name(), d.name()))
}

// ---------------------------------------------------------------------------
// Scenario draws
// ---------------------------------------------------------------------------

/// One grid scenario: every row of the event-simulation parameter table,
/// drawn uniformly, plus three recorded assumptions of this generator
/// (voltage unbalance, standing zero-sequence level, noise level) whose
/// ranges keep the base RMS within 1% of nominal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridScenario {
    /// Load apparent power, MVA (0.05 to 2.5).
    pub load_mva: f64,
    /// Load power factor (0.80 to 0.99).
    pub power_factor: f64,
    /// Capacitor bank rating, MVA (0.1 to 2.0).
    pub capacitor_mva: f64,
    /// Overhead-line conductor spacing, m (0.4 to 2.0).
    pub ohl_spacing_m: f64,
    /// Overhead-line tower height, m (8 to 12).
    pub tower_height_m: f64,
    /// Overhead-line length, km (1 to 25).
    pub ohl_length_km: f64,
    /// Cable length, km (0.5 to 10).
    pub cable_length_km: f64,
    /// Transformer saturated reactance, pu (1.0 to 2.0).
    pub sat_reactance_pu: f64,
    /// Transformer saturation exponent (7 to 18).
    pub sat_exponent: f64,
    /// Transformer knee flux, pu (1.05 to 1.25).
    pub knee_flux_pu: f64,
    /// Petersen coil detuning, A (-10 to 10).
    pub petersen_detuning_a: f64,
    /// Station grounding resistance, ohm (0.1 to 20).
    pub grounding_ohm: f64,
    /// Arc constants (tau 0.2 to 0.4 ms, u0 300 to 4000 V, r0 0.010 to
    /// 0.015 ohm).
    pub arc: ArcParams,
    /// Short-circuit fault resistance, ohm (0.001 to 20).
    pub shc_resistance_ohm: f64,
    /// High-impedance fault resistance, ohm (20 to 150000).
    pub hif_resistance_ohm: f64,
    /// Incipient fault duration, s (0.002 to 0.08).
    pub incipient_duration_s: f64,
    /// Per-phase amplitude unbalance bound, fraction (0 to 0.005).
    pub unbalance: f64,
    /// Standing zero-sequence voltage, fraction of phase peak (0 to 0.004).
    pub standing_zero_seq: f64,
    /// Measurement noise sigma, fraction of channel scale (0.001 to 0.005).
    pub noise_level: f64,
}

impl GridScenario {
    /// Uniform draw of every field. The draw order is fixed and part of
    /// the seed contract.
    pub fn draw<R: Rng>(rng: &mut R) -> GridScenario {
        GridScenario {
            load_mva: rng.gen_range(0.05..=2.5),
            power_factor: rng.gen_range(0.80..=0.99),
            capacitor_mva: rng.gen_range(0.1..=2.0),
            ohl_spacing_m: rng.gen_range(0.4..=2.0),
            tower_height_m: rng.gen_range(8.0..=12.0),
            ohl_length_km: rng.gen_range(1.0..=25.0),
            cable_length_km: rng.gen_range(0.5..=10.0),
            sat_reactance_pu: rng.gen_range(1.0..=2.0),
            sat_exponent: rng.gen_range(7.0..=18.0),
            knee_flux_pu: rng.gen_range(1.05..=1.25),
            petersen_detuning_a: rng.gen_range(-10.0..=10.0),
            grounding_ohm: rng.gen_range(0.1..=20.0),
            arc: ArcParams {
                tau_s: rng.gen_range(2e-4..=4e-4),
                u0_v: rng.gen_range(300.0..=4000.0),
                r0_ohm: rng.gen_range(0.010..=0.015),
            },
            shc_resistance_ohm: rng.gen_range(0.001..=20.0),
            hif_resistance_ohm: rng.gen_range(20.0..=150_000.0),
            incipient_duration_s: rng.gen_range(0.002..=0.08),
            unbalance: rng.gen_range(0.0..=0.005),
            standing_zero_seq: rng.gen_range(0.0..=0.004),
            noise_level: rng.gen_range(0.001..=0.005),
        }
    }

    /// Mid-range scenario with unbalance, standing zero sequence and
    /// noise all zero; analytic tests start here.
    pub fn quiet() -> GridScenario {
        GridScenario {
            load_mva: 1.0,
            power_factor: 0.90,
            capacitor_mva: 1.0,
            ohl_spacing_m: 1.0,
            tower_height_m: 10.0,
            ohl_length_km: 10.0,
            cable_length_km: 5.0,
            sat_reactance_pu: 1.5,
            sat_exponent: 12.0,
            knee_flux_pu: 1.15,
            petersen_detuning_a: 0.0,
            grounding_ohm: 5.0,
            arc: ArcParams { tau_s: 3e-4, u0_v: 1000.0, r0_ohm: 0.012 },
            shc_resistance_ohm: 1.0,
            hif_resistance_ohm: 1000.0,
            incipient_duration_s: 0.02,
            unbalance: 0.0,
            standing_zero_seq: 0.0,
            noise_level: 0.0,
        }
    }

    /// Peak of the drawn load current.
    fn load_current_peak(&self) -> f64 {
        SQRT_2 * self.load_mva * 1e6 / (3.0 * V_PHASE_RMS)
    }

    /// Coil residual current available to ground faults, RMS amperes.
    fn residual_current_a(&self) -> f64 {
        (self.petersen_detuning_a.powi(2) + RESIDUAL_DAMPING_A.powi(2)).sqrt()
    }

    /// Equivalent zero-sequence source impedance of the resonant ground.
    fn residual_impedance_ohm(&self) -> f64 {
        V_PHASE_RMS / self.residual_current_a()
    }
}

// ---------------------------------------------------------------------------
// Base carrier
// ---------------------------------------------------------------------------

/// Steady-state carrier: balanced three-phase voltages at the 20 kV
/// class with drawn unbalance, load currents lagging by the drawn power
/// factor angle, a standing zero-sequence offset, and Gaussian noise on
/// the six phase channels. v0 and i0 are derived from the noisy phases.
///
/// Draw order (part of the seed contract): reference angle, three
/// voltage unbalance factors, three current unbalance factors,
/// zero-sequence phase, then noise samples.
pub fn synth_base<R: Rng>(
    spec: &WindowSpec,
    scenario: &GridScenario,
    start_time: Option<DateTime<Utc>>,
    rng: &mut R,
) -> Result<WaveformWindow<f64>> {
    let n = spec.samples;
    let w_dt = TAU * spec.fundamental_hz / spec.sample_rate_hz;
    let theta0 = rng.gen_range(0.0..TAU);
    let mut v_amp = [0.0; 3];
    let mut i_amp = [0.0; 3];
    for a in &mut v_amp {
        *a = 1.0 + scenario.unbalance * rng.gen_range(-1.0..=1.0);
    }
    for a in &mut i_amp {
        *a = 1.0 + scenario.unbalance * rng.gen_range(-1.0..=1.0);
    }
    let zs_phase = rng.gen_range(0.0..TAU);
    let zs_pk = scenario.standing_zero_seq * V_PHASE_PEAK;
    let phi = scenario.power_factor.clamp(-1.0, 1.0).acos();
    let i_pk = scenario.load_current_peak();

    let mut ch: [Vec<f64>; 8] = std::array::from_fn(|_| vec![0.0; n]);
    for p in 0..3 {
        let off = TAU * p as f64 / 3.0;
        for t in 0..n {
            let th = theta0 + w_dt * t as f64 - off;
            let common = zs_pk * (theta0 + w_dt * t as f64 + zs_phase).cos();
            ch[p][t] = V_PHASE_PEAK * v_amp[p] * th.cos() + common;
            ch[4 + p][t] = i_pk * i_amp[p] * (th - phi).cos();
        }
    }
    if scenario.noise_level > 0.0 {
        let nv = Normal::new(0.0, scenario.noise_level * V_PHASE_PEAK)
            .map_err(|e| CoreError::InvalidParam(format!("noise sigma: {e}")))?;
        let ni = Normal::new(0.0, scenario.noise_level * i_pk.max(1.0))
            .map_err(|e| CoreError::InvalidParam(format!("noise sigma: {e}")))?;
        for p in 0..3 {
            for t in 0..n {
                ch[p][t] += nv.sample(rng);
            }
        }
        for p in 0..3 {
            for t in 0..n {
                ch[4 + p][t] += ni.sample(rng);
            }
        }
    }
    ch[3] = derive_zero_sequence(&ch[0], &ch[1], &ch[2])?;
    ch[7] = derive_zero_sequence(&ch[4], &ch[5], &ch[6])?;
    WaveformWindow::from_channels(ch, spec.sample_rate_hz, spec.fundamental_hz, start_time)
}

/// Fundamental phase reference recovered from a base window: angle of va
/// at the window start, extrapolated over the whole window.
struct Carrier {
    theta0: f64,
    rad_per_sample: f64,
}

impl Carrier {
    fn estimate(base: &WaveformWindow<f64>) -> Carrier {
        let ph = fundamental_phasor(&base.cycle(0), ChannelId::VA);
        Carrier {
            theta0: ph.angle,
            rad_per_sample: TAU * base.fundamental_hz() / base.sample_rate_hz(),
        }
    }

    /// Voltage angle of phase `p` at integer sample `k`.
    fn theta(&self, p: usize, k: usize) -> f64 {
        self.at(p, k as f64)
    }

    /// Voltage angle of phase `p` at fractional sample position `x`.
    fn at(&self, p: usize, x: f64) -> f64 {
        self.theta0 + self.rad_per_sample * x - TAU * p as f64 / 3.0
    }
}

// ---------------------------------------------------------------------------
// Event injection
// ---------------------------------------------------------------------------

/// One event to inject: type, side, onset sample, reference phase, and
/// the scenario its parameters are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventSpec {
    pub event: EventType,
    pub direction: Direction,
    pub onset_sample: usize,
    /// Faulted or point-on-wave reference phase, 0..3.
    pub faulted_phase: usize,
    pub scenario: GridScenario,
}

/// Per-phase delta series the event builders fill in.
struct Deltas {
    dv: [Vec<f64>; 3],
    di: [Vec<f64>; 3],
}

impl Deltas {
    fn zeros(n: usize) -> Deltas {
        Deltas {
            dv: std::array::from_fn(|_| vec![0.0; n]),
            di: std::array::from_fn(|_| vec![0.0; n]),
        }
    }
}

/// Exponential switch-in envelope, zero at the onset sample.
fn rise(k: usize, n0: usize, tau_samples: f64) -> f64 {
    1.0 - (-((k - n0) as f64) / tau_samples).exp()
}

/// Inject `spec` into a base window: phase channels receive the event's
/// delta series, v0/i0 receive the per-sample mean of the phase deltas,
/// and every phase voltage additionally drops by the source-impedance
/// share of its current delta. Upstream direction negates the measured
/// current deltas only.
pub fn inject_event<R: Rng>(
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    rng: &mut R,
) -> Result<WaveformWindow<f64>> {
    let n = base.len();
    let spc = base.samples_per_cycle();
    if spec.faulted_phase >= 3 {
        return Err(CoreError::InvalidParam(format!(
            "faulted phase {} outside [0, 3)",
            spec.faulted_phase
        )));
    }
    if spec.onset_sample < spc || spec.onset_sample + spc > n {
        return Err(CoreError::InvalidParam(format!(
            "onset sample {} leaves less than one cycle on a side of a {n}-sample window",
            spec.onset_sample
        )));
    }
    if spec.event == EventType::Incipient {
        let burst = (spec.scenario.incipient_duration_s * base.sample_rate_hz()).round() as usize;
        if spec.onset_sample + burst + spc > n {
            return Err(CoreError::InvalidParam(format!(
                "incipient burst of {burst} samples does not fit after onset {}",
                spec.onset_sample
            )));
        }
    }

    let car = Carrier::estimate(base);
    let mut d = Deltas::zeros(n);
    build_deltas(base, spec, &car, rng, &mut d);

    let s = spec.direction.sign();
    let mut ch: [Vec<f64>; 8] =
        std::array::from_fn(|c| base.channel(ChannelId::new(c).expect("channel index")).to_vec());
    for p in 0..3 {
        for t in 0..n {
            let dv = d.dv[p][t] - Z_SOURCE_OHM * d.di[p][t];
            let di = s * d.di[p][t];
            ch[p][t] += dv;
            ch[3][t] += dv / 3.0;
            ch[4 + p][t] += di;
            ch[7][t] += di / 3.0;
        }
    }
    WaveformWindow::from_channels(
        ch,
        base.sample_rate_hz(),
        base.fundamental_hz(),
        base.start_time,
    )
}

fn build_deltas<R: Rng>(
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    match spec.event {
        EventType::InrushLv => inrush_deltas(false, base, spec, car, rng, d),
        EventType::InrushHv => inrush_deltas(true, base, spec, car, rng, d),
        EventType::LoadOn => load_deltas(true, base, spec, car, rng, d),
        EventType::LoadOff => load_deltas(false, base, spec, car, rng, d),
        EventType::CapacitorOn => capacitor_deltas(true, base, spec, car, rng, d),
        EventType::CapacitorOff => capacitor_deltas(false, base, spec, car, rng, d),
        EventType::OhlOn => line_deltas(false, true, base, spec, car, rng, d),
        EventType::OhlOff => line_deltas(false, false, base, spec, car, rng, d),
        EventType::CableOn => line_deltas(true, true, base, spec, car, rng, d),
        EventType::CableOff => line_deltas(true, false, base, spec, car, rng, d),
        EventType::MotorStart => motor_deltas(base, spec, car, rng, d),
        EventType::Shc1Phg => shc_1phg_deltas(base, spec, car, rng, d),
        EventType::Shc2Ph => shc_2ph_deltas(false, base, spec, car, rng, d),
        EventType::Shc2Phg => shc_2ph_deltas(true, base, spec, car, rng, d),
        EventType::Shc3Ph => shc_3ph_deltas(base, spec, car, rng, d),
        EventType::Hif1Phg => hif_deltas(base, spec, car, rng, d),
        EventType::Incipient => incipient_deltas(base, spec, car, rng, d),
    }
}

// --- short circuits --------------------------------------------------------

/// Classic asymmetric fault current: steady tone behind the loop angle
/// plus the decaying DC offset that makes the current continuous at
/// onset.
fn fault_tone(th: f64, th0: f64, phi: f64, age_s: f64, tau_dc: f64) -> f64 {
    (th - phi).cos() - (th0 - phi).cos() * (-age_s / tau_dc).exp()
}

fn shc_3ph_deltas<R: Rng>(
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let i_pk = SQRT_2 * V_PHASE_RMS / (spec.scenario.shc_resistance_ohm + Z_SOURCE_OHM);
    let tau_dc = rng.gen_range(0.02..=0.06);
    let phi = rng.gen_range(0.1..=0.5);
    for p in 0..3 {
        let th0 = car.theta(p, n0);
        for k in n0..n {
            let age = (k - n0) as f64 * dt;
            d.di[p][k] += i_pk * fault_tone(car.theta(p, k), th0, phi, age, tau_dc);
        }
    }
}

fn shc_2ph_deltas<R: Rng>(
    grounded: bool,
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let p = spec.faulted_phase;
    let q = (p + 1) % 3;
    let sc = &spec.scenario;
    // Phase-to-phase loop: line voltage across the fault resistance and
    // two source legs. The voltage across phases p and q leads phase p
    // by 30 degrees at sqrt(3) amplitude.
    let i_pk = SQRT_2 * SQRT_3 * V_PHASE_RMS / (sc.shc_resistance_ohm + 2.0 * Z_SOURCE_OHM);
    let tau_dc = rng.gen_range(0.02..=0.06);
    let phi = rng.gen_range(0.1..=0.5);
    let asym = if grounded { rng.gen_range(0.6..=1.0) } else { 1.0 };
    let th0 = car.theta(p, n0) + FRAC_PI_6;
    for k in n0..n {
        let age = (k - n0) as f64 * dt;
        let loop_i = i_pk * fault_tone(car.theta(p, k) + FRAC_PI_6, th0, phi, age, tau_dc);
        d.di[p][k] += loop_i;
        d.di[q][k] -= asym * loop_i;
    }
    if grounded {
        // Ground return limited by the coil residual, split over both
        // faulted phases, with partial neutral displacement.
        let zres = sc.residual_impedance_ohm();
        let ig_pk = SQRT_2 * V_PHASE_RMS / (sc.shc_resistance_ohm + zres);
        let c = 0.6 * zres / (sc.shc_resistance_ohm + zres);
        let thg0 = car.theta(p, n0);
        for k in n0..n {
            let age = (k - n0) as f64 * dt;
            let ig = ig_pk * fault_tone(car.theta(p, k), thg0, phi, age, tau_dc);
            d.di[p][k] += 0.6 * ig;
            d.di[q][k] += 0.4 * ig;
            let disp = -c
                * 0.5
                * V_PHASE_PEAK
                * (car.theta(p, k).cos() + car.theta(q, k).cos())
                * rise(k, n0, 0.005 / dt);
            for ph in 0..3 {
                d.dv[ph][k] += disp;
            }
        }
    }
}

fn shc_1phg_deltas<R: Rng>(
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let p = spec.faulted_phase;
    let sc = &spec.scenario;
    let zres = sc.residual_impedance_ohm();
    let rf = sc.shc_resistance_ohm + sc.grounding_ohm;
    let i_pk = SQRT_2 * V_PHASE_RMS / (rf + zres);
    let tau_dc = rng.gen_range(0.02..=0.06);
    let phi = rng.gen_range(0.05..=0.3);
    // Neutral displacement: the faulted phase collapses by this share
    // and all three measured phase voltages shift together.
    let c = zres / (rf + zres);
    let th0 = car.theta(p, n0);
    for k in n0..n {
        let age = (k - n0) as f64 * dt;
        d.di[p][k] += i_pk * fault_tone(car.theta(p, k), th0, phi, age, tau_dc);
        let disp = -c * V_PHASE_PEAK * car.theta(p, k).cos() * rise(k, n0, 0.005 / dt);
        for ph in 0..3 {
            d.dv[ph][k] += disp;
        }
    }
}

// --- arc-driven faults -----------------------------------------------------

/// Series arc circuit integrated on the fine grid: the drive voltage is
/// the faulted-phase carrier, the path resistance is in series with the
/// arc, and each recording-grid sample keeps the last substep current.
fn arc_series_current(
    car: &Carrier,
    p: usize,
    path_ohm: f64,
    arc: ArcParams,
    drive_scale: impl Fn(usize) -> f64,
    n0: usize,
    n_end: usize,
    dt: f64,
) -> Vec<f64> {
    let substeps = (dt / SIM_DT_S).round().max(1.0) as usize;
    let h = dt / substeps as f64;
    let mut state = ArcState::ignited(G_IGNITE_S);
    let mut out = Vec::with_capacity(n_end.saturating_sub(n0 + 1));
    for k in (n0 + 1)..n_end {
        let mut i_k = 0.0;
        for s in 1..=substeps {
            let x = (k - 1) as f64 + s as f64 / substeps as f64;
            let v = drive_scale(k) * V_PHASE_PEAK * car.at(p, x).cos();
            i_k = v / (path_ohm + 1.0 / state.g());
            arc.step(&mut state, i_k, h);
        }
        out.push(i_k);
    }
    out
}

fn hif_deltas<R: Rng>(
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let spc = base.samples_per_cycle();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let p = spec.faulted_phase;
    let sc = &spec.scenario;
    let zres = sc.residual_impedance_ohm();

    // Per-half-cycle conduction factor: dropouts and amplitude jitter
    // give the intermittent burst texture of a high-impedance fault.
    let half = (spc / 2).max(1);
    let n_segs = (n - n0) / half + 2;
    let seg_amp: Vec<f64> = (0..n_segs)
        .map(|_| if rng.gen::<f64>() < 0.3 { 0.0 } else { rng.gen_range(0.5..=1.0) })
        .collect();

    let path = sc.hif_resistance_ohm + zres;
    let series = arc_series_current(
        car,
        p,
        path,
        sc.arc,
        |k| seg_amp[(k - n0) / half],
        n0,
        n,
        dt,
    );
    for (j, i_k) in series.iter().enumerate() {
        let k = n0 + 1 + j;
        d.di[p][k] += i_k;
        // Neutral displacement follows the residual drop of the fault
        // current, so v0 flickers with the bursts.
        let disp = -zres * i_k;
        for ph in 0..3 {
            d.dv[ph][k] += disp;
        }
    }
}

fn incipient_deltas<R: Rng>(
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let p = spec.faulted_phase;
    let sc = &spec.scenario;
    let burst = (sc.incipient_duration_s * base.sample_rate_hz()).round() as usize;
    let n_end = (n0 + 1 + burst).min(base.len());

    // Local discharge path: the sub-cycle breakdown is fed by nearby
    // cable capacitance, not the coil-limited ground loop.
    let r_path = rng.gen_range(5.0..=50.0);
    let f_hf = rng.gen_range(800.0..=1600.0);
    let a_hf = rng.gen_range(0.1..=0.3) * V_PHASE_PEAK / (r_path + 20.0);

    let series = arc_series_current(car, p, r_path, sc.arc, |_| 1.0, n0, n_end, dt);
    for (j, i_k) in series.iter().enumerate() {
        let k = n0 + 1 + j;
        let age = (k - n0) as f64 * dt;
        let ring = a_hf * (-age / 0.002).exp() * (TAU * f_hf * age).sin();
        d.di[p][k] += i_k + ring;
    }
}

// --- switching events ------------------------------------------------------

fn inrush_deltas<R: Rng>(
    hv: bool,
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let sc = &spec.scenario;
    // Saturation draws shape the pulses: the knee sets the conduction
    // cut, the exponent sharpens the pulse, the saturated reactance
    // caps the amplitude.
    let cut = ((sc.knee_flux_pu - 1.0) * 2.0 + 0.25).clamp(0.2, 0.8);
    let sharp = sc.sat_exponent / 7.0;
    let (k_lo, k_hi, t_lo, t_hi) =
        if hv { (6.0, 12.0, 0.3, 0.8) } else { (4.0, 9.0, 0.1, 0.3) };
    let t_decay = rng.gen_range(t_lo..=t_hi);
    let psi = rng.gen_range(0.0..TAU);
    let i_base = sc.load_current_peak();
    for p in 0..3 {
        let amp = rng.gen_range(k_lo..=k_hi) * i_base / sc.sat_reactance_pu;
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        for k in n0..n {
            let age = (k - n0) as f64 * dt;
            let pulse = (((car.theta(p, k) - psi).cos() - cut).max(0.0) / (1.0 - cut)).powf(sharp);
            d.di[p][k] += sign * amp * pulse * (-age / t_decay).exp();
        }
    }
}

fn load_deltas<R: Rng>(
    on: bool,
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let sc = &spec.scenario;
    if on {
        let i_on = rng.gen_range(0.2..=1.0) * sc.load_current_peak();
        let phi = rng.gen_range(0.80..=0.99f64).acos();
        let f_r = rng.gen_range(400.0..=900.0);
        let tau_r = rng.gen_range(0.001..=0.003);
        for p in 0..3 {
            let chi = car.theta(p, n0);
            for k in n0..n {
                let age = (k - n0) as f64 * dt;
                d.di[p][k] += i_on * (car.theta(p, k) - phi).cos() * rise(k, n0, 0.002 / dt)
                    + 0.3 * i_on * (-age / tau_r).exp() * (TAU * f_r * age + chi).cos();
            }
        }
    } else {
        // Shedding part of the base load: the delta removes that share
        // of the carrier current from onset on.
        let frac = rng.gen_range(0.2..=0.6);
        let i_off = frac * sc.load_current_peak();
        let phi = sc.power_factor.clamp(-1.0, 1.0).acos();
        for p in 0..3 {
            for k in n0..n {
                d.di[p][k] -= i_off * (car.theta(p, k) - phi).cos() * rise(k, n0, 0.002 / dt);
            }
        }
    }
}

fn capacitor_deltas<R: Rng>(
    on: bool,
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let sc = &spec.scenario;
    let ic_pk = SQRT_2 * sc.capacitor_mva * 1e6 / (3.0 * V_PHASE_RMS);
    let f_r = rng.gen_range(600.0..=1600.0);
    let tau_r = rng.gen_range(0.002..=0.008);
    let a_r = rng.gen_range(2.0..=6.0) * ic_pk;
    for p in 0..3 {
        let chi = car.theta(p, n0);
        for k in 0..n {
            // Bank current leads its phase voltage by 90 degrees.
            let steady = ic_pk * (car.theta(p, k) + FRAC_PI_2).cos();
            if on {
                if k >= n0 {
                    let age = (k - n0) as f64 * dt;
                    d.di[p][k] += steady * rise(k, n0, 0.003 / dt)
                        + a_r * (-age / tau_r).exp() * (TAU * f_r * age + chi).cos();
                }
            } else if k < n0 {
                d.di[p][k] += steady;
            } else {
                let age = (k - n0) as f64 * dt;
                d.di[p][k] += 0.3 * a_r * (-age / 0.001).exp() * (TAU * f_r * age + chi).cos();
            }
        }
    }
}

fn line_deltas<R: Rng>(
    cable: bool,
    on: bool,
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let sc = &spec.scenario;
    // Charging current per km and surge shape differ by construction:
    // cables carry far more capacitance at lower ring frequency.
    let (len_km, len_full, i_per_km, f_lo, f_hi, a_lo, a_hi) = if cable {
        (sc.cable_length_km, 10.0, 0.9, 300.0, 900.0, 20.0, 80.0)
    } else {
        (sc.ohl_length_km, 25.0, 0.012, 900.0, 1600.0, 2.0, 10.0)
    };
    let i_chg = SQRT_2 * i_per_km * len_km * rng.gen_range(0.8..=1.2);
    let surge = rng.gen_range(a_lo..=a_hi) * (len_km / len_full).sqrt();
    let f_r = rng.gen_range(f_lo..=f_hi);
    let tau_r = rng.gen_range(0.001..=0.005);
    // Untransposed overhead geometry leaves a small per-phase asymmetry
    // in the charging current, hence a standing zero-sequence component
    // while the line is energized.
    let asym = if cable {
        0.0
    } else {
        (0.05 * (sc.ohl_spacing_m / 2.0) * (8.0 / sc.tower_height_m)).min(0.08)
    };
    for p in 0..3 {
        let m = 1.0 + asym * (p as f64 - 1.0);
        let chi = car.theta(p, n0);
        for k in 0..n {
            let steady = m * i_chg * (car.theta(p, k) + FRAC_PI_2).cos();
            if on {
                if k >= n0 {
                    let age = (k - n0) as f64 * dt;
                    d.di[p][k] += steady * rise(k, n0, 0.003 / dt)
                        + surge * (-age / tau_r).exp() * (TAU * f_r * age + chi).cos();
                }
            } else if k < n0 {
                d.di[p][k] += steady;
            } else {
                let age = (k - n0) as f64 * dt;
                d.di[p][k] += 0.2 * surge * (-age / 0.001).exp() * (TAU * f_r * age + chi).cos();
            }
        }
    }
}

fn motor_deltas<R: Rng>(
    base: &WaveformWindow<f64>,
    spec: &EventSpec,
    car: &Carrier,
    rng: &mut R,
    d: &mut Deltas,
) {
    let n = base.len();
    let dt = 1.0 / base.sample_rate_hz();
    let n0 = spec.onset_sample;
    let sc = &spec.scenario;
    let i_run = rng.gen_range(0.3..=1.0) * sc.load_current_peak();
    let k_lr = rng.gen_range(4.0..=7.0);
    let t_m = rng.gen_range(0.2..=0.5);
    let phi_start = 0.2f64.acos();
    let phi_run = 0.85f64.acos();
    for p in 0..3 {
        for k in n0..n {
            let age = (k - n0) as f64 * dt;
            let decay = (-age / t_m).exp();
            let mult = 1.0 + (k_lr - 1.0) * decay;
            let phi = phi_run + (phi_start - phi_run) * decay;
            d.di[p][k] +=
                i_run * mult * (car.theta(p, k) - phi).cos() * rise(k, n0, 0.002 / dt);
        }
    }
}
