//! Waveform data model: the eight-channel sample block, cycle framing and
//! fundamental-phasor estimation used by every feature kernel.
//!
//! A window carries three phase voltages, the zero-sequence voltage, three
//! phase currents and the zero-sequence current, in that fixed order. All
//! types are immutable after construction; the free functions are pure.

use chrono::{DateTime, Utc};
use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::scalar::{wrap_angle, Scalar};

/// Number of measurement channels per sample.
pub const N_CHANNELS: usize = 8;

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

/// One of the eight measured channels, in fixed order
/// (va, vb, vc, v0, ia, ib, ic, i0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelId(u8);

impl ChannelId {
    pub const VA: ChannelId = ChannelId(0);
    pub const VB: ChannelId = ChannelId(1);
    pub const VC: ChannelId = ChannelId(2);
    pub const V0: ChannelId = ChannelId(3);
    pub const IA: ChannelId = ChannelId(4);
    pub const IB: ChannelId = ChannelId(5);
    pub const IC: ChannelId = ChannelId(6);
    pub const I0: ChannelId = ChannelId(7);

    pub const NAMES: [&'static str; N_CHANNELS] = ["va", "vb", "vc", "v0", "ia", "ib", "ic", "i0"];

    pub fn new(index: usize) -> Option<ChannelId> {
        (index < N_CHANNELS).then_some(ChannelId(index as u8))
    }

    pub fn all() -> impl Iterator<Item = ChannelId> {
        (0..N_CHANNELS as u8).map(ChannelId)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<ChannelId> {
        Self::NAMES.iter().position(|&n| n == name).map(|i| ChannelId(i as u8))
    }

    /// True for va, vb, vc, v0.
    pub fn is_voltage(self) -> bool {
        self.0 < 4
    }
}

impl std::fmt::Display for ChannelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for ChannelId {
    fn serialize<Sr: serde::Serializer>(&self, serializer: Sr) -> std::result::Result<Sr::Ok, Sr::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for ChannelId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ChannelId::from_name(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown channel name {s:?}")))
    }
}

// ---------------------------------------------------------------------------
// Windows and cycle frames
// ---------------------------------------------------------------------------

/// Origin of a window within the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Picked by the continuous-change score.
    Continuous,
    /// Picked by the transient (crest factor) score.
    Transient,
    /// Emitted directly by the event generator.
    Synthetic,
}

impl WindowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowKind::Continuous => "continuous",
            WindowKind::Transient => "transient",
            WindowKind::Synthetic => "synthetic",
        }
    }

    pub fn from_str(s: &str) -> Option<WindowKind> {
        match s {
            "continuous" => Some(WindowKind::Continuous),
            "transient" => Some(WindowKind::Transient),
            "synthetic" => Some(WindowKind::Synthetic),
            _ => None,
        }
    }
}

/// Fixed-rate block of the eight channels; the unit of feature extraction.
///
/// Samples are stored channel-major: channel `c` occupies
/// `samples[c*len .. (c+1)*len]`. Voltages in volts, currents in amperes.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformWindow<S: Scalar> {
    samples: Vec<S>,
    len: usize,
    sample_rate_hz: f64,
    fundamental_hz: f64,
    samples_per_cycle: usize,
    pub start_time: Option<DateTime<Utc>>,
}

impl<S: Scalar> WaveformWindow<S> {
    /// Build a window from channel-major samples. Rejects non-finite values,
    /// a non-integer samples-per-cycle ratio, and cycle-misaligned lengths.
    pub fn new(
        samples: Vec<S>,
        len: usize,
        sample_rate_hz: f64,
        fundamental_hz: f64,
        start_time: Option<DateTime<Utc>>,
    ) -> Result<Self> {
        if len == 0 {
            return Err(CoreError::InvalidWindow("zero-length window".into()));
        }
        if samples.len() != N_CHANNELS * len {
            return Err(CoreError::InvalidWindow(format!(
                "expected {} samples ({} channels x {}), got {}",
                N_CHANNELS * len,
                N_CHANNELS,
                len,
                samples.len()
            )));
        }
        let spc = samples_per_cycle(sample_rate_hz, fundamental_hz)?;
        if len % spc != 0 {
            return Err(CoreError::InvalidWindow(format!(
                "window length {len} is not a whole number of {spc}-sample cycles"
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(CoreError::InvalidWindow(format!(
                "non-finite sample at channel {}, index {}",
                i / len,
                i % len
            )));
        }
        Ok(WaveformWindow {
            samples,
            len,
            sample_rate_hz,
            fundamental_hz,
            samples_per_cycle: spc,
            start_time,
        })
    }

    /// Build from per-channel rows in channel order.
    pub fn from_channels(
        channels: [Vec<S>; N_CHANNELS],
        sample_rate_hz: f64,
        fundamental_hz: f64,
        start_time: Option<DateTime<Utc>>,
    ) -> Result<Self> {
        let len = channels[0].len();
        for (i, ch) in channels.iter().enumerate() {
            if ch.len() != len {
                return Err(CoreError::InvalidWindow(format!(
                    "channel {} has {} samples, expected {}",
                    ChannelId::NAMES[i],
                    ch.len(),
                    len
                )));
            }
        }
        let mut samples = Vec::with_capacity(N_CHANNELS * len);
        for ch in channels.iter() {
            samples.extend_from_slice(ch);
        }
        Self::new(samples, len, sample_rate_hz, fundamental_hz, start_time)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn fundamental_hz(&self) -> f64 {
        self.fundamental_hz
    }

    pub fn samples_per_cycle(&self) -> usize {
        self.samples_per_cycle
    }

    /// Number of whole fundamental cycles in the window.
    pub fn cycles(&self) -> usize {
        self.len / self.samples_per_cycle
    }

    /// True for the standard 500 ms block (N = rate / 2).
    pub fn is_standard(&self) -> bool {
        (self.sample_rate_hz * 0.5).round() as usize == self.len
    }

    pub fn channel(&self, ch: ChannelId) -> &[S] {
        let c = ch.index();
        &self.samples[c * self.len..(c + 1) * self.len]
    }

    /// Channel-major raw storage.
    pub fn raw(&self) -> &[S] {
        &self.samples
    }

    /// Sample of one channel at index `t`.
    pub fn at(&self, ch: ChannelId, t: usize) -> S {
        self.samples[ch.index() * self.len + t]
    }

    /// Frame view of cycle `cycle_index` (0-based).
    pub fn cycle(&self, cycle_index: usize) -> CycleFrame<'_, S> {
        assert!(cycle_index < self.cycles(), "cycle index out of range");
        CycleFrame { window: self, cycle_index }
    }

    pub fn cycle_frames(&self) -> impl Iterator<Item = CycleFrame<'_, S>> {
        (0..self.cycles()).map(move |i| CycleFrame { window: self, cycle_index: i })
    }
}

/// Integer samples-per-cycle, rejecting non-divisible rate/fundamental pairs.
pub fn samples_per_cycle(sample_rate_hz: f64, fundamental_hz: f64) -> Result<usize> {
    if !(sample_rate_hz > 0.0) || !(fundamental_hz > 0.0) {
        return Err(CoreError::InvalidWindow(format!(
            "non-positive rate ({sample_rate_hz} Hz) or fundamental ({fundamental_hz} Hz)"
        )));
    }
    let ratio = sample_rate_hz / fundamental_hz;
    let spc = ratio.round();
    if spc < 1.0 || (ratio - spc).abs() > 1e-9 * ratio.max(1.0) {
        return Err(CoreError::InvalidWindow(format!(
            "sample rate {sample_rate_hz} Hz is not an integer multiple of the fundamental {fundamental_hz} Hz"
        )));
    }
    Ok(spc as usize)
}

/// One fundamental period of a window.
#[derive(Debug, Clone, Copy)]
pub struct CycleFrame<'a, S: Scalar> {
    window: &'a WaveformWindow<S>,
    cycle_index: usize,
}

impl<'a, S: Scalar> CycleFrame<'a, S> {
    pub fn cycle_index(&self) -> usize {
        self.cycle_index
    }

    pub fn samples_per_cycle(&self) -> usize {
        self.window.samples_per_cycle
    }

    /// The S samples of one channel within this cycle.
    pub fn channel(&self, ch: ChannelId) -> &'a [S] {
        let spc = self.window.samples_per_cycle;
        let start = self.cycle_index * spc;
        &self.window.channel(ch)[start..start + spc]
    }
}

// ---------------------------------------------------------------------------
// Phasors
// ---------------------------------------------------------------------------

/// Peak-convention phasor: magnitude is the tone's peak amplitude, angle is
/// referenced to a cosine at the cycle start, wrapped into (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phasor<S: Scalar> {
    pub magnitude: S,
    pub angle: S,
}

impl<S: Scalar> Phasor<S> {
    pub fn new(magnitude: S, angle: S) -> Self {
        debug_assert!(magnitude >= S::zero());
        Phasor { magnitude, angle: wrap_angle(angle) }
    }

    pub fn zero() -> Self {
        Phasor { magnitude: S::zero(), angle: S::zero() }
    }

    pub fn to_complex(self) -> Complex<S> {
        Complex::new(self.magnitude * self.angle.cos(), self.magnitude * self.angle.sin())
    }

    pub fn from_complex(c: Complex<S>) -> Self {
        let mag = (c.re * c.re + c.im * c.im).sqrt();
        if mag == S::zero() {
            Phasor::zero()
        } else {
            Phasor::new(mag, c.im.atan2(c.re))
        }
    }

    /// Peak phasor scaled to RMS convention (magnitude / sqrt 2).
    pub fn to_rms_complex(self) -> Complex<S> {
        let c = self.to_complex();
        let s = S::of(std::f64::consts::FRAC_1_SQRT_2);
        Complex::new(c.re * s, c.im * s)
    }
}

/// Single-bin DFT of one series: X_k = sum_t x[t] e^{-j 2 pi k t / N}.
pub fn dft_bin<S: Scalar>(series: &[S], k: usize) -> Complex<S> {
    let n = series.len();
    let step = -S::TAU * S::of_usize(k) / S::of_usize(n);
    let mut acc = Complex::new(S::zero(), S::zero());
    for (t, &x) in series.iter().enumerate() {
        let phase = step * S::of_usize(t);
        acc.re += x * phase.cos();
        acc.im += x * phase.sin();
    }
    acc
}

/// Peak-convention amplitude of harmonic `k` over one series of whole cycles:
/// 2 |X_k| / N.
pub fn harmonic_phasor<S: Scalar>(series: &[S], k: usize) -> Phasor<S> {
    let n = series.len();
    debug_assert!(n > 0);
    let bin = dft_bin(series, k);
    let two = S::of(2.0);
    let mag = two * (bin.re * bin.re + bin.im * bin.im).sqrt() / S::of_usize(n);
    if mag == S::zero() {
        Phasor::zero()
    } else {
        Phasor::new(mag, bin.im.atan2(bin.re))
    }
}

/// Fundamental phasor of one channel over one cycle frame (DFT bin k = 1).
pub fn fundamental_phasor<S: Scalar>(frame: &CycleFrame<'_, S>, ch: ChannelId) -> Phasor<S> {
    harmonic_phasor(frame.channel(ch), 1)
}

// ---------------------------------------------------------------------------
// Elementary series operations
// ---------------------------------------------------------------------------

/// Root mean square of a non-empty series.
pub fn window_rms<S: Scalar>(series: &[S]) -> Result<S> {
    if series.is_empty() {
        return Err(CoreError::Empty("rms of empty series".into()));
    }
    let mut acc = S::zero();
    for &x in series {
        acc += x * x;
    }
    Ok((acc / S::of_usize(series.len())).sqrt())
}

/// Zero-sequence series from three phase series: (a + b + c) / 3.
pub fn derive_zero_sequence<S: Scalar>(a: &[S], b: &[S], c: &[S]) -> Result<Vec<S>> {
    if a.len() != b.len() || b.len() != c.len() {
        return Err(CoreError::LengthMismatch(a.len(), b.len().max(c.len())));
    }
    let third = S::of(1.0 / 3.0);
    Ok(a.iter()
        .zip(b.iter())
        .zip(c.iter())
        .map(|((&x, &y), &z)| (x + y + z) * third)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(n: usize, cycles_per_n: f64, amp: f64, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|t| amp * (std::f64::consts::TAU * cycles_per_n * t as f64 / n as f64 + phase).sin())
            .collect()
    }

    #[test]
    fn channel_mapping_is_bijective() {
        for ch in ChannelId::all() {
            assert_eq!(ChannelId::from_name(ch.name()), Some(ch));
        }
        assert_eq!(ChannelId::new(8), None);
        assert_eq!(ChannelId::from_name("ix"), None);
        assert_eq!(ChannelId::VA.name(), "va");
        assert_eq!(ChannelId::I0.index(), 7);
    }

    #[test]
    fn window_shape_checks() {
        let ok = WaveformWindow::new(vec![0.0f64; 8 * 80], 80, 4000.0, 50.0, None).unwrap();
        assert_eq!(ok.samples_per_cycle(), 80);
        assert_eq!(ok.cycles(), 1);
        assert!(!ok.is_standard());

        let std_win = WaveformWindow::new(vec![0.0f64; 8 * 2000], 2000, 4000.0, 50.0, None).unwrap();
        assert!(std_win.is_standard());
        assert_eq!(std_win.cycles(), 25);

        assert!(WaveformWindow::new(vec![0.0f64; 8 * 81], 81, 4000.0, 50.0, None).is_err());
        assert!(WaveformWindow::new(vec![0.0f64; 7 * 80], 80, 4000.0, 50.0, None).is_err());
        assert!(WaveformWindow::new(vec![0.0f64; 8 * 80], 80, 4000.0, 60.0, None).is_err());
        let mut bad = vec![0.0f64; 8 * 80];
        bad[3 * 80 + 5] = f64::NAN;
        assert!(WaveformWindow::new(bad, 80, 4000.0, 50.0, None).is_err());
    }

    #[test]
    fn cycle_slicing_reconstructs_input() {
        let n = 240;
        let mut chans: [Vec<f64>; 8] = Default::default();
        for (c, ch) in chans.iter_mut().enumerate() {
            *ch = sine(n, 3.0, 1.0 + c as f64, 0.3 * c as f64);
        }
        let w = WaveformWindow::from_channels(chans.clone(), 4000.0, 50.0, None).unwrap();
        for ch in ChannelId::all() {
            let mut rebuilt = Vec::new();
            for frame in w.cycle_frames() {
                rebuilt.extend_from_slice(frame.channel(ch));
            }
            assert_eq!(rebuilt, chans[ch.index()], "channel {ch}");
        }
    }

    #[test]
    fn phasor_pure_tone() {
        // x[t] = 2 sin(2 pi t / S): magnitude 2, angle -pi/2 vs cosine reference.
        let s = 288;
        let x = sine(s, 1.0, 2.0, 0.0);
        let p = harmonic_phasor(&x, 1);
        assert!((p.magnitude - 2.0).abs() < 1e-9, "magnitude {}", p.magnitude);
        assert!((p.angle + std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn phasor_zero_signal() {
        let x = vec![0.0f64; 80];
        let p = harmonic_phasor(&x, 1);
        assert_eq!(p.magnitude, 0.0);
        assert_eq!(p.angle, 0.0);
    }

    #[test]
    fn phasor_rejects_harmonic() {
        // cos(2 pi t/S) + 0.5 cos(3 * 2 pi t/S): fundamental bin sees only the tone.
        let s = 288usize;
        let x: Vec<f64> = (0..s)
            .map(|t| {
                let th = std::f64::consts::TAU * t as f64 / s as f64;
                th.cos() + 0.5 * (3.0 * th).cos()
            })
            .collect();
        let p = harmonic_phasor(&x, 1);
        assert!((p.magnitude - 1.0).abs() < 1e-9);
        assert!(p.angle.abs() < 1e-9);

        // Independent check against a directly evaluated DFT bin.
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, &v) in x.iter().enumerate() {
            let th = -std::f64::consts::TAU * t as f64 / s as f64;
            re += v * th.cos();
            im += v * th.sin();
        }
        let mag = 2.0 * (re * re + im * im).sqrt() / s as f64;
        assert!((p.magnitude - mag).abs() < 1e-12);
    }

    #[test]
    fn phasor_exact_on_integer_harmonics() {
        // Any tone at an integer harmonic with integer samples per cycle is
        // recovered to <= 1e-9 relative error.
        let s = 80usize;
        for k in [1usize, 2, 3, 5, 7, 11, 13] {
            for phase in [0.0, 0.4, -1.2] {
                let x: Vec<f64> = (0..s)
                    .map(|t| 3.5 * (std::f64::consts::TAU * k as f64 * t as f64 / s as f64 + phase).cos())
                    .collect();
                let p = harmonic_phasor(&x, k);
                assert!((p.magnitude - 3.5).abs() < 1e-9 * 3.5, "k={k} mag {}", p.magnitude);
                assert!(wrap_angle(p.angle - phase).abs() < 1e-9, "k={k} angle {}", p.angle);
            }
        }
    }

    #[test]
    fn rms_cases() {
        let s = 288;
        let x = sine(s, 1.0, 1.0, 0.0);
        assert!((window_rms(&x).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(window_rms(&[-3.0f64; 10]).unwrap(), 3.0);
        assert!((window_rms(&[3.0f64, 4.0]).unwrap() - 12.5f64.sqrt()).abs() < 1e-12);
        assert!(window_rms::<f64>(&[]).is_err());
    }

    #[test]
    fn zero_sequence_cases() {
        // Balanced three-phase set cancels.
        let n = 400;
        let a = sine(n, 5.0, 1.0, 0.0);
        let b = sine(n, 5.0, 1.0, -2.0 * std::f64::consts::FRAC_PI_3);
        let c = sine(n, 5.0, 1.0, 2.0 * std::f64::consts::FRAC_PI_3);
        let z = derive_zero_sequence(&a, &b, &c).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-9));

        let ones = vec![1.0f64; 4];
        assert_eq!(derive_zero_sequence(&ones, &ones, &ones).unwrap(), ones);

        let z = derive_zero_sequence(&[3.0f64, 0.0], &[0.0, 0.0], &[0.0, 3.0]).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-15 && (z[1] - 1.0).abs() < 1e-15);

        assert!(derive_zero_sequence(&[1.0], &[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn phasor_f32_smoke() {
        let s = 80usize;
        let x: Vec<f32> = (0..s)
            .map(|t| 2.0 * (std::f32::consts::TAU * t as f32 / s as f32).sin())
            .collect();
        let p = harmonic_phasor(&x, 1);
        assert!((p.magnitude - 2.0).abs() < 1e-4);
    }
}
