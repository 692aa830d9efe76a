//! Per-cycle harmonic amplitudes, total harmonic distortion and phase
//! differences against the va fundamental.

use crate::error::{CoreError, Result};
use crate::scalar::{wrap_angle, Scalar};
use crate::signal::{harmonic_phasor, ChannelId, CycleFrame, Phasor};

use super::registry::HARMONIC_KS;

/// Amplitude floor below which a phasor counts as absent: relative to the
/// channel's full-window RMS so the rule is scale-free.
pub fn phasor_eps<S: Scalar>(window_rms: S) -> S {
    S::of(1e-9) * (window_rms + S::of(1e-12))
}

/// Phasors of the eight tracked harmonics over one cycle.
pub fn harmonic_phasors<S: Scalar>(frame: &CycleFrame<'_, S>, ch: ChannelId) -> Result<[Phasor<S>; 8]> {
    let series = frame.channel(ch);
    // Bin 13 must stay below Nyquist.
    if series.len() <= 2 * HARMONIC_KS[7] {
        return Err(CoreError::InvalidWindow(format!(
            "{} samples per cycle cannot resolve harmonic {}",
            series.len(),
            HARMONIC_KS[7]
        )));
    }
    let mut out = [Phasor::zero(); 8];
    for (slot, &k) in out.iter_mut().zip(HARMONIC_KS.iter()) {
        *slot = harmonic_phasor(series, k);
    }
    Ok(out)
}

/// Peak amplitudes 2|X_k|/S of the tracked harmonics, absolute units.
pub fn harmonic_amplitudes<S: Scalar>(phasors: &[Phasor<S>; 8]) -> [S; 8] {
    let mut out = [S::zero(); 8];
    for (o, p) in out.iter_mut().zip(phasors.iter()) {
        *o = p.magnitude;
    }
    out
}

/// Total harmonic distortion over the tracked bins:
/// sqrt(h2²+h3²+h4²+h5²+h7²+h11²+h13²) / h1. A fundamental below `eps`
/// yields 0 with the flag set.
pub fn thd<S: Scalar>(amps: &[S; 8], eps: S) -> (S, bool) {
    let h1 = amps[0];
    if h1 < eps {
        return (S::zero(), true);
    }
    let mut acc = S::zero();
    for &h in &amps[1..] {
        acc += h * h;
    }
    (acc.sqrt() / h1, false)
}

/// Fundamental phase difference of a channel against va, wrapped into
/// (-pi, pi]. Either phasor below its `eps` yields 0 with the flag set.
pub fn phase_diff<S: Scalar>(
    ch_fund: Phasor<S>,
    va_fund: Phasor<S>,
    ch_eps: S,
    va_eps: S,
) -> (S, bool) {
    if ch_fund.magnitude < ch_eps || va_fund.magnitude < va_eps {
        return (S::zero(), true);
    }
    (wrap_angle(ch_fund.angle - va_fund.angle), false)
}
