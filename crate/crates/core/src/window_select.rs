//! Per-minute selection of the two most relevant 500 ms windows: one for
//! continuous change, one for transients.
//!
//! The continuous score decomposes each channel's minute into trend,
//! seasonal and residual parts, standardizes the trend over the full minute
//! and takes the RMS of the standardized trend inside each candidate
//! window. The transient score is the crest factor of the raw samples
//! inside each candidate window. Both searches run jointly over channels
//! and 250 ms hop offsets; ties break toward the lower offset, then the
//! lower channel index.

use crate::decompose::decompose_additive;
use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use crate::signal::{ChannelId, WaveformWindow, WindowKind};

/// Winning offset of one scorer over a minute.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WindowScore<S: Scalar> {
    /// Sample offset of the window start within the minute.
    pub offset: usize,
    pub channel: ChannelId,
    pub score: S,
    pub kind: WindowKind,
    /// Set when no channel produced a usable score (constant trend for the
    /// continuous scorer, zero RMS everywhere for the transient scorer);
    /// offset and score are then 0.
    pub degenerate: bool,
}

/// The two selected windows of one minute with their scores.
#[derive(Debug, Clone)]
pub struct MinuteWindows<S: Scalar> {
    pub continuous: WindowScore<S>,
    pub transient: WindowScore<S>,
    pub continuous_window: WaveformWindow<S>,
    pub transient_window: WaveformWindow<S>,
}

impl<S: Scalar> MinuteWindows<S> {
    /// True when both scorers were degenerate (a quiet minute).
    pub fn is_quiet(&self) -> bool {
        self.continuous.degenerate && self.transient.degenerate
    }
}

/// Window and hop lengths in samples: 500 ms and 250 ms at the given rate.
pub fn candidate_lengths(sample_rate_hz: f64) -> Result<(usize, usize)> {
    let win = (sample_rate_hz * 0.5).round() as usize;
    let hop = (sample_rate_hz * 0.25).round() as usize;
    if win == 0 || hop == 0 {
        return Err(CoreError::InvalidParam(format!(
            "sample rate {sample_rate_hz} Hz too low for 500 ms windows"
        )));
    }
    Ok((win, hop))
}

fn candidate_offsets(minute_len: usize, win: usize, hop: usize) -> impl Iterator<Item = usize> {
    (0..=(minute_len - win)).step_by(hop)
}

fn check_minute<S: Scalar>(minute: &WaveformWindow<S>) -> Result<(usize, usize)> {
    let (win, hop) = candidate_lengths(minute.sample_rate_hz())?;
    if minute.len() < win {
        return Err(CoreError::TooShort { need: win, got: minute.len() });
    }
    Ok((win, hop))
}

/// Offset with the maximum RMS of the standardized trend (continuous score).
pub fn continuous_window<S: Scalar>(minute: &WaveformWindow<S>) -> Result<WindowScore<S>> {
    let (win, hop) = check_minute(minute)?;
    let win_n = S::of_usize(win);

    // Standardized trend per channel; None where the trend is constant.
    let mut norm: Vec<Option<Vec<S>>> = Vec::with_capacity(crate::signal::N_CHANNELS);
    for ch in ChannelId::all() {
        let d = decompose_additive(minute.channel(ch), minute.samples_per_cycle())?;
        let n = S::of_usize(d.trend.len());
        let mut mean = S::zero();
        for &t in &d.trend {
            mean += t;
        }
        mean /= n;
        let mut var = S::zero();
        for &t in &d.trend {
            let dt = t - mean;
            var += dt * dt;
        }
        let std = (var / n).sqrt();
        if std == S::zero() {
            norm.push(None);
        } else {
            norm.push(Some(d.trend.iter().map(|&t| (t - mean) / std).collect()));
        }
    }

    let mut best: Option<WindowScore<S>> = None;
    for offset in candidate_offsets(minute.len(), win, hop) {
        for ch in ChannelId::all() {
            let Some(series) = &norm[ch.index()] else { continue };
            let mut acc = S::zero();
            for &v in &series[offset..offset + win] {
                acc += v * v;
            }
            let score = (acc / win_n).sqrt();
            if best.map_or(true, |b| score > b.score) {
                best = Some(WindowScore {
                    offset,
                    channel: ch,
                    score,
                    kind: WindowKind::Continuous,
                    degenerate: false,
                });
            }
        }
    }
    Ok(best.unwrap_or(WindowScore {
        offset: 0,
        channel: ChannelId::VA,
        score: S::zero(),
        kind: WindowKind::Continuous,
        degenerate: true,
    }))
}

/// Offset with the maximum crest factor (transient score). Windows with
/// zero RMS on a channel are excluded for that channel.
pub fn transient_window<S: Scalar>(minute: &WaveformWindow<S>) -> Result<WindowScore<S>> {
    let (win, hop) = check_minute(minute)?;
    let win_n = S::of_usize(win);

    let mut best: Option<WindowScore<S>> = None;
    for offset in candidate_offsets(minute.len(), win, hop) {
        for ch in ChannelId::all() {
            let series = &minute.channel(ch)[offset..offset + win];
            let mut acc = S::zero();
            let mut peak = S::zero();
            for &v in series {
                acc += v * v;
                let a = v.abs();
                if a > peak {
                    peak = a;
                }
            }
            let rms = (acc / win_n).sqrt();
            if rms == S::zero() {
                continue;
            }
            let score = peak / rms;
            if best.map_or(true, |b| score > b.score) {
                best = Some(WindowScore {
                    offset,
                    channel: ch,
                    score,
                    kind: WindowKind::Transient,
                    degenerate: false,
                });
            }
        }
    }
    Ok(best.unwrap_or(WindowScore {
        offset: 0,
        channel: ChannelId::VA,
        score: S::zero(),
        kind: WindowKind::Transient,
        degenerate: true,
    }))
}

/// Cut a candidate window out of a minute at the given sample offset.
pub fn cut_window<S: Scalar>(
    minute: &WaveformWindow<S>,
    offset: usize,
    len: usize,
) -> Result<WaveformWindow<S>> {
    if offset + len > minute.len() {
        return Err(CoreError::InvalidWindow(format!(
            "cut [{offset}, {}) exceeds minute length {}",
            offset + len,
            minute.len()
        )));
    }
    let mut samples = Vec::with_capacity(crate::signal::N_CHANNELS * len);
    for ch in ChannelId::all() {
        samples.extend_from_slice(&minute.channel(ch)[offset..offset + len]);
    }
    let start = minute.start_time.map(|t| {
        t + chrono::Duration::nanoseconds(
            (offset as f64 / minute.sample_rate_hz() * 1e9).round() as i64
        )
    });
    WaveformWindow::new(samples, len, minute.sample_rate_hz(), minute.fundamental_hz(), start)
}

/// Run both scorers over a minute and cut the two winning windows. The two
/// windows may overlap or coincide; a quiet minute yields both windows at
/// offset 0 with the degenerate flags set.
pub fn select_minute_windows<S: Scalar>(minute: &WaveformWindow<S>) -> Result<MinuteWindows<S>> {
    let (win, _) = check_minute(minute)?;
    let continuous = continuous_window(minute)?;
    let transient = transient_window(minute)?;
    let continuous_window = cut_window(minute, continuous.offset, win)?;
    let transient_window = cut_window(minute, transient.offset, win)?;
    Ok(MinuteWindows { continuous, transient, continuous_window, transient_window })
}
