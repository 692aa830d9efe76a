//! Classical additive decomposition of an RMS series into trend, seasonal
//! and residual parts, X = T + S + e, used by the window scorer.
//!
//! The trend is a centered moving average whose width equals the seasonal
//! period; for an even period the two boundary samples enter with half
//! weight. The seasonal component is the per-phase mean of the detrended
//! series, adjusted to zero mean over one period. Positions where the
//! centered average does not fit are filled with the nearest interior trend
//! value so that the identity X = T + S + e holds at every index.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Result of [`decompose_additive`]; all parts have the input's length.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<S: Scalar> {
    pub trend: Vec<S>,
    pub seasonal: Vec<S>,
    pub residual: Vec<S>,
}

impl<S: Scalar> Decomposition<S> {
    /// Reconstruct the input: trend + seasonal + residual.
    pub fn reconstruct(&self) -> Vec<S> {
        self.trend
            .iter()
            .zip(&self.seasonal)
            .zip(&self.residual)
            .map(|((&t, &s), &e)| t + s + e)
            .collect()
    }
}

/// Centered moving average of width `period`. For even widths the span
/// covers `period + 1` samples with half weight at both ends. Returns the
/// trend with edge positions (where the span does not fit) copied from the
/// nearest interior value.
pub fn centered_moving_average<S: Scalar>(series: &[S], period: usize) -> Result<Vec<S>> {
    let n = series.len();
    if period < 2 {
        return Err(CoreError::InvalidParam("period must be at least 2".into()));
    }
    if n < period + 1 {
        return Err(CoreError::TooShort { need: period + 1, got: n });
    }
    let mut trend = vec![S::zero(); n];
    let inv_p = S::one() / S::of_usize(period);
    let half = S::of(0.5);
    let (first, last);
    if period % 2 == 0 {
        // Span of period+1 samples centered on t, half weight at both ends.
        let h = period / 2;
        first = h;
        last = n - 1 - h;
        for t in first..=last {
            let mut acc = (series[t - h] + series[t + h]) * half;
            for u in (t - h + 1)..(t + h) {
                acc += series[u];
            }
            trend[t] = acc * inv_p;
        }
    } else {
        let h = period / 2;
        first = h;
        last = n - 1 - h;
        for t in first..=last {
            let mut acc = S::zero();
            for u in (t - h)..=(t + h) {
                acc += series[u];
            }
            trend[t] = acc * inv_p;
        }
    }
    for t in 0..first {
        trend[t] = trend[first];
    }
    for t in (last + 1)..n {
        trend[t] = trend[last];
    }
    Ok(trend)
}

/// Additive decomposition with the given seasonal period.
pub fn decompose_additive<S: Scalar>(series: &[S], period: usize) -> Result<Decomposition<S>> {
    let n = series.len();
    let trend = centered_moving_average(series, period)?;

    // Per-phase means of the detrended series.
    let mut phase_sum = vec![S::zero(); period];
    let mut phase_cnt = vec![0usize; period];
    for t in 0..n {
        phase_sum[t % period] += series[t] - trend[t];
        phase_cnt[t % period] += 1;
    }
    let mut phase_mean: Vec<S> = phase_sum
        .iter()
        .zip(&phase_cnt)
        .map(|(&s, &c)| s / S::of_usize(c))
        .collect();

    // Adjust so the seasonal component sums to zero over one period.
    let mut mean = S::zero();
    for &m in &phase_mean {
        mean += m;
    }
    mean /= S::of_usize(period);
    for m in phase_mean.iter_mut() {
        *m -= mean;
    }

    let seasonal: Vec<S> = (0..n).map(|t| phase_mean[t % period]).collect();
    let residual: Vec<S> = (0..n).map(|t| series[t] - trend[t] - seasonal[t]).collect();
    Ok(Decomposition { trend, seasonal, residual })
}
