//! Per-cycle descriptive statistics and the six-way aggregation applied to
//! every per-cycle and per-band series.
//!
//! All moments are population (biased) estimators. Undefined ratios return
//! 0 with a flag instead of NaN: skewness and kurtosis of a constant
//! series, crest factor of an all-zero series, form factor of an all-zero
//! rectified mean.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// The ten per-cycle statistics, in registry variant order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleStats<S: Scalar> {
    pub max: S,
    pub min: S,
    pub mean: S,
    pub std: S,
    pub skew: S,
    pub kurt: S,
    pub crest: S,
    pub form: S,
    pub largest_delta: S,
    pub rms: S,
}

impl<S: Scalar> CycleStats<S> {
    /// Values in registry variant order
    /// (max, min, mean, std, skew, kurt, crest, form, largest_delta, rms).
    pub fn as_array(&self) -> [S; 10] {
        [
            self.max,
            self.min,
            self.mean,
            self.std,
            self.skew,
            self.kurt,
            self.crest,
            self.form,
            self.largest_delta,
            self.rms,
        ]
    }
}

/// Sentinels tripped while computing [`CycleStats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatFlags {
    /// Constant series: skew and kurt forced to 0.
    pub moments: bool,
    /// Zero RMS: crest forced to 0.
    pub crest: bool,
    /// Zero rectified mean: form forced to 0.
    pub form: bool,
}

impl StatFlags {
    pub fn any(&self) -> bool {
        self.moments || self.crest || self.form
    }
}

/// Population standard deviation with standardized skewness and excess
/// kurtosis around the given mean. Deviations are divided by the standard
/// deviation before being raised to the third and fourth power, which keeps
/// the ratios finite where raw central moments would underflow (f32 kurtosis
/// of a near-constant series). Returns (0, 0, 0) with the flag set when the
/// series is constant.
fn std_skew_kurt<S: Scalar>(series: &[S], mean: S) -> (S, S, S, bool) {
    let n = S::of_usize(series.len());
    let mut m2 = S::zero();
    for &x in series {
        let d = x - mean;
        m2 += d * d;
    }
    let std = (m2 / n).sqrt();
    if std == S::zero() {
        return (S::zero(), S::zero(), S::zero(), true);
    }
    let mut z3 = S::zero();
    let mut z4 = S::zero();
    for &x in series {
        let z = (x - mean) / std;
        let z2 = z * z;
        z3 += z2 * z;
        z4 += z2 * z2;
    }
    (std, z3 / n, z4 / n - S::of(3.0), false)
}

/// The ten statistics of one cycle (or any non-empty series).
pub fn per_cycle_stats<S: Scalar>(series: &[S]) -> Result<(CycleStats<S>, StatFlags)> {
    if series.is_empty() {
        return Err(CoreError::Empty("cycle statistics of empty series".into()));
    }
    let n = S::of_usize(series.len());
    let mut max = series[0];
    let mut min = series[0];
    let mut sum = S::zero();
    let mut sum_sq = S::zero();
    let mut sum_abs = S::zero();
    let mut peak = S::zero();
    let mut largest_delta = S::zero();
    for (i, &x) in series.iter().enumerate() {
        if x > max {
            max = x;
        }
        if x < min {
            min = x;
        }
        sum += x;
        sum_sq += x * x;
        let a = x.abs();
        sum_abs += a;
        if a > peak {
            peak = a;
        }
        if i + 1 < series.len() {
            let d = (series[i + 1] - x).abs();
            if d > largest_delta {
                largest_delta = d;
            }
        }
    }
    let mean = sum / n;
    let rms = (sum_sq / n).sqrt();
    let mean_abs = sum_abs / n;

    let (std, skew, kurt, constant) = std_skew_kurt(series, mean);

    let mut flags = StatFlags::default();
    flags.moments = constant;
    let crest = if rms == S::zero() {
        flags.crest = true;
        S::zero()
    } else {
        peak / rms
    };
    let form = if mean_abs == S::zero() {
        flags.form = true;
        S::zero()
    } else {
        rms / mean_abs
    };

    Ok((
        CycleStats { max, min, mean, std, skew, kurt, crest, form, largest_delta, rms },
        flags,
    ))
}

/// The six aggregations (min, max, mean, std, skew, kurt) of a per-cycle or
/// per-band series; std = 0 forces skew = kurt = 0 with the flag set.
pub fn six_stats<S: Scalar>(values: &[S]) -> Result<([S; 6], bool)> {
    if values.len() < 2 {
        return Err(CoreError::TooShort { need: 2, got: values.len() });
    }
    let n = S::of_usize(values.len());
    let mut min = values[0];
    let mut max = values[0];
    let mut sum = S::zero();
    for &x in values {
        if x < min {
            min = x;
        }
        if x > max {
            max = x;
        }
        sum += x;
    }
    let mean = sum / n;
    let (std, skew, kurt, flagged) = std_skew_kurt(values, mean);
    Ok(([min, max, mean, std, skew, kurt], flagged))
}
