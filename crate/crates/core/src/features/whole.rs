//! Whole-window features: lag-one-period autocorrelation, binned entropy,
//! Fourier entropy and outlier ratio. These operate on the full 500 ms
//! series of one channel and are not aggregated.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Sentinels tripped by [`whole_window_features`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WholeFlags {
    /// Constant slice: autocorrelation undefined, forced to 0.
    pub autocorr: bool,
    /// All-zero spectrum: Fourier entropy undefined, forced to 0.
    pub fourier: bool,
}

impl WholeFlags {
    pub fn any(&self) -> bool {
        self.autocorr || self.fourier
    }
}

/// Pearson correlation between the series and itself shifted by `lag`.
/// Returns 0 with the flag set when either slice is constant.
pub fn autocorr_at_lag<S: Scalar>(series: &[S], lag: usize) -> Result<(S, bool)> {
    if series.len() < lag + 2 {
        return Err(CoreError::TooShort { need: lag + 2, got: series.len() });
    }
    let a = &series[..series.len() - lag];
    let b = &series[lag..];
    let n = S::of_usize(a.len());
    let mut mean_a = S::zero();
    let mut mean_b = S::zero();
    for (&x, &y) in a.iter().zip(b) {
        mean_a += x;
        mean_b += y;
    }
    mean_a /= n;
    mean_b /= n;
    let mut cov = S::zero();
    let mut var_a = S::zero();
    let mut var_b = S::zero();
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    let denom = (var_a * var_b).sqrt();
    if denom == S::zero() {
        return Ok((S::zero(), true));
    }
    Ok((cov / denom, false))
}

/// Shannon entropy (natural log) of a 10-bin equal-width histogram over
/// [min, max]. A constant series occupies a single bin: entropy 0.
pub fn binned_entropy<S: Scalar>(series: &[S]) -> Result<S> {
    const BINS: usize = 10;
    if series.is_empty() {
        return Err(CoreError::Empty("binned entropy of empty series".into()));
    }
    let mut min = series[0];
    let mut max = series[0];
    for &x in series {
        if x < min {
            min = x;
        }
        if x > max {
            max = x;
        }
    }
    if min == max {
        return Ok(S::zero());
    }
    let width = (max - min) / S::of_usize(BINS);
    let mut counts = [0usize; BINS];
    for &x in series {
        let raw = ((x - min) / width).to_f64().unwrap() as usize;
        counts[raw.min(BINS - 1)] += 1;
    }
    let n = S::of_usize(series.len());
    let mut h = S::zero();
    for &c in &counts {
        if c > 0 {
            let p = S::of_usize(c) / n;
            h -= p * p.ln();
        }
    }
    Ok(h)
}

/// One-sided periodogram |X_k|² for k = 0 ..= n/2 via FFT.
pub fn periodogram<S: Scalar>(series: &[S]) -> Result<Vec<S>> {
    if series.is_empty() {
        return Err(CoreError::Empty("periodogram of empty series".into()));
    }
    let n = series.len();
    let mut buf: Vec<Complex<S>> = series.iter().map(|&x| Complex::new(x, S::zero())).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok(buf[..n / 2 + 1].iter().map(|c| c.norm_sqr()).collect())
}

/// Binned entropy of the periodogram normalized to sum 1. A zero spectrum
/// yields 0 with the flag set.
pub fn fourier_entropy<S: Scalar>(series: &[S]) -> Result<(S, bool)> {
    let mut psd = periodogram(series)?;
    let mut total = S::zero();
    for &p in &psd {
        total += p;
    }
    if total == S::zero() {
        return Ok((S::zero(), true));
    }
    for p in psd.iter_mut() {
        *p /= total;
    }
    Ok((binned_entropy(&psd)?, false))
}

/// Fraction of samples whose magnitude exceeds 110 % of the series RMS.
pub fn outlier_ratio<S: Scalar>(series: &[S]) -> Result<S> {
    if series.is_empty() {
        return Err(CoreError::Empty("outlier ratio of empty series".into()));
    }
    let mut acc = S::zero();
    for &x in series {
        acc += x * x;
    }
    let threshold = S::of(1.1) * (acc / S::of_usize(series.len())).sqrt();
    let count = series.iter().filter(|x| x.abs() > threshold).count();
    Ok(S::of_usize(count) / S::of_usize(series.len()))
}

/// The four whole-window features of one channel series, in registry
/// variant order (autocorr, binned_entropy, fourier_entropy, outlier_ratio).
pub fn whole_window_features<S: Scalar>(series: &[S], lag: usize) -> Result<([S; 4], WholeFlags)> {
    let mut flags = WholeFlags::default();
    let (ac, ac_flag) = autocorr_at_lag(series, lag)?;
    flags.autocorr = ac_flag;
    let be = binned_entropy(series)?;
    let (fe, fe_flag) = fourier_entropy(series)?;
    flags.fourier = fe_flag;
    let or = outlier_ratio(series)?;
    Ok(([ac, be, fe, or], flags))
}
