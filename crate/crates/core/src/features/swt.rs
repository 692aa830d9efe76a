//! Stationary (undecimated) wavelet transform via the a-trous scheme:
//! Daubechies-4 filters, eight levels, periodic convolution after symmetric
//! end-padding to the next multiple of 256, truncated back afterwards.
//! Yields detail bands d1..d8 plus the approximation a8.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Decomposition levels; bands are d1..d8 and a8.
pub const SWT_LEVELS: usize = 8;

/// Padding block: series are padded to a multiple of 2^SWT_LEVELS.
pub const PAD_BLOCK: usize = 1 << SWT_LEVELS;

/// Daubechies-4 decomposition low-pass filter (reversed scaling
/// coefficients). Sums to sqrt(2); unit energy.
pub const DB4_DEC_LO: [f64; 8] = [
    -0.010597401785069032,
    0.0328830116668852,
    0.030841381835560764,
    -0.18703481171909309,
    -0.027983769416859854,
    0.6308807679298589,
    0.7148465705529157,
    0.2303778133088965,
];

/// Quadrature mirror high-pass: hi[k] = (-1)^(k+1) lo[7-k].
pub fn db4_dec_hi() -> [f64; 8] {
    let mut hi = [0.0; 8];
    for (k, h) in hi.iter_mut().enumerate() {
        let v = DB4_DEC_LO[7 - k];
        *h = if k % 2 == 0 { -v } else { v };
    }
    hi
}

/// Symmetric end-padding (edge sample repeated) up to `target` samples.
fn pad_symmetric<S: Scalar>(series: &[S], target: usize) -> Vec<S> {
    let n = series.len();
    let mut out = Vec::with_capacity(target);
    out.extend_from_slice(series);
    for t in n..target {
        out.push(series[2 * n - 1 - t]);
    }
    out
}

/// The nine SWT bands (d1..d8, a8) of one series, each truncated to the
/// input length. Requires at least 256 samples so the padding never
/// reflects past the start.
pub fn swt_bands<S: Scalar>(series: &[S]) -> Result<Vec<Vec<S>>> {
    let n = series.len();
    if n < PAD_BLOCK {
        return Err(CoreError::TooShort { need: PAD_BLOCK, got: n });
    }
    let padded_len = n.div_ceil(PAD_BLOCK) * PAD_BLOCK;
    let mut approx = pad_symmetric(series, padded_len);
    let np = approx.len();

    let lo = DB4_DEC_LO.map(S::of);
    let hi = db4_dec_hi().map(S::of);

    let mut bands: Vec<Vec<S>> = Vec::with_capacity(SWT_LEVELS + 1);
    for level in 0..SWT_LEVELS {
        let dilation = 1usize << level;
        let mut detail = vec![S::zero(); np];
        let mut next = vec![S::zero(); np];
        for t in 0..np {
            let mut d = S::zero();
            let mut a = S::zero();
            for k in 0..8 {
                // t - k*dilation, wrapped; k*dilation <= 7*128 < 8*np.
                let x = approx[(t + 8 * np - k * dilation) % np];
                d += hi[k] * x;
                a += lo[k] * x;
            }
            detail[t] = d;
            next[t] = a;
        }
        bands.push(detail);
        approx = next;
    }
    bands.push(approx);
    for b in bands.iter_mut() {
        b.truncate(n);
    }
    Ok(bands)
}
