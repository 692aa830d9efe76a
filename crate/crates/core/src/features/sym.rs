//! Symmetric components, impedance and complex power from per-cycle
//! fundamental phasors.

use num_complex::Complex;

use crate::scalar::Scalar;
use crate::signal::Phasor;

/// Fortescue magnitudes (|X0|, |X1|, |X2|) of a three-phase phasor set,
/// with a = e^{j 2 pi / 3} and 1/3 scaling:
/// X0 = (A + B + C)/3, X1 = (A + aB + a²C)/3, X2 = (A + a²B + aC)/3.
pub fn symmetric_components<S: Scalar>(a: Phasor<S>, b: Phasor<S>, c: Phasor<S>) -> [S; 3] {
    let third = S::of(1.0 / 3.0);
    let rot = Complex::new(S::of(-0.5), S::of(0.75f64.sqrt()));
    let rot2 = rot * rot;
    let (ca, cb, cc) = (a.to_complex(), b.to_complex(), c.to_complex());
    let x0 = (ca + cb + cc) * third;
    let x1 = (ca + rot * cb + rot2 * cc) * third;
    let x2 = (ca + rot2 * cb + rot * cc) * third;
    [x0.norm(), x1.norm(), x2.norm()]
}

/// Fundamental impedance R + jX = V/I. A current magnitude below `i_eps`
/// yields (0, 0) with the flag set.
pub fn impedance_rx<S: Scalar>(v: Phasor<S>, i: Phasor<S>, i_eps: S) -> ((S, S), bool) {
    if i.magnitude < i_eps {
        return ((S::zero(), S::zero()), true);
    }
    let z = v.to_complex() / i.to_complex();
    ((z.re, z.im), false)
}

/// Active and reactive power from peak-convention phasors, using the RMS
/// complex product P + jQ = V_rms · conj(I_rms); a lagging (inductive)
/// current gives positive Q.
pub fn power_pq<S: Scalar>(v: Phasor<S>, i: Phasor<S>) -> (S, S) {
    let s = v.to_rms_complex() * i.to_rms_complex().conj();
    (s.re, s.im)
}
