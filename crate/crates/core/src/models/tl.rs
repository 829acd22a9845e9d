//! Lossless transmission line closed on a resistor `R` in series with an
//! active device `Ra`. The round-trip condition `e^{2λτ_f} = -Γ₀` gives the
//! whole spectrum in closed form.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::floquet::{canonicalize_spectrum, FloquetEigenpair, FloquetSpectrum};
use crate::hb::HarmonicVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlResonatorModel {
    pub r: f64,
    pub ra: f64,
    pub z0: f64,
    pub tau_f: f64,
}

impl TlResonatorModel {
    pub fn new(r: f64, ra: f64, z0: f64, tau_f: f64) -> Result<Self> {
        if !(z0 > 0.0) || !(tau_f > 0.0) {
            return Err(Error::InvalidArgument(
                "tl needs Z0 > 0 and tau_f > 0".into(),
            ));
        }
        if !(r >= 0.0) || !ra.is_finite() {
            return Err(Error::InvalidArgument(
                "tl needs R >= 0 and finite Ra".into(),
            ));
        }
        Ok(Self { r, ra, z0, tau_f })
    }

    /// `Γ₀ = ((R + Ra) Y₀ - 1) / ((R + Ra) Y₀ + 1)`.
    pub fn reflection(&self) -> Result<f64> {
        let zy = (self.r + self.ra) / self.z0;
        let den = zy + 1.0;
        if den.abs() <= 1e-14 {
            return Err(Error::ReflectionPole);
        }
        Ok((zy - 1.0) / den)
    }

    /// Round-trip time `2 τ_f`, the period attached to the spectrum.
    pub fn round_trip(&self) -> f64 {
        2.0 * self.tau_f
    }
}

/// The `n_roots` roots `λ_k = (ln|Γ₀| + i (Arg(-Γ₀) + 2πk)) / (2τ_f)` with the
/// smallest `|Im λ|`. No folding is applied: each `k` is its own class.
pub fn tl_spectrum(m: &TlResonatorModel, n_roots: usize) -> Result<FloquetSpectrum> {
    let g0 = m.reflection()?;
    if g0 == 0.0 {
        return Err(Error::MatchedLine);
    }
    let period = m.round_trip();
    let re = g0.abs().ln() / period;
    let arg = Complex64::new(-g0, 0.0).arg();

    let half = n_roots as i64;
    let mut branches: Vec<i64> = (-half..=half).collect();
    let im_of = |k: i64| (arg + 2.0 * PI * k as f64) / period;
    branches.sort_by(|&a, &b| {
        im_of(a)
            .abs()
            .total_cmp(&im_of(b).abs())
            .then(im_of(a).total_cmp(&im_of(b)))
    });
    branches.truncate(n_roots);

    let mut pairs = Vec::with_capacity(n_roots);
    for k in branches {
        let lambda = Complex64::new(re, im_of(k));
        let multiplier = (lambda * period).exp();
        let mut ev = HarmonicVector::zeros(1, 0, 0.0);
        ev.set(0, 0, Complex64::new(1.0, 0.0));
        pairs.push(FloquetEigenpair {
            exponent: lambda,
            multiplier,
            eigenvector: ev,
            residual: (multiplier + g0).norm(),
            bound_ok: true,
            refined: true,
        });
    }
    Ok(canonicalize_spectrum(pairs, period, 0.0, false))
}
