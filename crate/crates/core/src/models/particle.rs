//! 2D Brownian particle in a harmonic well with velocity-dependent,
//! exponentially retarded friction (ensemble-averaged, deterministic):
//!
//! ```text
//! dx/dt = v
//! dv/dt = -ω̄² x - ∫ k e^{-k (t - τ)} γ(|v(τ)|) v(τ) dτ
//! γ(v)  = -α + β v² + g/k
//! ```
//!
//! State layout `z = (x₁, x₂, v₁, v₂)`. The kernel is `C e^{-k u}` with
//! `C = diag(0, 0, -k, -k)` acting on `(0, 0, γ(|v|) v)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cycle::{
    linearize, seed_by_integration, solve_cycle, CycleOptions, LimitCycle, SeedOptions, SystemModel,
};
use crate::error::{Error, Result};
use crate::floquet::{solve_spectrum, FloquetProblem, FloquetSpectrum, SpectrumOptions, Stability};
use crate::hb::{HarmonicVector, SpectralGrid};
use crate::kernels::KernelSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianParticleModel {
    /// Cancels from the averaged equations; kept for completeness.
    pub mass: f64,
    pub alpha: f64,
    pub beta: f64,
    pub g: f64,
    /// `1/τ_n`; `f64::INFINITY` gives the memoryless Rayleigh particle.
    pub k: f64,
    pub omega_bar: [f64; 2],
}

impl BrownianParticleModel {
    pub fn new(
        mass: f64,
        alpha: f64,
        beta: f64,
        g: f64,
        k: f64,
        omega_bar: [f64; 2],
    ) -> Result<Self> {
        if !(mass > 0.0) || !(k > 0.0) || !(omega_bar[0] > 0.0) || !(omega_bar[1] > 0.0) {
            return Err(Error::InvalidArgument(
                "particle needs m, k, ω̄₁, ω̄₂ > 0".into(),
            ));
        }
        if !(alpha.is_finite() && beta.is_finite() && g.is_finite()) {
            return Err(Error::InvalidArgument(
                "particle friction parameters must be finite".into(),
            ));
        }
        Ok(Self {
            mass,
            alpha,
            beta,
            g,
            k,
            omega_bar,
        })
    }

    /// Parametrization by frequency ratio: `ω̄₂ = ω̄₁ / ratio`.
    pub fn from_ratio(
        alpha: f64,
        beta: f64,
        g: f64,
        k: f64,
        omega1: f64,
        ratio: f64,
    ) -> Result<Self> {
        Self::new(1.0, alpha, beta, g, k, [omega1, omega1 / ratio])
    }

    pub fn memoryless(&self) -> bool {
        self.k.is_infinite()
    }

    fn memory_shift(&self) -> f64 {
        if self.memoryless() {
            0.0
        } else {
            self.g / self.k
        }
    }

    /// `γ` at squared speed `v²`.
    pub fn gamma(&self, speed2: f64) -> f64 {
        -self.alpha + self.beta * speed2 + self.memory_shift()
    }

    /// Friction force density `γ(|v|) v`.
    pub fn friction(&self, v: [f64; 2]) -> [f64; 2] {
        let gm = self.gamma(v[0] * v[0] + v[1] * v[1]);
        [gm * v[0], gm * v[1]]
    }

    /// `J_γ = γ(|v|) I + 2β v vᵀ`, row-major.
    pub fn friction_jacobian(&self, v: [f64; 2]) -> [f64; 4] {
        let gm = self.gamma(v[0] * v[0] + v[1] * v[1]);
        let b2 = 2.0 * self.beta;
        [
            gm + b2 * v[0] * v[0],
            b2 * v[0] * v[1],
            b2 * v[1] * v[0],
            gm + b2 * v[1] * v[1],
        ]
    }

    /// Squared speed of the circular cycle of the isotropic well, if any.
    pub fn circular_speed2(&self) -> Option<f64> {
        let v2 = (self.alpha - self.memory_shift()) / self.beta;
        (self.beta > 0.0 && v2 > 0.0).then_some(v2)
    }

    pub fn system(&self) -> ParticleSystem {
        ParticleSystem::new(*self)
    }
}

/// [`SystemModel`] adapter for the particle.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    model: BrownianParticleModel,
    kernel: Option<KernelSpec>,
}

impl ParticleSystem {
    pub fn new(model: BrownianParticleModel) -> Self {
        let kernel = (!model.memoryless()).then(|| {
            let k = model.k;
            let mut c = vec![0.0; 16];
            c[2 * 4 + 2] = -k;
            c[3 * 4 + 3] = -k;
            KernelSpec::ExponentialDecay {
                dim: 4,
                coefficients: c,
                rate: k,
            }
        });
        Self { model, kernel }
    }

    pub fn model(&self) -> &BrownianParticleModel {
        &self.model
    }

    fn well(&self) -> [f64; 2] {
        let w = self.model.omega_bar;
        [w[0] * w[0], w[1] * w[1]]
    }
}

impl SystemModel for ParticleSystem {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, z: &[f64], _t: f64, out: &mut [f64]) {
        let w2 = self.well();
        out[0] = z[2];
        out[1] = z[3];
        out[2] = -w2[0] * z[0];
        out[3] = -w2[1] * z[1];
        if self.kernel.is_none() {
            let f = self.model.friction([z[2], z[3]]);
            out[2] -= f[0];
            out[3] -= f[1];
        }
    }

    fn rhs_jacobian(&self, z: &[f64], _t: f64, out: &mut [f64]) {
        let w2 = self.well();
        out.fill(0.0);
        out[2] = 1.0;
        out[4 + 3] = 1.0;
        out[2 * 4] = -w2[0];
        out[3 * 4 + 1] = -w2[1];
        if self.kernel.is_none() {
            let j = self.model.friction_jacobian([z[2], z[3]]);
            out[2 * 4 + 2] -= j[0];
            out[2 * 4 + 3] -= j[1];
            out[3 * 4 + 2] -= j[2];
            out[3 * 4 + 3] -= j[3];
        }
    }

    fn kernel(&self) -> Option<&KernelSpec> {
        self.kernel.as_ref()
    }

    fn autonomous(&self) -> bool {
        true
    }

    fn period_hint(&self) -> Option<f64> {
        let w = self.model.omega_bar;
        Some(2.0 * PI / (w[0] * w[1]).sqrt())
    }

    fn has_memory_input(&self) -> bool {
        self.kernel.is_some()
    }

    fn memory_input(&self, z: &[f64], out: &mut [f64]) {
        let f = self.model.friction([z[2], z[3]]);
        out[0] = 0.0;
        out[1] = 0.0;
        out[2] = f[0];
        out[3] = f[1];
    }

    fn memory_input_jacobian(&self, z: &[f64], out: &mut [f64]) {
        let j = self.model.friction_jacobian([z[2], z[3]]);
        out.fill(0.0);
        out[2 * 4 + 2] = j[0];
        out[2 * 4 + 3] = j[1];
        out[3 * 4 + 2] = j[2];
        out[3 * 4 + 3] = j[3];
    }

    fn phase_components(&self) -> Vec<usize> {
        vec![2, 3]
    }
}

/// Harmonic coefficients (up to `2 N_H`) of `J_γ(t)` along the cycle, as a
/// 4-component vector holding the 2x2 matrix row-major.
pub fn particle_effective_friction(m: &BrownianParticleModel, c: &LimitCycle) -> HarmonicVector {
    let nh = c.n_harmonics();
    let grid = SpectralGrid::oversampled(nh);
    let z = grid.synthesize_real(&c.harmonics);
    let ns = grid.n_samples();
    let mut samples = vec![0.0; 4 * ns];
    for k in 0..ns {
        let j = m.friction_jacobian([z[2 * ns + k], z[3 * ns + k]]);
        for e in 0..4 {
            samples[e * ns + k] = j[e];
        }
    }
    grid.analyze_real(&samples, 4, grid.max_harmonic(), 2.0 * PI / c.period)
}

/// Which attractor the analysis ended on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Cycle,
    Equilibrium,
}

#[derive(Debug, Clone)]
pub struct ParticleAnalysis {
    pub regime: Regime,
    /// The converged cycle, or the zero cycle for the equilibrium regime.
    pub cycle: LimitCycle,
    pub spectrum: FloquetSpectrum,
}

impl ParticleAnalysis {
    /// Inside the Arnold tongue: a converged, stable, non-degenerate cycle.
    pub fn in_tongue(&self) -> bool {
        self.regime == Regime::Cycle && self.spectrum.stability == Stability::Stable
    }
}

/// Harmonic seed from the isotropic-well circle, stretched per axis.
pub fn analytic_seed(m: &BrownianParticleModel, n_harmonics: usize) -> Option<LimitCycle> {
    let v2 = m.circular_speed2()?;
    let sys = ParticleSystem::new(*m);
    let period = sys.period_hint()?;
    let omega = 2.0 * PI / period;
    let v = v2.sqrt();
    // x = (A₁ cos ωt, A₂ sin ωt), v = dx/dt
    let a1 = v / omega;
    let a2 = v / omega;
    let mut h = HarmonicVector::zeros(4, n_harmonics, omega);
    let half = Complex64::new(0.5, 0.0);
    let mhalf_i = Complex64::new(0.0, -0.5);
    h.set(0, 1, half * a1);
    h.set(0, -1, half * a1);
    h.set(1, 1, mhalf_i * a2);
    h.set(1, -1, mhalf_i.conj() * a2);
    for c in 0..2 {
        for s in [1i64, -1] {
            let x = h.get(c, s);
            h.set(c + 2, s, Complex64::new(0.0, s as f64 * omega) * x);
        }
    }
    Some(LimitCycle::new(period, h))
}

/// Spectrum of the equilibrium at the origin (zero cycle, `N_H = 1`).
pub fn equilibrium_spectrum(m: &BrownianParticleModel) -> Result<(LimitCycle, FloquetSpectrum)> {
    let sys = ParticleSystem::new(*m);
    let period = sys.period_hint().expect("particle has a period hint");
    let omega0 = 2.0 * PI / period;
    let zero = LimitCycle::new(period, HarmonicVector::zeros(4, 1, omega0));
    let p = linearize(&sys, &zero)?.with_autonomous(false);
    let spectrum = solve_spectrum(&p, &SpectrumOptions::default())?;
    let mut cycle = zero;
    cycle.residual = 0.0;
    Ok((cycle, spectrum))
}

fn is_degenerate(c: &LimitCycle) -> bool {
    c.amplitude(2).max(c.amplitude(3)) < 1e-6
}

/// Limit cycle plus Floquet spectrum; falls back to the equilibrium when no
/// cycle converges and the origin is not unstable.
///
/// Seeds are tried in order: `warm`, the circular analytic guess, then a
/// time-integration transient.
pub fn particle_spectrum(
    m: &BrownianParticleModel,
    n_harmonics: usize,
    warm: Option<&LimitCycle>,
) -> Result<ParticleAnalysis> {
    let sys = ParticleSystem::new(*m);
    let opts = CycleOptions::default();
    let mut seeds: Vec<LimitCycle> = Vec::new();
    if let Some(w) = warm {
        let mut s = w.clone();
        s.harmonics = s.harmonics.resized(n_harmonics);
        seeds.push(s);
    }
    if let Some(s) = analytic_seed(m, n_harmonics) {
        seeds.push(s);
    }

    let mut last_err = Error::NoCycle;
    let mut tried_integration = false;
    let mut i = 0;
    loop {
        if i == seeds.len() {
            if tried_integration {
                break;
            }
            tried_integration = true;
            let v = m.circular_speed2().unwrap_or(1.0).sqrt();
            let z0 = [v / m.omega_bar[0], 0.0, 0.0, v];
            match seed_by_integration(&sys, &z0, n_harmonics, &SeedOptions::default()) {
                Ok(s) => seeds.push(s),
                Err(e) => {
                    last_err = e;
                    break;
                }
            }
            continue;
        }
        let seed = &seeds[i];
        i += 1;
        match solve_cycle(&sys, seed, &opts) {
            Ok(c) if !is_degenerate(&c) => {
                let p = linearize(&sys, &c)?;
                let spectrum = solve_spectrum(&p, &SpectrumOptions::default())?;
                return Ok(ParticleAnalysis {
                    regime: Regime::Cycle,
                    cycle: c,
                    spectrum,
                });
            }
            Ok(_) => last_err = Error::NoCycle,
            Err(e) => last_err = e,
        }
    }

    let (cycle, spectrum) = equilibrium_spectrum(m)?;
    if spectrum.stability != Stability::Unstable {
        Ok(ParticleAnalysis {
            regime: Regime::Equilibrium,
            cycle,
            spectrum,
        })
    } else {
        Err(match last_err {
            Error::NoConvergence { .. } | Error::SingularJacobian | Error::NonFinite => {
                Error::NoCycle
            }
            e => e,
        })
    }
}

/// The Floquet problem of the particle in the exact form of its harmonic
/// PEP, for callers that want to inspect it directly.
pub fn particle_problem(m: &BrownianParticleModel, c: &LimitCycle) -> Result<FloquetProblem> {
    linearize(&ParticleSystem::new(*m), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{check_jacobian, hb_residual};

    fn reference_point(alpha: f64) -> BrownianParticleModel {
        BrownianParticleModel::from_ratio(alpha, 1.0, 0.5, 1.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn jacobians_match_differences() {
        let m = BrownianParticleModel::new(1.0, 1.2, 0.7, 0.3, 2.0, [2.0, 1.5]).unwrap();
        let states = vec![
            vec![0.1, -0.3, 0.8, -0.4],
            vec![1.0, 2.0, -0.2, 0.05],
            vec![0.0; 4],
        ];
        assert!(check_jacobian(&m.system(), &states, 0.0) < 1e-7);
        let ml = BrownianParticleModel::new(1.0, 1.2, 0.7, 0.3, f64::INFINITY, [2.0, 1.5]).unwrap();
        assert!(check_jacobian(&ml.system(), &states, 0.0) < 1e-7);
    }

    #[test]
    fn analytic_circle_is_exact() {
        let m = reference_point(1.0);
        let c = analytic_seed(&m, 4).unwrap();
        let r = hb_residual(&m.system(), &c).unwrap();
        let n: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(n < 1e-12, "{n}");
    }

    #[test]
    fn equilibrium_friction_is_constant() {
        let m = reference_point(1.0);
        let zero = LimitCycle::new(PI, HarmonicVector::zeros(4, 3, 2.0));
        let hv = particle_effective_friction(&m, &zero);
        assert!((hv.get(0, 0).re - (-1.0 + 0.5)).abs() < 1e-14);
        assert!((hv.get(3, 0).re - (-1.0 + 0.5)).abs() < 1e-14);
        assert!(hv.get(1, 0).norm() < 1e-14 && hv.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn below_hopf_is_stable_equilibrium() {
        let a = particle_spectrum(&reference_point(0.3), 4, None).unwrap();
        assert_eq!(a.regime, Regime::Equilibrium);
        assert_eq!(a.spectrum.stability, Stability::Stable);
    }

    #[test]
    fn small_cycle_has_six_classes() {
        let a = particle_spectrum(&reference_point(1.0), 6, None).unwrap();
        assert_eq!(a.regime, Regime::Cycle);
        assert_eq!(a.spectrum.class_count(), 6);
        assert!(a.spectrum.trivial.is_some());
    }
}
