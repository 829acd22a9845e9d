//! Scalar problems with constant coefficients: the characteristic equation
//! at `ω_j = 0` carries every class, the other harmonics only shift roots
//! by `-i ω_j`.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{
    canonicalize_spectrum, FloquetEigenpair, FloquetProblem, FloquetSpectrum, SpectrumDiagnostics,
};
use crate::error::{Error, Result};
use crate::hb::HarmonicVector;

const GRID: usize = 21;
const MAX_ITER: usize = 100;

struct Characteristic<'a> {
    p: &'a FloquetProblem,
    a: Complex64,
    g: Complex64,
}

impl Characteristic<'_> {
    /// `D(λ) = λ - a - g q(λ, 0)` and `D'(λ)`.
    fn eval(&self, lambda: Complex64) -> Result<(Complex64, Complex64)> {
        match self.p.transfer() {
            None => Ok((lambda - self.a, Complex64::new(1.0, 0.0))),
            Some(t) => {
                let q = t.transfer_at(lambda, 0.0)?[(0, 0)];
                let dq = t.transfer_derivative(lambda, 0.0, 1)?[(0, 0)];
                Ok((
                    lambda - self.a - self.g * q,
                    Complex64::new(1.0, 0.0) - self.g * dq,
                ))
            }
        }
    }
}

/// Constant term of a scalar Toeplitz operator, rejecting time variation.
fn constant_coefficient(t: &crate::hb::ToeplitzMatrix) -> Result<Complex64> {
    let c0 = t.coefficient(0, 0, 0);
    let bw = t.bandwidth() as i64;
    let scale = c0.norm().max(1.0);
    if (1..=bw).any(|d| {
        t.coefficient(0, 0, d).norm() > 1e-14 * scale
            || t.coefficient(0, 0, -d).norm() > 1e-14 * scale
    }) {
        return Err(Error::InvalidArgument(
            "scalar root search needs constant coefficients".into(),
        ));
    }
    Ok(c0)
}

/// All roots of the scalar characteristic equation in the search box
/// `Re λ ∈ (-k_c, a + 2]`, `|Im λ| <= ω₀/2`, by Newton iteration with
/// deflation from a 21 x 21 grid of starting points.
pub fn solve_scalar(p: &FloquetProblem) -> Result<FloquetSpectrum> {
    if p.dim() != 1 {
        return Err(Error::InvalidArgument(
            "solve_scalar needs a one-dimensional problem".into(),
        ));
    }
    let a = constant_coefficient(p.jacobian())?;
    let g = match p.memory_input() {
        Some(m) => constant_coefficient(m)?,
        None => Complex64::new(1.0, 0.0),
    };
    let ch = Characteristic { p, a, g };
    let floor = p.exponent_floor();
    let omega0 = p.omega0();

    let re_lo = if floor.is_finite() {
        floor + 0.05
    } else {
        a.re - 5.0
    };
    let re_hi = a.re + 2.0;
    let mut roots: Vec<Complex64> = Vec::new();

    for iy in 0..GRID {
        for ix in 0..GRID {
            let start = Complex64::new(
                re_lo + (re_hi - re_lo) * ix as f64 / (GRID - 1) as f64,
                -0.5 * omega0 + omega0 * iy as f64 / (GRID - 1) as f64,
            );
            if let Some(root) = newton_deflated(&ch, start, &roots) {
                if roots.iter().all(|r| (r - root).norm() > 1e-8) {
                    roots.push(root);
                }
            }
        }
    }
    if roots.is_empty() {
        return Err(Error::NoConvergence {
            iterations: MAX_ITER,
            residual: f64::NAN,
        });
    }

    let mut diagnostics = SpectrumDiagnostics {
        raw_finite: roots.len(),
        ..Default::default()
    };
    let mut pairs = Vec::new();
    for root in roots {
        if !(root.re > floor) {
            diagnostics.bound_filtered.push(root);
            continue;
        }
        let mut ev = HarmonicVector::zeros(1, p.n_harmonics(), omega0);
        ev.set(0, 0, Complex64::new(1.0, 0.0));
        let residual = ch.eval(root)?.0.norm();
        pairs.push(FloquetEigenpair {
            exponent: root,
            multiplier: (root * p.period()).exp(),
            eigenvector: ev,
            residual,
            bound_ok: true,
            refined: true,
        });
    }
    let mut spectrum = canonicalize_spectrum(pairs, p.period(), omega0, p.autonomous());
    diagnostics.merged = spectrum.diagnostics.merged;
    spectrum.diagnostics = diagnostics;
    Ok(spectrum)
}

fn newton_deflated(
    ch: &Characteristic<'_>,
    start: Complex64,
    found: &[Complex64],
) -> Option<Complex64> {
    let mut z = start;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let (d, dd) = ch.eval(z).ok()?;
        if d.norm() == 0.0 {
            converged = true;
            break;
        }
        let mut logd = dd / d;
        for r in found {
            logd -= (z - r).inv();
        }
        if logd.norm() == 0.0 {
            return None;
        }
        let step = logd.inv();
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() < 1e-14 * (1.0 + z.norm()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    // polish on the undeflated function
    for _ in 0..5 {
        let (d, dd) = ch.eval(z).ok()?;
        if dd.norm() == 0.0 {
            break;
        }
        let step = d / dd;
        z -= step;
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    let (d, dd) = ch.eval(z).ok()?;
    let scale = 1.0 + z.norm() + dd.norm();
    (d.norm() < 1e-10 * scale).then_some(z)
}
