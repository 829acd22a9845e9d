//! `dy/dt = a y(t) + ∫_{t-s}^{t} e^{-k (t - τ)} y(τ) dτ`

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::floquet::solve_scalar;
use crate::floquet::{FloquetProblem, FloquetSpectrum};
use crate::hb::ToeplitzMatrix;
use crate::kernels::{KernelSpec, MemoryTransfer};

/// Time-invariant, so the period is a free choice; `T = 1`.
const PERIOD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Memory1DModel {
    pub a: f64,
    pub k: f64,
    /// Memory length; `f64::INFINITY` for the untruncated kernel.
    pub s: f64,
}

impl Memory1DModel {
    pub fn new(a: f64, k: f64, s: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(
                "memory1d needs a finite k > 0".into(),
            ));
        }
        if !(s >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(
                "memory1d needs finite a and s >= 0".into(),
            ));
        }
        Ok(Self { a, k, s })
    }

    pub fn with_s(self, s: f64) -> Result<Self> {
        Self::new(self.a, self.k, s)
    }

    /// Root of `λ² + (k - a) λ - (a k + 1) = 0` with `Re λ > -k`.
    pub fn lambda_inf(&self) -> f64 {
        let (a, k) = (self.a, self.k);
        0.5 * (-(k - a) + ((k + a) * (k + a) + 4.0).sqrt())
    }

    pub fn problem(&self) -> Result<FloquetProblem> {
        let omega0 = 2.0 * core::f64::consts::PI / PERIOD;
        let jac = ToeplitzMatrix::constant(1, 1, 1, omega0, &[self.a]);
        let kernel = KernelSpec::exponential(1, alloc::vec![1.0], self.k)?;
        let transfer = MemoryTransfer::truncated(kernel, self.s)?;
        FloquetProblem::new(jac, Some(transfer), PERIOD)
    }
}

pub fn model1d_exponent(m: &Memory1DModel) -> Result<FloquetSpectrum> {
    solve_scalar(&m.problem()?)
}

/// One line of the memory-length convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub s: f64,
    pub lambda: Complex64,
    pub abs_dev: f64,
}

/// `d = λ(s) - λ∞` from `d (1 + u² + u d) + u e^{-s (u + d)} = 0`,
/// `u = k + λ∞`, which stays accurate when `d` is far below `ε λ∞`.
fn deviation(u: f64, s: f64, seed: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut d = seed;
    for _ in 0..60 {
        let e = (-(d + u) * s).exp();
        let f = d * (one + u * u + u * d) + u * e;
        let df = one + u * u + 2.0 * u * d - u * s * e;
        let step = f / df;
        d -= step;
        if step.norm() <= 1e-15 * d.norm() {
            break;
        }
    }
    d
}

/// `λ(s)` (dominant exponent) and `|λ(s) - λ∞|` for each memory length.
pub fn model1d_convergence(m: &Memory1DModel, s_values: &[f64]) -> Result<Vec<ConvergenceRow>> {
    if s_values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("s values must be ascending".into()));
    }
    let linf = m.lambda_inf();
    let u = m.k + linf;
    let mut rows = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let spectrum = model1d_exponent(&m.with_s(s)?)?;
        let lambda = spectrum
            .dominant()
            .map(|p| p.exponent)
            .ok_or(Error::NoConvergence {
                iterations: 0,
                residual: f64::NAN,
            })?;
        let dev = if s.is_finite() {
            deviation(u, s, lambda - linf)
        } else {
            lambda - linf
        };
        rows.push(ConvergenceRow {
            s,
            lambda: Complex64::new(linf, 0.0) + dev,
            abs_dev: dev.norm(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymptotic_root_a0() {
        let m = Memory1DModel::new(0.0, 3.0, f64::INFINITY).unwrap();
        let sp = model1d_exponent(&m).unwrap();
        let l = sp.dominant().unwrap().exponent;
        assert!((l.re - (-3.0 + 13f64.sqrt()) / 2.0).abs() < 1e-10);
        assert!(l.im.abs() < 1e-10);
    }

    #[test]
    fn no_memory_gives_a() {
        let m = Memory1DModel::new(1.0, 3.0, 0.0).unwrap();
        let sp = model1d_exponent(&m).unwrap();
        assert!((sp.dominant().unwrap().exponent - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn second_quadratic_root_is_filtered() {
        let m = Memory1DModel::new(-2.0, 3.0, f64::INFINITY).unwrap();
        let sp = model1d_exponent(&m).unwrap();
        assert_eq!(sp.class_count(), 1);
        assert!((sp.pairs[0].exponent.re - (-5.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
        assert!(sp.pairs.iter().all(|p| p.exponent.re > -3.0));
    }

    #[test]
    fn convergence_table_s0_entry() {
        let m = Memory1DModel::new(0.5, 3.0, f64::INFINITY).unwrap();
        let rows = model1d_convergence(&m, &[0.0, 1.0, 20.0]).unwrap();
        assert!((rows[0].abs_dev - (0.5 - m.lambda_inf()).abs()).abs() < 1e-12);
        assert!(rows[2].abs_dev < 1e-10);
    }
}
