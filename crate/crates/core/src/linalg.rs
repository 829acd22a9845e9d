//! Dense complex linear algebra helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues and right eigenvectors (columns) of a general complex matrix.
///
/// Schur form `A = Q T Q^H`, then back substitution on `T`.
pub fn eigen(m: CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let scale = m
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let schur = Schur::try_new(m, f64::EPSILON, 200 * n).ok_or(Error::NoConvergence {
        iterations: 200 * n,
        residual: f64::NAN,
    })?;
    let (q, t) = schur.unpack();
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let small = f64::EPSILON * scale;
    let mut vecs = CMatrix::zeros(n, n);
    let mut y = CVector::zeros(n);
    for i in 0..n {
        y.fill(Complex64::new(0.0, 0.0));
        y[i] = Complex64::new(1.0, 0.0);
        let ti = t[(i, i)];
        for j in (0..i).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in j + 1..=i {
                s += t[(j, l)] * y[l];
            }
            let mut d = t[(j, j)] - ti;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[j] = -s / d;
            let big = y[j].norm();
            if big > 1e100 {
                let inv = 1.0 / big;
                for l in j..=i {
                    y[l] *= inv;
                }
            }
        }
        let x = &q * &y;
        let nx = x.norm();
        vecs.set_column(i, &(x / Complex64::new(nx, 0.0)));
    }
    Ok((values, vecs))
}

/// Eigenvalues only.
pub fn eigenvalues(m: CMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let schur = Schur::try_new(m, f64::EPSILON, 200 * n.max(1)).ok_or(Error::NoConvergence {
        iterations: 200 * n,
        residual: f64::NAN,
    })?;
    Ok(schur
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default())
}

/// Solves `A x = b`, failing on an exactly singular factorization.
pub fn solve(a: CMatrix, b: &CVector) -> Result<CVector> {
    a.lu().solve(b).ok_or(Error::SingularJacobian)
}

pub fn solve_real(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    a.lu().solve(b).ok_or(Error::SingularJacobian)
}

/// Approximate null vector of a (nearly) singular matrix by inverse iteration.
pub fn null_vector(a: &CMatrix) -> CVector {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut shifted = a.clone();
    // tiny diagonal shift keeps the factorization finite when A is exactly singular
    for i in 0..n {
        shifted[(i, i)] += Complex64::new(1e-14 * scale, 0.0);
    }
    let lu = shifted.lu();
    let mut x = CVector::from_fn(n, |i, _| {
        Complex64::new(1.0 + 0.1 * (i % 7) as f64, 0.05 * (i % 5) as f64)
    });
    for _ in 0..3 {
        match lu.solve(&x) {
            Some(y) => {
                let ny = y.norm();
                if !ny.is_finite() || ny == 0.0 {
                    break;
                }
                x = y / Complex64::new(ny, 0.0);
            }
            None => break,
        }
    }
    x
}

/// Smallest singular value.
pub fn min_singular_value(a: &CMatrix) -> f64 {
    a.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest singular value of a real row-major `n x n` matrix.
pub fn spectral_norm(n: usize, values: &[f64]) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let m = DMatrix::from_row_slice(n, n, values);
    m.singular_values().iter().copied().fold(0.0, f64::max)
}
