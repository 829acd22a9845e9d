//! Polynomial eigenvalue problems `(Σ_k P_k λ^k) v = 0` solved through the
//! first companion linearization.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigen, CMatrix, CVector};

/// Coefficients `P_0 ..= P_r` of a matrix polynomial, all `m x m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pep {
    coefficients: Vec<CMatrix>,
}

impl Pep {
    pub fn new(coefficients: Vec<CMatrix>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty matrix polynomial".into()))?;
        let m = first.nrows();
        if coefficients.len() < 2 {
            return Err(Error::InvalidArgument(
                "matrix polynomial must have degree >= 1".into(),
            ));
        }
        for p in &coefficients {
            if p.nrows() != m || p.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: if p.nrows() != m { p.nrows() } else { p.ncols() },
                });
            }
        }
        Ok(Self { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn size(&self) -> usize {
        self.coefficients[0].nrows()
    }

    pub fn coefficients(&self) -> &[CMatrix] {
        &self.coefficients
    }

    /// `P(λ) = Σ_k P_k λ^k`.
    pub fn evaluate(&self, lambda: Complex64) -> CMatrix {
        // Horner
        let mut acc = self.coefficients[self.degree()].clone();
        for k in (0..self.degree()).rev() {
            acc *= lambda;
            acc += &self.coefficients[k];
        }
        acc
    }

    /// `‖P(λ) v‖ / ‖v‖`.
    pub fn residual(&self, lambda: Complex64, v: &CVector) -> f64 {
        let mut acc = &self.coefficients[self.degree()] * v;
        for k in (0..self.degree()).rev() {
            acc *= lambda;
            acc += &self.coefficients[k] * v;
        }
        acc.norm() / v.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PepEigenpair {
    pub value: Complex64,
    pub vector: CVector,
    pub residual: f64,
}

/// Finite eigenpairs plus the number of eigenvalues at infinity; together
/// they always account for all `r m` eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct PepSolution {
    pub finite: Vec<PepEigenpair>,
    pub infinite: usize,
}

impl PepSolution {
    pub fn total(&self) -> usize {
        self.finite.len() + self.infinite
    }

    /// Fails with the infinite-eigenvalue count when the leading coefficient is singular.
    pub fn require_regular(self) -> core::result::Result<Self, SingularLeading> {
        if self.infinite > 0 {
            Err(SingularLeading {
                infinite: self.infinite,
                solution: self,
            })
        } else {
            Ok(self)
        }
    }
}

/// The leading coefficient was singular; the solution is still attached.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("singular leading coefficient: {infinite} infinite eigenvalues")]
pub struct SingularLeading {
    pub infinite: usize,
    pub solution: PepSolution,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Ratio of smallest to largest LU pivot; 0 for exactly singular.
fn pivot_ratio(m: &CMatrix) -> f64 {
    let lu = m.clone().lu();
    let u = lu.u();
    let d: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
    let big = d.iter().copied().fold(0.0, f64::max);
    if big == 0.0 {
        return 0.0;
    }
    d.iter().copied().fold(f64::INFINITY, f64::min) / big
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Monic first companion matrix of `Σ Q_k μ^k` (requires `Q_r` invertible).
fn companion(coeffs: &[CMatrix]) -> Result<CMatrix> {
    let r = coeffs.len() - 1;
    let m = coeffs[0].nrows();
    let lu = coeffs[r].clone().lu();
    let mut c = CMatrix::zeros(r * m, r * m);
    for k in 0..r {
        // block column k holds -Q_r^{-1} Q_{r-1-k}
        let block = lu
            .solve(&coeffs[r - 1 - k])
            .ok_or(Error::SingularJacobian)?;
        for i in 0..m {
            for j in 0..m {
                c[(i, k * m + j)] = -block[(i, j)];
            }
        }
    }
    for k in 1..r {
        for i in 0..m {
            c[(k * m + i, (k - 1) * m + i)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(c)
}

/// Picks the block of a companion eigenvector with the largest norm.
fn extract_vector(z: &CVector, r: usize, m: usize) -> CVector {
    let best = (0..r)
        .max_by(|&a, &b| {
            let na = z.rows(a * m, m).norm();
            let nb = z.rows(b * m, m).norm();
            na.total_cmp(&nb)
        })
        .unwrap_or(0);
    let v = z.rows(best * m, m).into_owned();
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// All `r m` eigenvalues of a degree-`r`, size-`m` matrix polynomial.
///
/// The eigenvalue parameter is scaled so that `‖P_0‖` and `‖P_r‖ ρ^r`
/// balance. With a singular leading coefficient the reversed polynomial
/// `μ^r P(σ + 1/μ)` is linearized instead and eigenvalues with `μ ≈ 0` are
/// counted as infinite.
pub fn solve_pep(pep: &Pep) -> Result<PepSolution> {
    let r = pep.degree();
    let m = pep.size();
    let norms: Vec<f64> = pep.coefficients.iter().map(max_abs).collect();
    let rho = if norms[0] > 0.0 && norms[r] > 0.0 {
        (norms[0] / norms[r]).powf(1.0 / r as f64)
    } else {
        1.0
    };
    let mut scaled: Vec<CMatrix> = pep
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, p)| p * Complex64::new(rho.powi(k as i32), 0.0))
        .collect();
    let top = scaled.iter().map(max_abs).fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::InvalidArgument(
            "matrix polynomial is identically zero".into(),
        ));
    }
    for p in scaled.iter_mut() {
        *p /= Complex64::new(top, 0.0);
    }

    let mut finite = Vec::with_capacity(r * m);
    let mut infinite = 0;

    if pivot_ratio(&scaled[r]) > 1e-12 {
        let (values, vectors) = eigen(companion(&scaled)?)?;
        for (i, nu) in values.into_iter().enumerate() {
            let v = extract_vector(&vectors.column(i).into_owned(), r, m);
            let lambda = nu * rho;
            let residual = pep.residual(lambda, &v);
            finite.push(PepEigenpair {
                value: lambda,
                vector: v,
                residual,
            });
        }
    } else {
        let sigma = [0.6, 0.37, 1.3, 0.11, 2.9]
            .iter()
            .map(|&s| Complex64::new(0.8 * s, 0.6 * s))
            .map(|s| {
                let mut acc = scaled[r].clone();
                for k in (0..r).rev() {
                    acc *= s;
                    acc += &scaled[k];
                }
                (s, pivot_ratio(&acc))
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(s, _)| s)
            .expect("non-empty shift list");
        // Q_j = Σ_{k >= r - j} P_k C(k, j - r + k) σ^{j - r + k}
        let reversed: Vec<CMatrix> = (0..=r)
            .map(|j| {
                let mut q = CMatrix::zeros(m, m);
                for k in (r - j)..=r {
                    let i = j + k - r;
                    q += &scaled[k] * (sigma.powu(i as u32) * binomial(k, i));
                }
                q
            })
            .collect();
        if pivot_ratio(&reversed[r]) == 0.0 {
            return Err(Error::InvalidArgument(
                "matrix polynomial is singular (det P(λ) ≡ 0)".into(),
            ));
        }
        let (values, vectors) = eigen(companion(&reversed)?)?;
        let mut mags: Vec<f64> = values.iter().map(|z| z.norm()).collect();
        mags.sort_by(f64::total_cmp);
        let median = mags[mags.len() / 2];
        let tol = 1e-9 * median.max(1.0);
        for (i, mu) in values.into_iter().enumerate() {
            if mu.norm() <= tol {
                infinite += 1;
                continue;
            }
            let v = extract_vector(&vectors.column(i).into_owned(), r, m);
            let lambda = (sigma + mu.inv()) * rho;
            let residual = pep.residual(lambda, &v);
            finite.push(PepEigenpair {
                value: lambda,
                vector: v,
                residual,
            });
        }
    }
    Ok(PepSolution { finite, infinite })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_element(1, 1, Complex64::new(v, 0.0))
    }

    #[test]
    fn linear_scalar() {
        let pep = Pep::new(alloc::vec![scalar(-2.0), scalar(1.0)]).unwrap();
        let sol = solve_pep(&pep).unwrap();
        assert_eq!(sol.finite.len(), 1);
        assert!((sol.finite[0].value - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quadratic_scalar() {
        let pep = Pep::new(alloc::vec![scalar(-1.0), scalar(0.0), scalar(1.0)]).unwrap();
        let sol = solve_pep(&pep).unwrap();
        let mut re: Vec<f64> = sol.finite.iter().map(|p| p.value.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-13 && (re[1] - 1.0).abs() < 1e-13);
        assert!(sol.finite.iter().all(|p| p.value.im.abs() < 1e-13));
    }

    #[test]
    fn singular_leading_reports_infinite() {
        // λ·0 + ... : P(λ) = diag(λ - 1, λ² - 4) with the λ² block only in the second row
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let p0 = CMatrix::from_row_slice(2, 2, &[-one, z, z, one * -4.0]);
        let p1 = CMatrix::from_row_slice(2, 2, &[one, z, z, z]);
        let p2 = CMatrix::from_row_slice(2, 2, &[z, z, z, one]);
        let pep = Pep::new(alloc::vec![p0, p1, p2]).unwrap();
        let sol = solve_pep(&pep).unwrap();
        assert_eq!(sol.total(), 4);
        assert_eq!(sol.infinite, 1);
        let mut re: Vec<f64> = sol.finite.iter().map(|p| p.value.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-12);
        assert!((re[1] - 1.0).abs() < 1e-12);
        assert!((re[2] - 2.0).abs() < 1e-12);
        assert!(sol.finite.iter().all(|p| p.residual < 1e-12));
        let err = sol.require_regular().unwrap_err();
        assert_eq!(err.infinite, 1);
    }
}
