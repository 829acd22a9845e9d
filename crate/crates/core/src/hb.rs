//! Truncated exponential Fourier series and the harmonic-domain operators
//! built on them: sampling (DFT), differentiation and multiplication by a
//! periodic matrix (Toeplitz convolution).
//!
//! Amplitudes are stored component-major: component `c` occupies the block
//! `c * (2 N_H + 1) .. (c + 1) * (2 N_H + 1)`, harmonics in ascending order
//! `-N_H ..= N_H`. Time samples use the same layout with ascending time
//! `t_k = k T / (2 N_H + 1)`, `k = 1 ..= 2 N_H + 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Number of samples / harmonics in one component block.
#[inline]
pub const fn block_len(n_harmonics: usize) -> usize {
    2 * n_harmonics + 1
}

/// Truncated exponential Fourier representation of a `T`-periodic vector signal.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicVector {
    dim: usize,
    n_harmonics: usize,
    omega0: f64,
    amplitudes: Vec<Complex64>,
}

impl HarmonicVector {
    pub fn zeros(dim: usize, n_harmonics: usize, omega0: f64) -> Self {
        Self {
            dim,
            n_harmonics,
            omega0,
            amplitudes: vec![ZERO; dim * block_len(n_harmonics)],
        }
    }

    pub fn from_amplitudes(
        dim: usize,
        n_harmonics: usize,
        omega0: f64,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        let expected = dim * block_len(n_harmonics);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            dim,
            n_harmonics,
            omega0,
            amplitudes,
        })
    }

    /// Builds a vector from `f(component, harmonic)`.
    pub fn from_fn(
        dim: usize,
        n_harmonics: usize,
        omega0: f64,
        mut f: impl FnMut(usize, i64) -> Complex64,
    ) -> Self {
        let nh = n_harmonics as i64;
        let mut amplitudes = Vec::with_capacity(dim * block_len(n_harmonics));
        for c in 0..dim {
            for h in -nh..=nh {
                amplitudes.push(f(c, h));
            }
        }
        Self {
            dim,
            n_harmonics,
            omega0,
            amplitudes,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_harmonics(&self) -> usize {
        self.n_harmonics
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega0
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn set_omega0(&mut self, omega0: f64) {
        self.omega0 = omega0;
    }

    /// Flat index of `(component, harmonic)`.
    #[inline]
    pub fn index(&self, component: usize, harmonic: i64) -> usize {
        debug_assert!(harmonic.unsigned_abs() as usize <= self.n_harmonics);
        component * block_len(self.n_harmonics) + (harmonic + self.n_harmonics as i64) as usize
    }

    /// Amplitude of `harmonic` in `component`; zero outside the truncation.
    pub fn get(&self, component: usize, harmonic: i64) -> Complex64 {
        if harmonic.unsigned_abs() as usize > self.n_harmonics {
            return ZERO;
        }
        self.amplitudes[self.index(component, harmonic)]
    }

    pub fn set(&mut self, component: usize, harmonic: i64, value: Complex64) {
        let i = self.index(component, harmonic);
        self.amplitudes[i] = value;
    }

    pub fn component(&self, component: usize) -> &[Complex64] {
        let b = block_len(self.n_harmonics);
        &self.amplitudes[component * b..(component + 1) * b]
    }

    /// Conjugate symmetry `a(c, -h) = conj(a(c, h))` within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        let nh = self.n_harmonics as i64;
        (0..self.dim)
            .all(|c| (0..=nh).all(|h| (self.get(c, -h) - self.get(c, h).conj()).norm() <= tol))
    }

    /// Projects onto the real-signal subspace.
    pub fn enforce_real(&mut self) {
        let nh = self.n_harmonics as i64;
        for c in 0..self.dim {
            for h in 0..=nh {
                let avg = 0.5 * (self.get(c, h) + self.get(c, -h).conj());
                self.set(c, h, avg);
                self.set(c, -h, avg.conj());
            }
        }
    }

    /// Harmonic shift `r'_h = r_{h + m}`: the eigenvector partner of `λ + i m ω₀`.
    pub fn shift_harmonics(&self, m: i64) -> Self {
        Self::from_fn(self.dim, self.n_harmonics, self.omega0, |c, h| {
            self.get(c, h + m)
        })
    }

    /// Zero-padded or truncated copy with `n_harmonics` harmonics.
    pub fn resized(&self, n_harmonics: usize) -> Self {
        Self::from_fn(self.dim, n_harmonics, self.omega0, |c, h| self.get(c, h))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: Complex64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
    }

    /// Energy-weighted mean harmonic index.
    pub fn harmonic_centroid(&self) -> f64 {
        let nh = self.n_harmonics as i64;
        let mut num = 0.0;
        let mut den = 0.0;
        for c in 0..self.dim {
            for h in -nh..=nh {
                let e = self.get(c, h).norm_sqr();
                num += h as f64 * e;
                den += e;
            }
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Fraction of the energy carried by harmonics with `|h| > cutoff`.
    pub fn tail_fraction(&self, cutoff: usize) -> f64 {
        let nh = self.n_harmonics as i64;
        let mut tail = 0.0;
        let mut total = 0.0;
        for c in 0..self.dim {
            for h in -nh..=nh {
                let e = self.get(c, h).norm_sqr();
                total += e;
                if h.unsigned_abs() as usize > cutoff {
                    tail += e;
                }
            }
        }
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }

    /// Evaluates the truncated series of one component at time `t`.
    pub fn evaluate(&self, component: usize, t: f64) -> Complex64 {
        let nh = self.n_harmonics as i64;
        (-nh..=nh)
            .map(|h| {
                self.get(component, h) * Complex64::from_polar(1.0, h as f64 * self.omega0 * t)
            })
            .sum()
    }

    /// Canonical gauge: largest-modulus amplitude becomes `1 + 0i`.
    pub fn normalize_gauge(&mut self) {
        if let Some(big) = self
            .amplitudes
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        {
            if big.norm() > 0.0 {
                self.scale(big.inv());
            }
        }
    }
}

/// Equispaced samples of a `T`-periodic vector signal on `]0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSamples {
    dim: usize,
    n_harmonics: usize,
    period: f64,
    samples: Vec<Complex64>,
}

impl TimeSamples {
    pub fn new(
        dim: usize,
        n_harmonics: usize,
        period: f64,
        samples: Vec<Complex64>,
    ) -> Result<Self> {
        let expected = dim * block_len(n_harmonics);
        if samples.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: samples.len(),
            });
        }
        Ok(Self {
            dim,
            n_harmonics,
            period,
            samples,
        })
    }

    /// Samples `f(component, t)` on the canonical grid.
    pub fn from_fn(
        dim: usize,
        n_harmonics: usize,
        period: f64,
        mut f: impl FnMut(usize, f64) -> Complex64,
    ) -> Self {
        let times = sample_times(n_harmonics, period);
        let mut samples = Vec::with_capacity(dim * times.len());
        for c in 0..dim {
            for &t in &times {
                samples.push(f(c, t));
            }
        }
        Self {
            dim,
            n_harmonics,
            period,
            samples,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_harmonics(&self) -> usize {
        self.n_harmonics
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn times(&self) -> Vec<f64> {
        sample_times(self.n_harmonics, self.period)
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let b = block_len(self.n_harmonics);
        &self.samples[c * b..(c + 1) * b]
    }
}

/// `t_k = k T / (2 N_H + 1)` for `k = 1 ..= 2 N_H + 1`.
pub fn sample_times(n_harmonics: usize, period: f64) -> Vec<f64> {
    let ns = block_len(n_harmonics);
    (1..=ns).map(|k| k as f64 * period / ns as f64).collect()
}

/// Dense DFT pair `Γ` (samples to amplitudes) and `Γ⁻¹`.
#[derive(Debug, Clone)]
pub struct DftOperator {
    n_harmonics: usize,
    forward: CMatrix,
    inverse: CMatrix,
}

impl DftOperator {
    pub fn new(n_harmonics: usize) -> Self {
        let ns = block_len(n_harmonics);
        let nh = n_harmonics as i64;
        let phase = |row: usize, col: usize| {
            let h = row as i64 - nh;
            let k = (col + 1) as f64;
            2.0 * PI * (h as f64) * k / ns as f64
        };
        let forward = CMatrix::from_fn(ns, ns, |r, c| {
            Complex64::from_polar(1.0 / ns as f64, -phase(r, c))
        });
        let inverse = CMatrix::from_fn(ns, ns, |k, h| Complex64::from_polar(1.0, phase(h, k)));
        Self {
            n_harmonics,
            forward,
            inverse,
        }
    }

    pub fn n_harmonics(&self) -> usize {
        self.n_harmonics
    }

    pub fn forward(&self) -> &CMatrix {
        &self.forward
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.inverse
    }

    pub fn dft(&self, x: &TimeSamples) -> Result<HarmonicVector> {
        if x.n_harmonics != self.n_harmonics {
            return Err(Error::InconsistentHarmonics(
                self.n_harmonics,
                x.n_harmonics,
            ));
        }
        let b = block_len(self.n_harmonics);
        let mut out = Vec::with_capacity(x.samples.len());
        for c in 0..x.dim {
            let block = &x.samples[c * b..(c + 1) * b];
            for r in 0..b {
                out.push((0..b).map(|k| self.forward[(r, k)] * block[k]).sum());
            }
        }
        HarmonicVector::from_amplitudes(x.dim, self.n_harmonics, 2.0 * PI / x.period, out)
    }

    pub fn idft(&self, a: &HarmonicVector) -> Result<TimeSamples> {
        if a.n_harmonics != self.n_harmonics {
            return Err(Error::InconsistentHarmonics(
                self.n_harmonics,
                a.n_harmonics,
            ));
        }
        let b = block_len(self.n_harmonics);
        let mut out = Vec::with_capacity(a.amplitudes.len());
        for c in 0..a.dim {
            let block = a.component(c);
            for k in 0..b {
                out.push((0..b).map(|h| self.inverse[(k, h)] * block[h]).sum());
            }
        }
        TimeSamples::new(a.dim, self.n_harmonics, a.period(), out)
    }
}

/// Samples to harmonic amplitudes (`α̃ = Γ ᾰ`).
pub fn dft(x: &TimeSamples) -> Result<HarmonicVector> {
    DftOperator::new(x.n_harmonics).dft(x)
}

/// Evaluates the truncated series on the sample grid.
pub fn idft(a: &HarmonicVector) -> TimeSamples {
    DftOperator::new(a.n_harmonics)
        .idft(a)
        .expect("operator built for the vector's own truncation")
}

/// Diagonal time-derivative operator `Ω = diag(i h ω₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator {
    n_harmonics: usize,
    omega0: f64,
}

impl DiffOperator {
    pub fn new(n_harmonics: usize, omega0: f64) -> Self {
        Self {
            n_harmonics,
            omega0,
        }
    }

    pub fn entry(&self, harmonic: i64) -> Complex64 {
        Complex64::new(0.0, harmonic as f64 * self.omega0)
    }

    /// Dense `Ω` for one component block.
    pub fn matrix(&self) -> CMatrix {
        let nh = self.n_harmonics as i64;
        let b = block_len(self.n_harmonics);
        CMatrix::from_fn(b, b, |r, c| {
            if r == c {
                self.entry(r as i64 - nh)
            } else {
                ZERO
            }
        })
    }

    /// Block-diagonal `Ω_n` for an `n`-dimensional signal.
    pub fn matrix_n(&self, dim: usize) -> CMatrix {
        let nh = self.n_harmonics as i64;
        let b = block_len(self.n_harmonics);
        CMatrix::from_fn(dim * b, dim * b, |r, c| {
            if r == c {
                self.entry((r % b) as i64 - nh)
            } else {
                ZERO
            }
        })
    }
}

/// `α̃̇ = Ω α̃`.
pub fn differentiate(a: &HarmonicVector) -> HarmonicVector {
    let op = DiffOperator::new(a.n_harmonics, a.omega0);
    HarmonicVector::from_fn(a.dim, a.n_harmonics, a.omega0, |c, h| {
        op.entry(h) * a.get(c, h)
    })
}

/// Equispaced grid with `n_samples` points used to evaluate nonlinear
/// functions of band-limited signals without aliasing the retained band.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    n_samples: usize,
    max_harmonic: usize,
    // twiddle[k * (max_harmonic + 1) + h] = exp(i h θ_k), θ_k = 2π (k + 1) / M
    twiddle: Vec<Complex64>,
}

impl SpectralGrid {
    pub fn new(n_samples: usize, max_harmonic: usize) -> Self {
        let stride = max_harmonic + 1;
        let mut twiddle = Vec::with_capacity(n_samples * stride);
        for k in 0..n_samples {
            let theta = 2.0 * PI * (k + 1) as f64 / n_samples as f64;
            for h in 0..=max_harmonic {
                twiddle.push(Complex64::from_polar(1.0, theta * h as f64));
            }
        }
        Self {
            n_samples,
            max_harmonic,
            twiddle,
        }
    }

    /// 2x oversampled grid for signals truncated at `n_harmonics`: resolves
    /// products of two such signals exactly (`M = 2 (2 N_H + 1)`).
    pub fn oversampled(n_harmonics: usize) -> Self {
        Self::new(2 * block_len(n_harmonics), 2 * n_harmonics)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn max_harmonic(&self) -> usize {
        self.max_harmonic
    }

    pub fn times(&self, period: f64) -> Vec<f64> {
        (1..=self.n_samples)
            .map(|k| k as f64 * period / self.n_samples as f64)
            .collect()
    }

    #[inline]
    fn phasor(&self, k: usize, h: i64) -> Complex64 {
        let w = self.twiddle[k * (self.max_harmonic + 1) + h.unsigned_abs() as usize];
        if h < 0 {
            w.conj()
        } else {
            w
        }
    }

    /// Evaluates every component of `a` on the grid; output is component-major.
    pub fn synthesize(&self, a: &HarmonicVector) -> Vec<Complex64> {
        assert!(
            a.n_harmonics <= self.max_harmonic,
            "grid too coarse for signal"
        );
        let nh = a.n_harmonics as i64;
        let mut out = Vec::with_capacity(a.dim * self.n_samples);
        for c in 0..a.dim {
            let block = a.component(c);
            for k in 0..self.n_samples {
                let mut s = ZERO;
                for h in -nh..=nh {
                    s += block[(h + nh) as usize] * self.phasor(k, h);
                }
                out.push(s);
            }
        }
        out
    }

    /// Real parts of [`Self::synthesize`], for real-valued signals.
    pub fn synthesize_real(&self, a: &HarmonicVector) -> Vec<f64> {
        self.synthesize(a).into_iter().map(|z| z.re).collect()
    }

    /// Harmonics `|h| <= n_harmonics` of `dim` component-major sample blocks.
    pub fn analyze(
        &self,
        samples: &[Complex64],
        dim: usize,
        n_harmonics: usize,
        omega0: f64,
    ) -> HarmonicVector {
        assert!(
            n_harmonics <= self.max_harmonic,
            "grid too coarse for requested band"
        );
        assert_eq!(samples.len(), dim * self.n_samples);
        let inv = 1.0 / self.n_samples as f64;
        HarmonicVector::from_fn(dim, n_harmonics, omega0, |c, h| {
            let block = &samples[c * self.n_samples..(c + 1) * self.n_samples];
            let s: Complex64 = block
                .iter()
                .enumerate()
                .map(|(k, x)| x * self.phasor(k, -h))
                .sum();
            s * inv
        })
    }

    pub fn analyze_real(
        &self,
        samples: &[f64],
        dim: usize,
        n_harmonics: usize,
        omega0: f64,
    ) -> HarmonicVector {
        let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.analyze(&c, dim, n_harmonics, omega0)
    }
}

/// Harmonic-domain multiplication by a periodic `rows x cols` matrix.
///
/// Block `(r, c)` is the `(2N_H+1)`-square Toeplitz matrix whose `(j, l)`
/// entry is the `(j - l)`-th Fourier coefficient of element `(r, c)`;
/// coefficients beyond `bandwidth` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzMatrix {
    rows: usize,
    cols: usize,
    n_harmonics: usize,
    bandwidth: usize,
    omega0: f64,
    // element-major: ((r * cols + c) * (2B + 1)) + (d + B)
    coeffs: Vec<Complex64>,
}

impl ToeplitzMatrix {
    pub fn from_coefficients(
        rows: usize,
        cols: usize,
        n_harmonics: usize,
        bandwidth: usize,
        omega0: f64,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        let expected = rows * cols * block_len(bandwidth);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            n_harmonics,
            bandwidth,
            omega0,
            coeffs,
        })
    }

    /// Constant (time-invariant) matrix, row-major.
    pub fn constant(
        rows: usize,
        cols: usize,
        n_harmonics: usize,
        omega0: f64,
        values: &[f64],
    ) -> Self {
        assert_eq!(values.len(), rows * cols);
        let coeffs = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self {
            rows,
            cols,
            n_harmonics,
            bandwidth: 0,
            omega0,
            coeffs,
        }
    }

    pub fn identity(dim: usize, n_harmonics: usize, omega0: f64) -> Self {
        let mut values = vec![0.0; dim * dim];
        for i in 0..dim {
            values[i * dim + i] = 1.0;
        }
        Self::constant(dim, dim, n_harmonics, omega0, &values)
    }

    /// From a matrix signal given as one `rows * cols`-dimensional
    /// [`HarmonicVector`] (row-major elements).
    pub fn from_matrix_signal(rows: usize, cols: usize, m: &HarmonicVector) -> Result<Self> {
        if m.dim != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: m.dim,
            });
        }
        Ok(Self {
            rows,
            cols,
            n_harmonics: m.n_harmonics,
            bandwidth: m.n_harmonics,
            omega0: m.omega0,
            coeffs: m.amplitudes.clone(),
        })
    }

    /// From samples of the matrix elements on an oversampled grid (element-major,
    /// `grid.n_samples()` per element). Keeps coefficients up to `2 N_H`, which
    /// is what multiplication of two `N_H`-limited signals needs.
    pub fn from_grid_samples(
        rows: usize,
        cols: usize,
        n_harmonics: usize,
        omega0: f64,
        grid: &SpectralGrid,
        samples: &[Complex64],
    ) -> Self {
        let bandwidth = (2 * n_harmonics).min(grid.max_harmonic);
        let hv = grid.analyze(samples, rows * cols, bandwidth, omega0);
        Self {
            rows,
            cols,
            n_harmonics,
            bandwidth,
            omega0,
            coeffs: hv.into_amplitudes(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_harmonics(&self) -> usize {
        self.n_harmonics
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `d`-th Fourier coefficient of element `(r, c)`.
    pub fn coefficient(&self, r: usize, c: usize, d: i64) -> Complex64 {
        if d.unsigned_abs() as usize > self.bandwidth {
            return ZERO;
        }
        let b = block_len(self.bandwidth);
        self.coeffs[(r * self.cols + c) * b + (d + self.bandwidth as i64) as usize]
    }

    /// Whether the defining coefficients obey conjugate symmetry (real matrix signal).
    pub fn is_real(&self, tol: f64) -> bool {
        let bw = self.bandwidth as i64;
        (0..self.rows).all(|r| {
            (0..self.cols).all(|c| {
                (0..=bw).all(|d| {
                    (self.coefficient(r, c, -d) - self.coefficient(r, c, d).conj()).norm() <= tol
                })
            })
        })
    }

    pub fn to_dense(&self) -> CMatrix {
        let b = block_len(self.n_harmonics);
        let mut m = CMatrix::zeros(self.rows * b, self.cols * b);
        self.add_to(&mut m, Complex64::new(1.0, 0.0));
        m
    }

    /// `target += scale * self` (dense).
    pub fn add_to(&self, target: &mut CMatrix, scale: Complex64) {
        let b = block_len(self.n_harmonics);
        for r in 0..self.rows {
            for c in 0..self.cols {
                for j in 0..b {
                    for l in 0..b {
                        let v = self.coefficient(r, c, j as i64 - l as i64);
                        if v != ZERO {
                            target[(r * b + j, c * b + l)] += scale * v;
                        }
                    }
                }
            }
        }
    }

    pub fn apply(&self, a: &HarmonicVector) -> Result<HarmonicVector> {
        if a.dim != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: a.dim,
            });
        }
        if a.n_harmonics != self.n_harmonics {
            return Err(Error::InconsistentHarmonics(
                self.n_harmonics,
                a.n_harmonics,
            ));
        }
        let nh = self.n_harmonics as i64;
        Ok(HarmonicVector::from_fn(
            self.rows,
            self.n_harmonics,
            a.omega0,
            |r, j| {
                let mut s = ZERO;
                for c in 0..self.cols {
                    for l in -nh..=nh {
                        s += self.coefficient(r, c, j - l) * a.get(c, l);
                    }
                }
                s
            },
        ))
    }
}

/// Builds the Toeplitz operator of a periodic matrix given element by element
/// (row-major, each a scalar [`HarmonicVector`] with a shared truncation).
pub fn toeplitz_from_periodic(
    rows: usize,
    cols: usize,
    elements: &[HarmonicVector],
) -> Result<ToeplitzMatrix> {
    if elements.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            found: elements.len(),
        });
    }
    let first = elements
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty matrix signal".into()))?;
    let nh = first.n_harmonics;
    let mut coeffs = Vec::with_capacity(rows * cols * block_len(nh));
    for e in elements {
        if e.n_harmonics != nh {
            return Err(Error::InconsistentHarmonics(nh, e.n_harmonics));
        }
        if e.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: e.dim,
            });
        }
        coeffs.extend_from_slice(&e.amplitudes);
    }
    ToeplitzMatrix::from_coefficients(rows, cols, nh, nh, first.omega0, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dft_of_constant_is_dc() {
        let x = TimeSamples::from_fn(1, 3, 2.0, |_, _| c(1.5, 0.0));
        let a = dft(&x).unwrap();
        for h in -3..=3 {
            let expect = if h == 0 { 1.5 } else { 0.0 };
            assert_abs_diff_eq!(a.get(0, h).re, expect, epsilon = 1e-14);
            assert_abs_diff_eq!(a.get(0, h).im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn dft_of_cosine_splits_half_half() {
        let period = 3.0;
        let w = 2.0 * PI / period;
        let x = TimeSamples::from_fn(1, 4, period, |_, t| c((w * t).cos(), 0.0));
        let a = dft(&x).unwrap();
        for h in -4..=4i64 {
            let expect = if h.abs() == 1 { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(a.get(0, h).re, expect, epsilon = 1e-14);
            assert_abs_diff_eq!(a.get(0, h).im, 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(a.omega0(), w, epsilon = 1e-15);
    }

    #[test]
    fn dft_rejects_wrong_sample_count() {
        let err = TimeSamples::new(1, 2, 1.0, vec![c(0.0, 0.0); 4]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 5,
                found: 4
            }
        );
        let x = TimeSamples::new(1, 2, 1.0, vec![c(0.0, 0.0); 5]).unwrap();
        let op = DftOperator::new(3);
        assert!(matches!(
            op.dft(&x),
            Err(Error::InconsistentHarmonics(3, 2))
        ));
    }

    #[test]
    fn idft_of_zero_and_cosine() {
        let z = HarmonicVector::zeros(2, 3, 1.0);
        assert!(idft(&z).samples().iter().all(|s| s.norm() == 0.0));

        let mut a = HarmonicVector::zeros(1, 3, 2.0);
        a.set(0, 1, c(0.5, 0.0));
        a.set(0, -1, c(0.5, 0.0));
        let x = idft(&a);
        for (s, t) in x.samples().iter().zip(x.times()) {
            assert_abs_diff_eq!(s.re, (2.0 * t).cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(s.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn forward_times_inverse_is_identity() {
        let op = DftOperator::new(5);
        let p = op.forward() * op.inverse();
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p[(i, j)] - c(e, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_of_sine_and_second_derivative_of_cosine() {
        let w = 1.7;
        // sin(wt) = (e^{iwt} - e^{-iwt}) / 2i
        let mut s = HarmonicVector::zeros(1, 2, w);
        s.set(0, 1, c(0.0, -0.5));
        s.set(0, -1, c(0.0, 0.5));
        let d = differentiate(&s);
        assert_abs_diff_eq!(d.get(0, 1).re, 0.5 * w, epsilon = 1e-14);
        assert_abs_diff_eq!(d.get(0, -1).re, 0.5 * w, epsilon = 1e-14);
        assert_abs_diff_eq!(d.get(0, 1).im, 0.0, epsilon = 1e-14);

        let mut cs = HarmonicVector::zeros(1, 2, w);
        cs.set(0, 1, c(0.5, 0.0));
        cs.set(0, -1, c(0.5, 0.0));
        let dd = differentiate(&differentiate(&cs));
        assert_abs_diff_eq!(dd.get(0, 1).re, -0.5 * w * w, epsilon = 1e-14);
        assert_abs_diff_eq!(dd.get(0, -1).re, -0.5 * w * w, epsilon = 1e-14);

        let k = HarmonicVector::from_fn(
            1,
            2,
            w,
            |_, h| if h == 0 { c(3.0, 0.0) } else { c(0.0, 0.0) },
        );
        assert_eq!(differentiate(&k).max_abs(), 0.0);
    }

    #[test]
    fn diff_operator_is_diagonal() {
        let op = DiffOperator::new(2, 0.5);
        let m = op.matrix();
        for i in 0..5 {
            for j in 0..5 {
                if i == j {
                    assert_eq!(m[(i, j)], c(0.0, (i as f64 - 2.0) * 0.5));
                } else {
                    assert_eq!(m[(i, j)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn toeplitz_of_constant_scales_identity() {
        let t = ToeplitzMatrix::constant(1, 1, 3, 1.0, &[2.5]);
        let d = t.to_dense();
        for i in 0..7 {
            for j in 0..7 {
                let e = if i == j { 2.5 } else { 0.0 };
                assert_eq!(d[(i, j)], c(e, 0.0));
            }
        }
    }

    #[test]
    fn toeplitz_cos_times_cos() {
        let nh = 3;
        let mut cosv = HarmonicVector::zeros(1, nh, 1.0);
        cosv.set(0, 1, c(0.5, 0.0));
        cosv.set(0, -1, c(0.5, 0.0));
        let t = toeplitz_from_periodic(1, 1, core::slice::from_ref(&cosv)).unwrap();
        let p = t.apply(&cosv).unwrap();
        assert_abs_diff_eq!(p.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(0, 2).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(0, -2).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(0, 1).norm(), 0.0, epsilon = 1e-15);

        // N_H = 1 truncates the second harmonic away.
        let small = cosv.resized(1);
        let t1 = toeplitz_from_periodic(1, 1, core::slice::from_ref(&small)).unwrap();
        let p1 = t1.apply(&small).unwrap();
        assert_abs_diff_eq!(p1.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_eq!(p1.n_harmonics(), 1);
    }

    #[test]
    fn toeplitz_rejects_mixed_truncation() {
        let a = HarmonicVector::zeros(1, 2, 1.0);
        let b = HarmonicVector::zeros(1, 3, 1.0);
        let err = toeplitz_from_periodic(1, 2, &[a, b]).unwrap_err();
        assert_eq!(err, Error::InconsistentHarmonics(2, 3));
    }

    #[test]
    fn toeplitz_structure_depends_on_index_difference() {
        let m = HarmonicVector::from_fn(1, 2, 1.0, |_, h| c(h as f64, 0.5 * h as f64));
        let t = toeplitz_from_periodic(1, 1, std::slice::from_ref(&m)).unwrap();
        let d = t.to_dense();
        for j in 0..5usize {
            for l in 0..5usize {
                let diff = j as i64 - l as i64;
                assert_eq!(d[(j, l)], m.get(0, diff));
            }
        }
    }

    #[test]
    fn gauge_and_shift() {
        let mut v = HarmonicVector::from_fn(1, 2, 1.0, |_, h| c(h as f64, 1.0));
        v.normalize_gauge();
        let big = v.amplitudes().iter().map(|a| a.norm()).fold(0.0, f64::max);
        assert_abs_diff_eq!(big, 1.0, epsilon = 1e-15);
        let s = v.shift_harmonics(1);
        assert_eq!(s.get(0, 0), v.get(0, 1));
        assert_eq!(s.get(0, 2), c(0.0, 0.0));
    }
}
