//! Memory kernels `K(t, τ)` and their frequency-domain transfer
//!
//! ```text
//! q(r, t, λ) = ∫_{-∞}^{t} K(t, τ) r(τ) e^{λ(τ - t)} dτ
//! ```
//!
//! For a time-invariant kernel acting on a single harmonic `r̃_j e^{i ω_j t}`
//! the integral collapses to a matrix that depends on `z = λ + i ω_j` only.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hb::block_len;
use crate::linalg::{spectral_norm, CMatrix};

/// Margin kept above `-k_c` when evaluating untruncated transfers.
pub const DOMAIN_MARGIN: f64 = 1e-9;

const QUAD_TOL: f64 = 1e-10;
const QUAD_MAX_LEVEL: u32 = 12;

// 8-point Gauss-Legendre on [-1, 1]
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// A `T`-periodic kernel sampled on a `(t mod T, t - τ)` grid with compact
/// support `t - τ ∈ [0, support]`. Values between lag samples are
/// reconstructed with Catmull-Rom cubics.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledKernel {
    dim: usize,
    period: f64,
    support: f64,
    time_samples: usize,
    lag_intervals: usize,
    // ((m * (L + 1) + l) * n + i) * n + j
    values: Vec<f64>,
}

impl SampledKernel {
    /// Samples `f(t, lag, out)` at `t_m = m T / M_t` and `lag_l = l s / L`.
    pub fn from_fn(
        dim: usize,
        period: f64,
        support: f64,
        time_samples: usize,
        lag_intervals: usize,
        mut f: impl FnMut(f64, f64, &mut [f64]),
    ) -> Result<Self> {
        if !(support > 0.0) || !(period > 0.0) || time_samples == 0 || lag_intervals < 2 || dim == 0
        {
            return Err(Error::InvalidArgument(
                "sampled kernel needs positive support and period, >= 1 time sample and >= 2 lag intervals".into(),
            ));
        }
        let nn = dim * dim;
        let mut values = vec![0.0; time_samples * (lag_intervals + 1) * nn];
        for m in 0..time_samples {
            let t = m as f64 * period / time_samples as f64;
            for l in 0..=lag_intervals {
                let lag = l as f64 * support / lag_intervals as f64;
                let off = (m * (lag_intervals + 1) + l) * nn;
                f(t, lag, &mut values[off..off + nn]);
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            dim,
            period,
            support,
            time_samples,
            lag_intervals,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn time_samples(&self) -> usize {
        self.time_samples
    }

    pub fn is_time_invariant(&self) -> bool {
        self.time_samples == 1
    }

    fn sample(&self, m: usize, l: usize) -> &[f64] {
        let nn = self.dim * self.dim;
        let off = (m * (self.lag_intervals + 1) + l) * nn;
        &self.values[off..off + nn]
    }

    /// Kernel value at time-sample `m` and lag `u` (zero outside the support).
    pub fn value_at(&self, m: usize, u: f64, out: &mut [f64]) {
        let nn = self.dim * self.dim;
        if u < 0.0 || u > self.support {
            out[..nn].fill(0.0);
            return;
        }
        let h = self.support / self.lag_intervals as f64;
        let l = ((u / h).floor() as usize).min(self.lag_intervals - 1);
        let tau = u / h - l as f64;
        let last = self.lag_intervals;
        for e in 0..nn {
            let p1 = self.sample(m, l)[e];
            let p2 = self.sample(m, l + 1)[e];
            let p0 = if l == 0 {
                2.0 * p1 - p2
            } else {
                self.sample(m, l - 1)[e]
            };
            let p3 = if l + 1 == last {
                2.0 * p2 - p1
            } else {
                self.sample(m, l + 2)[e]
            };
            out[e] = 0.5
                * (2.0 * p1
                    + (-p0 + p2) * tau
                    + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * tau * tau
                    + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * tau * tau * tau);
        }
    }

    /// `∫_0^{upper} K(t_m, u) (-u)^moment e^{-z u} du` by composite
    /// Gauss-Legendre, doubling panels until successive sums agree.
    fn integrate(&self, m: usize, z: Complex64, moment: u32, upper: f64) -> Result<Vec<Complex64>> {
        let nn = self.dim * self.dim;
        let upper = upper.min(self.support);
        if upper <= 0.0 {
            return Ok(vec![Complex64::new(0.0, 0.0); nn]);
        }
        let h = self.support / self.lag_intervals as f64;
        let mut prev: Option<Vec<Complex64>> = None;
        let mut kbuf = vec![0.0; nn];
        let mut last_change = f64::INFINITY;
        for level in 0..=QUAD_MAX_LEVEL {
            let panels_per_interval = 1usize << level;
            let mut acc = vec![Complex64::new(0.0, 0.0); nn];
            for l in 0..self.lag_intervals {
                let a0 = l as f64 * h;
                if a0 >= upper {
                    break;
                }
                let b0 = ((l + 1) as f64 * h).min(upper);
                let width = (b0 - a0) / panels_per_interval as f64;
                for p in 0..panels_per_interval {
                    let a = a0 + p as f64 * width;
                    let mid = a + 0.5 * width;
                    let half = 0.5 * width;
                    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                        for u in [mid - half * x, mid + half * x] {
                            self.value_at(m, u, &mut kbuf);
                            let factor = (-z * u).exp() * (-u).powi(moment as i32) * (w * half);
                            for e in 0..nn {
                                acc[e] += factor * kbuf[e];
                            }
                        }
                    }
                }
            }
            if let Some(p) = &prev {
                let change = acc
                    .iter()
                    .zip(p)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                let size = acc.iter().map(|a| a.norm()).fold(0.0, f64::max);
                last_change = change;
                if change <= QUAD_TOL * size.max(1.0) {
                    return Ok(acc);
                }
            }
            prev = Some(acc);
        }
        Err(Error::QuadratureError { last_change })
    }
}

/// Memory kernel families satisfying periodicity and integrability.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `K(t, τ) = C e^{-k (t - τ)}`.
    ExponentialDecay {
        dim: usize,
        coefficients: Vec<f64>,
        rate: f64,
    },
    /// `K(t, τ) = W δ(t - τ - τ_d)`.
    Delay {
        dim: usize,
        weights: Vec<f64>,
        delay: f64,
    },
    FiniteSupportSampled(SampledKernel),
}

impl KernelSpec {
    /// Exponential kernel with row-major coefficient matrix `C` and rate `k > 0`.
    pub fn exponential(dim: usize, coefficients: Vec<f64>, rate: f64) -> Result<Self> {
        if coefficients.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: coefficients.len(),
            });
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidArgument(
                "exponential kernel rate must be positive and finite".into(),
            ));
        }
        Ok(KernelSpec::ExponentialDecay {
            dim,
            coefficients,
            rate,
        })
    }

    pub fn delay(dim: usize, weights: Vec<f64>, delay: f64) -> Result<Self> {
        if weights.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: weights.len(),
            });
        }
        if !(delay > 0.0) || !delay.is_finite() {
            return Err(Error::InvalidArgument(
                "delay must be positive and finite".into(),
            ));
        }
        Ok(KernelSpec::Delay {
            dim,
            weights,
            delay,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::ExponentialDecay { dim, .. } | KernelSpec::Delay { dim, .. } => *dim,
            KernelSpec::FiniteSupportSampled(s) => s.dim,
        }
    }

    /// Whether `K(t, τ)` depends on `t - τ` only.
    pub fn is_time_invariant(&self) -> bool {
        match self {
            KernelSpec::FiniteSupportSampled(s) => s.is_time_invariant(),
            _ => true,
        }
    }
}

/// Asymptotic decay rate `k_c = lim ln‖K‖ / τ` minimized over `t`.
/// Compactly supported kernels return `+∞`.
pub fn critical_exponent(kernel: &KernelSpec) -> f64 {
    match kernel {
        KernelSpec::ExponentialDecay { rate, .. } => *rate,
        KernelSpec::Delay { .. } | KernelSpec::FiniteSupportSampled(_) => f64::INFINITY,
    }
}

/// `m!`
fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

/// `∫_0^s u^m e^{-z u} du`.
fn truncated_moment(z: Complex64, s: f64, m: u32) -> Complex64 {
    let zs = z * s;
    if zs.norm() < 2.0 {
        // Σ_n (-z)^n s^{n+m+1} / (n! (n+m+1))
        let mut term = Complex64::new(s.powi(m as i32 + 1), 0.0);
        let mut sum = term / (m as f64 + 1.0);
        for n in 1..60u32 {
            term *= -zs / n as f64;
            let add = term / (n as f64 + m as f64 + 1.0);
            sum += add;
            if add.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        // m!/z^{m+1} [1 - e^{-zs} Σ_{j<=m} (zs)^j / j!]
        let mut partial = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for j in 0..=m {
            if j > 0 {
                term *= zs / j as f64;
            }
            partial += term;
        }
        (Complex64::new(1.0, 0.0) - (-zs).exp() * partial) * factorial(m) / z.powu(m + 1)
    }
}

/// Frequency-domain memory operator of a kernel, optionally truncated to a
/// finite memory length `s̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryTransfer {
    kernel: KernelSpec,
    truncation: Option<f64>,
}

impl MemoryTransfer {
    pub fn new(kernel: KernelSpec) -> Self {
        Self {
            kernel,
            truncation: None,
        }
    }

    /// Finite memory `s̄ >= 0`; `f64::INFINITY` means untruncated.
    pub fn truncated(kernel: KernelSpec, memory_length: f64) -> Result<Self> {
        if !(memory_length >= 0.0) {
            return Err(Error::InvalidArgument(
                "memory length must be non-negative".into(),
            ));
        }
        let truncation = if memory_length.is_finite() {
            Some(memory_length)
        } else {
            None
        };
        Ok(Self { kernel, truncation })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// Lowest `Re λ` at which the transfer is defined (`-∞` when truncated).
    pub fn domain_floor(&self) -> f64 {
        match self.truncation {
            Some(_) => f64::NEG_INFINITY,
            None => -critical_exponent(&self.kernel),
        }
    }

    /// `-k_c` of the underlying (untruncated) kernel.
    pub fn exponent_floor(&self) -> f64 {
        -critical_exponent(&self.kernel)
    }

    fn check_domain(&self, lambda: Complex64) -> Result<()> {
        let floor = self.domain_floor();
        if floor.is_finite() && !(lambda.re > floor + DOMAIN_MARGIN) {
            return Err(Error::BoundViolation {
                re: lambda.re,
                floor,
            });
        }
        Ok(())
    }

    /// Matrix multiplying `r̃_j` at exponent `λ` and harmonic frequency `ω_j`.
    /// For time-varying sampled kernels this is the time-averaged block;
    /// use [`Self::memory_operator`] for the harmonic-coupled operator.
    pub fn transfer_at(&self, lambda: Complex64, omega: f64) -> Result<CMatrix> {
        self.transfer_derivative(lambda, omega, 0)
    }

    /// `∂^order / ∂λ^order` of [`Self::transfer_at`].
    pub fn transfer_derivative(
        &self,
        lambda: Complex64,
        omega: f64,
        order: u32,
    ) -> Result<CMatrix> {
        self.check_domain(lambda)?;
        let z = lambda + Complex64::new(0.0, omega);
        let n = self.dim();
        match &self.kernel {
            KernelSpec::ExponentialDecay {
                coefficients, rate, ..
            } => {
                let u = z + *rate;
                let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                let factor = match self.truncation {
                    None => sign * factorial(order) / u.powu(order + 1),
                    Some(s) => sign * truncated_moment(u, s, order),
                };
                Ok(CMatrix::from_fn(n, n, |i, j| {
                    factor * coefficients[i * n + j]
                }))
            }
            KernelSpec::Delay { weights, delay, .. } => {
                if matches!(self.truncation, Some(s) if s < *delay) {
                    return Ok(CMatrix::zeros(n, n));
                }
                let factor = (-z * *delay).exp() * (-*delay).powi(order as i32);
                Ok(CMatrix::from_fn(n, n, |i, j| factor * weights[i * n + j]))
            }
            KernelSpec::FiniteSupportSampled(sk) => {
                let upper = self.truncation.unwrap_or(f64::INFINITY);
                let mut avg = vec![Complex64::new(0.0, 0.0); n * n];
                for m in 0..sk.time_samples {
                    let v = sk.integrate(m, z, order, upper)?;
                    for (a, b) in avg.iter_mut().zip(v) {
                        *a += b;
                    }
                }
                let inv = 1.0 / sk.time_samples as f64;
                Ok(CMatrix::from_fn(n, n, |i, j| avg[i * n + j] * inv))
            }
        }
    }

    /// Full harmonic-domain memory operator `∂^order Q̃(λ) / ∂λ^order` of size
    /// `n (2N_H + 1)`, component-major. Block-diagonal over harmonics for
    /// time-invariant kernels.
    pub fn memory_operator(
        &self,
        lambda: Complex64,
        n_harmonics: usize,
        omega0: f64,
        order: u32,
    ) -> Result<CMatrix> {
        let n = self.dim();
        let b = block_len(n_harmonics);
        let nh = n_harmonics as i64;
        let mut q = CMatrix::zeros(n * b, n * b);
        match &self.kernel {
            KernelSpec::FiniteSupportSampled(sk) if !sk.is_time_invariant() => {
                self.check_domain(lambda)?;
                let period = 2.0 * PI / omega0;
                if (sk.period - period).abs() > 1e-9 * period {
                    return Err(Error::InvalidArgument(
                        "sampled kernel period differs from the problem period".into(),
                    ));
                }
                let mt = sk.time_samples;
                let max_d = ((mt - 1) / 2) as i64;
                let upper = self.truncation.unwrap_or(f64::INFINITY);
                for (hi, h) in (-nh..=nh).enumerate() {
                    let z = lambda + Complex64::new(0.0, h as f64 * omega0);
                    let samples: Vec<Vec<Complex64>> = (0..mt)
                        .map(|m| sk.integrate(m, z, order, upper))
                        .collect::<Result<_>>()?;
                    for (ji, j) in (-nh..=nh).enumerate() {
                        let d = j - h;
                        if d.abs() > max_d {
                            continue;
                        }
                        for e in 0..n * n {
                            let mut s = Complex64::new(0.0, 0.0);
                            for (m, smp) in samples.iter().enumerate() {
                                let phase = -2.0 * PI * d as f64 * m as f64 / mt as f64;
                                s += smp[e] * Complex64::from_polar(1.0, phase);
                            }
                            let (r, c) = (e / n, e % n);
                            q[(r * b + ji, c * b + hi)] = s / mt as f64;
                        }
                    }
                }
            }
            _ => {
                for (ji, j) in (-nh..=nh).enumerate() {
                    let block = self.transfer_derivative(lambda, j as f64 * omega0, order)?;
                    for r in 0..n {
                        for c in 0..n {
                            q[(r * b + ji, c * b + ji)] = block[(r, c)];
                        }
                    }
                }
            }
        }
        Ok(q)
    }

    /// `∫_{s̄}^{s} max_t ‖K(t, t - u)‖ du`, the kernel-tail factor bounding the
    /// exponent shift between memory lengths `s̄` and `s` (up to an unknown
    /// problem constant). Spectral norm; `s` may be infinite.
    pub fn truncation_error_bound(&self, s_bar: f64, s: f64) -> Result<f64> {
        if !(s_bar >= 0.0) || !(s >= s_bar) {
            return Err(Error::InvalidArgument(
                "truncation bound needs 0 <= s_bar <= s".into(),
            ));
        }
        if s == s_bar {
            return Ok(0.0);
        }
        let n = self.dim();
        Ok(match &self.kernel {
            KernelSpec::ExponentialDecay {
                coefficients, rate, ..
            } => {
                let norm = spectral_norm(n, coefficients);
                let tail = if s.is_finite() {
                    (-rate * s).exp()
                } else {
                    0.0
                };
                norm * ((-rate * s_bar).exp() - tail) / rate
            }
            KernelSpec::Delay { weights, delay, .. } => {
                if s_bar < *delay && *delay <= s {
                    spectral_norm(n, weights)
                } else {
                    0.0
                }
            }
            KernelSpec::FiniteSupportSampled(sk) => {
                let upper = s.min(sk.support);
                if upper <= s_bar {
                    return Ok(0.0);
                }
                let mut buf = vec![0.0; n * n];
                let max_norm = |u: f64, buf: &mut [f64]| {
                    (0..sk.time_samples)
                        .map(|m| {
                            sk.value_at(m, u, buf);
                            spectral_norm(n, buf)
                        })
                        .fold(0.0, f64::max)
                };
                let h = sk.support / sk.lag_intervals as f64;
                let mut total = 0.0;
                let mut a = s_bar;
                while a < upper {
                    let mut b = ((a / h).floor() + 1.0) * h;
                    if b <= a + 1e-12 * h {
                        b += h;
                    }
                    let b = b.min(upper);
                    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                        total += w
                            * half
                            * (max_norm(mid - half * x, &mut buf)
                                + max_norm(mid + half * x, &mut buf));
                    }
                    a = b;
                }
                total
            }
        })
    }
}
