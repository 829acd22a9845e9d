//! Periodic steady states of `dz/dt = f(z, t) + ∫ K(t - τ) g(z(τ)) dτ`
//! by harmonic balance, and their linearization into a [`FloquetProblem`].
//!
//! Unknowns are the real and imaginary parts of the non-negative harmonics;
//! for autonomous systems the imaginary part of one first-harmonic
//! amplitude is pinned to zero (phase condition) and its slot carries the
//! period instead.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::floquet::FloquetProblem;
use crate::hb::{
    block_len, dft, DiffOperator, HarmonicVector, SpectralGrid, TimeSamples, ToeplitzMatrix,
};
use crate::kernels::{KernelSpec, MemoryTransfer};
use crate::linalg::{solve_real, CMatrix, CVector};

/// A dynamical system with (optional) linear memory.
///
/// The kernel acts on `g(z)`, which defaults to the state itself.
pub trait SystemModel {
    fn dim(&self) -> usize;

    /// `f(z, t)`
    fn rhs(&self, z: &[f64], t: f64, out: &mut [f64]);

    /// `∂f/∂z` at `(z, t)`, row-major.
    fn rhs_jacobian(&self, z: &[f64], t: f64, out: &mut [f64]);

    fn kernel(&self) -> Option<&KernelSpec>;

    fn autonomous(&self) -> bool;

    /// Forcing period (non-autonomous) or an estimate of it.
    fn period_hint(&self) -> Option<f64>;

    /// Whether [`Self::memory_input`] differs from the identity.
    fn has_memory_input(&self) -> bool {
        false
    }

    fn memory_input(&self, z: &[f64], out: &mut [f64]) {
        out.copy_from_slice(z);
    }

    fn memory_input_jacobian(&self, _z: &[f64], out: &mut [f64]) {
        let n = self.dim();
        out.fill(0.0);
        for i in 0..n {
            out[i * n + i] = 1.0;
        }
    }

    /// Components eligible as phase anchor.
    fn phase_components(&self) -> Vec<usize> {
        (0..self.dim()).collect()
    }
}

/// Compares `rhs_jacobian` (and `memory_input_jacobian`) against central
/// differences at the given states; returns the worst relative error.
pub fn check_jacobian<M: SystemModel + ?Sized>(model: &M, states: &[Vec<f64>], t: f64) -> f64 {
    let n = model.dim();
    let mut worst: f64 = 0.0;
    let mut jac = vec![0.0; n * n];
    let mut fp = vec![0.0; n];
    let mut fm = vec![0.0; n];
    for z in states {
        for (analytic, eval) in [
            (
                {
                    model.rhs_jacobian(z, t, &mut jac);
                    jac.clone()
                },
                0u8,
            ),
            (
                {
                    model.memory_input_jacobian(z, &mut jac);
                    jac.clone()
                },
                1u8,
            ),
        ] {
            let scale = analytic.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for j in 0..n {
                let h = 1e-6 * (1.0 + z[j].abs());
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += h;
                zm[j] -= h;
                if eval == 0 {
                    model.rhs(&zp, t, &mut fp);
                    model.rhs(&zm, t, &mut fm);
                } else {
                    model.memory_input(&zp, &mut fp);
                    model.memory_input(&zm, &mut fm);
                }
                for i in 0..n {
                    let fd = (fp[i] - fm[i]) / (2.0 * h);
                    worst = worst.max((fd - analytic[i * n + j]).abs() / scale);
                }
            }
        }
    }
    worst
}

/// `T`-periodic steady state in harmonic form.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCycle {
    pub period: f64,
    pub harmonics: HarmonicVector,
    /// Euclidean norm of the real HB residual vector. Newton stops once it
    /// is below `tol * min(1, ‖z̃‖)`.
    pub residual: f64,
    /// Component whose first harmonic is kept real (autonomous systems).
    pub phase_anchor: Option<usize>,
    /// Residual norms of the Newton iterates, first entry is the seed.
    pub trace: Vec<f64>,
}

impl LimitCycle {
    pub fn new(period: f64, harmonics: HarmonicVector) -> Self {
        Self {
            period,
            harmonics,
            residual: f64::INFINITY,
            phase_anchor: None,
            trace: Vec::new(),
        }
    }

    pub fn n_harmonics(&self) -> usize {
        self.harmonics.n_harmonics()
    }

    /// Largest `|z̃_{c,±N_H}|` relative to the largest amplitude.
    pub fn spectral_tail(&self) -> f64 {
        let nh = self.harmonics.n_harmonics() as i64;
        let big = self.harmonics.max_abs();
        if big == 0.0 {
            return 0.0;
        }
        (0..self.harmonics.dim())
            .map(|c| {
                self.harmonics
                    .get(c, nh)
                    .norm()
                    .max(self.harmonics.get(c, -nh).norm())
            })
            .fold(0.0, f64::max)
            / big
    }

    /// Spectral under-resolution: edge harmonics above `1e-8` of the peak.
    pub fn underresolved(&self) -> bool {
        self.spectral_tail() > 1e-8
    }

    /// Time derivative `dz_S/dt` in harmonic form.
    pub fn derivative(&self) -> HarmonicVector {
        crate::hb::differentiate(&self.harmonics)
    }

    /// State at time `t`.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        (0..self.harmonics.dim())
            .map(|c| self.harmonics.evaluate(c, t).re)
            .collect()
    }

    /// Peak-to-peak excursion of one component (sampled).
    pub fn amplitude(&self, component: usize) -> f64 {
        let grid = SpectralGrid::oversampled(self.n_harmonics());
        let s = grid.synthesize_real(&self.harmonics);
        let m = grid.n_samples();
        let block = &s[component * m..(component + 1) * m];
        let hi = block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = block.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CycleOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            max_halvings: 20,
        }
    }
}

/// Samples of `z`, `f(z, t)` and `g(z)` on the oversampled grid.
struct GridEval {
    z: Vec<f64>,
    times: Vec<f64>,
    m: usize,
}

impl GridEval {
    fn new(grid: &SpectralGrid, c: &HarmonicVector, period: f64) -> Self {
        Self {
            z: grid.synthesize_real(c),
            times: grid.times(period),
            m: grid.n_samples(),
        }
    }

    fn state(&self, k: usize, n: usize, out: &mut [f64]) {
        for (ci, o) in out.iter_mut().enumerate().take(n) {
            *o = self.z[ci * self.m + k];
        }
    }
}

fn memory_transfer<M: SystemModel + ?Sized>(model: &M) -> Option<MemoryTransfer> {
    model.kernel().map(|k| MemoryTransfer::new(k.clone()))
}

/// Complex harmonic residual `Ω z̃ - F̃(z̃) - Q̃(0) g̃(z̃)`.
fn harmonic_residual<M: SystemModel + ?Sized>(
    model: &M,
    z: &HarmonicVector,
    period: f64,
    grid: &SpectralGrid,
) -> Result<HarmonicVector> {
    let n = model.dim();
    let nh = z.n_harmonics();
    let omega0 = 2.0 * PI / period;
    let ev = GridEval::new(grid, z, period);
    let m = ev.m;
    let mut fs = vec![0.0; n * m];
    let mut gs = vec![0.0; n * m];
    let mut zk = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut gout = vec![0.0; n];
    for k in 0..m {
        ev.state(k, n, &mut zk);
        model.rhs(&zk, ev.times[k], &mut out);
        if model.kernel().is_some() {
            model.memory_input(&zk, &mut gout);
        }
        for c in 0..n {
            fs[c * m + k] = out[c];
            gs[c * m + k] = gout[c];
        }
    }
    if fs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let f = grid.analyze_real(&fs, n, nh, omega0);
    let diff = DiffOperator::new(nh, omega0);
    let mut res = HarmonicVector::from_fn(n, nh, omega0, |c, h| {
        diff.entry(h) * z.get(c, h) - f.get(c, h)
    });
    if let Some(t) = memory_transfer(model) {
        let g = grid.analyze_real(&gs, n, nh, omega0);
        let q = t.memory_operator(Complex64::new(0.0, 0.0), nh, omega0, 0)?;
        let qg = q * CVector::from_column_slice(g.amplitudes());
        for (r, v) in res.amplitudes_mut().iter_mut().zip(qg.iter()) {
            *r -= v;
        }
    }
    Ok(res)
}

/// Real residual vector: per component `Re G_0, Re G_1, Im G_1, ..., Re G_N, Im G_N`.
fn to_real(g: &HarmonicVector) -> Vec<f64> {
    let nh = g.n_harmonics() as i64;
    let mut out = Vec::with_capacity(g.len());
    for c in 0..g.dim() {
        out.push(g.get(c, 0).re);
        for h in 1..=nh {
            let v = g.get(c, h);
            out.push(v.re);
            out.push(v.im);
        }
    }
    out
}

/// Offset of `Re z̃_{c,h}` (`h >= 0`) in the real layout; `Im` follows at `+1`.
fn real_offset(c: usize, h: usize, nh: usize) -> usize {
    c * block_len(nh) + if h == 0 { 0 } else { 2 * h - 1 }
}

fn from_real(u: &[f64], dim: usize, nh: usize, omega0: f64) -> HarmonicVector {
    HarmonicVector::from_fn(dim, nh, omega0, |c, h| {
        let k = h.unsigned_abs() as usize;
        if k == 0 {
            Complex64::new(u[real_offset(c, 0, nh)], 0.0)
        } else {
            let o = real_offset(c, k, nh);
            let v = Complex64::new(u[o], u[o + 1]);
            if h < 0 {
                v.conj()
            } else {
                v
            }
        }
    })
}

/// Harmonic-domain HB residual of a candidate cycle as a real vector.
pub fn hb_residual<M: SystemModel + ?Sized>(model: &M, c: &LimitCycle) -> Result<Vec<f64>> {
    let grid = SpectralGrid::oversampled(c.n_harmonics());
    let g = harmonic_residual(model, &c.harmonics, c.period, &grid)?;
    Ok(to_real(&g))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Complex Jacobian `Ω - Ã - Q̃(0) G̃` of the harmonic residual.
fn complex_jacobian<M: SystemModel + ?Sized>(
    model: &M,
    z: &HarmonicVector,
    period: f64,
    grid: &SpectralGrid,
) -> Result<CMatrix> {
    let (a, g) = sample_jacobians(model, z, period, grid);
    let n = model.dim();
    let nh = z.n_harmonics();
    let omega0 = 2.0 * PI / period;
    let mut j = DiffOperator::new(nh, omega0).matrix_n(n);
    a.add_to(&mut j, Complex64::new(-1.0, 0.0));
    if let Some(t) = memory_transfer(model) {
        let q = t.memory_operator(Complex64::new(0.0, 0.0), nh, omega0, 0)?;
        let qg = match g {
            Some(g) => q * g.to_dense(),
            None => q,
        };
        j -= qg;
    }
    Ok(j)
}

/// Toeplitz forms of `∂f/∂z` and (if non-trivial) `∂g/∂z` along the cycle.
fn sample_jacobians<M: SystemModel + ?Sized>(
    model: &M,
    z: &HarmonicVector,
    period: f64,
    grid: &SpectralGrid,
) -> (ToeplitzMatrix, Option<ToeplitzMatrix>) {
    let n = model.dim();
    let nh = z.n_harmonics();
    let omega0 = 2.0 * PI / period;
    let ev = GridEval::new(grid, z, period);
    let m = ev.m;
    let mut a_s = vec![Complex64::new(0.0, 0.0); n * n * m];
    let mut g_s = vec![Complex64::new(0.0, 0.0); n * n * m];
    let mut zk = vec![0.0; n];
    let mut jac = vec![0.0; n * n];
    let with_g = model.has_memory_input() && model.kernel().is_some();
    for k in 0..m {
        ev.state(k, n, &mut zk);
        model.rhs_jacobian(&zk, ev.times[k], &mut jac);
        for e in 0..n * n {
            a_s[e * m + k] = Complex64::new(jac[e], 0.0);
        }
        if with_g {
            model.memory_input_jacobian(&zk, &mut jac);
            for e in 0..n * n {
                g_s[e * m + k] = Complex64::new(jac[e], 0.0);
            }
        }
    }
    let a = ToeplitzMatrix::from_grid_samples(n, n, nh, omega0, grid, &a_s);
    let g = with_g.then(|| ToeplitzMatrix::from_grid_samples(n, n, nh, omega0, grid, &g_s));
    (a, g)
}

/// Real Jacobian of [`to_real`] ∘ residual ∘ [`from_real`].
fn real_jacobian(jc: &CMatrix, dim: usize, nh: usize) -> DMatrix<f64> {
    let b = block_len(nh);
    let size = dim * b;
    let col = |c: usize, h: i64| c * b + (h + nh as i64) as usize;
    let mut jr = DMatrix::zeros(size, size);
    for cc in 0..dim {
        for k in 0..=nh {
            // d residual / d Re z̃_k and d Im z̃_k
            let (dre, dim_): (Vec<Complex64>, Option<Vec<Complex64>>) = if k == 0 {
                ((0..size).map(|r| jc[(r, col(cc, 0))]).collect(), None)
            } else {
                let p = col(cc, k as i64);
                let m = col(cc, -(k as i64));
                (
                    (0..size).map(|r| jc[(r, p)] + jc[(r, m)]).collect(),
                    Some(
                        (0..size)
                            .map(|r| Complex64::new(0.0, 1.0) * (jc[(r, p)] - jc[(r, m)]))
                            .collect(),
                    ),
                )
            };
            let ucol = real_offset(cc, k, nh);
            for rc in 0..dim {
                for h in 0..=nh {
                    let src = col(rc, h as i64);
                    let o = real_offset(rc, h, nh);
                    jr[(o, ucol)] = dre[src].re;
                    if h > 0 {
                        jr[(o + 1, ucol)] = dre[src].im;
                    }
                    if let Some(di) = &dim_ {
                        jr[(o, ucol + 1)] = di[src].re;
                        if h > 0 {
                            jr[(o + 1, ucol + 1)] = di[src].im;
                        }
                    }
                }
            }
        }
    }
    jr
}

/// Rotates the time origin so that `z̃_{anchor,1}` is real and positive.
fn align_phase(z: &mut HarmonicVector, anchor: usize) {
    let phi = z.get(anchor, 1).arg();
    let nh = z.n_harmonics() as i64;
    for c in 0..z.dim() {
        for h in -nh..=nh {
            let v = z.get(c, h) * Complex64::from_polar(1.0, -(h as f64) * phi);
            z.set(c, h, v);
        }
    }
}

fn choose_anchor<M: SystemModel + ?Sized>(model: &M, z: &HarmonicVector) -> usize {
    model
        .phase_components()
        .into_iter()
        .max_by(|&a, &b| z.get(a, 1).norm().total_cmp(&z.get(b, 1).norm()))
        .unwrap_or(0)
}

/// Damped Newton on the HB residual, with the period as an unknown for
/// autonomous systems.
pub fn solve_cycle<M: SystemModel + ?Sized>(
    model: &M,
    initial_guess: &LimitCycle,
    options: &CycleOptions,
) -> Result<LimitCycle> {
    let n = model.dim();
    if initial_guess.harmonics.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: initial_guess.harmonics.dim(),
        });
    }
    let nh = initial_guess.n_harmonics();
    if nh == 0 {
        return Err(Error::InvalidArgument(
            "cycle needs at least one harmonic".into(),
        ));
    }
    let autonomous = model.autonomous();
    let grid = SpectralGrid::oversampled(nh);
    let mut z = initial_guess.harmonics.clone();
    z.enforce_real();
    let period = initial_guess.period;
    if !(period > 0.0) {
        return Err(Error::InvalidArgument(
            "cycle period must be positive".into(),
        ));
    }

    let anchor = if autonomous {
        let a = initial_guess
            .phase_anchor
            .unwrap_or_else(|| choose_anchor(model, &z));
        if z.get(a, 1).norm() < 1e-12 {
            return Err(Error::NoCycle);
        }
        align_phase(&mut z, a);
        Some(a)
    } else {
        None
    };
    // slot of Im z̃_{anchor,1}, reused for the period
    let period_slot = anchor.map(|a| real_offset(a, 1, nh) + 1);

    let pack = |z: &HarmonicVector, period: f64| -> Vec<f64> {
        let mut u = to_real(z);
        if let Some(s) = period_slot {
            u[s] = period;
        }
        u
    };
    let unpack = |u: &[f64]| -> (HarmonicVector, f64) {
        let mut v = u.to_vec();
        let mut p = period;
        if let Some(s) = period_slot {
            p = v[s];
            v[s] = 0.0;
        }
        (from_real(&v, n, nh, 2.0 * PI / p), p)
    };
    let eval = |z: &HarmonicVector, p: f64| -> Result<Vec<f64>> {
        if !(p > 0.0) {
            return Err(Error::NonFinite);
        }
        Ok(to_real(&harmonic_residual(model, z, p, &grid)?))
    };

    let mut u = pack(&z, period);
    let mut res = eval(&z, period)?;
    let mut rnorm = norm2(&res);
    let mut trace = vec![rnorm];
    let mut iterations = 0;
    // absolute tolerance for O(1) cycles, relative for small ones
    let converged = |rnorm: f64, u: &[f64]| {
        let zn = match period_slot {
            Some(s) => u
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != s)
                .map(|(_, v)| v * v)
                .sum::<f64>()
                .sqrt(),
            None => norm2(u),
        };
        rnorm <= options.tol * zn.min(1.0)
    };
    while !converged(rnorm, &u) {
        if iterations == options.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: rnorm,
            });
        }
        iterations += 1;
        let (zc, pc) = unpack(&u);
        let jc = complex_jacobian(model, &zc, pc, &grid)?;
        let mut jr = real_jacobian(&jc, n, nh);
        if let Some(s) = period_slot {
            let dp = 1e-7 * pc;
            let (zp, _) = unpack(&u);
            let rp = eval(&zp, pc + dp)?;
            let rm = eval(&zp, pc - dp)?;
            for i in 0..jr.nrows() {
                jr[(i, s)] = (rp[i] - rm[i]) / (2.0 * dp);
            }
        }
        let rhs = DVector::from_iterator(res.len(), res.iter().map(|v| -v));
        let step = solve_real(jr, &rhs)?;
        if step.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian);
        }

        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=options.max_halvings {
            let trial: Vec<f64> = u
                .iter()
                .zip(step.iter())
                .map(|(a, d)| a + alpha * d)
                .collect();
            let (zt, pt) = unpack(&trial);
            if let Ok(rt) = eval(&zt, pt) {
                let nt = norm2(&rt);
                if nt.is_finite() && nt < rnorm {
                    u = trial;
                    res = rt;
                    rnorm = nt;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        trace.push(rnorm);
        if !accepted {
            return Err(Error::NoConvergence {
                iterations,
                residual: rnorm,
            });
        }
        if let Some(a) = anchor {
            let (zc, _) = unpack(&u);
            if zc.get(a, 1).norm() < 1e-10 {
                // collapsed onto the equilibrium
                return Err(Error::NoCycle);
            }
        }
    }
    let (z, period) = unpack(&u);
    Ok(LimitCycle {
        period,
        harmonics: z,
        residual: rnorm,
        phase_anchor: anchor,
        trace,
    })
}

/// Periodic Jacobian and memory data along a converged cycle.
pub fn linearize<M: SystemModel + ?Sized>(model: &M, c: &LimitCycle) -> Result<FloquetProblem> {
    let grid = SpectralGrid::oversampled(c.n_harmonics());
    let (a, g) = sample_jacobians(model, &c.harmonics, c.period, &grid);
    let mut p = FloquetProblem::new(a, memory_transfer(model), c.period)?
        .with_autonomous(model.autonomous());
    if let Some(g) = g {
        p = p.with_memory_input(g)?;
    }
    Ok(p)
}

/// Settings for the time-integration seed.
#[derive(Debug, Clone, Copy)]
pub struct SeedOptions {
    /// Transient length in (estimated) periods.
    pub periods: f64,
    /// RK4 steps over the transient.
    pub steps: usize,
}

impl Default for SeedOptions {
    fn default() -> Self {
        Self {
            periods: 10.0,
            steps: 2000,
        }
    }
}

/// Time-domain state of the model including the memory history.
struct Integrator<'a, M: SystemModel + ?Sized> {
    model: &'a M,
    n: usize,
    // exponential kernels: w with w' = g(z) - k w, memory = C w
    exp: Option<(&'a [f64], f64)>,
    // delay kernels: (W, τ_d) and g history
    delay: Option<(&'a [f64], f64)>,
    history: Vec<(f64, Vec<f64>)>,
}

impl<'a, M: SystemModel + ?Sized> Integrator<'a, M> {
    fn new(model: &'a M) -> Result<Self> {
        let n = model.dim();
        let (exp, delay) = match model.kernel() {
            None => (None, None),
            Some(KernelSpec::ExponentialDecay {
                coefficients, rate, ..
            }) => (Some((coefficients.as_slice(), *rate)), None),
            Some(KernelSpec::Delay { weights, delay, .. }) => {
                (None, Some((weights.as_slice(), *delay)))
            }
            Some(KernelSpec::FiniteSupportSampled(_)) => {
                return Err(Error::InvalidArgument(
                    "time-integration seeding supports exponential and delay kernels only".into(),
                ))
            }
        };
        Ok(Self {
            model,
            n,
            exp,
            delay,
            history: Vec::new(),
        })
    }

    fn state_len(&self) -> usize {
        if self.exp.is_some() {
            2 * self.n
        } else {
            self.n
        }
    }

    fn delayed_g(&self, t: f64, out: &mut [f64]) {
        let (_, tau) = self.delay.expect("delay kernel");
        let target = t - tau;
        out.fill(0.0);
        if self.history.is_empty() || target < self.history[0].0 {
            return;
        }
        let i = self.history.partition_point(|(s, _)| *s <= target);
        if i >= self.history.len() {
            out.copy_from_slice(&self.history[self.history.len() - 1].1);
            return;
        }
        let (t0, g0) = &self.history[i - 1];
        let (t1, g1) = &self.history[i];
        let w = if t1 > t0 {
            (target - t0) / (t1 - t0)
        } else {
            0.0
        };
        for k in 0..self.n {
            out[k] = (1.0 - w) * g0[k] + w * g1[k];
        }
    }

    fn deriv(&self, y: &[f64], t: f64, out: &mut [f64]) {
        let n = self.n;
        self.model.rhs(&y[..n], t, &mut out[..n]);
        if let Some((c, k)) = self.exp {
            let mut g = vec![0.0; n];
            self.model.memory_input(&y[..n], &mut g);
            for i in 0..n {
                out[i] += (0..n).map(|j| c[i * n + j] * y[n + j]).sum::<f64>();
                out[n + i] = g[i] - k * y[n + i];
            }
        }
        if let Some((w, _)) = self.delay {
            let mut gd = vec![0.0; n];
            self.delayed_g(t, &mut gd);
            for i in 0..n {
                out[i] += (0..n).map(|j| w[i * n + j] * gd[j]).sum::<f64>();
            }
        }
    }

    fn record(&mut self, y: &[f64], t: f64) {
        if self.delay.is_some() {
            let mut g = vec![0.0; self.n];
            self.model.memory_input(&y[..self.n], &mut g);
            self.history.push((t, g));
        }
    }

    fn step(&mut self, y: &mut [f64], t: f64, h: f64) {
        let m = y.len();
        let mut k1 = vec![0.0; m];
        let mut k2 = vec![0.0; m];
        let mut k3 = vec![0.0; m];
        let mut k4 = vec![0.0; m];
        let mut tmp = vec![0.0; m];
        self.deriv(y, t, &mut k1);
        for i in 0..m {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        self.deriv(&tmp, t + 0.5 * h, &mut k2);
        for i in 0..m {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        self.deriv(&tmp, t + 0.5 * h, &mut k3);
        for i in 0..m {
            tmp[i] = y[i] + h * k3[i];
        }
        self.deriv(&tmp, t + h, &mut k4);
        for i in 0..m {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        self.record(y, t + h);
    }
}

/// Integrates from `z0` over the transient, estimates the period
/// (autonomous systems: mean spacing of upward mean-crossings of the most
/// active component) and Fourier-transforms one further period.
pub fn seed_by_integration<M: SystemModel + ?Sized>(
    model: &M,
    z0: &[f64],
    n_harmonics: usize,
    options: &SeedOptions,
) -> Result<LimitCycle> {
    let n = model.dim();
    if z0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z0.len(),
        });
    }
    let hint = model.period_hint().ok_or_else(|| {
        Error::InvalidArgument("time-integration seed needs a period hint".into())
    })?;
    let mut integ = Integrator::new(model)?;
    let mut y = vec![0.0; integ.state_len()];
    y[..n].copy_from_slice(z0);
    integ.record(&y, 0.0);

    let total = options.periods * hint;
    let h = total / options.steps as f64;
    let mut t = 0.0;
    let mut traj: Vec<(f64, Vec<f64>)> = Vec::with_capacity(options.steps + 1);
    traj.push((t, y[..n].to_vec()));
    for _ in 0..options.steps {
        integ.step(&mut y, t, h);
        t += h;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        traj.push((t, y[..n].to_vec()));
    }

    let period = if model.autonomous() {
        estimate_period(&traj, n).ok_or(Error::NoCycle)?
    } else {
        // continue to the next forcing-period boundary so the grid phase matches t = 0
        let next = (t / hint).ceil() * hint;
        let gap = next - t;
        if gap > 1e-12 * hint {
            let steps = (gap / h).ceil().max(1.0) as usize;
            let hh = gap / steps as f64;
            for _ in 0..steps {
                integ.step(&mut y, t, hh);
                t += hh;
            }
        }
        t = next;
        hint
    };

    let ns = block_len(n_harmonics);
    let sub = (200 / ns).max(1) + 1;
    let hh = period / (ns * sub) as f64;
    let mut samples = vec![Complex64::new(0.0, 0.0); n * ns];
    for k in 0..ns {
        for _ in 0..sub {
            integ.step(&mut y, t, hh);
            t += hh;
        }
        for c in 0..n {
            samples[c * ns + k] = Complex64::new(y[c], 0.0);
        }
    }
    let ts = TimeSamples::new(n, n_harmonics, period, samples)?;
    let mut harmonics = dft(&ts)?;
    harmonics.enforce_real();
    Ok(LimitCycle::new(period, harmonics))
}

fn estimate_period(traj: &[(f64, Vec<f64>)], n: usize) -> Option<f64> {
    let tail = &traj[traj.len() / 2..];
    let (comp, _) = (0..n)
        .map(|c| {
            let mean = tail.iter().map(|(_, z)| z[c]).sum::<f64>() / tail.len() as f64;
            let var = tail.iter().map(|(_, z)| (z[c] - mean).powi(2)).sum::<f64>();
            (c, var)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    let mean = tail.iter().map(|(_, z)| z[comp]).sum::<f64>() / tail.len() as f64;
    let amp = tail
        .iter()
        .map(|(_, z)| (z[comp] - mean).abs())
        .fold(0.0, f64::max);
    if amp < 1e-9 {
        return None;
    }
    let mut crossings = Vec::new();
    for w in tail.windows(2) {
        let (t0, a) = (w[0].0, w[0].1[comp] - mean);
        let (t1, b) = (w[1].0, w[1].1[comp] - mean);
        if a < 0.0 && b >= 0.0 {
            crossings.push(t0 + (t1 - t0) * (-a) / (b - a));
        }
    }
    if crossings.len() < 3 {
        return None;
    }
    let last = &crossings[crossings.len().saturating_sub(4)..];
    Some((last[last.len() - 1] - last[0]) / (last.len() - 1) as f64)
}
