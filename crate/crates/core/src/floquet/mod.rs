//! Floquet exponents of a linearized periodic orbit with memory.
//!
//! Substituting `y(t) = r(t) e^{λt}` with `T`-periodic `r` into the
//! variational equation and balancing harmonics gives the transcendental
//! eigenproblem `R(λ) r̃ = 0` with
//!
//! ```text
//! R(λ) = Ω_n + λ I - Ã - Q̃(λ) G̃
//! ```
//!
//! where `Ã` is the Toeplitz form of the periodic Jacobian, `Q̃(λ)` the
//! memory operator and `G̃` the Toeplitz form of the Jacobian of the signal
//! the kernel acts on (identity unless a model says otherwise).

mod pep;
mod scalar;

pub use pep::{solve_pep, Pep, PepEigenpair, PepSolution, SingularLeading};
pub use scalar::solve_scalar;

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hb::{block_len, DiffOperator, HarmonicVector, ToeplitzMatrix};
use crate::kernels::{KernelSpec, MemoryTransfer};
use crate::linalg::{solve, CMatrix, CVector};

/// Newton target for refined eigenpairs.
pub const REFINE_TOL: f64 = 1e-10;

/// Largest residual an unrefined eigenpair may carry and still be reported.
pub const CERTIFICATE_TOL: f64 = 1e-8;
const REFINE_MAX_ITER: usize = 50;
/// Canonical exponents closer than this are one splitting class.
pub const MERGE_TOL: f64 = 1e-8;
/// `|Re λ|` below this counts as zero in the stability verdict.
pub const STABILITY_TOL: f64 = 1e-6;
/// Trivial (time-translation) class: `|λ| < TRIVIAL_FRACTION * ω₀`.
pub const TRIVIAL_FRACTION: f64 = 1e-3;

/// Assembled harmonic-balance eigenproblem data.
#[derive(Debug, Clone)]
pub struct FloquetProblem {
    jacobian: ToeplitzMatrix,
    memory_input: Option<ToeplitzMatrix>,
    transfer: Option<MemoryTransfer>,
    period: f64,
    n_harmonics: usize,
    dim: usize,
    autonomous: bool,
}

impl FloquetProblem {
    pub fn new(
        jacobian: ToeplitzMatrix,
        transfer: Option<MemoryTransfer>,
        period: f64,
    ) -> Result<Self> {
        let dim = jacobian.rows();
        if jacobian.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: jacobian.cols(),
            });
        }
        if !(period > 0.0) {
            return Err(Error::InvalidArgument("period must be positive".into()));
        }
        if (jacobian.omega0() - 2.0 * PI / period).abs() > 1e-9 * jacobian.omega0().abs().max(1.0) {
            return Err(Error::InvalidArgument(
                "jacobian frequency does not match period".into(),
            ));
        }
        if let Some(t) = &transfer {
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.dim(),
                });
            }
        }
        Ok(Self {
            n_harmonics: jacobian.n_harmonics(),
            jacobian,
            memory_input: None,
            transfer,
            period,
            dim,
            autonomous: false,
        })
    }

    /// Jacobian of the signal fed into the memory kernel (default identity).
    pub fn with_memory_input(mut self, g: ToeplitzMatrix) -> Result<Self> {
        if g.rows() != self.dim || g.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: g.rows(),
            });
        }
        if g.n_harmonics() != self.n_harmonics {
            return Err(Error::InconsistentHarmonics(
                self.n_harmonics,
                g.n_harmonics(),
            ));
        }
        self.memory_input = Some(g);
        Ok(self)
    }

    pub fn with_autonomous(mut self, autonomous: bool) -> Self {
        self.autonomous = autonomous;
        self
    }

    pub fn jacobian(&self) -> &ToeplitzMatrix {
        &self.jacobian
    }

    pub fn memory_input(&self) -> Option<&ToeplitzMatrix> {
        self.memory_input.as_ref()
    }

    pub fn transfer(&self) -> Option<&MemoryTransfer> {
        self.transfer.as_ref()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn n_harmonics(&self) -> usize {
        self.n_harmonics
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn autonomous(&self) -> bool {
        self.autonomous
    }

    /// Size `n (2N_H + 1)` of the harmonic system.
    pub fn size(&self) -> usize {
        self.dim * block_len(self.n_harmonics)
    }

    /// Lower bound `-min k_c` on `Re λ` (decay-bound filter); `-∞` without memory.
    pub fn exponent_floor(&self) -> f64 {
        self.transfer
            .as_ref()
            .map(MemoryTransfer::exponent_floor)
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// `Q̃^{(order)}(λ) G̃`.
    fn memory_term(&self, lambda: Complex64, order: u32) -> Result<Option<CMatrix>> {
        let Some(t) = &self.transfer else {
            return Ok(None);
        };
        let q = t.memory_operator(lambda, self.n_harmonics, self.omega0(), order)?;
        Ok(Some(match &self.memory_input {
            Some(g) => q * g.to_dense(),
            None => q,
        }))
    }

    /// `R(λ) = Ω_n + λI - Ã - Q̃(λ) G̃`.
    pub fn assemble_residual_matrix(&self, lambda: Complex64) -> Result<CMatrix> {
        let mut r = DiffOperator::new(self.n_harmonics, self.omega0()).matrix_n(self.dim);
        for i in 0..r.nrows() {
            r[(i, i)] += lambda;
        }
        self.jacobian.add_to(&mut r, Complex64::new(-1.0, 0.0));
        if let Some(q) = self.memory_term(lambda, 0)? {
            r -= q;
        }
        Ok(r)
    }

    /// `∂^order R / ∂λ^order` for `order >= 1`.
    pub fn residual_derivative(&self, lambda: Complex64, order: u32) -> Result<CMatrix> {
        assert!(order >= 1);
        let n = self.size();
        let mut d = CMatrix::zeros(n, n);
        if order == 1 {
            for i in 0..n {
                d[(i, i)] = Complex64::new(1.0, 0.0);
            }
        }
        if let Some(q) = self.memory_term(lambda, order)? {
            d -= q;
        }
        Ok(d)
    }

    /// `‖R(λ) r̃‖ / ‖r̃‖`.
    pub fn residual_norm(&self, lambda: Complex64, r: &HarmonicVector) -> Result<f64> {
        let m = self.assemble_residual_matrix(lambda)?;
        let v = CVector::from_column_slice(r.amplitudes());
        Ok((m * &v).norm() / v.norm())
    }

    /// Builds an eigenpair record (gauge-normalized) from raw data.
    pub fn make_pair(
        &self,
        exponent: Complex64,
        mut eigenvector: HarmonicVector,
        refined: bool,
    ) -> Result<FloquetEigenpair> {
        eigenvector.normalize_gauge();
        let residual = self.residual_norm(exponent, &eigenvector)?;
        Ok(FloquetEigenpair {
            exponent,
            multiplier: (exponent * self.period).exp(),
            eigenvector,
            residual,
            bound_ok: exponent.re > self.exponent_floor(),
            refined,
        })
    }
}

/// Taylor expansion of `R(λ)` about `λ = 0` to the given degree:
/// `P_k = R^{(k)}(0) / k!`.
pub fn taylor_pep(p: &FloquetProblem, degree: usize) -> Result<Pep> {
    if degree == 0 {
        return Err(Error::InvalidArgument("Taylor degree must be >= 1".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(p.assemble_residual_matrix(zero)?);
    let mut fact = 1.0;
    for k in 1..=degree {
        fact *= k as f64;
        coeffs.push(p.residual_derivative(zero, k as u32)? / Complex64::new(fact, 0.0));
    }
    Pep::new(coeffs)
}

/// Exact quadratic PEP for a single untruncated exponential kernel: every
/// row the kernel reaches is multiplied through by `k + λ + iω_j`.
/// Returns `None` for other kernels.
pub fn cleared_pep(p: &FloquetProblem) -> Result<Option<Pep>> {
    let Some(t) = p.transfer() else {
        return Ok(None);
    };
    if t.truncation().is_some() {
        return Ok(None);
    }
    let KernelSpec::ExponentialDecay {
        coefficients, rate, ..
    } = t.kernel()
    else {
        return Ok(None);
    };
    let n = p.dim;
    let b = block_len(p.n_harmonics);
    let size = p.size();
    let nh = p.n_harmonics as i64;
    let omega0 = p.omega0();

    // D - Ã
    let mut base = DiffOperator::new(p.n_harmonics, omega0).matrix_n(n);
    p.jacobian.add_to(&mut base, Complex64::new(-1.0, 0.0));
    // (C ⊗ I) G̃
    let mut cg = CMatrix::zeros(size, size);
    for r in 0..n {
        for c in 0..n {
            let v = coefficients[r * n + c];
            if v == 0.0 {
                continue;
            }
            for j in 0..b {
                cg[(r * b + j, c * b + j)] = Complex64::new(v, 0.0);
            }
        }
    }
    if let Some(g) = &p.memory_input {
        cg *= g.to_dense();
    }

    let mut p0 = CMatrix::zeros(size, size);
    let mut p1 = CMatrix::zeros(size, size);
    let mut p2 = CMatrix::zeros(size, size);
    for r in 0..n {
        let touched = (0..n).any(|c| coefficients[r * n + c] != 0.0);
        for (ji, j) in (-nh..=nh).enumerate() {
            let row = r * b + ji;
            if touched {
                let u = Complex64::new(*rate, j as f64 * omega0);
                for col in 0..size {
                    p0[(row, col)] = u * base[(row, col)] - cg[(row, col)];
                    p1[(row, col)] = base[(row, col)];
                }
                p1[(row, row)] += u;
                p2[(row, row)] = Complex64::new(1.0, 0.0);
            } else {
                for col in 0..size {
                    p0[(row, col)] = base[(row, col)];
                }
                p1[(row, row)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    Ok(Some(Pep::new(alloc::vec![p0, p1, p2])?))
}

/// Options for the full spectrum pipeline.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Taylor degree when no exact polynomial form is available.
    pub taylor_degree: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { taylor_degree: 4 }
    }
}

/// The PEP used by [`solve_spectrum`]: linear without memory, exactly
/// quadratic for one untruncated exponential kernel, Taylor otherwise.
pub fn build_pep(p: &FloquetProblem, options: &SpectrumOptions) -> Result<Pep> {
    if p.transfer.is_none() {
        let zero = Complex64::new(0.0, 0.0);
        let p0 = p.assemble_residual_matrix(zero)?;
        let p1 = CMatrix::identity(p.size(), p.size());
        return Pep::new(alloc::vec![p0, p1]);
    }
    if let Some(pep) = cleared_pep(p)? {
        return Ok(pep);
    }
    taylor_pep(p, options.taylor_degree)
}

/// One Floquet exponent with its eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetEigenpair {
    pub exponent: Complex64,
    /// `e^{λT}`
    pub multiplier: Complex64,
    pub eigenvector: HarmonicVector,
    /// `‖R(λ) r̃‖ / ‖r̃‖`
    pub residual: f64,
    /// `Re λ > -min k_c`
    pub bound_ok: bool,
    pub refined: bool,
}

impl FloquetEigenpair {
    /// Splitting partner `λ + i m ω₀` with harmonics `r̃'_h = r̃_{h+m}`.
    pub fn shifted(&self, m: i64, period: f64) -> FloquetEigenpair {
        let omega0 = 2.0 * PI / period;
        let exponent = self.exponent + Complex64::new(0.0, m as f64 * omega0);
        FloquetEigenpair {
            exponent,
            multiplier: (exponent * period).exp(),
            eigenvector: self.eigenvector.shift_harmonics(m),
            residual: self.residual,
            bound_ok: self.bound_ok,
            refined: self.refined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Marginal => "marginal",
            Stability::Unstable => "unstable",
        }
    }
}

/// Bookkeeping of what the pipeline discarded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpectrumDiagnostics {
    pub raw_finite: usize,
    pub raw_infinite: usize,
    /// Raw candidates with `Re λ <= -min k_c`, discarded.
    pub bound_filtered: Vec<Complex64>,
    /// Candidates whose Newton refinement failed and were discarded.
    pub unrefined: usize,
    pub merged: usize,
}

/// Canonical representatives, one per splitting class.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSpectrum {
    pub pairs: Vec<FloquetEigenpair>,
    pub period: f64,
    /// `2π / T`; zero marks a time-invariant spectrum with no splitting folding.
    pub omega0: f64,
    /// Index into `pairs` of the time-translation class.
    pub trivial: Option<usize>,
    pub stability: Stability,
    pub diagnostics: SpectrumDiagnostics,
}

impl FloquetSpectrum {
    pub fn class_count(&self) -> usize {
        self.pairs.len()
    }

    /// Largest real part among non-trivial classes.
    pub fn max_nontrivial_re(&self) -> Option<f64> {
        self.nontrivial().map(|p| p.exponent.re).reduce(f64::max)
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &FloquetEigenpair> {
        self.pairs
            .iter()
            .enumerate()
            .filter(move |(i, _)| Some(*i) != self.trivial)
            .map(|(_, p)| p)
    }

    /// Exponent with the largest real part (ties broken by smallest `|Im|`).
    pub fn dominant(&self) -> Option<&FloquetEigenpair> {
        self.pairs.iter().max_by(|a, b| {
            a.exponent
                .re
                .total_cmp(&b.exponent.re)
                .then(b.exponent.im.abs().total_cmp(&a.exponent.im.abs()))
        })
    }
}

/// Index `m` such that `Im λ - m ω₀ ∈ (-ω₀/2, ω₀/2]`.
fn strip_index(im: f64, omega0: f64) -> i64 {
    (im / omega0 - 0.5).ceil() as i64
}

fn class_distance(a: Complex64, b: Complex64, omega0: f64) -> f64 {
    let dre = a.re - b.re;
    let mut dim = a.im - b.im;
    if omega0 > 0.0 {
        dim -= omega0 * (dim / omega0).round();
    }
    (dre * dre + dim * dim).sqrt()
}

pub fn verdict<'a>(nontrivial: impl Iterator<Item = &'a FloquetEigenpair>) -> Stability {
    let max_re = nontrivial
        .map(|p| p.exponent.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re > STABILITY_TOL {
        Stability::Unstable
    } else if max_re >= -STABILITY_TOL {
        Stability::Marginal
    } else {
        Stability::Stable
    }
}

/// Maps exponents to the strip `Im λ ∈ (-ω₀/2, ω₀/2]`, merges splitting
/// duplicates (keeping the lowest residual), labels the trivial class of
/// autonomous cycles and decides stability. `omega0 = 0` disables folding.
pub fn canonicalize_spectrum(
    pairs: Vec<FloquetEigenpair>,
    period: f64,
    omega0: f64,
    autonomous: bool,
) -> FloquetSpectrum {
    let mut canon: Vec<FloquetEigenpair> = Vec::with_capacity(pairs.len());
    let mut merged = 0;
    for pair in pairs {
        let pair = if omega0 > 0.0 {
            let m = strip_index(pair.exponent.im, omega0);
            if m != 0 {
                let mut s = pair.shifted(-m, period);
                // keep the exact strip value (avoid re-rounding drift)
                s.exponent.im = pair.exponent.im - m as f64 * omega0;
                s.multiplier = (s.exponent * period).exp();
                s
            } else {
                pair
            }
        } else {
            pair
        };
        match canon
            .iter_mut()
            .find(|c| class_distance(c.exponent, pair.exponent, omega0) < MERGE_TOL)
        {
            Some(existing) => {
                merged += 1;
                if pair.residual < existing.residual {
                    *existing = pair;
                }
            }
            None => canon.push(pair),
        }
    }
    canon.sort_by(|a, b| {
        b.exponent
            .re
            .total_cmp(&a.exponent.re)
            .then(a.exponent.im.total_cmp(&b.exponent.im))
    });
    let trivial = if autonomous && omega0 > 0.0 {
        canon
            .iter()
            .enumerate()
            .filter(|(_, p)| p.exponent.norm() < TRIVIAL_FRACTION * omega0)
            .min_by(|a, b| a.1.exponent.norm().total_cmp(&b.1.exponent.norm()))
            .map(|(i, _)| i)
    } else {
        None
    };
    let stability = verdict(
        canon
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != trivial)
            .map(|(_, p)| p),
    );
    FloquetSpectrum {
        pairs: canon,
        period,
        omega0,
        trivial,
        stability,
        diagnostics: SpectrumDiagnostics {
            merged,
            ..Default::default()
        },
    }
}

/// Newton polish of `(λ, r̃)` against the exact `R(λ)` with the bordering
/// condition `r̃_p = 1` at the seed's largest entry. Stops when the residual
/// is below [`REFINE_TOL`], or below `1e-12` relative to the largest entry
/// of `R(λ)` (exponents far from the origin). If Newton stalls, the best
/// iterate is returned flagged unrefined provided its residual is below
/// [`CERTIFICATE_TOL`].
pub fn refine_eigenpair(p: &FloquetProblem, seed: &FloquetEigenpair) -> Result<FloquetEigenpair> {
    let n = p.size();
    if seed.eigenvector.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: seed.eigenvector.len(),
        });
    }
    let mut v = seed.eigenvector.clone();
    v.normalize_gauge();
    let anchor = v
        .amplitudes()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut x = CVector::from_column_slice(v.amplitudes());
    let mut lambda = seed.exponent;
    let mut last = f64::INFINITY;
    let mut best: Option<(f64, Complex64, CVector)> = None;
    let mut stalled = 0;
    let mut iterations = 0;
    while iterations <= REFINE_MAX_ITER {
        iterations += 1;
        let r = p.assemble_residual_matrix(lambda)?;
        let res = &r * &x;
        last = res.norm() / x.norm();
        let scale = r.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if last < REFINE_TOL || last < REFINE_TOL * 1e-2 * scale {
            let hv = HarmonicVector::from_amplitudes(
                p.dim,
                p.n_harmonics,
                p.omega0(),
                x.iter().copied().collect(),
            )?;
            return p.make_pair(lambda, hv, true);
        }
        match &best {
            Some((b, _, _)) if last >= 0.5 * b => stalled += 1,
            _ => stalled = 0,
        }
        if best.as_ref().is_none_or(|(b, _, _)| last < *b) {
            best = Some((last, lambda, x.clone()));
        }
        // repeated eigenvalues make the bordered system singular and Newton linear
        if stalled >= 6 {
            break;
        }
        let dr = p.residual_derivative(lambda, 1)? * &x;
        let mut j = CMatrix::zeros(n + 1, n + 1);
        j.view_mut((0, 0), (n, n)).copy_from(&r);
        j.view_mut((0, n), (n, 1)).copy_from(&dr);
        j[(n, anchor)] = Complex64::new(1.0, 0.0);
        let mut rhs = CVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&(-res));
        let Ok(step) = solve(j, &rhs) else {
            break;
        };
        x += step.rows(0, n);
        lambda += step[n];
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            break;
        }
    }
    if let Some((res, lambda, x)) = best {
        if res < CERTIFICATE_TOL {
            let hv = HarmonicVector::from_amplitudes(
                p.dim,
                p.n_harmonics,
                p.omega0(),
                x.iter().copied().collect(),
            )?;
            return p.make_pair(lambda, hv, false);
        }
    }
    Err(Error::NoConvergence {
        iterations,
        residual: last,
    })
}

/// Full pipeline: polynomial reduction, companion solve, decay-bound filter,
/// class selection, Newton refinement, canonicalization.
pub fn solve_spectrum(p: &FloquetProblem, options: &SpectrumOptions) -> Result<FloquetSpectrum> {
    let pep = build_pep(p, options)?;
    let sol = solve_pep(&pep)?;
    let floor = p.exponent_floor();
    let b = block_len(p.n_harmonics);
    let omega0 = p.omega0();

    let mut diagnostics = SpectrumDiagnostics {
        raw_finite: sol.finite.len(),
        raw_infinite: sol.infinite,
        ..Default::default()
    };

    // Center each candidate on its eigenvector's harmonic centroid and rank
    // by how far the centered pair is from solving the polynomial problem
    // (copies cut by the truncation edge fail this) and by the energy near
    // the edge.
    let cutoff = p.n_harmonics / 2;
    let coeff_norms: Vec<f64> = pep
        .coefficients()
        .iter()
        .map(|c| c.iter().map(|z| z.norm()).fold(0.0, f64::max))
        .collect();
    let mut candidates: Vec<(f64, Complex64, HarmonicVector)> = Vec::new();
    for pair in sol.finite {
        if !(pair.value.re > floor + crate::kernels::DOMAIN_MARGIN) {
            diagnostics.bound_filtered.push(pair.value);
            continue;
        }
        let hv = HarmonicVector::from_amplitudes(
            p.dim,
            p.n_harmonics,
            omega0,
            pair.vector.iter().copied().collect(),
        )?;
        let m = hv.harmonic_centroid().round() as i64;
        let hv = hv.shift_harmonics(m);
        let lambda = pair.value + Complex64::new(0.0, m as f64 * omega0);
        let scale: f64 = coeff_norms
            .iter()
            .enumerate()
            .map(|(k, n)| n * lambda.norm().powi(k as i32))
            .sum();
        let v = CVector::from_column_slice(hv.amplitudes());
        let centered = pep.residual(lambda, &v) / scale.max(f64::MIN_POSITIVE);
        candidates.push((hv.tail_fraction(cutoff).max(centered), lambda, hv));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let admissible = diagnostics.raw_finite - diagnostics.bound_filtered.len();
    let expected = ((admissible as f64 / b as f64).round() as usize).max(1);
    let same_class =
        |a: Complex64, b: Complex64| class_distance(a, b, omega0) < 1e-6 * (1.0 + a.norm());
    let mut tried: Vec<Complex64> = Vec::new();
    let mut refined: Vec<FloquetEigenpair> = Vec::with_capacity(expected);
    for (_, lambda, hv) in candidates {
        if refined.len() == expected {
            break;
        }
        if tried.iter().any(|l| same_class(*l, lambda))
            || refined.iter().any(|r| same_class(r.exponent, lambda))
        {
            continue;
        }
        tried.push(lambda);
        let seed = match p.make_pair(lambda, hv, false) {
            Ok(s) => s,
            Err(Error::BoundViolation { .. }) => {
                diagnostics.bound_filtered.push(lambda);
                continue;
            }
            Err(e) => return Err(e),
        };
        let pair = match refine_eigenpair(p, &seed) {
            Ok(r) if r.bound_ok => r,
            Ok(r) => {
                diagnostics.bound_filtered.push(r.exponent);
                continue;
            }
            Err(_) if seed.residual < CERTIFICATE_TOL => seed,
            Err(_) => {
                diagnostics.unrefined += 1;
                continue;
            }
        };
        if refined
            .iter()
            .any(|r| class_distance(r.exponent, pair.exponent, omega0) < MERGE_TOL)
        {
            diagnostics.merged += 1;
            continue;
        }
        refined.push(pair);
    }

    let mut spectrum = canonicalize_spectrum(refined, p.period, omega0, p.autonomous);
    diagnostics.merged += spectrum.diagnostics.merged;
    spectrum.diagnostics = diagnostics;
    Ok(spectrum)
}
