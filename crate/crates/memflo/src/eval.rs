//! One grid point: build the model, run its pipeline, summarize.

use indexmap::IndexMap;
use memflo_core::models::{
    analytic_seed, model1d_exponent, particle_spectrum, tl_spectrum, BrownianParticleModel,
    Memory1DModel, Regime, TlResonatorModel,
};
use memflo_core::{Error, FloquetSpectrum, LimitCycle};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ModelKind, SweepConfig};

/// Relative amplitude of the seed jitter enabled by `MEMFLO_SEED`.
pub const JITTER: f64 = 1e-3;

/// Summary of one evaluated point.
#[derive(Debug, Clone, Default)]
pub struct Evaluation {
    pub max_re: Option<f64>,
    pub verdict: String,
    pub n_classes: Option<usize>,
    pub cycle_residual: Option<f64>,
    pub error_code: Option<String>,
    pub regime: Option<&'static str>,
    pub exponents: Vec<Complex64>,
    /// Raw candidates removed by the exponent lower bound.
    pub bound_filtered: Vec<Complex64>,
    /// Bisection indicator: negative on the stable side.
    pub indicator: Option<f64>,
    /// Whether `indicator` varies continuously (safe to interpolate).
    pub continuous: bool,
    pub cycle: Option<LimitCycle>,
}

impl Evaluation {
    pub fn failed(e: &Error) -> Self {
        Self {
            verdict: "error".into(),
            error_code: Some(e.code().into()),
            ..Default::default()
        }
    }

    fn from_spectrum(s: &FloquetSpectrum) -> Self {
        Self {
            max_re: s.max_nontrivial_re(),
            verdict: s.stability.as_str().into(),
            n_classes: Some(s.class_count()),
            exponents: s.pairs.iter().map(|p| p.exponent).collect(),
            bound_filtered: s.diagnostics.bound_filtered.clone(),
            ..Default::default()
        }
    }
}

/// Point-specific inputs beyond the parameter values.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointContext<'a> {
    pub warm: Option<&'a LimitCycle>,
    /// Seed for the Newton start jitter; `None` disables it.
    pub jitter: Option<u64>,
}

pub fn evaluate(
    cfg: &SweepConfig,
    values: &IndexMap<String, f64>,
    ctx: PointContext<'_>,
) -> Evaluation {
    match try_evaluate(cfg, values, ctx) {
        Ok(e) => e,
        Err(e) => Evaluation::failed(&e),
    }
}

fn try_evaluate(
    cfg: &SweepConfig,
    v: &IndexMap<String, f64>,
    ctx: PointContext<'_>,
) -> Result<Evaluation, Error> {
    match cfg.model {
        ModelKind::Memory1d => {
            let m = Memory1DModel::new(v["a"], v["k"], v["s"])?;
            let s = model1d_exponent(&m)?;
            let mut e = Evaluation::from_spectrum(&s);
            e.indicator = e.max_re;
            e.continuous = true;
            Ok(e)
        }
        ModelKind::Tl => {
            let m = TlResonatorModel::new(v["r"], v["ra"], v["z0"], v["tau_f"])?;
            let s = tl_spectrum(&m, cfg.n_roots)?;
            let mut e = Evaluation::from_spectrum(&s);
            e.indicator = e.max_re;
            e.continuous = true;
            Ok(e)
        }
        ModelKind::Particle => {
            let omega1 = v["omega1"];
            let m = BrownianParticleModel::new(
                v["mass"],
                v["alpha"],
                v["beta"],
                v["g"],
                v["k"],
                [omega1, omega1 / v["ratio"]],
            )?;
            let jittered = ctx.jitter.and_then(|seed| {
                let base = ctx
                    .warm
                    .cloned()
                    .or_else(|| analytic_seed(&m, cfg.n_harmonics))?;
                Some(jitter(base, seed))
            });
            let warm = jittered.as_ref().or(ctx.warm);
            let a = particle_spectrum(&m, cfg.n_harmonics, warm)?;
            let mut e = Evaluation::from_spectrum(&a.spectrum);
            e.indicator = Some(if a.in_tongue() {
                e.max_re.unwrap_or(-1.0)
            } else {
                1.0
            });
            e.continuous = false;
            match a.regime {
                Regime::Cycle => {
                    e.regime = Some("cycle");
                    e.cycle_residual = Some(a.cycle.residual);
                    e.cycle = Some(a.cycle);
                }
                Regime::Equilibrium => e.regime = Some("equilibrium"),
            }
            Ok(e)
        }
    }
}

fn jitter(mut c: LimitCycle, seed: u64) -> LimitCycle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for a in c.harmonics.amplitudes_mut() {
        *a *= 1.0 + JITTER * rng.random_range(-1.0..1.0);
    }
    c.harmonics.enforce_real();
    c
}
