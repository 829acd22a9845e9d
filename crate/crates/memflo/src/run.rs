//! Grid dispatch for the four run modes.

use std::time::Instant;

use indexmap::IndexMap;
use memflo_core::models::{model1d_convergence, Memory1DModel};
use memflo_core::LimitCycle;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Mode, ModelKind, ParamSpec, SweepConfig};
use crate::eval::{evaluate, Evaluation, PointContext};

/// One output row.
#[derive(Debug, Clone)]
pub struct Row {
    /// Values of the ranged parameters, in column order.
    pub params: Vec<f64>,
    pub eval: Evaluation,
    /// `|λ(s) - λ∞|`, convergence mode only.
    pub abs_dev: Option<f64>,
    pub wall_ms: f64,
}

impl Row {
    pub fn failed(&self) -> bool {
        self.eval.error_code.is_some()
    }
}

/// Bisection bracket `[lo, hi]` with the indicator at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub value_lo: f64,
    pub value_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Boundary {
    pub parameter: String,
    pub value: Option<f64>,
    pub error_code: Option<String>,
    pub history: Vec<Bracket>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub boundary: Option<Boundary>,
}

impl SweepResult {
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(Row::failed)
            || self
                .boundary
                .as_ref()
                .is_some_and(|b| b.error_code.is_some())
    }
}

/// Execution knobs that do not belong to the reproducible config.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    /// `MEMFLO_SEED`: enables Newton start jitter with this seed.
    pub jitter_seed: Option<u64>,
}

impl RunOptions {
    pub fn from_env(jobs: Option<usize>) -> Self {
        Self {
            jobs,
            jitter_seed: std::env::var("MEMFLO_SEED")
                .ok()
                .and_then(|s| s.trim().parse().ok()),
        }
    }
}

pub fn run(cfg: &SweepConfig, opts: &RunOptions) -> SweepResult {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(|| dispatch(cfg, opts)),
        Err(_) => dispatch(cfg, opts),
    }
}

fn dispatch(cfg: &SweepConfig, opts: &RunOptions) -> SweepResult {
    let columns: Vec<String> = cfg.ranged().into_iter().map(String::from).collect();
    let (rows, boundary) = match cfg.mode {
        Mode::Spectrum | Mode::Sweep => (sweep(cfg, &columns, opts), None),
        Mode::Convergence => (convergence(cfg), None),
        Mode::BoundaryBisect => {
            let (rows, b) = bisect(cfg, &columns[0], opts);
            (rows, Some(b))
        }
    };
    SweepResult {
        config: cfg.clone(),
        columns,
        rows,
        boundary,
    }
}

/// Base parameter values with the ranged ones overridden.
fn point(cfg: &SweepConfig, columns: &[String], params: &[f64]) -> IndexMap<String, f64> {
    cfg.parameters
        .iter()
        .map(|(name, spec)| {
            let v = match (columns.iter().position(|c| c == name), spec) {
                (Some(i), _) => params[i],
                (None, ParamSpec::Fixed(v)) => *v,
                (None, ParamSpec::Range { start, .. }) => *start,
            };
            (name.clone(), v)
        })
        .collect()
}

fn jitter_for(opts: &RunOptions, index: usize) -> Option<u64> {
    opts.jitter_seed
        .map(|s| s ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn timed(cfg: &SweepConfig, columns: &[String], params: Vec<f64>, ctx: PointContext<'_>) -> Row {
    let start = Instant::now();
    let eval = evaluate(cfg, &point(cfg, columns, &params), ctx);
    Row {
        params,
        eval,
        abs_dev: None,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn sweep(cfg: &SweepConfig, columns: &[String], opts: &RunOptions) -> Vec<Row> {
    let axes: Vec<Vec<f64>> = columns.iter().map(|c| cfg.parameters[c].values()).collect();
    let inner = axes.last().map_or(1, Vec::len);
    let outer: Vec<Vec<f64>> = match axes.len() {
        2 => axes[0].iter().map(|&v| vec![v]).collect(),
        _ => vec![vec![]],
    };
    let grid_point = |o: &[f64], j: usize| {
        let mut p = o.to_vec();
        if let Some(ax) = axes.last() {
            p.push(ax[j]);
        }
        p
    };

    if cfg.model == ModelKind::Particle && cfg.warm_start {
        // Each chain walks the innermost axis sequentially.
        outer
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, o)| {
                let mut warm: Option<LimitCycle> = None;
                let mut rows = Vec::with_capacity(inner);
                for j in 0..inner {
                    let ctx = PointContext {
                        warm: warm.as_ref(),
                        jitter: jitter_for(opts, i * inner + j),
                    };
                    let mut row = timed(cfg, columns, grid_point(o, j), ctx);
                    if let Some(c) = row.eval.cycle.take() {
                        warm = Some(c);
                    }
                    rows.push(row);
                }
                rows
            })
            .collect()
    } else {
        (0..outer.len() * inner)
            .into_par_iter()
            .map(|idx| {
                let ctx = PointContext {
                    warm: None,
                    jitter: jitter_for(opts, idx),
                };
                let mut row = timed(
                    cfg,
                    columns,
                    grid_point(&outer[idx / inner], idx % inner),
                    ctx,
                );
                row.eval.cycle = None;
                row
            })
            .collect()
    }
}

fn convergence(cfg: &SweepConfig) -> Vec<Row> {
    let s_values = cfg.parameters["s"].values();
    let base = point(cfg, &["s".to_owned()], &[0.0]);
    let start = Instant::now();
    let table = Memory1DModel::new(base["a"], base["k"], 0.0)
        .and_then(|m| model1d_convergence(&m, &s_values));
    let per_row = start.elapsed().as_secs_f64() * 1e3 / s_values.len().max(1) as f64;
    match table {
        Ok(table) => table
            .into_iter()
            .map(|r| {
                let stable = if r.lambda.re < -1e-6 {
                    "stable"
                } else if r.lambda.re > 1e-6 {
                    "unstable"
                } else {
                    "marginal"
                };
                Row {
                    params: vec![r.s],
                    eval: Evaluation {
                        max_re: Some(r.lambda.re),
                        verdict: stable.into(),
                        n_classes: Some(1),
                        exponents: vec![r.lambda],
                        ..Default::default()
                    },
                    abs_dev: Some(r.abs_dev),
                    wall_ms: per_row,
                }
            })
            .collect(),
        Err(e) => s_values
            .iter()
            .map(|&s| Row {
                params: vec![s],
                eval: Evaluation::failed(&e),
                abs_dev: None,
                wall_ms: per_row,
            })
            .collect(),
    }
}

fn bisect(cfg: &SweepConfig, name: &str, opts: &RunOptions) -> (Vec<Row>, Boundary) {
    let columns = vec![name.to_owned()];
    let grid = cfg.parameters[name].values();
    let mut rows: Vec<Row> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let ctx = PointContext {
                warm: None,
                jitter: jitter_for(opts, i),
            };
            let mut row = timed(cfg, &columns, vec![x], ctx);
            row.eval.cycle = None;
            row
        })
        .collect();

    let mut boundary = Boundary {
        parameter: name.to_owned(),
        value: None,
        error_code: None,
        history: Vec::new(),
    };
    let scanned: Vec<(f64, f64, bool)> = rows
        .iter()
        .filter_map(|r| {
            r.eval
                .indicator
                .map(|v| (r.params[0], v, r.eval.continuous))
        })
        .collect();
    let Some(w) = scanned
        .windows(2)
        .find(|w| (w[0].1 <= 0.0) != (w[1].1 <= 0.0) || w[0].1 == 0.0)
    else {
        boundary.error_code = Some("NO_BRACKET".into());
        return (rows, boundary);
    };
    let continuous = w[0].2 && w[1].2;
    let mut b = Bracket {
        lo: w[0].0,
        hi: w[1].0,
        value_lo: w[0].1,
        value_hi: w[1].1,
    };
    boundary.history.push(b);

    let mut n = grid.len();
    while (b.hi - b.lo).abs() > cfg.bisect_tol && b.value_lo != 0.0 {
        let mid = 0.5 * (b.lo + b.hi);
        let ctx = PointContext {
            warm: None,
            jitter: jitter_for(opts, n),
        };
        n += 1;
        let mut row = timed(cfg, &columns, vec![mid], ctx);
        row.eval.cycle = None;
        let v = row.eval.indicator;
        rows.push(row);
        let Some(v) = v else {
            boundary.error_code = Some("BISECTION_FAILED".into());
            return (rows, boundary);
        };
        if (v <= 0.0) == (b.value_lo <= 0.0) {
            b.lo = mid;
            b.value_lo = v;
        } else {
            b.hi = mid;
            b.value_hi = v;
        }
        boundary.history.push(b);
    }

    boundary.value = Some(if b.value_lo == 0.0 {
        b.lo
    } else if continuous && b.value_hi != b.value_lo {
        b.lo + (b.hi - b.lo) * b.value_lo / (b.value_lo - b.value_hi)
    } else {
        0.5 * (b.lo + b.hi)
    });
    (rows, boundary)
}
