//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p memflo --test acceptance -- --nocapture` (output is
//! printed either way; the process fails if any criterion fails).

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use memflo::config::{Encoding, SweepConfig};
use memflo::run::{run, RunOptions};
use memflo_core::floquet::{
    canonicalize_spectrum, solve_pep, solve_spectrum, Pep, SpectrumOptions,
};
use memflo_core::hb::{dft, differentiate, idft, TimeSamples, ToeplitzMatrix};
use memflo_core::linalg::CMatrix;
use memflo_core::models::{
    model1d_convergence, model1d_exponent, particle_problem, particle_spectrum, tl_spectrum,
    BrownianParticleModel, Memory1DModel, TlResonatorModel,
};
use memflo_core::{Complex64, FloquetEigenpair, FloquetProblem, HarmonicVector, LimitCycle};
use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn config(text: &str) -> SweepConfig {
    SweepConfig::parse(text, Encoding::Toml).expect("valid acceptance config")
}

/// Positive root of the 1D characteristic quadratic.
fn quadratic_root(a: f64, k: f64) -> f64 {
    let b = k - a;
    let c0 = -(a * k + 1.0);
    0.5 * (-b + (b * b - 4.0 * c0).sqrt())
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for a in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let s = model1d_exponent(&Memory1DModel::new(a, 3.0, f64::INFINITY).unwrap()).unwrap();
        let above: Vec<_> = s.pairs.iter().filter(|p| p.exponent.re > -3.0).collect();
        if above.len() != 1 {
            return outcome(
                false,
                format!("a = {a}: {} exponents above -k", above.len()),
            );
        }
        worst = worst.max((above[0].exponent - c(quadratic_root(a, 3.0), 0.0)).norm());
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-8 && t < Duration::from_secs(1),
        format!(
            "max |lambda - oracle| = {worst:.2e}, {:.0} ms",
            t.as_secs_f64() * 1e3
        ),
    )
}

fn criterion2() -> Outcome {
    let cfg = config(
        r#"
        model = "memory1d"
        mode = "sweep"
        [parameters]
        a = [-2.0, 2.0, 21]
        s = [0.0, 20.0, 21]
        k = 3.0
        "#,
    );
    let r = run(&cfg, &RunOptions::default());
    let mut reported = 0;
    let mut min_re = f64::INFINITY;
    let mut filtered = 0;
    let mut filtered_ok = true;
    for row in &r.rows {
        if row.failed() {
            return outcome(false, format!("row {:?} failed", row.params));
        }
        for z in &row.eval.exponents {
            reported += 1;
            min_re = min_re.min(z.re);
        }
        for z in &row.eval.bound_filtered {
            filtered += 1;
            filtered_ok &= z.re <= -3.0;
        }
    }
    let meta: serde_json::Value = serde_json::from_str(&memflo::emit::metadata_json(&r)).unwrap();
    let logged: usize = meta["bound_filtered"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_array().unwrap().len())
        .sum();
    outcome(
        min_re > -3.0 && filtered_ok && logged == filtered,
        format!(
            "{} points, {reported} exponents, min Re = {min_re:.6}, {filtered} below-bound candidates filtered and logged",
            r.rows.len()
        ),
    )
}

fn criterion3() -> Outcome {
    let k = 3.0;
    let s_values: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
    let mut details = Vec::new();
    let mut ok = true;
    for a in [-2.0, 0.0, 2.0] {
        let m = Memory1DModel::new(a, k, 0.0).unwrap();
        let rows = model1d_convergence(&m, &s_values).unwrap();
        let linf = quadratic_root(a, k);
        let tail: Vec<_> = rows.iter().filter(|r| r.s >= 2.0).collect();
        let monotone = tail.windows(2).all(|w| w[1].abs_dev <= w[0].abs_dev);
        let last = rows.last().unwrap();
        let oracle_last = (last.lambda - c(linf, 0.0)).norm();
        // Envelope anchored at s = 2 with half the asymptotic rate.
        let rate = 0.5 * (k + linf);
        let anchor = tail[0];
        let envelope = tail.iter().all(|r| {
            r.abs_dev <= anchor.abs_dev * (-rate * (r.s - anchor.s)).exp() * (1.0 + 1e-9) + 1e-300
        });
        ok &= monotone && last.abs_dev < 1e-10 && oracle_last < 1e-10 && envelope;
        details.push(format!(
            "a={a}: |dev(20)|={:.1e} monotone={monotone} envelope={envelope}",
            last.abs_dev
        ));
    }
    outcome(ok, details.join("; "))
}

/// Real trigonometric polynomial: `(c_0, [(c_h, s_h)])`.
struct Trig {
    c0: f64,
    terms: Vec<(f64, f64)>,
}

impl Trig {
    fn random(rng: &mut ChaCha8Rng, degree: usize) -> Self {
        Self {
            c0: rng.random_range(-1.0..1.0),
            terms: (0..degree)
                .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        }
    }

    fn value(&self, w: f64, t: f64) -> f64 {
        self.c0
            + self
                .terms
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let h = (i + 1) as f64;
                    a * (h * w * t).cos() + b * (h * w * t).sin()
                })
                .sum::<f64>()
    }

    fn derivative(&self, w: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let h = (i + 1) as f64;
                h * w * (-a * (h * w * t).sin() + b * (h * w * t).cos())
            })
            .sum()
    }
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 4];
    for inst in 0..100 {
        let n = [2usize, 8, 32][inst % 3];
        let period = rng.random_range(0.5..5.0);
        let w = 2.0 * PI / period;
        let b = 2 * n + 1;
        let times: Vec<f64> = (0..b).map(|k| k as f64 * period / b as f64).collect();

        // Round trip and Parseval on arbitrary real samples (dim 2).
        let raw: Vec<Complex64> = (0..2 * b)
            .map(|_| c(rng.random_range(-1.0..1.0), 0.0))
            .collect();
        let x = TimeSamples::new(2, n, period, raw.clone()).unwrap();
        let a = dft(&x).unwrap();
        let back = idft(&a);
        let rt = back
            .samples()
            .iter()
            .zip(&raw)
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max);
        let energy_t: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>() / b as f64;
        let energy_f: f64 = a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        worst[0] = worst[0].max(rt);
        worst[1] = worst[1].max((energy_t - energy_f).abs() / energy_t.max(1.0));

        // Derivative of a band-limited signal.
        let f = Trig::random(&mut rng, n);
        let xs = TimeSamples::new(
            1,
            n,
            period,
            times.iter().map(|&t| c(f.value(w, t), 0.0)).collect(),
        )
        .unwrap();
        let d = idft(&differentiate(&dft(&xs).unwrap()));
        let scale = 1.0 + n as f64 * w;
        let derr = d
            .samples()
            .iter()
            .zip(&times)
            .map(|(z, &t)| (z - c(f.derivative(w, t), 0.0)).norm())
            .fold(0.0, f64::max);
        worst[2] = worst[2].max(derr / scale);

        // Toeplitz product: A(t) x(t) with both halves band-limited to n/2.
        let half = (n / 2).max(1);
        let (na, nx) = (half, n - half);
        let am: Vec<Trig> = (0..4).map(|_| Trig::random(&mut rng, na)).collect();
        let xv: Vec<Trig> = (0..2).map(|_| Trig::random(&mut rng, nx)).collect();
        let sample_vec = |fs: &[Trig]| -> Vec<Complex64> {
            fs.iter()
                .flat_map(|g| times.iter().map(move |&t| c(g.value(w, t), 0.0)))
                .collect()
        };
        let ah = dft(&TimeSamples::new(4, n, period, sample_vec(&am)).unwrap()).unwrap();
        let xh = dft(&TimeSamples::new(2, n, period, sample_vec(&xv)).unwrap()).unwrap();
        let y = idft(
            &ToeplitzMatrix::from_matrix_signal(2, 2, &ah)
                .unwrap()
                .apply(&xh)
                .unwrap(),
        );
        let mut perr: f64 = 0.0;
        for r in 0..2 {
            for (k, &t) in times.iter().enumerate() {
                let exact = am[2 * r].value(w, t) * xv[0].value(w, t)
                    + am[2 * r + 1].value(w, t) * xv[1].value(w, t);
                perr = perr.max((y.component(r)[k] - c(exact, 0.0)).norm());
            }
        }
        worst[3] = worst[3].max(perr);
    }
    let t = start.elapsed();
    let max = worst.iter().copied().fold(0.0, f64::max);
    outcome(
        max < 1e-10 && t < Duration::from_secs(5),
        format!(
            "round trip {:.1e}, Parseval {:.1e}, derivative {:.1e}, Toeplitz {:.1e}; {:.0} ms",
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            t.as_secs_f64() * 1e3
        ),
    )
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(m, m, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
    })
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_res: f64 = 0.0;
    let mut worst_det: f64 = 0.0;
    let mut worst_prod: f64 = 0.0;
    for inst in 0..50 {
        let m = 1 + inst % 8;
        let r = 1 + (inst / 8) % 3;
        let mut coeffs: Vec<CMatrix> = (0..r).map(|_| random_matrix(&mut rng, m, 1.0)).collect();
        coeffs.push(CMatrix::identity(m, m) + random_matrix(&mut rng, m, 0.2 / m as f64));
        let pep = Pep::new(coeffs.clone()).unwrap();
        let sol = solve_pep(&pep).unwrap();
        if sol.finite.len() != r * m || sol.infinite != 0 {
            return outcome(
                false,
                format!(
                    "m={m} r={r}: {} finite, {} infinite",
                    sol.finite.len(),
                    sol.infinite
                ),
            );
        }
        let eval = |z: Complex64| {
            let mut acc = coeffs[r].clone();
            for k in (0..r).rev() {
                acc = acc * z + &coeffs[k];
            }
            acc
        };
        let deval = |z: Complex64| {
            let mut acc = coeffs[r].clone() * c(r as f64, 0.0);
            for k in (1..r).rev() {
                acc = acc * z + &coeffs[k] * c(k as f64, 0.0);
            }
            acc
        };
        for p in &sol.finite {
            worst_res = worst_res.max(p.residual);
            // Newton on det P(z) with the Jacobi formula, started at the computed value.
            let mut z = p.value;
            for _ in 0..30 {
                let Some(inv) = eval(z).try_inverse() else {
                    break;
                };
                let step = (inv * deval(z)).trace().inv();
                z -= step;
                if step.norm() < 1e-15 * (1.0 + z.norm()) {
                    break;
                }
            }
            worst_det = worst_det.max((z - p.value).norm());
        }
        // det P(z) = det(P_r) * prod (z - lambda_i) at random probe points.
        for _ in 0..3 {
            let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let lhs = eval(z).determinant();
            let rhs = coeffs[r].clone().determinant()
                * sol
                    .finite
                    .iter()
                    .map(|p| z - p.value)
                    .product::<Complex64>();
            worst_prod = worst_prod.max((lhs - rhs).norm() / lhs.norm());
        }
    }
    outcome(
        worst_res < 1e-8 && worst_det < 1e-6 && worst_prod < 1e-6,
        format!("max residual {worst_res:.1e}, determinant Newton shift {worst_det:.1e}, product identity {worst_prod:.1e}"),
    )
}

/// RK4 monodromy of `Φ' = J(t) Φ` over one period.
fn monodromy<const N: usize>(
    period: f64,
    steps: usize,
    jac: impl Fn(f64) -> [[f64; N]; N],
) -> [[f64; N]; N] {
    let mut phi = [[0.0; N]; N];
    for (i, row) in phi.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let h = period / steps as f64;
    let mul = |j: &[[f64; N]; N], x: &[[f64; N]; N]| {
        let mut out = [[0.0; N]; N];
        for i in 0..N {
            for k in 0..N {
                out[i][k] = (0..N).map(|l| j[i][l] * x[l][k]).sum();
            }
        }
        out
    };
    let axpy = |x: &[[f64; N]; N], a: f64, y: &[[f64; N]; N]| {
        let mut out = *x;
        for i in 0..N {
            for k in 0..N {
                out[i][k] += a * y[i][k];
            }
        }
        out
    };
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = mul(&jac(t), &phi);
        let k2 = mul(&jac(t + 0.5 * h), &axpy(&phi, 0.5 * h, &k1));
        let k3 = mul(&jac(t + 0.5 * h), &axpy(&phi, 0.5 * h, &k2));
        let k4 = mul(&jac(t + h), &axpy(&phi, h, &k3));
        for i in 0..N {
            for k in 0..N {
                phi[i][k] += h / 6.0 * (k1[i][k] + 2.0 * k2[i][k] + 2.0 * k3[i][k] + k4[i][k]);
            }
        }
    }
    phi
}

/// Largest relative distance from each computed multiplier to the nearest oracle one.
fn match_multipliers(computed: &[Complex64], oracle: &[Complex64]) -> f64 {
    computed
        .iter()
        .map(|mu| {
            oracle
                .iter()
                .map(|o| (mu - o).norm() / o.norm().max(1e-300))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

const MATHIEU: (f64, f64, f64, f64) = (1.3, 0.6, 0.2, 2.0);

fn mathieu_problem(n: usize) -> FloquetProblem {
    let (delta, eps, damp, w) = MATHIEU;
    let sig = HarmonicVector::from_fn(4, n, w, |e, h| match (e, h) {
        (1, 0) => c(1.0, 0.0),
        (2, 0) => c(-delta, 0.0),
        (2, 1) | (2, -1) => c(-0.5 * eps, 0.0),
        (3, 0) => c(-damp, 0.0),
        _ => c(0.0, 0.0),
    });
    let jac = ToeplitzMatrix::from_matrix_signal(2, 2, &sig).unwrap();
    FloquetProblem::new(jac, None, 2.0 * PI / w).unwrap()
}

fn eig2(m: [[f64; 2]; 2]) -> Vec<Complex64> {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = c(tr * tr - 4.0 * det, 0.0).sqrt();
    vec![(c(tr, 0.0) + disc) * 0.5, (c(tr, 0.0) - disc) * 0.5]
}

/// Hand-written variational Jacobian of the memoryless particle.
fn particle_jacobian(m: &BrownianParticleModel, v: [f64; 2]) -> [[f64; 4]; 4] {
    let g = -m.alpha + m.beta * (v[0] * v[0] + v[1] * v[1]);
    let w = m.omega_bar;
    let j = |a: usize, b: usize| (if a == b { g } else { 0.0 }) + 2.0 * m.beta * v[a] * v[b];
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-w[0] * w[0], 0.0, -j(0, 0), -j(0, 1)],
        [0.0, -w[1] * w[1], -j(1, 0), -j(1, 1)],
    ]
}

fn particle_oracle(m: &BrownianParticleModel, cycle: &LimitCycle) -> Vec<Complex64> {
    let phi = monodromy::<4>(cycle.period, 4000, |t| {
        let z = cycle.state_at(t);
        particle_jacobian(m, [z[2], z[3]])
    });
    let mat = Matrix4::from_fn(|i, j| phi[i][j]);
    mat.complex_eigenvalues().iter().copied().collect()
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let (delta, eps, damp, w) = MATHIEU;
    let p = mathieu_problem(16);
    let spectrum = solve_spectrum(&p, &SpectrumOptions::default()).unwrap();
    let oracle = eig2(monodromy::<2>(2.0 * PI / w, 4000, |t| {
        [[0.0, 1.0], [-(delta + eps * (w * t).cos()), -damp]]
    }));
    let mu: Vec<Complex64> = spectrum.pairs.iter().map(|p| p.multiplier).collect();
    let err_linear = match_multipliers(&mu, &oracle);
    let ok_linear = mu.len() == 2 && err_linear < 1e-6;

    let mut err_particle: f64 = 0.0;
    let mut ok_particle = true;
    for ratio in [1.0, 1.1] {
        let m =
            BrownianParticleModel::from_ratio(1.0, 1.0, 0.5, f64::INFINITY, 2.0, ratio).unwrap();
        let a = particle_spectrum(&m, 30, None).unwrap();
        let mu: Vec<Complex64> = a.spectrum.pairs.iter().map(|p| p.multiplier).collect();
        let e = match_multipliers(&mu, &particle_oracle(&m, &a.cycle));
        ok_particle &= mu.len() == 4 && e < 1e-3;
        err_particle = err_particle.max(e);
    }
    let t = start.elapsed();
    outcome(
        ok_linear && ok_particle && t < Duration::from_secs(30),
        format!(
            "forced linear rel err {err_linear:.1e}, memoryless particle rel err {err_particle:.1e}, {:.1} s",
            t.as_secs_f64()
        ),
    )
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let m = BrownianParticleModel::from_ratio(1.0, 1.0, 0.5, 1.0, 2.0, 1.0).unwrap();
    let a = match particle_spectrum(&m, 30, None) {
        Ok(a) => a,
        Err(e) => return outcome(false, format!("reference point failed: {e}")),
    };
    let omega0 = 2.0 * PI / a.cycle.period;
    let trivial = a
        .spectrum
        .trivial
        .map(|i| a.spectrum.pairs[i].exponent.norm());
    let min_re = a
        .spectrum
        .pairs
        .iter()
        .map(|p| p.exponent.re)
        .fold(f64::INFINITY, f64::min);
    let point_ok = a.in_tongue()
        && a.cycle.residual < 1e-8
        && a.spectrum.class_count() == 6
        && trivial.is_some_and(|t| t < 1e-4 * omega0)
        && min_re > -1.0;

    // A tongue around ratio 1: locked at 1, not locked well away from it.
    let outside: Vec<bool> = [0.77, 1.3]
        .iter()
        .map(|&r| {
            let m = BrownianParticleModel::from_ratio(1.0, 1.0, 0.5, 1.0, 2.0, r).unwrap();
            particle_spectrum(&m, 30, None).map_or(true, |a| !a.in_tongue())
        })
        .collect();

    let mut boundaries = Vec::new();
    for k in [1.0, 3.0, 10.0, 100.0] {
        let cfg = config(&format!(
            r#"
            model = "particle"
            mode = "boundary_bisect"
            n_harmonics = 6
            [parameters]
            alpha = [0.001, 1.0, 11]
            k = {k}
            "#
        ));
        boundaries.push(
            run(&cfg, &RunOptions::default())
                .boundary
                .and_then(|b| b.value),
        );
    }
    let trend = boundaries
        .windows(2)
        .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b < a));
    let t = start.elapsed();
    let fmt: Vec<String> = boundaries
        .iter()
        .map(|b| b.map_or("none".into(), |v| format!("{v:.4}")))
        .collect();
    outcome(
        point_ok && outside.iter().all(|&o| o) && trend && t < Duration::from_secs(600),
        format!(
            "reference point: {} classes, residual {:.1e}, |trivial| {:.1e}, min Re {min_re:.4}, {}; off-ratio unlocked {outside:?}; boundary alpha(k=1,3,10,100) = [{}]; {:.1} s",
            a.spectrum.class_count(),
            a.cycle.residual,
            trivial.unwrap_or(f64::NAN),
            a.spectrum.stability.as_str(),
            fmt.join(", "),
            t.as_secs_f64()
        ),
    )
}

fn criterion8() -> Outcome {
    let cfg = config(
        r#"
        model = "tl"
        mode = "boundary_bisect"
        [parameters]
        ra = [-1.55, -0.05, 8]
        r = 1.0
        z0 = 1.0
        tau_f = 1.0
        "#,
    );
    let boundary = run(&cfg, &RunOptions::default())
        .boundary
        .and_then(|b| b.value);
    let bis_err = boundary.map_or(f64::INFINITY, |b| (b + 1.0).abs());

    let short = tl_spectrum(&TlResonatorModel::new(1.0, -1.0, 1.0, 1.0).unwrap(), 9).unwrap();
    let mut upper: Vec<Complex64> = short
        .pairs
        .iter()
        .map(|p| p.exponent)
        .filter(|z| z.im >= 0.0)
        .collect();
    upper.sort_by(|a, b| a.im.total_cmp(&b.im));
    let short_err = (0..5)
        .map(|k| {
            upper.get(k).map_or(f64::INFINITY, |z| {
                (z - c(0.0, 2.0 * PI * k as f64 / 2.0)).norm()
            })
        })
        .fold(0.0, f64::max);

    let half = tl_spectrum(&TlResonatorModel::new(1.0, 2.0, 1.0, 1.0).unwrap(), 8).unwrap();
    let half_err = half
        .pairs
        .iter()
        .map(|p| (p.exponent.re - 0.5f64.ln() / 2.0).abs())
        .fold(0.0, f64::max);
    outcome(
        bis_err < 1e-6 && short_err < 1e-12 && half_err < 1e-12,
        format!(
            "boundary Ra = {:.12} (err {bis_err:.1e}); Gamma0=-1 roots err {short_err:.1e}; Gamma0=0.5 Re err {half_err:.1e}",
            boundary.unwrap_or(f64::NAN)
        ),
    )
}

fn criterion9() -> Outcome {
    let mut cases: Vec<(FloquetProblem, FloquetEigenpair)> = Vec::new();
    for a in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        for s in [f64::INFINITY, 1.0] {
            let m = Memory1DModel::new(a, 3.0, s).unwrap();
            let spectrum = model1d_exponent(&m).unwrap();
            let p = m.problem().unwrap();
            cases.extend(spectrum.pairs.into_iter().map(|e| (p.clone(), e)));
        }
    }
    let p = mathieu_problem(16);
    let spectrum = solve_spectrum(&p, &SpectrumOptions::default()).unwrap();
    cases.extend(spectrum.pairs.into_iter().map(|e| (p.clone(), e)));
    for k in [1.0, f64::INFINITY] {
        let m = BrownianParticleModel::from_ratio(1.0, 1.0, 0.5, k, 2.0, 1.0).unwrap();
        let a = particle_spectrum(&m, 30, None).unwrap();
        let p = particle_problem(&m, &a.cycle)
            .unwrap()
            .with_autonomous(true);
        cases.extend(a.spectrum.pairs.into_iter().map(|e| (p.clone(), e)));
    }

    let mut worst: f64 = 0.0;
    let mut merged_all = true;
    for (p, pair) in &cases {
        let shifted = pair.shifted(1, p.period());
        let res = p
            .residual_norm(shifted.exponent, &shifted.eigenvector)
            .unwrap();
        worst = worst.max(res);
        let canon =
            canonicalize_spectrum(vec![pair.clone(), shifted], p.period(), p.omega0(), false);
        merged_all &= canon.class_count() == 1;
    }
    outcome(
        cases.len() >= 20 && worst < 1e-8 && merged_all,
        format!(
            "{} eigenpairs, max shifted residual {worst:.1e}, all merged: {merged_all}",
            cases.len()
        ),
    )
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 9] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let o = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {n}: {} ({})",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
