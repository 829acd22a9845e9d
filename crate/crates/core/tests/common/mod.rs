//! Time-domain oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Classical RK4 of `y' = f(t, y)` from `t0` over `steps` steps of size `h`.
pub fn rk4(y: &mut [f64], t0: f64, h: f64, steps: usize, f: impl Fn(f64, &[f64], &mut [f64])) {
    let n = y.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        f(t, y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        f(t + h, &tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Eigenvalues of the monodromy matrix of `Φ' = J(t) Φ` over `[0, period]`.
pub fn monodromy_multipliers(
    n: usize,
    period: f64,
    steps: usize,
    jac: impl Fn(f64) -> Vec<f64>,
) -> Vec<Complex64> {
    let mut phi = vec![0.0; n * n];
    for i in 0..n {
        phi[i * n + i] = 1.0;
    }
    // Columns of Φ stacked; J row-major.
    rk4(&mut phi, 0.0, period / steps as f64, steps, |t, y, out| {
        let j = jac(t);
        for col in 0..n {
            for r in 0..n {
                out[col * n + r] = (0..n).map(|l| j[r * n + l] * y[col * n + l]).sum();
            }
        }
    });
    let m = DMatrix::from_fn(n, n, |r, col| phi[col * n + r]);
    m.complex_eigenvalues().iter().copied().collect()
}

/// Variational Jacobian (row-major) of the memoryless particle written out by hand.
pub fn memoryless_particle_jacobian(
    alpha: f64,
    beta: f64,
    omega_bar: [f64; 2],
    v: [f64; 2],
) -> Vec<f64> {
    let g = -alpha + beta * (v[0] * v[0] + v[1] * v[1]);
    let j = |a: usize, b: usize| (if a == b { g } else { 0.0 }) + 2.0 * beta * v[a] * v[b];
    vec![
        0.0,
        0.0,
        1.0,
        0.0, //
        0.0,
        0.0,
        0.0,
        1.0, //
        -omega_bar[0] * omega_bar[0],
        0.0,
        -j(0, 0),
        -j(0, 1), //
        0.0,
        -omega_bar[1] * omega_bar[1],
        -j(1, 0),
        -j(1, 1),
    ]
}

/// Relative distance from `z` to the closest entry of `set`.
pub fn nearest_rel(z: Complex64, set: &[Complex64]) -> f64 {
    set.iter()
        .map(|o| (z - o).norm() / o.norm().max(1e-300))
        .fold(f64::INFINITY, f64::min)
}
