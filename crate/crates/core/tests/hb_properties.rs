use memflo_core::hb::{dft, differentiate, idft, TimeSamples, ToeplitzMatrix};
use memflo_core::{Complex64, HarmonicVector};
use proptest::prelude::*;

fn real_samples(dim: usize, n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(-10.0..10.0f64, dim * (2 * n + 1))
        .prop_map(|v| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
}

fn instance() -> impl Strategy<Value = (usize, usize, f64, Vec<Complex64>)> {
    (
        1usize..4,
        prop::sample::select(vec![1usize, 2, 5, 8, 16]),
        0.1..10.0f64,
    )
        .prop_flat_map(|(dim, n, period)| {
            real_samples(dim, n).prop_map(move |s| (dim, n, period, s))
        })
}

proptest! {
    #[test]
    fn dft_round_trip((dim, n, period, s) in instance()) {
        let a = dft(&TimeSamples::new(dim, n, period, s.clone()).unwrap()).unwrap();
        let back = idft(&a);
        for (p, q) in back.samples().iter().zip(&s) {
            prop_assert!((p - q).norm() < 1e-10 * (1.0 + q.norm()));
        }
    }

    #[test]
    fn real_signals_have_conjugate_symmetric_spectra((dim, n, period, s) in instance()) {
        let a = dft(&TimeSamples::new(dim, n, period, s).unwrap()).unwrap();
        prop_assert!(a.is_real(1e-10));
    }

    #[test]
    fn parseval((dim, n, period, s) in instance()) {
        let a = dft(&TimeSamples::new(dim, n, period, s.clone()).unwrap()).unwrap();
        let time: f64 = s.iter().map(|z| z.norm_sqr()).sum::<f64>() / (2 * n + 1) as f64;
        let freq: f64 = a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((time - freq).abs() < 1e-10 * (1.0 + time));
    }

    #[test]
    fn evaluate_reproduces_samples((dim, n, period, s) in instance()) {
        let x = TimeSamples::new(dim, n, period, s.clone()).unwrap();
        let a = dft(&x).unwrap();
        let times = x.times();
        for c in 0..dim {
            for (k, &t) in times.iter().enumerate() {
                prop_assert!((a.evaluate(c, t) - x.component(c)[k]).norm() < 1e-9 * (1.0 + s[c * (2 * n + 1) + k].norm()));
            }
        }
    }

    #[test]
    fn derivative_of_shifted_signal((dim, n, period, s) in instance(), m in -3i64..=3) {
        // d/dt commutes with the truncation-free part of a harmonic shift.
        let a = dft(&TimeSamples::new(dim, n, period, s).unwrap()).unwrap();
        let lhs = differentiate(&a.shift_harmonics(m));
        let rhs = differentiate(&a).shift_harmonics(m);
        let w = a.omega0();
        let nh = n as i64;
        for c in 0..dim {
            for h in -nh..=nh {
                if (h + m).abs() <= nh {
                    let expect = rhs.get(c, h) - Complex64::new(0.0, m as f64 * w) * a.get(c, h + m);
                    prop_assert!((lhs.get(c, h) - expect).norm() < 1e-9 * (1.0 + expect.norm()));
                }
            }
        }
    }

    #[test]
    fn constant_toeplitz_acts_pointwise(n in 1usize..10, vals in prop::collection::vec(-5.0..5.0f64, 4), x in prop::collection::vec(-5.0..5.0f64, 2)) {
        let t = ToeplitzMatrix::constant(2, 2, n, 1.0, &vals);
        let v = HarmonicVector::from_fn(2, n, 1.0, |c, h| Complex64::new(x[c] * (h as f64 + 0.5), 0.0));
        let y = t.apply(&v).unwrap();
        for h in -(n as i64)..=(n as i64) {
            for r in 0..2 {
                let expect = vals[2 * r] * v.get(0, h) + vals[2 * r + 1] * v.get(1, h);
                prop_assert!((y.get(r, h) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn toeplitz_dense_matches_apply(n in 1usize..6, seed in prop::collection::vec(-1.0..1.0f64, 4 * 13 * 2)) {
        let bw = n;
        let sig = HarmonicVector::from_fn(4, bw, 2.0, |c, h| {
            let i = c * (2 * bw + 1) + (h + bw as i64) as usize;
            Complex64::new(seed[2 * i % seed.len()], seed[(2 * i + 1) % seed.len()])
        });
        let t = ToeplitzMatrix::from_matrix_signal(2, 2, &sig).unwrap();
        let v = HarmonicVector::from_fn(2, n, 2.0, |c, h| Complex64::new(c as f64 + 1.0, h as f64));
        let y = t.apply(&v).unwrap();
        let dense = t.to_dense() * nalgebra::DVector::from_column_slice(v.amplitudes());
        for (a, b) in y.amplitudes().iter().zip(dense.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}
