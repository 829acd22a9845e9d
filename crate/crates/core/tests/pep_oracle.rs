use memflo_core::floquet::{solve_pep, Pep};
use memflo_core::linalg::CMatrix;
use memflo_core::Complex64;
use proptest::prelude::*;

fn matrix(m: usize, vals: &[f64]) -> CMatrix {
    CMatrix::from_fn(m, m, |i, j| {
        let k = 2 * (i * m + j);
        Complex64::new(vals[k % vals.len()], vals[(k + 1) % vals.len()])
    })
}

fn eval(coeffs: &[CMatrix], z: Complex64) -> CMatrix {
    let mut acc = coeffs[coeffs.len() - 1].clone();
    for k in (0..coeffs.len() - 1).rev() {
        acc = acc * z + &coeffs[k];
    }
    acc
}

#[test]
fn random_quadratic_3x3_roots_zero_the_determinant() {
    let vals: Vec<f64> = (0..64)
        .map(|i| ((i * 37 % 23) as f64 / 11.0 - 1.0) * 0.9)
        .collect();
    let coeffs = vec![
        matrix(3, &vals[..18]),
        matrix(3, &vals[18..36]),
        CMatrix::identity(3, 3) + matrix(3, &vals[36..54]) * Complex64::new(0.1, 0.0),
    ];
    let sol = solve_pep(&Pep::new(coeffs.clone()).unwrap()).unwrap();
    assert_eq!(sol.finite.len(), 6);
    for p in &sol.finite {
        let d = eval(&coeffs, p.value).determinant().norm();
        // Scale by the determinant a unit step away so the check is relative.
        let scale = eval(&coeffs, p.value + Complex64::new(1.0, 0.0))
            .determinant()
            .norm();
        assert!(d < 1e-6 * scale.max(1.0), "det {d:e} at {}", p.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn companion_count_and_residuals(m in 1usize..6, r in 1usize..4, vals in prop::collection::vec(-1.0..1.0f64, 64)) {
        let mut coeffs: Vec<CMatrix> = (0..r).map(|k| matrix(m, &vals[k * 7..])).collect();
        coeffs.push(CMatrix::identity(m, m) + matrix(m, &vals[40..]) * Complex64::new(0.1 / m as f64, 0.0));
        let sol = solve_pep(&Pep::new(coeffs.clone()).unwrap()).unwrap();
        prop_assert_eq!(sol.finite.len(), r * m);
        prop_assert_eq!(sol.infinite, 0);
        for p in &sol.finite {
            prop_assert!(p.residual < 1e-8 * (1.0 + p.value.norm().powi(r as i32)));
        }
    }
}
