//! Quick oracle suite behind `memflo selfcheck`.

use memflo_core::hb::{dft, idft, TimeSamples};
use memflo_core::models::{
    model1d_exponent, particle_spectrum, tl_spectrum, BrownianParticleModel, Memory1DModel,
    TlResonatorModel,
};
use memflo_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn memory1d_quadratic() -> Check {
    let mut worst: f64 = 0.0;
    for a in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let m = Memory1DModel::new(a, 3.0, f64::INFINITY).expect("valid model");
        let oracle = m.lambda_inf();
        match model1d_exponent(&m)
            .ok()
            .and_then(|s| s.dominant().map(|p| p.exponent))
        {
            Some(l) => worst = worst.max((l - Complex64::new(oracle, 0.0)).norm()),
            None => worst = f64::INFINITY,
        }
    }
    check(
        "memory1d quadratic root",
        worst < 1e-8,
        format!("max error {worst:.3e}"),
    )
}

fn hb_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples: Vec<Complex64> = (0..2 * 17)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
        .collect();
    let worst = TimeSamples::new(2, 8, 1.3, samples.clone())
        .and_then(|x| dft(&x))
        .map(|a| {
            idft(&a)
                .samples()
                .iter()
                .zip(&samples)
                .map(|(p, q)| (p - q).norm())
                .fold(0.0, f64::max)
        })
        .unwrap_or(f64::INFINITY);
    check(
        "HB dft/idft round trip",
        worst < 1e-10,
        format!("max error {worst:.3e}"),
    )
}

fn tl_short() -> Check {
    let m = TlResonatorModel::new(1.0, -1.0, 1.0, 1.0).expect("valid model");
    let worst = tl_spectrum(&m, 9)
        .map(|s| {
            let mut im: Vec<f64> = s
                .pairs
                .iter()
                .map(|p| p.exponent)
                .filter(|z| z.im >= 0.0)
                .map(|z| z.im)
                .collect();
            im.sort_by(f64::total_cmp);
            let re = s
                .pairs
                .iter()
                .map(|p| p.exponent.re.abs())
                .fold(0.0, f64::max);
            (0..5)
                .map(|k| {
                    (im.get(k).copied().unwrap_or(f64::NAN) - std::f64::consts::PI * k as f64).abs()
                })
                .fold(re, f64::max)
        })
        .unwrap_or(f64::INFINITY);
    check(
        "TL roots at Gamma0 = -1",
        worst < 1e-12,
        format!("max error {worst:.3e}"),
    )
}

fn particle_classes() -> Check {
    let m = BrownianParticleModel::from_ratio(1.0, 1.0, 0.5, 1.0, 2.0, 1.0).expect("valid model");
    match particle_spectrum(&m, 8, None) {
        Ok(a) => {
            let n = a.spectrum.class_count();
            let ok = a.in_tongue() && n == 6 && a.spectrum.trivial.is_some();
            check(
                "particle cycle has 6 classes",
                ok,
                format!("{n} classes, {}", a.spectrum.stability.as_str()),
            )
        }
        Err(e) => check("particle cycle has 6 classes", false, e.to_string()),
    }
}

pub fn run_selfcheck() -> Vec<Check> {
    vec![
        memory1d_quadratic(),
        hb_round_trip(),
        tl_short(),
        particle_classes(),
    ]
}
