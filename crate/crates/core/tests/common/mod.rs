//! Reference computations written independently of the library code paths.
#![allow(dead_code)]

use num_complex::Complex64;
use tdsopt::model::{ModelParameters, REFERENCE_SAMPLES};

/// `G(s)` straight from the rational form, with `s = jω`, complex powers and
/// complex exponentials.
pub fn oracle_g(p: &ModelParameters, omega: f64) -> Complex64 {
    let s = Complex64::new(0.0, omega);
    let num = p.b0 + p.b0_tau * (-p.tau0 * s).exp();
    let den = s.powi(3) + p.a2 * s.powi(2) + p.a1 * s + p.a0 + p.a0_theta * (-p.theta * s).exp();
    num / den * (-p.tau * s).exp()
}

/// Sum of squared residuals over the 20 tabulated samples, term by term.
pub fn oracle_cost(p: &ModelParameters) -> f64 {
    let mut total = 0.0;
    for &(omega, a, b) in REFERENCE_SAMPLES.iter() {
        let g = oracle_g(p, omega);
        let residual = g - Complex64::new(a, b);
        total += residual.norm_sqr();
    }
    total
}

pub fn derived_vector() -> ModelParameters {
    ModelParameters::from_array([0.02, 0.01, 100.0, 50.0, 0.05, 0.001, 1e-5, 5e-6, 200.0]).unwrap()
}

pub fn feasible_vector() -> ModelParameters {
    ModelParameters::from_array([1.0, 0.5, 1.0, 1.0, 3.0, 3.0, 0.5, 0.3, 1.0]).unwrap()
}

/// A near-optimal fit of the tabulated data found by an external solver.
pub fn fitted_vector() -> ModelParameters {
    ModelParameters::from_array([
        1.831021579878911e-4,
        0.0322 * (0.012526529903017503 - 0.0067770895951932975) - 1.831021579878911e-4,
        320.362399116553,
        141.72447526423315,
        9.999999955657799,
        0.6546137586235465,
        0.012526529903017503,
        -0.0067770895951932975,
        147.7534709687734,
    ])
    .unwrap()
}

fn poly_magnitude(a2: f64, a1: f64, a0: f64, w: f64) -> f64 {
    let s = Complex64::new(0.0, w);
    (s * s * s + a2 * s * s + a1 * s + a0).norm()
}

/// `min |(jω)³ + a2(jω)² + a1(jω) + a0|` over ω = 0 and the given frequencies,
/// with the index of the minimising frequency (`None` for ω = 0).
pub fn grid_min_denominator(a2: f64, a1: f64, a0: f64, omegas: &[f64]) -> (f64, Option<usize>) {
    let mut best = (poly_magnitude(a2, a1, a0, 0.0), None);
    for (i, &w) in omegas.iter().enumerate() {
        let m = poly_magnitude(a2, a1, a0, w);
        if m < best.0 {
            best = (m, Some(i));
        }
    }
    best
}

/// Grid minimum followed by a 1001-point linear pass between the neighbours
/// of the best grid frequency.
pub fn refined_min_denominator(a2: f64, a1: f64, a0: f64, omegas: &[f64]) -> f64 {
    let (coarse, at) = grid_min_denominator(a2, a1, a0, omegas);
    let Some(i) = at else { return coarse };
    let lo = if i == 0 { 0.0 } else { omegas[i - 1] };
    let hi = omegas[(i + 1).min(omegas.len() - 1)];
    (0..=1000)
        .map(|j| poly_magnitude(a2, a1, a0, lo + (hi - lo) * j as f64 / 1000.0))
        .fold(coarse, f64::min)
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.log10(), hi.log10());
    (0..n).map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (n - 1) as f64)).collect()
}

/// Welford's single-pass mean and population variance.
pub fn welford(xs: &[f64]) -> (f64, f64) {
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &x) in xs.iter().enumerate() {
        let d = x - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (x - mean);
    }
    (mean, m2 / xs.len() as f64)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
