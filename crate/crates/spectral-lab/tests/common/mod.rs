//! Shared fixtures for the integration suites.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use spectral_lab::bounds::AnalyticDisc;
use spectral_lab::config::RunConfig;
use spectral_lab::gn_geometry::SigmaPoint;
use spectral_lab::lifting::{degree_vector, NilpotentJordanForm};
use spectral_lab::matrix_core::{CMatrix, Polynomial};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn third_root_of_unity() -> C64 {
    C64::new(-0.5, 3f64.sqrt() / 2.0)
}

/// The 3x3 nilpotent with a single link at row 2, column 3.
pub fn one_link_nilpotent() -> CMatrix {
    let mut a = CMatrix::zeros(3);
    a[(1, 2)] = c(1.0, 0.0);
    a
}

/// diag(eps, j eps, j^2 eps) with j the primitive cube root of unity.
pub fn spread_diagonal(eps: f64) -> CMatrix {
    let j = third_root_of_unity();
    CMatrix::diagonal(&[c(eps, 0.0), j * eps, j * j * eps])
}

/// A point guaranteed inside the symmetrized polydisc: if the coefficient
/// l1-norm stays below 1, every root of the monic polynomial does too.
pub fn random_point_in_gn(n: usize, budget: f64, rng: &mut ChaCha20Rng) -> SigmaPoint {
    loop {
        let coords: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let l1: f64 = coords.iter().map(|z| z.norm()).sum();
        if l1 > 1e-6 {
            let scale = budget * rng.gen::<f64>() / l1;
            return SigmaPoint::new(coords.iter().map(|&z| z * scale).collect());
        }
    }
}

/// Random disc satisfying the vanishing orders of the form, with boundary
/// coefficient budget keeping it inside the domain.
pub fn random_admissible_disc(
    form: &NilpotentJordanForm,
    degree: usize,
    budget: f64,
    rng: &mut ChaCha20Rng,
) -> AnalyticDisc {
    let n = form.n();
    let d = degree_vector(form).0;
    let mut coords = Vec::with_capacity(n);
    let mut l1_total = 0.0;
    let mut raw: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &di in d.iter().take(n) {
        let mut coeffs = vec![C64::new(0.0, 0.0); degree + 1];
        for (k, slot) in coeffs.iter_mut().enumerate().take(degree + 1).skip(di) {
            let damp = 1.0 / (1 + k * k) as f64;
            *slot = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * damp;
        }
        l1_total += coeffs.iter().map(|z| z.norm()).sum::<f64>();
        raw.push(coeffs);
    }
    let scale = if l1_total > 0.0 { budget / l1_total } else { 0.0 };
    for coeffs in raw {
        coords.push(Polynomial::new(
            coeffs.iter().map(|&z| z * scale).collect(),
        ));
    }
    AnalyticDisc::new(coords, degree).unwrap()
}

/// Mild random conjugator: I plus a small perturbation, well conditioned.
pub fn random_conjugator(n: usize, spread: f64, rng: &mut ChaCha20Rng) -> CMatrix {
    let mut p = CMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] += C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * spread;
        }
    }
    p
}

/// A config sized for tests: fewer restarts, coarser circle grid.
pub fn fast_cfg() -> RunConfig {
    RunConfig {
        restarts: 4,
        grid: 1024,
        ..Default::default()
    }
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
