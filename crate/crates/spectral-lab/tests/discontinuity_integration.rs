//! Integration checks for the perturbation constructions, the certificates
//! and the Lempert-vs-Green chain.

mod common;

use std::collections::BTreeSet;

use common::*;
use serde::Deserialize;
use spectral_lab::discontinuity::{
    build_perturbation, cyclic_approximants, discontinuity_certificate, example_5_1, example_5_2,
    green_vs_lempert_chain, verify_det_identity, PerturbationSpec,
};
use spectral_lab::error::Error;
use spectral_lab::matrix_core::{is_cyclic, CMatrix, C64};

fn spec(m: usize, j: &[usize], delta: f64) -> PerturbationSpec {
    PerturbationSpec::new(m, j.iter().copied().collect(), None, delta).unwrap()
}

#[test]
fn det_identity_with_remainder_block() {
    // The remainder block does not enter the top-block identity.
    let s = PerturbationSpec::new(
        3,
        [2].into_iter().collect::<BTreeSet<_>>(),
        Some(CMatrix::diagonal(&[c(0.5, 0.0)])),
        0.01,
    )
    .unwrap();
    assert!(verify_det_identity(&s).max_residual <= 1e-13);
    let (a, _, b) = build_perturbation(&s).unwrap();
    assert_eq!(a.n(), 4);
    assert_eq!(b[(3, 3)], c(0.5, 0.0));
}

#[test]
fn approximants_cyclic_up_to_one_hundred() {
    let bare = spec(3, &[2], 0.01);
    let embedded = PerturbationSpec::new(
        3,
        [2].into_iter().collect::<BTreeSet<_>>(),
        Some(CMatrix::diagonal(&[c(0.5, 0.0)])),
        0.01,
    )
    .unwrap();
    for s in [&bare, &embedded] {
        let (a, _, _) = build_perturbation(s).unwrap();
        for j in 1..=100u32 {
            let aj = cyclic_approximants(s, j);
            let dist = aj.sub(&a).norm_op();
            assert!((dist - 1.0 / j as f64).abs() < 1e-12, "j = {j}");
            if j % 7 == 1 {
                assert!(is_cyclic(&aj, 1e-7).unwrap(), "j = {j}");
            }
        }
    }
}

#[test]
fn certificate_smallest_block() {
    // m = 2, J empty: the lower bound is the branch max(delta, delta^2).
    let cfg = fast_cfg();
    let cert = discontinuity_certificate(&spec(2, &[], 0.05), &[10, 100], &cfg, false).unwrap();
    assert!(cert.conclusion);
    assert!((cert.lower.value - 0.05).abs() < 1e-12, "lower {}", cert.lower.value);
}

#[test]
fn certificate_survives_delta_shrink() {
    // Shrinking delta never flips a true conclusion back to false, down to
    // where the shrinking lower bound itself approaches the margin floor.
    let cfg = fast_cfg();
    for delta in [1e-2, 2e-3] {
        let cert =
            discontinuity_certificate(&spec(3, &[2], delta), &[10, 100], &cfg, false).unwrap();
        assert!(cert.conclusion, "delta = {delta}");
    }
}

#[test]
fn certificate_with_remainder_block() {
    let cfg = fast_cfg();
    let s = PerturbationSpec::new(
        3,
        [2].into_iter().collect::<BTreeSet<_>>(),
        Some(CMatrix::diagonal(&[c(0.5, 0.0)])),
        0.01,
    )
    .unwrap();
    let cert = discontinuity_certificate(&s, &[10], &cfg, true).unwrap();
    assert!(cert.conclusion);
    // The remainder block weakens nothing: the lower bound still reflects
    // the top-block structure (min-poly multiplicity 2 of the eigenvalue 0
    // with the remainder's pseudohyperbolic factors).
    assert!(cert.lower.value > 1e-4);
}

#[test]
fn example51_smaller_eps_still_certifies() {
    let cfg = fast_cfg();
    for eps in [0.1, 0.05, 0.025] {
        let cert = example_5_1(eps, &cfg).unwrap();
        assert!(cert.conclusion, "eps = {eps}");
        assert!((cert.lower.value - eps * eps).abs() < 1e-12);
    }
}

#[test]
fn example51_rejects_degenerate_eps() {
    let cfg = fast_cfg();
    assert!(matches!(
        example_5_1(0.0, &cfg),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        example_5_1(0.3, &cfg),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn example52_at_zero_collapses() {
    let cfg = fast_cfg();
    let report = example_5_2(c(0.0, 0.0), &cfg).unwrap();
    for bound in &report.bounds {
        assert!(bound.value.abs() <= 1e-9, "{} = {}", bound.name, bound.value);
    }
}

#[derive(Deserialize)]
struct GoldenWitness {
    a: CMatrix,
    mu: [f64; 2],
    alpha: [f64; 2],
    expected_lower_min: f64,
    expected_upper_max: f64,
    expected_gap_min: f64,
}

fn load_golden() -> GoldenWitness {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/green_witness.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn green_chain_golden_witness_is_conclusive() {
    let cfg = fast_cfg();
    let g = load_golden();
    let chain = green_vs_lempert_chain(
        &g.a,
        C64::new(g.mu[0], g.mu[1]),
        C64::new(g.alpha[0], g.alpha[1]),
        &cfg,
    )
    .unwrap();
    assert!(chain.conclusion);
    assert!(chain.lower.value >= g.expected_lower_min);
    assert!(chain.upper.value <= g.expected_upper_max);
    assert!(chain.gap >= g.expected_gap_min);
    assert!(chain.reduction_deviation <= 1e-12);
}

#[test]
fn green_chain_rejects_bad_inputs() {
    let cfg = fast_cfg();
    let g = load_golden();
    let mu = C64::new(0.0, 0.0);
    // Zero completion: the comparison matrix would be derogatory.
    assert!(matches!(
        green_vs_lempert_chain(&g.a, mu, C64::new(0.0, 0.0), &cfg),
        Err(Error::InvalidInput(_))
    ));
    // Scalar-like A: not cyclic.
    assert!(matches!(
        green_vs_lempert_chain(&CMatrix::zeros(3), mu, C64::new(0.1, 0.0), &cfg),
        Err(Error::NotCyclic(_))
    ));
    // Cyclic but a single eigenvalue: the hypothesis needs two. The triple
    // root only clusters at a coarser tolerance than the default.
    let mu2 = c(0.2, 0.0);
    let single = spectral_lab::matrix_core::companion(&spectral_lab::gn_geometry::SigmaPoint::new(
        vec![3.0 * mu2, 3.0 * mu2 * mu2, mu2 * mu2 * mu2],
    ));
    let coarse = spectral_lab::config::RunConfig {
        tol: 1e-4,
        ..fast_cfg()
    };
    assert!(matches!(
        green_vs_lempert_chain(&single, mu, C64::new(0.1, 0.0), &coarse),
        Err(Error::InvalidInput(_))
    ));
    // A demanding margin turns the same witness inconclusive, not wrong.
    let strict = spectral_lab::config::RunConfig {
        margin: 0.5,
        ..fast_cfg()
    };
    assert!(matches!(
        green_vs_lempert_chain(&g.a, mu, C64::new(0.1, 0.0), &strict),
        Err(Error::ChainInconclusive(_))
    ));
}

#[test]
fn certificate_failure_reports_diagnostics() {
    // A delta that pushes the perturbation out of the spectral ball can
    // never certify without auto-shrink; the failure carries diagnostics.
    let cfg = fast_cfg();
    let result = discontinuity_certificate(&spec(3, &[2], 1.5), &[10], &cfg, false);
    match result {
        Err(Error::CertificateFailed(msg)) => {
            assert!(msg.contains("delta"), "{msg}");
        }
        other => panic!("expected CertificateFailed, got {other:?}"),
    }
    // An unreachable margin reports the gap it did find.
    let strict = spectral_lab::config::RunConfig {
        margin: 0.9,
        ..fast_cfg()
    };
    let result = discontinuity_certificate(&spec(3, &[2], 0.01), &[10], &strict, false);
    match result {
        Err(Error::CertificateFailed(msg)) => {
            assert!(msg.contains("gap"), "{msg}");
        }
        other => panic!("expected CertificateFailed, got {other:?}"),
    }
}
