//! Property tests for the matrix primitives and the polydisc geometry.

mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use spectral_lab::gn_geometry::{
    in_gn, max_root_modulus, pseudo_hyperbolic, SigmaPoint,
};
use spectral_lab::matrix_core::{
    companion, in_spectral_ball, is_cyclic, mobius_matrix, mobius_scalar, sigma, spectral_data,
    CMatrix,
};

fn small_complex() -> impl Strategy<Value = (f64, f64)> {
    (-0.5f64..0.5, -0.5f64..0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sigma_is_conjugation_invariant(seed in 0u64..1000) {
        let mut rng = rng(seed);
        for n in 2..=5usize {
            let a = CMatrix::from_fn(n, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let p = random_conjugator(n, 0.4, &mut rng);
            let sv = p.singular_values();
            prop_assume!(sv[0] / sv[n - 1] <= 100.0);
            let conj = p.inverse().unwrap().mul(&a).mul(&p);
            let d = sigma(&conj).dist(&sigma(&a));
            prop_assert!(d <= 1e-8, "n = {n}, deviation {d}");
        }
    }

    #[test]
    fn companion_round_trips_sigma(seed in 0u64..1000) {
        let mut rng = rng(seed);
        for n in 1..=5usize {
            let s = random_point_in_gn(n, 0.8, &mut rng);
            let back = sigma(&companion(&s));
            prop_assert!(back.dist(&s) <= 1e-10);
        }
    }

    #[test]
    fn companions_are_cyclic(seed in 0u64..1000) {
        let mut rng = rng(seed);
        for n in 2..=4usize {
            let s = random_point_in_gn(n, 0.8, &mut rng);
            prop_assert!(is_cyclic(&companion(&s), 1e-7).unwrap());
        }
    }

    #[test]
    fn mobius_maps_spectrum_pointwise((lre, lim) in small_complex(), seed in 0u64..1000) {
        let lambda = c(lre, lim);
        prop_assume!(lambda.norm() < 0.6);
        let mut rng = rng(seed);
        let n = 3usize;
        // Distinct, well-separated eigenvalues keep the comparison honest.
        let eig: Vec<_> = (0..n)
            .map(|k| c(0.15 + 0.2 * k as f64, rng.gen::<f64>() * 0.2 - 0.1))
            .collect();
        let p = random_conjugator(n, 0.3, &mut rng);
        let m = p.inverse().unwrap().mul(&CMatrix::diagonal(&eig)).mul(&p);
        let out = mobius_matrix(lambda, &m).unwrap();
        let got = spectral_data(&out, 1e-6, None);
        prop_assume!(got.is_ok());
        let got = got.unwrap();
        for e in &got.eigen {
            let matched = eig
                .iter()
                .any(|&mu| (mobius_scalar(lambda, mu) - e.value).norm() <= 1e-8);
            prop_assert!(matched, "unmatched eigenvalue {}", e.value);
        }
    }

    #[test]
    fn multiplicity_consistency_on_jordan_forms(seed in 0u64..1000) {
        let mut rng = rng(seed);
        // Random Jordan structure at a random eigenvalue, mildly conjugated.
        let n = 4usize;
        let lambda = c(rng.gen::<f64>() * 0.6 - 0.3, rng.gen::<f64>() * 0.6 - 0.3);
        let mut j = CMatrix::identity(n).scale(lambda);
        let mut links = 0;
        for i in 0..n - 1 {
            if rng.gen::<bool>() {
                j[(i, i + 1)] = c(1.0, 0.0);
                links += 1;
            }
        }
        let _ = links;
        let p = random_conjugator(n, 0.2, &mut rng);
        let a = p.inverse().unwrap().mul(&j).mul(&p);
        let hint = spectral_lab::matrix_core::ClusterHint(vec![(lambda, n)]);
        let sd = spectral_data(&a, 1e-7, Some(&hint)).unwrap();
        let mut alg_total = 0;
        for e in &sd.eigen {
            alg_total += e.alg_mult;
            prop_assert!(e.geo_mult >= 1 && e.geo_mult <= e.alg_mult);
            prop_assert!(e.min_mult >= 1 && e.min_mult <= e.alg_mult);
            prop_assert_eq!(e.min_mult == e.alg_mult, e.geo_mult == 1);
        }
        prop_assert_eq!(alg_total, n);
    }

    #[test]
    fn pseudo_hyperbolic_properties((are, aim) in small_complex(), (bre, bim) in small_complex(), (cre, cim) in small_complex()) {
        let (a, b, m) = (c(are, aim), c(bre, bim), c(cre, cim));
        let d = pseudo_hyperbolic(a, b);
        prop_assert!((0.0..1.0).contains(&d));
        prop_assert!((d - pseudo_hyperbolic(b, a)).abs() < 1e-15);
        prop_assert_eq!(d == 0.0, a == b);
        let ma = (m - a) / (c(1.0, 0.0) - m.conj() * a);
        let mb = (m - b) / (c(1.0, 0.0) - m.conj() * b);
        prop_assert!((pseudo_hyperbolic(ma, mb) - d).abs() <= 1e-12);
    }

    #[test]
    fn gn_membership_matches_spectral_ball(seed in 0u64..1000) {
        let mut rng = rng(seed);
        for n in 2..=4usize {
            let mut a = CMatrix::from_fn(n, |_, _| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            // Keep the spectral radius away from the boundary on both sides.
            let r = max_root_modulus(&sigma(&a)).unwrap();
            prop_assume!(r > 1e-3);
            let target = if rng.gen::<bool>() { 0.6 } else { 1.7 };
            a = a.scale(c(target / r, 0.0));
            let lhs = in_gn(&sigma(&a), 0.0).unwrap();
            let rhs = in_spectral_ball(&a, 0.0).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn caratheodory_is_symmetric_within_grid() {
    let mut r = rng(11);
    for _ in 0..5 {
        let s = random_point_in_gn(3, 0.5, &mut r);
        let t = random_point_in_gn(3, 0.5, &mut r);
        let st = spectral_lab::gn_geometry::caratheodory_lb_g3(&s, &t, 512).unwrap();
        let ts = spectral_lab::gn_geometry::caratheodory_lb_g3(&t, &s, 512).unwrap();
        // Grid resolution: adjacent nodes differ by O(1/grid).
        assert!((st - ts).abs() < 1e-4, "{st} vs {ts}");
    }
}

#[test]
fn sigma_point_norm_is_euclidean() {
    let s = SigmaPoint::new(vec![c(3.0, 0.0), c(0.0, 4.0)]);
    assert_eq!(s.norm(), 5.0);
}
