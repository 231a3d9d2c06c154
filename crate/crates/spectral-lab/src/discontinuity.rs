//! Constructions and counterexamples around discontinuity of the Lempert
//! function: the block perturbation with its determinant identity, cyclic
//! approximants, numeric discontinuity certificates, the two worked
//! dimension-3 examples, and the Lempert-vs-Green strict inequality chain.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bounds::bharali::bharali_lower_with_hints;
use crate::bounds::disc::AnalyticDisc;
use crate::bounds::report::{
    lift_upper_cyclic_with_hints, sandwich_report_with_hints, BoundReport,
};
use crate::bounds::search::disc_search_upper;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::gn_geometry::{ball_radius_in_gn_cached, SigmaPoint};
use crate::matrix_core::matrix::{C64, CMatrix};
use crate::matrix_core::poly::Polynomial;
use crate::matrix_core::spectral::{
    char_poly, in_spectral_ball, is_cyclic_with_opt_hint, sigma, spectral_data, spectral_radius,
    ClusterHint,
};

/// The nilpotent-block perturbation: an m-by-m nilpotent A0 whose
/// superdiagonal carries ones exactly on J, an invertible remainder block
/// A1, and the rank-completing direction X scaled by delta.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    m: usize,
    j_set: BTreeSet<usize>,
    a1: Option<CMatrix>,
    delta: f64,
}

impl PerturbationSpec {
    /// Validates the combinatorics: J inside [2..m] with #J <= m-2, delta
    /// positive, and A1 (when present) invertible inside the spectral ball.
    pub fn new(
        m: usize,
        j_set: BTreeSet<usize>,
        a1: Option<CMatrix>,
        delta: f64,
    ) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput("block size m must be at least 2".into()));
        }
        if j_set.iter().any(|&j| j < 2 || j > m) {
            return Err(Error::InvalidInput("J must lie inside [2..m]".into()));
        }
        if j_set.len() > m - 2 {
            return Err(Error::InvalidInput(
                "J must leave the block derogatory: #J <= m-2".into(),
            ));
        }
        if delta <= 0.0 {
            return Err(Error::InvalidInput("delta must be positive".into()));
        }
        if let Some(a1) = &a1 {
            let roots = char_poly(a1).roots(1e-10)?;
            if roots.iter().any(|r| r.norm() >= 1.0) {
                return Err(Error::InvalidInput(
                    "remainder block must lie in the spectral ball".into(),
                ));
            }
            if roots.iter().any(|r| r.norm() < 1e-9) {
                return Err(Error::InvalidInput(
                    "remainder block must not have the eigenvalue 0".into(),
                ));
            }
        }
        Ok(PerturbationSpec {
            m,
            j_set,
            a1,
            delta,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.m + self.a1.as_ref().map_or(0, |a| a.n())
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.m, self.j_set.clone(), self.a1.clone(), delta)
    }

    /// Rank of the nilpotent block.
    pub fn rank(&self) -> usize {
        self.j_set.len()
    }

    /// Multiplicity of 0 in the minimal polynomial of the nilpotent block:
    /// one more than the longest run of consecutive superdiagonal ones.
    pub fn min_mult(&self) -> usize {
        let mut best = 0usize;
        let mut run = 0usize;
        let mut prev: Option<usize> = None;
        for &j in &self.j_set {
            run = match prev {
                Some(p) if j == p + 1 => run + 1,
                _ => 1,
            };
            best = best.max(run);
            prev = Some(j);
        }
        best + 1
    }

    /// The nilpotent block A0.
    pub fn a0(&self) -> CMatrix {
        let mut a0 = CMatrix::zeros(self.m);
        for &j in &self.j_set {
            a0[(j - 2, j - 1)] = C64::new(1.0, 0.0);
        }
        a0
    }

    /// The perturbation direction X0: minus-ones on the vacant
    /// superdiagonal slots and a one in the corner.
    pub fn x0(&self) -> CMatrix {
        let mut x0 = CMatrix::zeros(self.m);
        for j in 2..=self.m {
            if !self.j_set.contains(&j) {
                x0[(j - 2, j - 1)] = C64::new(-1.0, 0.0);
            }
        }
        x0[(self.m - 1, 0)] = C64::new(1.0, 0.0);
        x0
    }

    fn embed(&self, top: &CMatrix) -> CMatrix {
        let n = self.n();
        let mut out = CMatrix::zeros(n);
        for i in 0..self.m {
            for j in 0..self.m {
                out[(i, j)] = top[(i, j)];
            }
        }
        if let Some(a1) = &self.a1 {
            for i in 0..a1.n() {
                for j in 0..a1.n() {
                    out[(self.m + i, self.m + j)] = a1[(i, j)];
                }
            }
        }
        out
    }

    /// Declared spectrum of A = blockdiag(A0, A1).
    fn hint_a(&self, tol: f64) -> Result<ClusterHint> {
        let mut entries = vec![(C64::new(0.0, 0.0), self.m)];
        if let Some(a1) = &self.a1 {
            let sd = spectral_data(a1, tol, None)?;
            entries.extend(sd.eigen.iter().map(|e| (e.value, e.alg_mult)));
        }
        Ok(ClusterHint(entries))
    }

    /// Declared spectrum of B = A + delta X: the m distinct roots of the
    /// perturbed block plus the spectrum of A1.
    fn hint_b(&self, tol: f64) -> Result<ClusterHint> {
        let b0 = self.a0().add(&self.x0().scale(C64::new(self.delta, 0.0)));
        let roots = char_poly(&b0).roots(1e-12)?;
        let mut entries: Vec<(C64, usize)> = roots.iter().map(|&r| (r, 1)).collect();
        if let Some(a1) = &self.a1 {
            let sd = spectral_data(a1, tol, None)?;
            entries.extend(sd.eigen.iter().map(|e| (e.value, e.alg_mult)));
        }
        Ok(ClusterHint(entries))
    }
}

/// Assembles (A, X, B = A + delta X). Fails with `OutsideBall` when the
/// perturbed matrix leaves the spectral ball.
pub fn build_perturbation(spec: &PerturbationSpec) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let a = spec.embed(&spec.a0());
    let x = spec.embed(&spec.x0()).sub(&spec.embed(&CMatrix::zeros(spec.m)));
    let b = a.add(&x.scale(C64::new(spec.delta, 0.0)));
    let r = spectral_radius(&b, 1e-12)?;
    if r >= 1.0 {
        return Err(Error::OutsideBall {
            norm: r,
            radius: 1.0,
        });
    }
    Ok((a, x, b))
}

/// Residual of the closed-form symmetric functions of the perturbed block:
/// the first m-1 must vanish and the last must have modulus delta^{m-r}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DetIdentityReport {
    pub max_residual: f64,
    /// Observed sign of sigma_m relative to delta^{m-r}; the paper's two
    /// displays disagree on it, so it is recorded, not asserted.
    pub observed_sign: f64,
}

pub fn verify_det_identity(spec: &PerturbationSpec) -> DetIdentityReport {
    let b0 = spec.a0().add(&spec.x0().scale(C64::new(spec.delta, 0.0)));
    let s = sigma(&b0);
    let m = spec.m;
    let want = spec.delta.powi((m - spec.rank()) as i32);
    let mut max_residual = 0.0f64;
    for j in 0..m - 1 {
        max_residual = max_residual.max(s.coords()[j].norm());
    }
    let last = s.coords()[m - 1];
    max_residual = max_residual.max((last.norm() - want).abs());
    let observed_sign = if last.norm() > 0.0 {
        (last / want).re.signum()
    } else {
        0.0
    };
    DetIdentityReport {
        max_residual,
        observed_sign,
    }
}

/// The cyclic approximant: every vacant superdiagonal slot of the nilpotent
/// block filled with 1/j, making it a single chain, block-diagonal with the
/// remainder. The distance to A is exactly 1/j in operator norm.
pub fn cyclic_approximants(spec: &PerturbationSpec, j: u32) -> CMatrix {
    assert!(j >= 1, "approximant index must be positive");
    let mut a0 = spec.a0();
    for col in 2..=spec.m {
        if !spec.j_set.contains(&col) {
            a0[(col - 2, col - 1)] = C64::new(1.0 / j as f64, 0.0);
        }
    }
    spec.embed(&a0)
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodValue {
    pub method: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    pub method: String,
    pub value: f64,
}

/// A discontinuity certificate: a certified lower bound at the limit pair
/// strictly above certified upper bounds along a family of approximants.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub pair: String,
    pub delta: f64,
    pub lower: MethodValue,
    pub uppers: Vec<UpperEntry>,
    pub conclusion: bool,
    pub margin: f64,
    pub gap: f64,
}

impl Certificate {
    fn conclude(mut self, margin: f64) -> Result<Certificate> {
        let max_upper = self
            .uppers
            .iter()
            .map(|u| u.value)
            .fold(f64::NEG_INFINITY, f64::max);
        self.gap = self.lower.value - max_upper;
        self.margin = margin;
        self.conclusion = self.gap >= margin;
        Ok(self)
    }
}

/// Builds the two disc witnesses through (0, target) used by the
/// certificates: the safe-ball line and the searched disc.
fn origin_disc_candidates(
    target: &SigmaPoint,
    cfg: &RunConfig,
) -> Result<Vec<(String, f64, AnalyticDisc)>> {
    let m = target.n();
    let mut candidates = Vec::new();
    let r_safe = ball_radius_in_gn_cached(m, cfg.directions, cfg.seed);
    if target.norm() < r_safe {
        let alpha = target.norm() / r_safe;
        if alpha > 0.0 && alpha < 1.0 {
            let coords: Vec<Polynomial> = target
                .coords()
                .iter()
                .map(|&t| Polynomial::monomial(t / alpha, 1))
                .collect();
            let disc = AnalyticDisc::new(coords, cfg.degree_for(m))?;
            candidates.push(("ball".to_string(), alpha, disc));
        }
    }
    match disc_search_upper(&SigmaPoint::origin(m), target, cfg) {
        Ok((alpha, disc)) => candidates.push(("disc_search".to_string(), alpha, disc)),
        Err(Error::NoFeasibleDisc(_)) if !candidates.is_empty() => {}
        Err(e) => return Err(e),
    }
    Ok(candidates)
}

/// Runs the full discontinuity certificate for the perturbation: the
/// spectral lower bound at (A, B) against transfer upper bounds at the
/// cyclic approximants (A^j, B), optionally halving delta (up to 20 times)
/// until the strict gap appears.
pub fn discontinuity_certificate(
    spec: &PerturbationSpec,
    j_list: &[u32],
    cfg: &RunConfig,
    auto_shrink: bool,
) -> Result<Certificate> {
    cfg.validate()?;
    if j_list.is_empty() {
        return Err(Error::InvalidInput("need at least one approximant index".into()));
    }
    let margin = cfg.margin.max(1e-4);
    let mut current = spec.clone();
    let mut last_failure = String::new();
    let attempts = if auto_shrink { 20 } else { 1 };
    for _ in 0..attempts {
        match certificate_once(&current, j_list, cfg, margin) {
            Ok(cert) if cert.conclusion => return Ok(cert),
            Ok(cert) => {
                last_failure = format!(
                    "gap {:.3e} below margin {margin:.1e} at delta {:.3e}",
                    cert.gap,
                    current.delta()
                );
            }
            Err(Error::OutsideBall { .. }) => {
                last_failure = format!("delta {:.3e} leaves the spectral ball", current.delta());
            }
            Err(e) => return Err(e),
        }
        if !auto_shrink {
            break;
        }
        current = current.with_delta(current.delta() / 2.0)?;
    }
    Err(Error::CertificateFailed(last_failure))
}

fn certificate_once(
    spec: &PerturbationSpec,
    j_list: &[u32],
    cfg: &RunConfig,
    margin: f64,
) -> Result<Certificate> {
    let (a, _x, b) = build_perturbation(spec)?;
    let hint_a = spec.hint_a(cfg.tol)?;
    let hint_b = spec.hint_b(cfg.tol)?;
    let lower = bharali_lower_with_hints(&a, &b, cfg.tol, Some(&hint_a), Some(&hint_b))?;

    let b0 = spec.a0().add(&spec.x0().scale(C64::new(spec.delta, 0.0)));
    let t0 = sigma(&b0);
    let hint_b0 = ClusterHint(
        char_poly(&b0)
            .roots(1e-12)?
            .iter()
            .map(|&r| (r, 1))
            .collect(),
    );
    let hint_a0j = ClusterHint(vec![(C64::new(0.0, 0.0), spec.m)]);
    let candidates = origin_disc_candidates(&t0, cfg)?;
    if candidates.is_empty() {
        return Err(Error::CertificateFailed(format!(
            "no upper-bound witness reachable at delta {:.3e}",
            spec.delta
        )));
    }

    let mut uppers = Vec::new();
    for &j in j_list {
        let a0j_full = cyclic_approximants(spec, j);
        // Only the top block matters for the transfer bound.
        let mut a0j = CMatrix::zeros(spec.m);
        for r in 0..spec.m {
            for c in 0..spec.m {
                a0j[(r, c)] = a0j_full[(r, c)];
            }
        }
        let mut best: Option<(String, f64)> = None;
        for (method, alpha, disc) in &candidates {
            let bound = lift_upper_cyclic_with_hints(
                &a0j,
                &b0,
                disc,
                *alpha,
                cfg.tol,
                Some(&hint_a0j),
                Some(&hint_b0),
            )?;
            if best.as_ref().is_none_or(|(_, b)| bound < *b) {
                best = Some((format!("{method}+lift"), bound));
            }
        }
        let (method, value) = best.unwrap();
        uppers.push(UpperEntry {
            j: Some(j),
            method,
            value,
        });
    }

    Certificate {
        pair: format!(
            "m={} J={:?} delta={:.6e} n={}",
            spec.m,
            spec.j_set.iter().collect::<Vec<_>>(),
            spec.delta,
            spec.n()
        ),
        delta: spec.delta,
        lower: MethodValue {
            method: "bharali".into(),
            value: lower,
        },
        uppers,
        conclusion: false,
        margin,
        gap: 0.0,
    }
    .conclude(margin)
}

/// First worked example: the one-link nilpotent against the spread
/// diagonal with eigenvalues eps, j eps, j^2 eps. The lower bound is
/// exactly eps^2; the upper bounds at the approximants scale like eps^3.
pub fn example_5_1(eps: f64, cfg: &RunConfig) -> Result<Certificate> {
    if !(eps > 0.0 && eps <= 0.2) {
        return Err(Error::InvalidInput("eps must lie in (0, 0.2]".into()));
    }
    cfg.validate()?;
    let margin = cfg.margin.max(1e-4);
    let mut a = CMatrix::zeros(3);
    a[(1, 2)] = C64::new(1.0, 0.0);
    let j = C64::new(-0.5, 3f64.sqrt() / 2.0);
    let b = CMatrix::diagonal(&[C64::new(eps, 0.0), j * eps, j * j * eps]);
    let hint_a = ClusterHint(vec![(C64::new(0.0, 0.0), 3)]);
    let hint_b = ClusterHint(vec![
        (C64::new(eps, 0.0), 1),
        (j * eps, 1),
        (j * j * eps, 1),
    ]);
    let lower = bharali_lower_with_hints(&a, &b, cfg.tol, Some(&hint_a), Some(&hint_b))?;

    let t = sigma(&b);
    let candidates = origin_disc_candidates(&t, cfg)?;
    if candidates.is_empty() {
        return Err(Error::CertificateFailed(
            "eps too large for the safe-ball witness".into(),
        ));
    }
    let mut uppers = Vec::new();
    for jj in [10u32, 100] {
        let mut aj = a.clone();
        aj[(0, 1)] = C64::new(1.0 / jj as f64, 0.0);
        let mut best: Option<(String, f64)> = None;
        for (method, alpha, disc) in &candidates {
            let bound = lift_upper_cyclic_with_hints(
                &aj,
                &b,
                disc,
                *alpha,
                cfg.tol,
                Some(&hint_a),
                Some(&hint_b),
            )?;
            if best.as_ref().is_none_or(|(_, b)| bound < *b) {
                best = Some((format!("{method}+lift"), bound));
            }
        }
        let (method, value) = best.unwrap();
        uppers.push(UpperEntry {
            j: Some(jj),
            method,
            value,
        });
    }
    Certificate {
        pair: format!("one-link nilpotent vs spread diagonal, eps={eps}"),
        delta: eps,
        lower: MethodValue {
            method: "bharali".into(),
            value: lower,
        },
        uppers,
        conclusion: false,
        margin,
        gap: 0.0,
    }
    .conclude(margin)
}

/// Second worked example: all eigenvalues of B equal to mu. The polydisc
/// bounds close onto |mu| from both sides.
pub fn example_5_2(mu: C64, cfg: &RunConfig) -> Result<BoundReport> {
    if mu.norm() >= 1.0 {
        return Err(Error::InvalidInput("mu must lie in the unit disc".into()));
    }
    let mut a = CMatrix::zeros(3);
    a[(1, 2)] = C64::new(1.0, 0.0);
    let mut b = CMatrix::diagonal(&[mu, mu, mu]);
    b[(0, 1)] = C64::new(1.0, 0.0);
    b[(1, 2)] = C64::new(1.0, 0.0);
    let hint_a = ClusterHint(vec![(C64::new(0.0, 0.0), 3)]);
    let hint_b = ClusterHint(vec![(mu, 3)]);
    sandwich_report_with_hints(&a, &b, cfg, Some(&hint_a), Some(&hint_b))
}

/// Diagonal matrix of the eigenvalues repeated by algebraic multiplicity,
/// in the canonical (re, im) order: the Green function of the spectral
/// ball only sees this reduction of its second argument.
///
/// A p-fold root is only computable to the p-th root of the rounding
/// noise, but the centroid of its root cluster is first-order accurate, so
/// roots are clustered at the noise radius and each cluster contributes
/// its centroid with the cluster size as multiplicity.
pub fn green_reduction(b: &CMatrix) -> Result<CMatrix> {
    let n = b.n();
    let p = char_poly(b);
    let roots = p.roots(3e-12)?;
    let noise_radius = 3.0 * 1e-13f64.powf(1.0 / n as f64);
    let mut remaining = roots;
    let mut out: Vec<C64> = Vec::with_capacity(n);
    while let Some(seed) = remaining.pop() {
        let mut cluster = vec![seed];
        let mut grew = true;
        while grew {
            grew = false;
            remaining.retain(|&r| {
                if cluster.iter().any(|&c| (c - r).norm() <= noise_radius) {
                    cluster.push(r);
                    grew = true;
                    false
                } else {
                    true
                }
            });
        }
        let mut centroid = cluster.iter().sum::<C64>() / cluster.len() as f64;
        if cluster.len() > 1 {
            // A p-fold eigenvalue is a simple root of the (p-1)-th
            // derivative: Newton-polish the centroid there.
            let mut q = p.clone();
            for _ in 1..cluster.len() {
                q = q.derivative();
            }
            for _ in 0..20 {
                let (val, der) = q.eval_with_derivative(centroid);
                if der.norm() == 0.0 {
                    break;
                }
                let step = val / der;
                centroid -= step;
                if step.norm() < 1e-16 * (1.0 + centroid.norm()) {
                    break;
                }
            }
        }
        out.extend(std::iter::repeat_n(centroid, cluster.len()));
    }
    out.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(CMatrix::diagonal(&out))
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainLink {
    pub name: String,
    pub relation: String,
    pub value: f64,
}

/// The certified chain separating the Lempert and Green functions.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub pair: String,
    pub links: Vec<ChainLink>,
    pub lower: MethodValue,
    pub upper: MethodValue,
    pub reduction_deviation: f64,
    pub conclusion: bool,
    pub margin: f64,
    pub gap: f64,
}

/// Certifies l(A, B_0) > g(A, B_0) for B_0 = mu I: the Green function
/// cannot distinguish B_0 from its cyclic superdiagonal completion B_alpha,
/// the Lempert value at (A, B_alpha) drops to the polydisc level by
/// cyclicity, and the spectral lower bound at (A, B_0) sits strictly above
/// it.
pub fn green_vs_lempert_chain(
    a: &CMatrix,
    mu: C64,
    alpha: C64,
    cfg: &RunConfig,
) -> Result<ChainReport> {
    cfg.validate()?;
    let n = a.n();
    if mu.norm() >= 1.0 {
        return Err(Error::InvalidInput("mu must lie in the unit disc".into()));
    }
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidInput(
            "alpha must be nonzero: the completion must be cyclic".into(),
        ));
    }
    if !in_spectral_ball(a, 0.0)? {
        return Err(Error::InvalidInput("A must lie in the spectral ball".into()));
    }
    if !is_cyclic_with_opt_hint(a, cfg.tol, None)? {
        return Err(Error::NotCyclic("A must be cyclic".into()));
    }
    let sd_a = spectral_data(a, cfg.tol, None)?;
    if sd_a.eigen.len() < 2 {
        return Err(Error::InvalidInput(
            "A must have at least two distinct eigenvalues".into(),
        ));
    }
    let b0 = CMatrix::diagonal(&vec![mu; n]);
    let mut b_alpha = b0.clone();
    for i in 0..n - 1 {
        b_alpha[(i, i + 1)] = alpha;
    }
    let hint_scalar = ClusterHint(vec![(mu, n)]);

    let lower = bharali_lower_with_hints(a, &b0, cfg.tol, None, Some(&hint_scalar))?;
    let sa = sigma(a);
    let sb = sigma(&b_alpha);
    let (alpha_star, disc) = disc_search_upper(&sa, &sb, cfg)?;
    let upper = lift_upper_cyclic_with_hints(
        a,
        &b_alpha,
        &disc,
        alpha_star,
        cfg.tol,
        None,
        Some(&hint_scalar),
    )?;
    let reduction_deviation = green_reduction(&b_alpha)?
        .sub(&green_reduction(&b0)?)
        .norm_max();
    if reduction_deviation > 1e-12 {
        return Err(Error::VerificationFailed {
            stage: "green reduction equality".into(),
            error: reduction_deviation,
            limit: 1e-12,
        });
    }
    let margin = cfg.margin.max(1e-4);
    let gap = lower - upper;
    let links = vec![
        ChainLink {
            name: "lempert_lower_at_scalar".into(),
            relation: "l(A, B0) >=".into(),
            value: lower,
        },
        ChainLink {
            name: "lempert_upper_at_completion".into(),
            relation: "l(A, B_alpha) <=".into(),
            value: upper,
        },
        ChainLink {
            name: "green_equality".into(),
            relation: "g(A, B_alpha) = g(A, B0), reduction deviation".into(),
            value: reduction_deviation,
        },
    ];
    if gap < margin {
        return Err(Error::ChainInconclusive(format!(
            "gap {gap:.3e} below margin {margin:.1e} (lower {lower:.6e}, upper {upper:.6e})"
        )));
    }
    Ok(ChainReport {
        pair: format!("{n}x{n} cyclic A vs scalar mu"),
        links,
        lower: MethodValue {
            method: "bharali".into(),
            value: lower,
        },
        upper: MethodValue {
            method: "disc_search+lift".into(),
            value: upper,
        },
        reduction_deviation,
        conclusion: true,
        margin,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_core::spectral::{companion, is_cyclic};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spec(m: usize, j: &[usize], delta: f64) -> PerturbationSpec {
        PerturbationSpec::new(m, j.iter().copied().collect(), None, delta).unwrap()
    }

    #[test]
    fn build_perturbation_m3() {
        let s = spec(3, &[2], 0.01);
        let (a, x, b) = build_perturbation(&s).unwrap();
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert_eq!(x[(1, 2)], c(-1.0, 0.0));
        assert_eq!(x[(2, 0)], c(1.0, 0.0));
        assert_eq!(b[(1, 2)], c(-0.01, 0.0));
        assert_eq!(b[(2, 0)], c(0.01, 0.0));
        assert_eq!(s.min_mult(), 2);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn build_perturbation_m2_with_block() {
        let s = PerturbationSpec::new(
            3,
            [2].into_iter().collect(),
            Some(CMatrix::diagonal(&[c(0.5, 0.0)])),
            0.01,
        )
        .unwrap();
        assert_eq!(s.n(), 4);
        let (a, _x, b) = build_perturbation(&s).unwrap();
        assert_eq!(a[(3, 3)], c(0.5, 0.0));
        assert_eq!(b[(3, 3)], c(0.5, 0.0));
    }

    #[test]
    fn smallest_case_m2() {
        let s = spec(2, &[], 0.01);
        let (_a, x, _b) = build_perturbation(&s).unwrap();
        assert_eq!(x[(0, 1)], c(-1.0, 0.0));
        assert_eq!(x[(1, 0)], c(1.0, 0.0));
        assert_eq!(s.min_mult(), 1);
    }

    #[test]
    fn det_identity_examples() {
        // m=3, r=1: sigma = (0, 0, +-delta^2).
        let r = verify_det_identity(&spec(3, &[2], 0.01));
        assert!(r.max_residual <= 1e-15);
        // m=2, r=0.
        let r = verify_det_identity(&spec(2, &[], 0.1));
        assert!(r.max_residual <= 1e-15);
        assert_eq!(r.observed_sign, 1.0);
    }

    #[test]
    fn cyclic_approximants_are_cyclic_and_close() {
        let s = spec(3, &[2], 0.01);
        let (a, _, _) = build_perturbation(&s).unwrap();
        for j in [1u32, 4, 10, 100] {
            let aj = cyclic_approximants(&s, j);
            assert!(is_cyclic(&aj, 1e-7).unwrap(), "j = {j}");
            let dist = aj.sub(&a).norm_op();
            assert!((dist - 1.0 / j as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(PerturbationSpec::new(3, [2, 3].into_iter().collect(), None, 0.01).is_err());
        assert!(PerturbationSpec::new(2, BTreeSet::new(), None, 0.0).is_err());
        assert!(PerturbationSpec::new(
            2,
            BTreeSet::new(),
            Some(CMatrix::zeros(1)),
            0.01
        )
        .is_err());
    }

    #[test]
    fn green_reduction_examples() {
        // The superdiagonal completion reduces to the scalar diagonal.
        let mu = c(0.3, 0.1);
        let mut b = CMatrix::diagonal(&[mu, mu, mu]);
        b[(0, 1)] = c(0.2, 0.0);
        b[(1, 2)] = c(0.2, 0.0);
        let red = green_reduction(&b).unwrap();
        assert!(red.sub(&CMatrix::diagonal(&[mu, mu, mu])).norm_max() < 1e-10);

        // A diagonal reduces to itself up to ordering.
        let d = CMatrix::diagonal(&[c(0.5, 0.0), c(-0.2, 0.0)]);
        let red = green_reduction(&d).unwrap();
        assert!((red[(0, 0)] - c(-0.2, 0.0)).norm() < 1e-12);
        assert!((red[(1, 1)] - c(0.5, 0.0)).norm() < 1e-12);

        // companion((0,0,eps^3)) reduces to the spread diagonal, up to
        // ordering of the equal-real-part pair.
        let eps = 0.1f64;
        let cm = companion(&SigmaPoint::from_real(&[0.0, 0.0, eps.powi(3)]));
        let red = green_reduction(&cm).unwrap();
        let j = c(-0.5, 3f64.sqrt() / 2.0);
        for w in [c(eps, 0.0), j * eps, j * j * eps] {
            let hit = (0..3).any(|i| (red[(i, i)] - w).norm() < 1e-9);
            assert!(hit, "missing eigenvalue {w}");
        }
    }

    #[test]
    fn det_identity_zero_delta_rejected() {
        assert!(spec_checked(3, &[2], 0.0).is_err());
    }

    fn spec_checked(m: usize, j: &[usize], delta: f64) -> Result<PerturbationSpec> {
        PerturbationSpec::new(m, j.iter().copied().collect(), None, delta)
    }
}
