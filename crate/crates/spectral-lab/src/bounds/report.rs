//! Sandwich reports: named lower and upper bounds for a Lempert value with
//! per-bound provenance, plus the cyclic-pair transfer bound.

use serde::Serialize;

use crate::bounds::bharali::bharali_lower_with_hints;
use crate::bounds::disc::AnalyticDisc;
use crate::bounds::search::disc_search_upper;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::gn_geometry::{ball_radius_in_gn_cached, ball_upper_bound_from_origin, caratheodory_lb_g3};
use crate::matrix_core::matrix::{C64, CMatrix};
use crate::matrix_core::spectral::{in_spectral_ball, is_cyclic_with_opt_hint, sigma, ClusterHint};

/// Which function a bound constrains: the Lempert function of the spectral
/// ball or of the symmetrized polydisc. A lower bound for the polydisc is
/// also one for the ball; an upper bound for the ball is also one for the
/// polydisc; the converse directions do not transfer, and the deliberate
/// mismatch (ball lower above polydisc upper) is the discontinuity witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSpace {
    Omega,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscWitness {
    pub alpha: f64,
    pub disc: AnalyticDisc,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: f64,
    pub kind: BoundKind,
    pub space: BoundSpace,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<DiscWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Every lower bound sits below every comparable upper bound.
    Consistent,
    /// A spectral-ball lower bound exceeds a polydisc upper bound: the
    /// two Lempert functions genuinely separate at this pair.
    Gap,
}

/// A sandwich of named bounds for one pair of matrices.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub pair: String,
    pub bounds: Vec<BoundEntry>,
    pub verdict: Verdict,
}

impl BoundReport {
    pub fn lower(&self, name: &str) -> Option<f64> {
        self.find(name, BoundKind::Lower)
    }

    pub fn upper(&self, name: &str) -> Option<f64> {
        self.find(name, BoundKind::Upper)
    }

    fn find(&self, name: &str, kind: BoundKind) -> Option<f64> {
        self.bounds
            .iter()
            .find(|b| b.name == name && b.kind == kind)
            .map(|b| b.value)
    }
}

/// Transfer bound for cyclic pairs: a disc through (sigma(A), sigma(B))
/// lifts through cyclic endpoints, so its interpolation time bounds the
/// spectral-ball Lempert function from above.
///
/// The disc is re-verified here (interpolation within 1e-8 at both ends,
/// boundary membership margin 1e-6 on a 256-point grid) independently of
/// whoever produced it. The matrix witness behind the bound is the
/// companion lift of the disc, conjugation-adjusted at the endpoints; its
/// sigma image is the disc itself by the companion round trip.
pub fn lift_upper_cyclic(
    a: &CMatrix,
    b: &CMatrix,
    disc: &AnalyticDisc,
    alpha: f64,
    tol: f64,
) -> Result<f64> {
    lift_upper_cyclic_with_hints(a, b, disc, alpha, tol, None, None)
}

pub fn lift_upper_cyclic_with_hints(
    a: &CMatrix,
    b: &CMatrix,
    disc: &AnalyticDisc,
    alpha: f64,
    tol: f64,
    hint_a: Option<&ClusterHint>,
    hint_b: Option<&ClusterHint>,
) -> Result<f64> {
    if !is_cyclic_with_opt_hint(a, tol, hint_a)? {
        return Err(Error::NotCyclic("first endpoint is derogatory".into()));
    }
    if !is_cyclic_with_opt_hint(b, tol, hint_b)? {
        return Err(Error::NotCyclic("second endpoint is derogatory".into()));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidInput("alpha must lie in [0, 1)".into()));
    }
    let res0 = disc.eval(C64::new(0.0, 0.0)).dist(&sigma(a));
    let res1 = disc.eval(C64::new(alpha, 0.0)).dist(&sigma(b));
    if res0 > 1e-8 || res1 > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "disc does not interpolate the sigma images (residuals {res0:.3e}, {res1:.3e})"
        )));
    }
    if alpha > 0.0 {
        let margin = disc.boundary_margin(256, 1.0)?;
        if margin < 1e-6 {
            return Err(Error::InvalidInput(format!(
                "disc boundary margin {margin:.3e} too small"
            )));
        }
    }
    Ok(alpha)
}

/// Assembles every applicable bound for a pair of spectral-ball matrices.
///
/// Lower bounds: the spectral product bound (ball level), the boundary map
/// family (polydisc level, dimension 3). Upper bounds: the safe-ball line
/// (from the origin), the disc search, and the cyclic transfer when both
/// endpoints are cyclic. Construction fails with `InconsistentSandwich` if
/// any lower bound exceeds a comparable upper bound beyond 1e-6, which can
/// only be an implementation bug.
pub fn sandwich_report(a: &CMatrix, b: &CMatrix, cfg: &RunConfig) -> Result<BoundReport> {
    sandwich_report_with_hints(a, b, cfg, None, None)
}

pub fn sandwich_report_with_hints(
    a: &CMatrix,
    b: &CMatrix,
    cfg: &RunConfig,
    hint_a: Option<&ClusterHint>,
    hint_b: Option<&ClusterHint>,
) -> Result<BoundReport> {
    cfg.validate()?;
    if !in_spectral_ball(a, 0.0)? || !in_spectral_ball(b, 0.0)? {
        return Err(Error::InvalidInput(
            "both matrices must lie in the spectral ball".into(),
        ));
    }
    let n = a.n();
    let sa = sigma(a);
    let sb = sigma(b);
    let mut bounds = Vec::new();

    bounds.push(BoundEntry {
        name: "bharali".into(),
        value: bharali_lower_with_hints(a, b, cfg.tol, hint_a, hint_b)?,
        kind: BoundKind::Lower,
        space: BoundSpace::Omega,
        witness: None,
    });
    if n == 3 {
        bounds.push(BoundEntry {
            name: "caratheodory3".into(),
            value: caratheodory_lb_g3(&sa, &sb, cfg.grid)?,
            kind: BoundKind::Lower,
            space: BoundSpace::G,
            witness: None,
        });
    }
    if sa.norm() <= 1e-12 {
        let r_safe = ball_radius_in_gn_cached(n, cfg.directions, cfg.seed);
        if let Ok(value) = ball_upper_bound_from_origin(&sb, r_safe) {
            bounds.push(BoundEntry {
                name: "ball".into(),
                value,
                kind: BoundKind::Upper,
                space: BoundSpace::G,
                witness: None,
            });
        }
    }
    let searched = disc_search_upper(&sa, &sb, cfg)?;
    bounds.push(BoundEntry {
        name: "disc_search".into(),
        value: searched.0,
        kind: BoundKind::Upper,
        space: BoundSpace::G,
        witness: Some(DiscWitness {
            alpha: searched.0,
            disc: searched.1.clone(),
        }),
    });
    let cyclic_pair = is_cyclic_with_opt_hint(a, cfg.tol, hint_a)?
        && is_cyclic_with_opt_hint(b, cfg.tol, hint_b)?;
    if cyclic_pair {
        let value = lift_upper_cyclic_with_hints(
            a, b, &searched.1, searched.0, cfg.tol, hint_a, hint_b,
        )?;
        bounds.push(BoundEntry {
            name: "lift".into(),
            value,
            kind: BoundKind::Upper,
            space: BoundSpace::Omega,
            witness: Some(DiscWitness {
                alpha: searched.0,
                disc: searched.1,
            }),
        });
    }

    // Soundness: a ball-level lower bound may not exceed a ball-level upper
    // bound, and a polydisc lower may not exceed any upper (upper bounds at
    // ball level dominate the polydisc value too). The one legal crossing
    // is ball-level lower vs polydisc upper: that is the gap witness.
    for lo in bounds.iter().filter(|e| e.kind == BoundKind::Lower) {
        for up in bounds.iter().filter(|e| e.kind == BoundKind::Upper) {
            let comparable = !(lo.space == BoundSpace::Omega && up.space == BoundSpace::G);
            if comparable && lo.value > up.value + 1e-6 {
                return Err(Error::InconsistentSandwich {
                    lower: lo.name.clone(),
                    lower_value: lo.value,
                    upper: up.name.clone(),
                    upper_value: up.value,
                });
            }
        }
    }
    let omega_lower = bounds
        .iter()
        .filter(|e| e.kind == BoundKind::Lower && e.space == BoundSpace::Omega)
        .map(|e| e.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let g_upper = bounds
        .iter()
        .filter(|e| e.kind == BoundKind::Upper && e.space == BoundSpace::G)
        .map(|e| e.value)
        .fold(f64::INFINITY, f64::min);
    let verdict = if omega_lower > g_upper + 1e-6 {
        Verdict::Gap
    } else {
        Verdict::Consistent
    };
    Ok(BoundReport {
        pair: format!("{n}x{n} pair"),
        bounds,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_core::spectral::companion;
    use crate::gn_geometry::SigmaPoint;

    #[test]
    fn equal_pair_is_all_zero() {
        let s = SigmaPoint::from_real(&[0.2, 0.05, 0.001]);
        let a = companion(&s);
        let cfg = RunConfig {
            restarts: 2,
            grid: 256,
            ..Default::default()
        };
        let report = sandwich_report(&a, &a, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent);
        assert_eq!(report.lower("bharali"), Some(0.0));
        assert_eq!(report.upper("disc_search"), Some(0.0));
        assert_eq!(report.upper("lift"), Some(0.0));
        assert!(report.lower("caratheodory3").unwrap() <= 1e-12);
    }

    #[test]
    fn lift_requires_cyclic_endpoints() {
        let s = SigmaPoint::from_real(&[0.0, 0.0, 0.001]);
        let a = companion(&s);
        let disc = AnalyticDisc::constant(&sigma(&a));
        let err = lift_upper_cyclic(&a, &CMatrix::zeros(3), &disc, 0.0, 1e-7);
        assert!(matches!(err, Err(Error::NotCyclic(_))));
    }

    #[test]
    fn report_serializes_with_spaces_and_kinds() {
        let s = SigmaPoint::from_real(&[0.1, 0.0, 0.0]);
        let a = companion(&s);
        let cfg = RunConfig {
            restarts: 2,
            grid: 256,
            ..Default::default()
        };
        let report = sandwich_report(&a, &a, &cfg).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"kind\":\"lower\""));
        assert!(text.contains("\"space\":\"Omega\""));
    }
}
