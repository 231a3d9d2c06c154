//! Optimization-based upper bounds: search over degree-capped polynomial
//! discs interpolating two points of the symmetrized polydisc, minimizing
//! the interpolation time |alpha|.
//!
//! The boundary-membership constraint (max root modulus on the unit circle)
//! is nonsmooth, so the search uses multistart Nelder-Mead simplex descent
//! under a staged quadratic/hinge penalty, never gradients. Smart initial
//! witnesses (scaling disc, ball line, companion line) make the certified
//! cases cheap; random restarts cover the rest.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bounds::disc::AnalyticDisc;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::gn_geometry::{
    ball_radius_in_gn_cached, in_gn, max_root_modulus_certified, SigmaPoint,
};
use crate::matrix_core::matrix::C64;
use crate::matrix_core::poly::Polynomial;
use crate::matrix_core::spectral::{companion, sigma};

/// Feasibility thresholds fixed by the certificate contract.
const INTERP_TOL: f64 = 1e-8;
const MEMBERSHIP_MARGIN: f64 = 1e-6;
/// The optimizer aims slightly inside so the verified margin holds.
const OPT_MARGIN: f64 = 3e-6;
const VERIFY_GRID: usize = 256;
const PENALTY_STAGES: usize = 5;

/// Searches for an analytic disc through `s` (at 0) and `t` (at alpha);
/// returns the smallest feasible alpha found and its disc witness.
///
/// alpha is a certified upper bound for the Lempert function of the
/// symmetrized polydisc at (s, t): the returned disc re-verifies
/// interpolation to 1e-8 (exactly, after projection) and boundary
/// membership with margin 1e-6 on a 256-point grid, independently of the
/// optimizer's own bookkeeping.
pub fn disc_search_upper(
    s: &SigmaPoint,
    t: &SigmaPoint,
    cfg: &RunConfig,
) -> Result<(f64, AnalyticDisc)> {
    cfg.validate()?;
    let n = s.n();
    if t.n() != n {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    if !in_gn(s, MEMBERSHIP_MARGIN)? || !in_gn(t, MEMBERSHIP_MARGIN)? {
        return Err(Error::InvalidInput(
            "both points must lie in the symmetrized polydisc with margin".into(),
        ));
    }
    if s.dist(t) <= 1e-14 {
        return Ok((0.0, AnalyticDisc::constant(s)));
    }
    let degree = cfg.degree_for(n);

    let mut inits: Vec<SearchPoint> = Vec::new();
    if let Some(p) = init_scaling(s, t, degree) {
        inits.push(p);
    }
    if let Some(p) = init_ball_line(s, t, degree, cfg) {
        inits.push(p);
    }
    if let Some(p) = init_companion_line(s, t, degree) {
        inits.push(p);
    }

    let mut best: Option<(f64, AnalyticDisc)> = None;
    let mut since_improvement = 0usize;
    let consider = |cand: Option<(f64, AnalyticDisc)>,
                        best: &mut Option<(f64, AnalyticDisc)>,
                        since: &mut usize| {
        match cand.and_then(|c| finalize(s, t, c).ok()) {
            Some((alpha, disc)) if best.as_ref().is_none_or(|(b, _)| alpha < b - 1e-9) => {
                *best = Some((alpha, disc));
                *since = 0;
            }
            _ => *since += 1,
        }
    };
    for restart in 0..cfg.restarts {
        let start = if restart < inits.len() {
            let p = inits[restart].clone();
            // A constructed witness stands on its own; the simplex descent
            // only has to beat it, never replace it.
            consider(
                Some((p.alpha, p.disc(s, degree))),
                &mut best,
                &mut since_improvement,
            );
            p
        } else {
            random_init(s, t, degree, cfg.seed, restart as u64, best.as_ref())
        };
        let candidate = refine(s, t, degree, start);
        consider(candidate, &mut best, &mut since_improvement);
        // The smart inits all ran and nothing moved for a while: stop.
        if best.is_some() && restart + 1 >= inits.len().max(3) && since_improvement >= 4 {
            break;
        }
    }
    best.ok_or_else(|| {
        Error::NoFeasibleDisc(format!(
            "no restart reached feasibility (degree {degree}, restarts {})",
            cfg.restarts
        ))
    })
}

/// Decision point: alpha plus free coefficients (degrees 1..=degree per
/// coordinate; constants are pinned to s).
#[derive(Debug, Clone)]
struct SearchPoint {
    alpha: f64,
    coeffs: Vec<C64>, // n * degree entries, coordinate-major
}

impl SearchPoint {
    fn dim(n: usize, degree: usize) -> usize {
        1 + 2 * n * degree
    }

    fn to_vec(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(1 + 2 * self.coeffs.len());
        x.push(self.alpha);
        for c in &self.coeffs {
            x.push(c.re);
            x.push(c.im);
        }
        x
    }

    fn from_vec(x: &[f64]) -> SearchPoint {
        let coeffs = x[1..]
            .chunks(2)
            .map(|p| C64::new(p[0], p[1]))
            .collect();
        SearchPoint {
            alpha: x[0],
            coeffs,
        }
    }

    fn disc(&self, s: &SigmaPoint, degree: usize) -> AnalyticDisc {
        let n = s.n();
        let coords = (0..n)
            .map(|i| {
                let mut coeffs = Vec::with_capacity(degree + 1);
                coeffs.push(s.coords()[i]);
                coeffs.extend_from_slice(&self.coeffs[i * degree..(i + 1) * degree]);
                Polynomial::new(coeffs)
            })
            .collect();
        AnalyticDisc::new(coords, degree).expect("degree-capped by construction")
    }
}

fn disc_to_point(disc: &AnalyticDisc, alpha: f64, degree: usize) -> SearchPoint {
    let n = disc.n();
    let mut coeffs = Vec::with_capacity(n * degree);
    for i in 0..n {
        for k in 1..=degree {
            coeffs.push(disc.coord(i).coeff(k));
        }
    }
    SearchPoint { alpha, coeffs }
}

/// Worst boundary overshoot beyond the optimizer's inner margin, summed as
/// squared hinges over the grid. The Schur-Cohn test skips the root finder
/// on nodes that are strictly feasible; violation magnitudes and borderline
/// nodes pay for actual roots. Root-finding failures count as a large
/// penalty, never as feasibility.
fn boundary_hinge(disc: &AnalyticDisc, grid: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..grid {
        let zeta = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / grid as f64);
        let point = disc.eval(zeta);
        let p = crate::matrix_core::spectral::char_poly_from_sigma(&point);
        if crate::matrix_core::poly::roots_strictly_inside(&p, 1.0 - OPT_MARGIN) == Some(true) {
            continue;
        }
        match max_root_modulus_certified(&point) {
            Ok(m) => {
                let h = (m - (1.0 - OPT_MARGIN)).max(0.0);
                acc += h * h;
            }
            Err(_) => acc += 1e3,
        }
    }
    acc
}

fn objective(x: &[f64], s: &SigmaPoint, t: &SigmaPoint, degree: usize, weight: f64, grid: usize) -> f64 {
    let p = SearchPoint::from_vec(x);
    let alpha = p.alpha;
    if !(1e-9..=0.9999).contains(&alpha) {
        return 1e9 + alpha.abs();
    }
    let disc = p.disc(s, degree);
    let interp = disc.eval(C64::new(alpha, 0.0)).dist(t);
    alpha + weight * (interp * interp + boundary_hinge(&disc, grid))
}

/// Staged penalty Nelder-Mead from one starting point.
fn refine(s: &SigmaPoint, t: &SigmaPoint, degree: usize, start: SearchPoint) -> Option<(f64, AnalyticDisc)> {
    let n = s.n();
    let dim = SearchPoint::dim(n, degree);
    let mut x = start.to_vec();
    let mut weight = 1e2;
    let mut prev_obj = f64::INFINITY;
    for stage in 0..PENALTY_STAGES {
        // Coarse boundary grid early, the contract grid on the last stage.
        let grid = if stage + 1 == PENALTY_STAGES { VERIFY_GRID } else { 64 };
        let f = |y: &[f64]| objective(y, s, t, degree, weight, grid);
        let budget = 36 * dim;
        x = nelder_mead(&f, &x, 0.02, budget);
        // Penalty-free points stop moving once the weight no longer bites.
        let obj = f(&x);
        if (prev_obj - obj).abs() <= 1e-12 * (1.0 + obj.abs()) && stage >= 1 {
            break;
        }
        prev_obj = obj;
        weight *= 10.0;
    }
    let p = SearchPoint::from_vec(&x);
    (1e-9..=0.9999)
        .contains(&p.alpha)
        .then(|| (p.alpha, p.disc(s, degree)))
}

/// Exact interpolation projection plus independent feasibility checks.
fn finalize(s: &SigmaPoint, t: &SigmaPoint, (alpha, disc): (f64, AnalyticDisc)) -> Result<(f64, AnalyticDisc)> {
    let raw_residual = disc.eval(C64::new(alpha, 0.0)).dist(t);
    if raw_residual > 1e-3 {
        // Projection would distort the boundary too much to trust.
        return Err(Error::NoFeasibleDisc(format!(
            "interpolation residual {raw_residual:.3e} too large to project"
        )));
    }
    let projected = disc.project_interpolation(C64::new(alpha, 0.0), t)?;
    let residual = projected.eval(C64::new(alpha, 0.0)).dist(t);
    if residual > INTERP_TOL {
        return Err(Error::NoFeasibleDisc(format!(
            "projected residual {residual:.3e}"
        )));
    }
    let margin = projected.boundary_margin(VERIFY_GRID, 1.0)?;
    if margin < MEMBERSHIP_MARGIN {
        return Err(Error::NoFeasibleDisc(format!(
            "boundary margin {margin:.3e} below {MEMBERSHIP_MARGIN:.0e}"
        )));
    }
    debug_assert!(projected.eval(C64::new(0.0, 0.0)).dist(s) < 1e-12);
    Ok((alpha, projected))
}

// ---------------------------------------------------------------------------
// Initial witnesses
// ---------------------------------------------------------------------------

/// When s = 0: phi_k = t_k (zeta/a)^k traces sigma of a uniformly scaled
/// spectrum, feasible as soon as a exceeds the largest root modulus of t.
fn init_scaling(s: &SigmaPoint, t: &SigmaPoint, degree: usize) -> Option<SearchPoint> {
    if s.norm() > 1e-14 || degree < s.n() {
        return None;
    }
    let rho = max_root_modulus_certified(t).ok()?;
    let alpha = (rho / (1.0 - 4.0 * OPT_MARGIN)).clamp(1e-8, 0.999);
    let coords: Vec<Polynomial> = (0..s.n())
        .map(|i| {
            let k = i + 1;
            let c = t.coords()[i] / C64::new(alpha, 0.0).powu(k as u32);
            Polynomial::monomial(c, k)
        })
        .collect();
    let disc = AnalyticDisc::new(coords, degree).ok()?;
    Some(disc_to_point(&disc, alpha, degree))
}

/// Straight line inside the safe Euclidean ball, rescaled so the boundary
/// image stays at the safe radius.
fn init_ball_line(s: &SigmaPoint, t: &SigmaPoint, degree: usize, cfg: &RunConfig) -> Option<SearchPoint> {
    let r_safe = ball_radius_in_gn_cached(s.n(), cfg.directions, cfg.seed);
    let headroom = r_safe - s.norm();
    if headroom <= 1e-9 {
        return None;
    }
    let alpha = (s.dist(t) / headroom).clamp(1e-8, f64::INFINITY);
    if alpha >= 0.999 {
        return None;
    }
    let coords: Vec<Polynomial> = (0..s.n())
        .map(|i| {
            let slope = (t.coords()[i] - s.coords()[i]) / alpha;
            Polynomial::new(vec![s.coords()[i], slope])
        })
        .collect();
    let disc = AnalyticDisc::new(coords, degree.max(1)).ok()?;
    Some(disc_to_point(&disc, alpha, degree))
}

/// sigma of the straight matrix line between the companion matrices of the
/// endpoints, with alpha bisected down to the feasibility edge.
fn init_companion_line(s: &SigmaPoint, t: &SigmaPoint, degree: usize) -> Option<SearchPoint> {
    let n = s.n();
    if degree < n {
        return None;
    }
    let cs = companion(s);
    let ct = companion(t);
    // Coordinates of sigma((1-u) Cs + u Ct) as polynomials in u of degree
    // <= n, recovered by interpolation at n+1 nodes.
    let nodes: Vec<C64> = (0..=n)
        .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / (n + 1) as f64))
        .collect();
    let values: Vec<SigmaPoint> = nodes
        .iter()
        .map(|&u| {
            let m = cs.scale(C64::new(1.0, 0.0) - u).add(&ct.scale(u));
            sigma(&m)
        })
        .collect();
    let coord_polys_in_u: Vec<Polynomial> = (0..n)
        .map(|i| {
            lagrange(
                &nodes
                    .iter()
                    .zip(&values)
                    .map(|(&u, v)| (u, v.coords()[i]))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let feasible = |alpha: f64| -> bool {
        let disc = match line_disc(&coord_polys_in_u, alpha, degree, s) {
            Some(d) => d,
            None => return false,
        };
        disc.boundary_margin(64, 1.0).is_ok_and(|m| m > 2.0 * OPT_MARGIN)
    };
    let mut lo = 1e-4;
    let mut hi = 0.999;
    if !feasible(hi) {
        return None;
    }
    if feasible(lo) {
        hi = lo;
    } else {
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let alpha = (hi * 1.02).min(0.999);
    let disc = line_disc(&coord_polys_in_u, alpha, degree, s)?;
    Some(disc_to_point(&disc, alpha, degree))
}

fn line_disc(coord_polys_in_u: &[Polynomial], alpha: f64, degree: usize, s: &SigmaPoint) -> Option<AnalyticDisc> {
    let coords: Vec<Polynomial> = coord_polys_in_u
        .iter()
        .enumerate()
        .map(|(i, p)| {
            // Substitute u = zeta / alpha and re-pin the constant to s
            // (interpolation noise lives in the constant term otherwise).
            let mut coeffs: Vec<C64> = p
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, &c)| c / C64::new(alpha, 0.0).powu(k as u32))
                .collect();
            if coeffs.is_empty() {
                coeffs.push(C64::new(0.0, 0.0));
            }
            coeffs[0] = s.coords()[i];
            Polynomial::new(coeffs)
        })
        .collect();
    AnalyticDisc::new(coords, degree).ok()
}

fn lagrange(samples: &[(C64, C64)]) -> Polynomial {
    let mut acc = Polynomial::zero();
    for (i, &(xi, yi)) in samples.iter().enumerate() {
        let mut term = Polynomial::constant(yi);
        for (j, &(xj, _)) in samples.iter().enumerate() {
            if i != j {
                let denom = xi - xj;
                term = term.mul(&Polynomial::new(vec![-xj / denom, C64::new(1.0, 0.0) / denom]));
            }
        }
        acc = acc.add(&term);
    }
    acc
}

fn random_init(
    s: &SigmaPoint,
    t: &SigmaPoint,
    degree: usize,
    seed: u64,
    restart: u64,
    best: Option<&(f64, AnalyticDisc)>,
) -> SearchPoint {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ restart.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    match best {
        // Perturb the incumbent: cheap local restarts around a feasible disc.
        Some((alpha, disc)) if restart.is_multiple_of(2) => {
            let mut p = disc_to_point(disc, *alpha, degree);
            p.alpha = (p.alpha * (1.0 - 0.05 * rng.gen::<f64>())).max(1e-6);
            for c in p.coeffs.iter_mut() {
                *c += C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 0.02;
            }
            p
        }
        _ => {
            let n = s.n();
            let mut coeffs = Vec::with_capacity(n * degree);
            for _ in 0..n {
                for k in 1..=degree {
                    let scale = 0.3 / (k * k) as f64;
                    coeffs.push(C64::new(
                        (rng.gen::<f64>() - 0.5) * scale,
                        (rng.gen::<f64>() - 0.5) * scale,
                    ));
                }
            }
            let _ = t;
            SearchPoint {
                alpha: 0.2 + 0.6 * rng.gen::<f64>(),
                coeffs,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Nelder-Mead
// ---------------------------------------------------------------------------

/// Plain Nelder-Mead with the standard coefficients; deterministic given
/// the starting point. Returns the best vertex seen.
pub(crate) fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], step: f64, max_evals: usize) -> Vec<f64> {
    let dim = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
    simplex.push((eval(x0, &mut evals), x0.to_vec()));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += if v[i].abs() > 1.0 { step * v[i].abs() } else { step };
        simplex.push((eval(&v, &mut evals), v));
    }
    while evals < max_evals {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let spread = simplex[dim].0 - simplex[0].0;
        if spread <= 1e-12 * (1.0 + simplex[0].0.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(_, v)| v[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = (0..dim)
            .map(|i| centroid[i] + alpha * (centroid[i] - worst.1[i]))
            .collect();
        let fr = eval(&reflect, &mut evals);
        if fr < simplex[0].0 {
            let expand: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + gamma * (reflect[i] - centroid[i]))
                .collect();
            let fe = eval(&expand, &mut evals);
            simplex[dim] = if fe < fr { (fe, expand) } else { (fr, reflect) };
        } else if fr < simplex[dim - 1].0 {
            simplex[dim] = (fr, reflect);
        } else {
            let contract: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + rho * (worst.1[i] - centroid[i]))
                .collect();
            let fc = eval(&contract, &mut evals);
            if fc < worst.0 {
                simplex[dim] = (fc, contract);
            } else {
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = (0..dim)
                        .map(|i| best[i] + sigma * (entry.1[i] - best[i]))
                        .collect();
                    *entry = (eval(&shrunk, &mut evals), shrunk);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    simplex.swap_remove(0).1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let x = nelder_mead(&f, &[0.0, 0.0], 0.5, 2000);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn equal_points_give_zero() {
        let s = SigmaPoint::from_real(&[0.1, 0.0, 0.02]);
        let cfg = RunConfig {
            restarts: 2,
            ..Default::default()
        };
        let (alpha, disc) = disc_search_upper(&s, &s, &cfg).unwrap();
        assert_eq!(alpha, 0.0);
        assert_eq!(disc.eval(C64::new(0.3, 0.0)), s);
    }

    #[test]
    fn scaling_init_is_tight_for_uniform_spectrum() {
        // t = (3 mu, 3 mu^2, mu^3): all roots mu, so the scaling disc is
        // feasible just above alpha = |mu|.
        let mu = 0.2;
        let t = SigmaPoint::from_real(&[3.0 * mu, 3.0 * mu * mu, mu * mu * mu]);
        let p = init_scaling(&SigmaPoint::origin(3), &t, 6).unwrap();
        assert!((p.alpha - mu).abs() < 1e-4);
        let disc = p.disc(&SigmaPoint::origin(3), 6);
        assert!(disc.boundary_margin(64, 1.0).unwrap() > 1e-6);
        assert!(disc.eval(C64::new(p.alpha, 0.0)).dist(&t) < 1e-12);
    }
}
