//! Geometry of the symmetrized polydisc: membership, the pseudohyperbolic
//! metric on the disc, the degree-3 Caratheodory lower bound, and safe
//! Euclidean inclusion radii.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix_core::matrix::C64;
use crate::matrix_core::spectral::char_poly_from_sigma;

/// A point of C^n standing for the symmetric functions of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPoint {
    coords: Vec<C64>,
}

impl SigmaPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        assert!(!coords.is_empty(), "sigma point needs at least one coordinate");
        SigmaPoint { coords }
    }

    pub fn origin(n: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); n])
    }

    pub fn from_real(coords: &[f64]) -> Self {
        Self::new(coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &SigmaPoint) -> SigmaPoint {
        assert_eq!(self.n(), other.n());
        SigmaPoint::new(
            self.coords
                .iter()
                .zip(other.coords())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn dist(&self, other: &SigmaPoint) -> f64 {
        self.sub(other).norm()
    }
}

impl Serialize for SigmaPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            n: usize,
            re: Vec<f64>,
            im: Vec<f64>,
        }
        Wire {
            n: self.n(),
            re: self.coords.iter().map(|z| z.re).collect(),
            im: self.coords.iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SigmaPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            re: Vec<f64>,
            im: Vec<f64>,
        }
        let w = Wire::deserialize(deserializer)?;
        if w.n == 0 || w.re.len() != w.n || w.im.len() != w.n {
            return Err(D::Error::custom("sigma point arrays do not match n"));
        }
        Ok(SigmaPoint::new(
            w.re.iter()
                .zip(&w.im)
                .map(|(&re, &im)| C64::new(re, im))
                .collect(),
        ))
    }
}

/// Largest modulus among the roots of the polynomial encoded by `s`.
pub fn max_root_modulus(s: &SigmaPoint) -> Result<f64> {
    max_root_modulus_tol(s, 1e-12)
}

/// Same with a caller-chosen root residual tolerance (penalty evaluations
/// in the disc search trade a little accuracy for speed).
pub fn max_root_modulus_tol(s: &SigmaPoint, tol: f64) -> Result<f64> {
    let p = char_poly_from_sigma(s);
    let roots = p.roots(tol)?;
    Ok(roots.iter().map(|r| r.norm()).fold(0.0, f64::max))
}

/// Max root modulus by bisecting the Schur-Cohn membership test: immune to
/// the accuracy loss of multiple roots (certified discs ride the boundary
/// with fully degenerate spectra). Falls back to root finding on the rare
/// radii the recursion cannot decide.
pub fn max_root_modulus_certified(s: &SigmaPoint) -> Result<f64> {
    let p = char_poly_from_sigma(s);
    let inside = |r: f64| crate::matrix_core::poly::roots_strictly_inside(&p, r);
    let mut hi = 1.0f64;
    let mut grow = 0;
    loop {
        match inside(hi) {
            Some(true) => break,
            Some(false) => {
                hi *= 1.5;
                grow += 1;
                if grow > 60 {
                    return max_root_modulus(s);
                }
            }
            None => return max_root_modulus(s),
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match inside(mid) {
            Some(true) => hi = mid,
            Some(false) => lo = mid,
            // Borderline band reached: hi is certified inside and within a
            // hair of the modulus, which is all a conservative margin needs.
            None => break,
        }
    }
    Ok(hi)
}

/// Membership in the symmetrized polydisc with a safety margin: true iff
/// every root of the associated polynomial satisfies |root| < 1 - margin.
///
/// The Schur-Cohn recursion decides the strict inequality without root
/// finding; genuinely borderline inputs fall back to the root path.
pub fn in_gn(s: &SigmaPoint, margin: f64) -> Result<bool> {
    if margin < 0.0 {
        return Err(Error::InvalidInput("margin must be >= 0".into()));
    }
    let p = char_poly_from_sigma(s);
    if let Some(inside) = crate::matrix_core::poly::roots_strictly_inside(&p, 1.0 - margin) {
        return Ok(inside);
    }
    Ok(max_root_modulus(s)? < 1.0 - margin)
}

/// Pseudohyperbolic distance |a-b| / |1 - conj(b) a| on the unit disc.
pub fn pseudo_hyperbolic(a: C64, b: C64) -> f64 {
    debug_assert!(a.norm() < 1.0 && b.norm() < 1.0);
    let den = C64::new(1.0, 0.0) - b.conj() * a;
    (a - b).norm() / den.norm()
}

/// The boundary family of rational maps generating the Caratheodory bound
/// on the 3-dimensional symmetrized polydisc:
/// f_w(s) = (s1 + 2 s2 w + 3 s3 w^2) / (3 + 2 s1 w + s2 w^2).
fn f_lambda_g3(s: &SigmaPoint, w: C64) -> Option<C64> {
    let (s1, s2, s3) = (s.coords()[0], s.coords()[1], s.coords()[2]);
    let den = C64::new(3.0, 0.0) + 2.0 * s1 * w + s2 * w * w;
    if den.norm() < 1e-12 {
        return None;
    }
    Some((s1 + 2.0 * s2 * w + 3.0 * s3 * w * w) / den)
}

/// Certified lower bound for the Lempert function of G_3 through the
/// Caratheodory pseudodistance: the sup over the unit circle of the
/// pseudohyperbolic distance of images under f_w, approximated by a grid
/// with one golden-section refinement around the argmax. Grid maxima of a
/// sup stay below the sup, so the certificate direction is preserved.
pub fn caratheodory_lb_g3(s: &SigmaPoint, t: &SigmaPoint, grid: usize) -> Result<f64> {
    if s.n() != 3 || t.n() != 3 {
        return Err(Error::InvalidInput(
            "the Caratheodory bound is implemented for n = 3 only".into(),
        ));
    }
    if grid < 64 {
        return Err(Error::InvalidInput("grid must be at least 64".into()));
    }
    if !in_gn(s, 0.0)? || !in_gn(t, 0.0)? {
        return Err(Error::InvalidInput(
            "both points must lie in the symmetrized polydisc".into(),
        ));
    }
    let objective = |theta: f64| -> Option<f64> {
        let w = C64::from_polar(1.0, theta);
        let (fs, ft) = (f_lambda_g3(s, w)?, f_lambda_g3(t, w)?);
        if fs.norm() >= 1.0 || ft.norm() >= 1.0 {
            // Boundary degeneracy: skip the node, the sup over the rest is
            // still a valid lower bound.
            return None;
        }
        Some(pseudo_hyperbolic(fs, ft))
    };

    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut evaluated = 0usize;
    for k in 0..grid {
        let theta = k as f64 * step;
        if let Some(v) = objective(theta) {
            evaluated += 1;
            if best.is_none_or(|(bv, _)| v > bv) {
                best = Some((v, theta));
            }
        }
    }
    if evaluated == 0 {
        return Err(Error::DegenerateDenominator);
    }
    let (mut best_val, best_theta) = best.unwrap();

    // One golden-section refinement pass around the grid argmax.
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = best_theta - step;
    let mut hi = best_theta + step;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = objective(x1).unwrap_or(0.0);
    let mut f2 = objective(x2).unwrap_or(0.0);
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = objective(x2).unwrap_or(0.0);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = objective(x1).unwrap_or(0.0);
        }
    }
    best_val = best_val.max(f1).max(f2);
    Ok(best_val)
}

/// Safe inclusion radius: samples seeded unit directions in C^n, bisects the
/// largest step along each that stays in the symmetrized polydisc, and
/// returns 0.9 times the minimum. Deterministic given the seed, and the
/// direction stream is a prefix, so more directions can only shrink the
/// result.
pub fn ball_radius_in_gn(n: usize, directions: usize, seed: u64) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    assert!(directions >= 1);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut r_min = f64::INFINITY;
    for _ in 0..directions {
        // Isotropic direction from normalized Gaussian pairs.
        let mut dir: Vec<C64> = (0..n)
            .map(|_| C64::new(gaussian(&mut rng), gaussian(&mut rng)))
            .collect();
        let norm = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for z in dir.iter_mut() {
            *z /= norm;
        }
        let inside = |t: f64| -> bool {
            let point = SigmaPoint::new(dir.iter().map(|&d| d * t).collect());
            // A root-finding failure counts as outside; that can only make
            // the radius smaller, keeping upper-bound certificates valid.
            in_gn(&point, 0.0).unwrap_or(false)
        };
        let mut hi = 1.0;
        let mut doublings = 0;
        while inside(hi) && doublings < 64 {
            hi *= 2.0;
            doublings += 1;
        }
        let mut lo = 0.0;
        for _ in 0..52 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        r_min = r_min.min(lo);
    }
    0.9 * r_min
}

fn gaussian(rng: &mut ChaCha20Rng) -> f64 {
    // Box-Muller; two uniforms per call keeps the stream layout simple.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Memoized [`ball_radius_in_gn`]: certificates ask for the same radius
/// repeatedly and the bisection is the expensive part.
pub fn ball_radius_in_gn_cached(n: usize, directions: usize, seed: u64) -> f64 {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    type RadiusCache = Mutex<HashMap<(usize, usize, u64), f64>>;
    static CACHE: OnceLock<RadiusCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&r) = cache.lock().unwrap().get(&(n, directions, seed)) {
        return r;
    }
    let r = ball_radius_in_gn(n, directions, seed);
    cache.lock().unwrap().insert((n, directions, seed), r);
    r
}

/// Upper bound ||t|| / R for the Lempert function from the origin, valid
/// whenever the Euclidean ball of radius R sits inside the domain.
pub fn ball_upper_bound_from_origin(t: &SigmaPoint, radius: f64) -> Result<f64> {
    let norm = t.norm();
    if norm >= radius {
        return Err(Error::OutsideBall { norm, radius });
    }
    Ok(norm / radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn origin_is_inside() {
        assert!(in_gn(&SigmaPoint::origin(4), 0.0).unwrap());
    }

    #[test]
    fn eps_cubed_point_is_inside() {
        let s = SigmaPoint::from_real(&[0.0, 0.0, 0.001]);
        assert!(in_gn(&s, 1e-9).unwrap());
    }

    #[test]
    fn two_zero_zero_is_outside_g3() {
        // t^3 - 2 t^2 has the root 2.
        let s = SigmaPoint::from_real(&[2.0, 0.0, 0.0]);
        assert!(!in_gn(&s, 0.0).unwrap());
    }

    #[test]
    fn pseudo_hyperbolic_basics() {
        let a = c(0.3, -0.4);
        assert_eq!(pseudo_hyperbolic(a, a), 0.0);
        assert!((pseudo_hyperbolic(a, c(0.0, 0.0)) - a.norm()).abs() < 1e-15);
        assert!((pseudo_hyperbolic(c(0.5, 0.0), c(-0.5, 0.0)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn pseudo_hyperbolic_symmetry_and_mobius_invariance() {
        let pairs = [
            (c(0.1, 0.2), c(-0.3, 0.4)),
            (c(0.0, 0.0), c(0.7, -0.1)),
            (c(0.5, 0.5), c(0.5, -0.5)),
        ];
        let m = c(0.3, -0.2);
        for (a, b) in pairs {
            let d = pseudo_hyperbolic(a, b);
            assert!((d - pseudo_hyperbolic(b, a)).abs() < 1e-15);
            let ma = (m - a) / (c(1.0, 0.0) - m.conj() * a);
            let mb = (m - b) / (c(1.0, 0.0) - m.conj() * b);
            assert!((pseudo_hyperbolic(ma, mb) - d).abs() < 1e-12);
        }
    }

    #[test]
    fn caratheodory_equal_points_vanish() {
        let s = SigmaPoint::from_real(&[0.1, 0.05, 0.01]);
        let v = caratheodory_lb_g3(&s, &s, 64).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn caratheodory_triple_eigenvalue_is_exact() {
        // t = (3 mu, 3 mu^2, mu^3): the map family is identically mu, so the
        // bound equals |mu| at every node.
        let mu = c(0.2, 0.0);
        let t = SigmaPoint::new(vec![3.0 * mu, 3.0 * mu * mu, mu * mu * mu]);
        let v = caratheodory_lb_g3(&SigmaPoint::origin(3), &t, 64).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
    }

    #[test]
    fn caratheodory_eps_cubed() {
        // f_w(0,0,eps^3) = eps^3 w^2 on |w| = 1, sup = eps^3.
        let t = SigmaPoint::from_real(&[0.0, 0.0, 0.001]);
        let v = caratheodory_lb_g3(&SigmaPoint::origin(3), &t, 4096).unwrap();
        assert!((v - 0.001).abs() < 1e-9);
    }

    #[test]
    fn ball_radius_in_disc_dimension_one() {
        let r = ball_radius_in_gn(1, 64, 42);
        assert!((r - 0.9).abs() < 1e-12);
    }

    #[test]
    fn ball_radius_monotone_in_directions() {
        let coarse = ball_radius_in_gn(3, 200, 42);
        let fine = ball_radius_in_gn(3, 2000, 42);
        assert!(fine <= coarse + 1e-9);
        assert!(fine > 0.0 && fine <= 0.9);
    }

    #[test]
    fn ball_upper_bound_values() {
        let t = SigmaPoint::from_real(&[0.0, 0.0, 0.001]);
        let r = 0.5;
        assert!((ball_upper_bound_from_origin(&t, r).unwrap() - 0.002).abs() < 1e-15);
        assert_eq!(
            ball_upper_bound_from_origin(&SigmaPoint::origin(3), r).unwrap(),
            0.0
        );
        let far = SigmaPoint::from_real(&[0.6, 0.0, 0.0]);
        assert!(matches!(
            ball_upper_bound_from_origin(&far, r),
            Err(Error::OutsideBall { .. })
        ));
    }

    #[test]
    fn sigma_point_json_round_trip() {
        let s = SigmaPoint::new(vec![c(0.1, -0.2), c(0.0, 0.3), c(1.0, 0.0)]);
        let text = serde_json::to_string(&s).unwrap();
        let back: SigmaPoint = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}
