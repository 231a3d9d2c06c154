//! Univariate complex polynomials and a simultaneous root finder.
//!
//! Coefficients are stored constant term first, leading coefficient last.
//! The root finder is Aberth-Ehrlich with seeded on-circle initialization,
//! a 500-iteration budget, residual-based acceptance and a deflation
//! fallback for stragglers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_core::matrix::C64;

const ABERTH_MAX_ITER: usize = 500;
const ABERTH_SEED: u64 = 0x0005_EEDA_BE27;

/// Complex polynomial, coefficients constant-first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    /// Builds a polynomial, trimming trailing (leading-coefficient) zeros.
    /// The zero polynomial is kept as a single zero coefficient.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    /// Monomial c * zeta^k.
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, c: C64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn from_roots(roots: &[C64]) -> Polynomial {
        let mut p = Polynomial::constant(C64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Polynomial::new(vec![-r, C64::new(1.0, 0.0)]));
        }
        p
    }

    /// Drops the first `k` coefficients: exact division by zeta^k assuming
    /// the dropped coefficients vanish (the caller checks).
    pub fn strip_low(&self, k: usize) -> Polynomial {
        if k >= self.coeffs.len() {
            return Polynomial::zero();
        }
        Polynomial::new(self.coeffs[k..].to_vec())
    }

    /// Synthetic division by (z - root); the remainder is discarded.
    pub fn deflate(&self, root: C64) -> Polynomial {
        let n = self.degree();
        if n == 0 {
            return Polynomial::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        let mut acc = C64::new(0.0, 0.0);
        for k in (0..n).rev() {
            acc = self.coeff(k + 1) + acc * root;
            out[k] = acc;
        }
        Polynomial::new(out)
    }

    /// All `degree` roots with multiplicity. See [`poly_roots`].
    pub fn roots(&self, tol: f64) -> Result<Vec<C64>> {
        poly_roots(self, tol)
    }
}

/// Finds all roots of `p`, each with residual `|p(root)| <= tol * (1 + max|coeff|)`.
///
/// Simultaneous Aberth-Ehrlich iteration from a seeded random-on-circle
/// start; roots that converge are deflated out and the remainder is retried
/// when the full iteration stalls. `NonConvergence` signals an
/// ill-conditioned input (the caller may raise `tol`).
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<C64>> {
    if p.is_zero() || p.degree() < 1 {
        return Err(Error::InvalidInput(
            "root finding needs degree >= 1".into(),
        ));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidInput("root tolerance must be positive".into()));
    }
    let scale = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let target = tol * (1.0 + scale);
    let mut rng = ChaCha20Rng::seed_from_u64(ABERTH_SEED);
    let mut roots = Vec::with_capacity(p.degree());
    let mut work = p.clone();

    // Exact zero roots come off first; char polys of nilpotent matrices hit
    // this path and stay exact.
    while work.degree() >= 1 && work.coeff(0).norm() == 0.0 {
        roots.push(C64::new(0.0, 0.0));
        work = work.strip_low(1);
    }

    let mut attempts = 0;
    while work.degree() >= 1 {
        attempts += 1;
        if attempts > 1 + p.degree() {
            return Err(Error::NonConvergence {
                residual: f64::INFINITY,
                target,
            });
        }
        if work.degree() == 1 {
            roots.push(-work.coeff(0) / work.coeff(1));
            break;
        }
        let approx = aberth_pass(&work, target, &mut rng);
        // Deflate whatever met the residual target, best first.
        let mut accepted: Vec<(f64, C64)> = approx
            .iter()
            .filter_map(|&z| {
                let r = p.eval(z).norm();
                (r <= target).then_some((r, z))
            })
            .collect();
        accepted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if accepted.is_empty() {
            let best = approx
                .iter()
                .map(|&z| p.eval(z).norm())
                .fold(f64::INFINITY, f64::min);
            return Err(Error::NonConvergence {
                residual: best,
                target,
            });
        }
        if accepted.len() == approx.len() {
            roots.extend(approx);
            break;
        }
        for &(_, z) in &accepted {
            roots.push(z);
            work = work.deflate(z);
        }
    }
    debug_assert_eq!(roots.len(), p.degree());
    Ok(roots)
}

fn aberth_pass(p: &Polynomial, target: f64, rng: &mut ChaCha20Rng) -> Vec<C64> {
    let n = p.degree();
    let lead = p.coeff(n);
    // Radius from the Cauchy bound, tempered by the constant-term estimate.
    let cauchy = 1.0
        + p.coeffs()[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let tail = (p.coeff(0) / lead).norm().powf(1.0 / n as f64);
    let radius = (cauchy * tail).sqrt().clamp(1e-3, cauchy);

    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let angle =
                2.0 * std::f64::consts::PI * (k as f64 + rng.gen::<f64>()) / n as f64;
            C64::from_polar(radius, angle)
        })
        .collect();

    // Iterate past the acceptance target: multiple roots keep wandering on
    // their noise-floor circle, so stop on stagnation of the worst residual
    // rather than on the first residual hit.
    let mut best_worst = f64::INFINITY;
    let mut since_improvement = 0usize;
    for _ in 0..ABERTH_MAX_ITER {
        let mut worst = 0.0f64;
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (pv, dv) = p.eval_with_derivative(z[i]);
            worst = worst.max(pv.norm());
            let newton = if dv.norm() == 0.0 {
                // Flat spot: nudge deterministically.
                C64::from_polar(1e-8 + z[i].norm() * 1e-8, 0.7)
            } else {
                pv / dv
            };
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm_sqr() > 0.0 {
                        s += 1.0 / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * s;
            let step = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            z[i] -= step;
            if !z[i].re.is_finite() || !z[i].im.is_finite() {
                z[i] = C64::from_polar(radius * (1.0 + rng.gen::<f64>()), rng.gen::<f64>() * std::f64::consts::TAU);
            }
            max_step = max_step.max(step.norm());
        }
        if worst < best_worst * (1.0 - 1e-3) {
            best_worst = worst;
            since_improvement = 0;
        } else {
            since_improvement += 1;
            // Comfortably past the acceptance target: no point polishing.
            let limit = if best_worst <= 0.01 * target { 2 } else { 12 };
            if since_improvement >= limit {
                break;
            }
        }
        if max_step < 1e-300 {
            break;
        }
    }
    z
}

/// Decides whether every root lies strictly inside the circle of the given
/// radius, by the Schur-Cohn recursion: O(degree^2), no iteration, and no
/// allocation for the degrees this crate works with. Returns `None` when a
/// reduction step is too close to the boundary to call, in which case the
/// caller should fall back to actual root finding.
pub fn roots_strictly_inside(p: &Polynomial, radius: f64) -> Option<bool> {
    const STACK: usize = 32;
    let n = p.degree();
    if p.is_zero() {
        return None;
    }
    if n == 0 {
        return Some(true);
    }
    if n >= STACK {
        return None;
    }
    let lead = p.coeff(n) * radius.powi(n as i32);
    let mut cur = [C64::new(0.0, 0.0); STACK];
    let mut scratch = [C64::new(0.0, 0.0); STACK];
    for (i, slot) in cur.iter_mut().enumerate().take(n + 1) {
        *slot = p.coeff(i) * radius.powi(i as i32) / lead;
    }
    let mut m = n;
    loop {
        if m == 0 {
            return Some(true);
        }
        let a0 = cur[0];
        let am = cur[m];
        let g = am.norm_sqr() - a0.norm_sqr();
        if g.abs() <= 1e-13 * (am.norm_sqr() + a0.norm_sqr() + 1.0) {
            return None;
        }
        if g < 0.0 {
            return Some(false);
        }
        // The reduced polynomial's leading coefficient is exactly g; divide
        // through to keep every level monic.
        for k in 0..m {
            scratch[k] = (am.conj() * cur[k + 1] - a0 * cur[m - 1 - k].conj()) / g;
        }
        cur[..m].copy_from_slice(&scratch[..m]);
        m -= 1;
    }
}
