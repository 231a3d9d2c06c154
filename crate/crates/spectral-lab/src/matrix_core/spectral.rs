//! Spectral structure: the sigma map, eigenvalue clustering with
//! multiplicities, cyclicity tests, companion matrices and the Mobius
//! automorphisms of the spectral ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gn_geometry::SigmaPoint;
use crate::matrix_core::matrix::{C64, CMatrix};
use crate::matrix_core::poly::{poly_roots, Polynomial};

const KRYLOV_SEED: u64 = 0xC0FF_EE11;

/// One clustered eigenvalue with its three multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenInfo {
    pub value: C64,
    /// Multiplicity as a root of the characteristic polynomial.
    pub alg_mult: usize,
    /// Dimension of the kernel of A - value*I.
    pub geo_mult: usize,
    /// Multiplicity as a root of the minimal polynomial
    /// (size of the largest Jordan block at this eigenvalue).
    pub min_mult: usize,
}

/// Clustered spectrum of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigen: Vec<EigenInfo>,
    pub tol: f64,
}

impl SpectralData {
    pub fn spectral_radius(&self) -> f64 {
        self.eigen.iter().map(|e| e.value.norm()).fold(0.0, f64::max)
    }

    pub fn dimension(&self) -> usize {
        self.eigen.iter().map(|e| e.alg_mult).sum()
    }

    pub fn is_cyclic(&self) -> bool {
        self.eigen.iter().all(|e| e.geo_mult == 1)
    }
}

/// Exact cluster structure declared by a caller that built the matrix and
/// knows its spectrum: (eigenvalue, algebraic multiplicity) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterHint(pub Vec<(C64, usize)>);

/// Elementary symmetric functions of the eigenvalues, read off the
/// characteristic polynomial computed by the trace-power recursion
/// (Newton's identities). Division-free in the matrix entries; exact up to
/// floating rounding for small n.
pub fn sigma(a: &CMatrix) -> SigmaPoint {
    let n = a.n();
    // p[k] = tr(A^{k+1})
    let mut powers = Vec::with_capacity(n);
    let mut acc = a.clone();
    for k in 0..n {
        if k > 0 {
            acc = acc.mul(a);
        }
        powers.push(acc.trace());
    }
    // k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
    let mut e = vec![C64::new(1.0, 0.0)];
    for k in 1..=n {
        let mut s = C64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * e[k - i] * powers[i - 1];
        }
        e.push(s / k as f64);
    }
    SigmaPoint::new(e[1..].to_vec())
}

/// Characteristic polynomial t^n + sum_j (-1)^j sigma_j t^{n-j}.
pub fn char_poly(a: &CMatrix) -> Polynomial {
    char_poly_from_sigma(&sigma(a))
}

/// The monic polynomial whose coefficient vector encodes a sigma point.
pub fn char_poly_from_sigma(s: &SigmaPoint) -> Polynomial {
    let n = s.n();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    for j in 1..=n {
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        coeffs[n - j] = sign * s.coords()[j - 1];
    }
    Polynomial::new(coeffs)
}

/// Spectral radius via the characteristic polynomial roots.
pub fn spectral_radius(a: &CMatrix, tol: f64) -> Result<f64> {
    let roots = poly_roots(&char_poly(a), tol)?;
    Ok(roots.iter().map(|r| r.norm()).fold(0.0, f64::max))
}

/// Membership in the spectral ball with a safety margin:
/// true iff r(A) < 1 - margin (the boundary r(A) = 1 is rejected).
pub fn in_spectral_ball(a: &CMatrix, margin: f64) -> Result<bool> {
    if margin < 0.0 {
        return Err(Error::InvalidInput("margin must be >= 0".into()));
    }
    Ok(spectral_radius(a, 1e-12)? < 1.0 - margin)
}

/// Companion matrix C_s with sigma(C_s) = s: ones on the subdiagonal,
/// characteristic coefficients down the last column.
pub fn companion(s: &SigmaPoint) -> CMatrix {
    let n = s.n();
    let p = char_poly_from_sigma(s);
    let mut c = CMatrix::zeros(n);
    for i in 1..n {
        c[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        c[(i, n - 1)] = -p.coeff(i);
    }
    c
}

/// The Mobius automorphism M -> (lambda I - M)(I - conj(lambda) M)^{-1} of
/// the spectral ball. The spectrum maps pointwise by the scalar Mobius map.
pub fn mobius_matrix(lambda: C64, m: &CMatrix) -> Result<CMatrix> {
    if lambda.norm() >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "mobius parameter must lie in the unit disc, |lambda| = {}",
            lambda.norm()
        )));
    }
    let n = m.n();
    let id = CMatrix::identity(n);
    let num = id.scale(lambda).sub(m);
    let den = id.sub(&m.scale(lambda.conj()));
    let inv = den.inverse()?;
    Ok(num.mul(&inv))
}

/// Scalar Mobius map used by the matrix version on each eigenvalue.
pub fn mobius_scalar(lambda: C64, z: C64) -> C64 {
    (lambda - z) / (C64::new(1.0, 0.0) - lambda.conj() * z)
}

#[allow(clippy::needless_range_loop)] // pairwise union-find reads best indexed
fn cluster_roots(roots: &[C64], tol: f64) -> Result<Vec<(C64, usize)>> {
    // Single-linkage union-find at distance tol.
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (roots[i] - roots[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<C64>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(roots[i]);
    }
    let mut clusters: Vec<(C64, usize)> = groups
        .values()
        .map(|grp| {
            let mean = grp.iter().sum::<C64>() / grp.len() as f64;
            (mean, grp.len())
        })
        .collect();
    clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    // Two clusters in the gray zone [tol, 10 tol] mean the grouping is
    // unreliable at this tolerance.
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            let d = (clusters[i].0 - clusters[j].0).norm();
            if d <= 10.0 * tol {
                return Err(Error::AmbiguousClustering(format!(
                    "cluster centers separated by {d:.3e}, within [tol, 10 tol] = [{:.1e}, {:.1e}]",
                    tol,
                    10.0 * tol
                )));
            }
        }
    }
    Ok(clusters)
}

/// Eigenvalues with algebraic, geometric and minimal-polynomial
/// multiplicities.
///
/// Roots of the characteristic polynomial are clustered within `tol`; a
/// declared hint (exact structural input) bypasses clustering entirely.
/// Numerical ranks use a singular-value threshold scaled by both the power
/// of A under inspection and the shifted matrix itself, so that rank
/// decisions degrade towards `AmbiguousClustering` rather than silently
/// returning impossible multiplicities.
pub fn spectral_data(a: &CMatrix, tol: f64, declared: Option<&ClusterHint>) -> Result<SpectralData> {
    if tol <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let n = a.n();
    let clusters: Vec<(C64, usize)> = match declared {
        Some(hint) => {
            let total: usize = hint.0.iter().map(|&(_, m)| m).sum();
            if total != n {
                return Err(Error::InvalidInput(format!(
                    "cluster hint multiplicities sum to {total}, expected {n}"
                )));
            }
            let mut c = hint.0.clone();
            c.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
            c
        }
        None => {
            // Roots are polished to their noise floor; 3e-12 is the
            // acceptance criterion, not the accuracy driver.
            let roots = poly_roots(&char_poly(a), (3e-12f64).min(tol))?;
            cluster_roots(&roots, tol)?
        }
    };

    let scale_a = a.singular_values()[0].max(1.0);
    let mut eigen = Vec::with_capacity(clusters.len());
    for (value, alg_mult) in clusters {
        let shifted = a.sub(&CMatrix::identity(n).scale(value));
        // Rank chain of (A - value I)^k, k = 1.. until stable.
        let mut ranks = vec![n];
        let mut power = CMatrix::identity(n);
        for k in 1..=(alg_mult + 1) {
            power = power.mul(&shifted);
            let threshold = tol * scale_a.powi(k as i32).max(power.singular_values()[0]);
            ranks.push(power.rank_with_threshold(threshold));
        }
        let geo_mult = n - ranks[1];
        if geo_mult < 1 || geo_mult > alg_mult {
            return Err(Error::AmbiguousClustering(format!(
                "geometric multiplicity {geo_mult} outside [1, {alg_mult}] at eigenvalue {value}; \
                 raise tol or pass a declared hint"
            )));
        }
        let mut min_mult = alg_mult;
        for k in 1..=alg_mult {
            if ranks[k] == ranks[k + 1] {
                min_mult = k;
                break;
            }
        }
        if (min_mult == alg_mult) != (geo_mult == 1) {
            return Err(Error::AmbiguousClustering(format!(
                "inconsistent multiplicities at {value}: alg {alg_mult}, geo {geo_mult}, min {min_mult}"
            )));
        }
        eigen.push(EigenInfo {
            value,
            alg_mult,
            geo_mult,
            min_mult,
        });
    }
    Ok(SpectralData { eigen, tol })
}

fn krylov_cyclic(a: &CMatrix, tol: f64, seed: u64) -> bool {
    let n = a.n();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut col: Vec<C64> = v.iter().map(|z| z / norm).collect();
    let mut k = CMatrix::zeros(n);
    for j in 0..n {
        if j > 0 {
            col = a.mul_vec(&col);
            // Column normalization keeps the rank test meaningful when the
            // spectral radius is small.
            let cn = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if cn > 0.0 {
                for z in col.iter_mut() {
                    *z /= cn;
                }
            }
        }
        for i in 0..n {
            k[(i, j)] = col[i];
        }
    }
    let s = k.singular_values();
    k.rank_with_threshold(tol * s[0]) == n
}

/// True iff every eigenvalue has geometric multiplicity 1 (equivalently the
/// minimal polynomial equals the characteristic polynomial).
///
/// The rank-based answer is cross-checked by a seeded Krylov test with one
/// random vector; disagreement raises `AmbiguousClustering`, since the two
/// criteria only split when the numerics are unreliable.
pub fn is_cyclic(a: &CMatrix, tol: f64) -> Result<bool> {
    let sd = spectral_data(a, tol, None)?;
    is_cyclic_inner(a, tol, &sd)
}

/// Same as [`is_cyclic`] but reusing / declaring the cluster structure.
pub fn is_cyclic_with_hint(a: &CMatrix, tol: f64, hint: &ClusterHint) -> Result<bool> {
    let sd = spectral_data(a, tol, Some(hint))?;
    is_cyclic_inner(a, tol, &sd)
}

/// Hint-optional form for callers that thread hints through.
pub fn is_cyclic_with_opt_hint(a: &CMatrix, tol: f64, hint: Option<&ClusterHint>) -> Result<bool> {
    let sd = spectral_data(a, tol, hint)?;
    is_cyclic_inner(a, tol, &sd)
}

fn is_cyclic_inner(a: &CMatrix, tol: f64, sd: &SpectralData) -> Result<bool> {
    let rank_based = sd.is_cyclic();
    let krylov = krylov_cyclic(a, tol, KRYLOV_SEED);
    if rank_based != krylov {
        return Err(Error::AmbiguousClustering(format!(
            "cyclicity tests disagree (ranks say {rank_based}, Krylov says {krylov})"
        )));
    }
    Ok(rank_based)
}
