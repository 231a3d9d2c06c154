//! Constructive lifting of analytic discs through a matrix with a single
//! eigenvalue (and the dimension-3 two-eigenvalue normal form).
//!
//! The pipeline reduces the matrix to a nilpotent canonical form by a
//! Mobius automorphism and a Jordan-basis conjugation, reads the
//! derivative-vanishing conditions off the form, strips the forced zero
//! coefficients to produce the companion-shaped lift, and transports the
//! result back, pinning both endpoints by a holomorphic conjugation path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bounds::disc::AnalyticDisc;
use crate::error::{Error, Result};
use crate::gn_geometry::SigmaPoint;
use crate::matrix_core::matrix::{matrix_exp, matrix_log, C64, CMatrix};
use crate::matrix_core::poly::Polynomial;
use crate::matrix_core::spectral::{
    in_spectral_ball, is_cyclic, mobius_matrix, sigma, spectral_data, ClusterHint,
};

const THETA_TOL: f64 = 1e-10;
const ENDPOINT_TOL: f64 = 1e-8;
const CHAIN_SEED: u64 = 0x10AD_CAB1;

/// Jordan structure of a nilpotent matrix, encoded by its set of zero
/// columns F0 (1-based). Column j of the canonical matrix carries a 1 at
/// row j-1 exactly when j is not in F0. Block sizes are the gaps between
/// consecutive F0 indices and are kept non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NilpotentJordanForm {
    n: usize,
    f0: Vec<usize>,
}

impl NilpotentJordanForm {
    pub fn from_zero_columns(n: usize, mut f0: Vec<usize>) -> Result<Self> {
        f0.sort_unstable();
        f0.dedup();
        if f0.first() != Some(&1) {
            return Err(Error::InvalidInput("column 1 must be a zero column".into()));
        }
        if f0.iter().any(|&j| j < 1 || j > n) {
            return Err(Error::InvalidInput("zero columns out of range".into()));
        }
        let form = NilpotentJordanForm { n, f0 };
        let sizes = form.block_sizes();
        if sizes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(
                "block sizes must be non-decreasing (gap monotonicity)".into(),
            ));
        }
        Ok(form)
    }

    /// Builds the form whose Jordan blocks have the given sizes.
    pub fn from_block_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidInput("block sizes must be positive".into()));
        }
        let mut sorted = sizes.to_vec();
        sorted.sort_unstable();
        let n = sorted.iter().sum();
        let mut f0 = Vec::with_capacity(sorted.len());
        let mut start = 1;
        for s in sorted {
            f0.push(start);
            start += s;
        }
        Self::from_zero_columns(n, f0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Zero-column indices, 1-based and sorted.
    pub fn f0(&self) -> &[usize] {
        &self.f0
    }

    /// Complement of F0 in 1..=n.
    pub fn f1(&self) -> Vec<usize> {
        (1..=self.n).filter(|j| !self.f0.contains(j)).collect()
    }

    /// Rank of the canonical matrix.
    pub fn rank(&self) -> usize {
        self.n - self.f0.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut boundaries = self.f0.clone();
        boundaries.push(self.n + 1);
        boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// The canonical matrix: 1 at (j-1, j) in 1-based coordinates for every
    /// j outside F0.
    pub fn canonical_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n);
        for j in 2..=self.n {
            if !self.f0.contains(&j) {
                m[(j - 2, j - 1)] = C64::new(1.0, 0.0);
            }
        }
        m
    }
}

/// Vanishing orders forced on disc coordinates by the form:
/// d_i = 1 + #(F0 within the last i-1 column indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeVector(pub Vec<usize>);

pub fn degree_vector(form: &NilpotentJordanForm) -> DegreeVector {
    let n = form.n();
    let d = (1..=n)
        .map(|i| {
            let lo = n + 2 - i; // window [n-i+2 .. n] is empty when i = 1
            1 + form.f0().iter().filter(|&&j| j >= lo && j <= n).count()
        })
        .collect();
    DegreeVector(d)
}

/// Residuals |phi_i^(k)(0)| for 0 <= k <= d_i - 1, flattened coordinate by
/// coordinate. Derivatives are read off polynomial coefficients exactly.
/// The lifting conditions hold iff every residual is <= 1e-10.
pub fn theta_residuals(phi: &AnalyticDisc, form: &NilpotentJordanForm) -> Vec<f64> {
    let d = degree_vector(form).0;
    let mut out = Vec::new();
    for (i, di) in d.iter().enumerate() {
        let p = phi.coord(i);
        let mut factorial = 1.0f64;
        for k in 0..*di {
            if k > 0 {
                factorial *= k as f64;
            }
            out.push(factorial * p.coeff(k).norm());
        }
    }
    out
}

/// Superdiagonal entry of the lift matrix: the constant 1 or the variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftEntry {
    One,
    Zeta,
}

impl LiftEntry {
    fn eval(self, zeta: C64) -> C64 {
        match self {
            LiftEntry::One => C64::new(1.0, 0.0),
            LiftEntry::Zeta => zeta,
        }
    }
}

/// The companion-shaped lift: superdiagonal entries f_2..f_n and last-row
/// polynomials psi_1..psi_n (after exact cancellation of the forced zeros).
#[derive(Debug, Clone, PartialEq)]
pub struct LiftFunction {
    n: usize,
    f: Vec<LiftEntry>,
    psi: Vec<Polynomial>,
}

impl LiftFunction {
    pub fn n(&self) -> usize {
        self.n
    }

    /// f_2..f_n in column order.
    pub fn f(&self) -> &[LiftEntry] {
        &self.f
    }

    /// psi_1..psi_n.
    pub fn psi(&self) -> &[Polynomial] {
        &self.psi
    }

    /// Assembles the matrix value at a point of the disc.
    pub fn matrix_at(&self, zeta: C64) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zeros(n);
        for (idx, entry) in self.f.iter().enumerate() {
            let j = idx + 2; // column index, 1-based
            m[(j - 2, j - 1)] = entry.eval(zeta);
        }
        for c in 0..n {
            m[(n - 1, c)] = self.psi[n - 1 - c].eval(zeta);
        }
        m
    }
}

impl Serialize for LiftFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let f: Vec<&str> = self
            .f
            .iter()
            .map(|e| match e {
                LiftEntry::One => "1",
                LiftEntry::Zeta => "zeta",
            })
            .collect();
        let psi: Vec<Vec<[f64; 2]>> = self
            .psi
            .iter()
            .map(|p| p.coeffs().iter().map(|c| [c.re, c.im]).collect())
            .collect();
        let mut st = serializer.serialize_struct("LiftFunction", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("f", &f)?;
        st.serialize_field("psi", &psi)?;
        st.end()
    }
}

/// Builds the lift of an admissible disc through the canonical form:
/// f_j = 1 on F1 and the variable on F0, and psi_j is the j-th coordinate
/// with its forced zero coefficients stripped, signed so that the closed
/// form of [`sigma_of_lift`] reproduces the disc.
pub fn build_lift(phi: &AnalyticDisc, form: &NilpotentJordanForm) -> Result<LiftFunction> {
    let n = form.n();
    if phi.n() != n {
        return Err(Error::InvalidInput(
            "disc dimension does not match the form".into(),
        ));
    }
    let residuals = theta_residuals(phi, form);
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > THETA_TOL {
        return Err(Error::ThetaViolated(worst));
    }
    let d = degree_vector(form).0;
    let psi = (1..=n)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            phi.coord(j - 1)
                .strip_low(d[j - 1] - 1)
                .scale(C64::new(sign, 0.0))
        })
        .collect();
    let f = (2..=n)
        .map(|j| {
            if form.f0().contains(&j) {
                LiftEntry::Zeta
            } else {
                LiftEntry::One
            }
        })
        .collect();
    Ok(LiftFunction { n, f, psi })
}

/// Closed form for the symmetric functions of the lift matrix:
/// sigma_i = (-1)^{i+1} psi_i * prod_{k=n-i+2}^{n} f_k, no determinant
/// needed. Must agree with `matrix_core::sigma` of the assembled matrix.
pub fn sigma_of_lift(lift: &LiftFunction, zeta: C64) -> SigmaPoint {
    let n = lift.n;
    let coords = (1..=n)
        .map(|i| {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            let mut prod = C64::new(sign, 0.0);
            for k in (n + 2 - i).max(2)..=n {
                prod *= lift.f[k - 2].eval(zeta);
            }
            prod * lift.psi[i - 1].eval(zeta)
        })
        .collect();
    SigmaPoint::new(coords)
}

// ---------------------------------------------------------------------------
// Normal forms
// ---------------------------------------------------------------------------

/// Jordan chains of a numerically nilpotent matrix: returns the canonical
/// form and Q with Q^{-1} N Q = F (columns of Q are the chain vectors).
fn jordan_chains(n_mat: &CMatrix, tol: f64) -> Result<(NilpotentJordanForm, CMatrix)> {
    let n = n_mat.n();
    let scale = n_mat.singular_values()[0];
    if scale <= tol {
        let form = NilpotentJordanForm::from_block_sizes(&vec![1; n])?;
        return Ok((form, CMatrix::identity(n)));
    }

    // Rank chain of powers.
    let mut ranks = vec![n];
    let mut power = CMatrix::identity(n);
    let sref = scale.max(1e-8);
    for k in 1..=n {
        power = power.mul(n_mat);
        let thr = tol * sref.powi(k as i32).max(power.singular_values()[0]);
        ranks.push(power.rank_with_threshold(thr));
    }
    if ranks[n] != 0 {
        return Err(Error::NotSingleEigenvalue(
            "matrix is not nilpotent within tolerance".into(),
        ));
    }
    // blocks_ge[k] = number of Jordan blocks of size >= k.
    let mut blocks_ge = vec![0usize; n + 2];
    for k in 1..=n {
        blocks_ge[k] = ranks[k - 1] - ranks[k];
    }
    let smax = (1..=n).rev().find(|&k| blocks_ge[k] > 0).unwrap();
    let mut sizes = Vec::new();
    for k in 1..=smax {
        for _ in 0..blocks_ge[k].saturating_sub(blocks_ge[k + 1]) {
            sizes.push(k);
        }
    }
    sizes.sort_unstable();
    let form = NilpotentJordanForm::from_block_sizes(&sizes)?;
    let f = form.canonical_matrix();

    // Null space bases of the powers, for chain tops.
    let mut kernels: Vec<Vec<Vec<C64>>> = vec![Vec::new()];
    let mut power = CMatrix::identity(n);
    for k in 1..=smax {
        power = power.mul(n_mat);
        let thr = tol * sref.powi(k as i32).max(power.singular_values()[0]);
        kernels.push(power.null_space(thr));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(CHAIN_SEED);
    let mut best: Option<(f64, CMatrix)> = None;
    'attempts: for _ in 0..80 {
        let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
        // Blocks in non-decreasing size order to match the canonical form.
        for &s in &sizes {
            let basis = &kernels[s];
            if basis.is_empty() {
                continue 'attempts;
            }
            let mut top = vec![C64::new(0.0, 0.0); n];
            for b in basis {
                let w = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                for (t, &bi) in top.iter_mut().zip(b) {
                    *t += w * bi;
                }
            }
            // Chain bottom-first: N^{s-1} x, ..., N x, x.
            let mut chain = vec![top];
            for _ in 1..s {
                let prev = chain.last().unwrap();
                chain.push(n_mat.mul_vec(prev));
            }
            chain.reverse();
            columns.extend(chain);
        }
        let q = CMatrix::from_fn(n, |i, j| columns[j][i]);
        let sv = q.singular_values();
        let cond_ok = sv[n - 1] > 1e-8 * sv[0];
        if !cond_ok {
            continue;
        }
        let q_inv = match q.inverse() {
            Ok(qi) => qi,
            Err(_) => continue,
        };
        let err = q_inv.mul(n_mat).mul(&q).sub(&f).norm_fro();
        let quality = sv[n - 1] / sv[0];
        if err <= 1e-7 * (1.0 + scale) {
            match &best {
                Some((bq, _)) if *bq >= quality => {}
                _ => best = Some((quality, q)),
            }
        }
    }
    match best {
        Some((_, q)) => Ok((form, q)),
        None => Err(Error::AmbiguousClustering(
            "could not assemble a well-conditioned Jordan chain basis".into(),
        )),
    }
}

/// Canonical description of a matrix with a single eigenvalue: the Jordan
/// structure of its Mobius reduction to nilpotency, plus the conjugation P
/// with P * Phi_lambda(B) * P^{-1} equal to the canonical form matrix.
pub fn nilpotent_normal_form(
    b: &CMatrix,
    tol: f64,
    hint: Option<&ClusterHint>,
) -> Result<(NilpotentJordanForm, CMatrix)> {
    let sd = spectral_data(b, tol, hint)?;
    if sd.eigen.len() != 1 {
        return Err(Error::NotSingleEigenvalue(format!(
            "{} eigenvalue clusters found",
            sd.eigen.len()
        )));
    }
    // For a single eigenvalue the trace pins it to machine precision,
    // far better than the root-cluster centroid.
    let lambda = b.trace() / b.n() as f64;
    let reduced = mobius_matrix(lambda, b)?;
    let (form, q) = jordan_chains(&reduced, tol)?;
    // jordan_chains returns Q with Q^{-1} N Q = F; the advertised P acts on
    // the left, so P = Q^{-1}.
    Ok((form, q.inverse()?))
}

// ---------------------------------------------------------------------------
// Mobius transport of sigma-coordinates
// ---------------------------------------------------------------------------

/// The coordinates of the Mobius image of a disc, as a shared-denominator
/// rational family: coordinate i equals nums[i-1] / den. Exact polynomial
/// arithmetic on the input coefficients.
///
/// With P_s the monic polynomial of a point s, the image point's polynomial
/// is (1 - t conj(l))^n (-1)^n P_s((l - t)/(1 - t conj(l))) normalized by
/// its leading coefficient, which is the denominator below.
pub(crate) fn mobius_transport_disc(
    lambda: C64,
    phi: &AnalyticDisc,
) -> (Vec<Polynomial>, Polynomial) {
    let n = phi.n();
    let lc = lambda.conj();
    // num_t[k]: zeta-polynomial coefficient of t^k in
    //   sum_j (-1)^j phi_j (l - t)^{n-j} (1 - t lc)^j      (phi_0 = 1)
    let mut num_t: Vec<Polynomial> = vec![Polynomial::zero(); n + 1];
    for j in 0..=n {
        // (l - t)^{n-j} (1 - t lc)^j as scalar polynomials in t.
        let a = binom_expand(lambda, C64::new(-1.0, 0.0), n - j);
        let b = binom_expand(C64::new(1.0, 0.0), -lc, j);
        let mut tcoeffs = vec![C64::new(0.0, 0.0); n + 1];
        for (p, &ca) in a.iter().enumerate() {
            for (q, &cb) in b.iter().enumerate() {
                tcoeffs[p + q] += ca * cb;
            }
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let phi_j = if j == 0 {
            Polynomial::constant(C64::new(1.0, 0.0))
        } else {
            phi.coord(j - 1).clone()
        };
        for (k, &tc) in tcoeffs.iter().enumerate() {
            let term = phi_j.scale(tc * sign);
            num_t[k] = num_t[k].add(&term);
        }
    }
    // Leading t-coefficient is (-1)^n times the denominator.
    let nsign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let den = num_t[n].scale(C64::new(nsign, 0.0));
    let nums = (1..=n)
        .map(|i| {
            let sign = if (i + n).is_multiple_of(2) { 1.0 } else { -1.0 };
            num_t[n - i].scale(C64::new(sign, 0.0))
        })
        .collect();
    (nums, den)
}

/// Coefficients of (a + b t)^k, constant first.
fn binom_expand(a: C64, b: C64, k: usize) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for _ in 0..k {
        let mut next = vec![C64::new(0.0, 0.0); out.len() + 1];
        for (i, &c) in out.iter().enumerate() {
            next[i] += c * a;
            next[i + 1] += c * b;
        }
        out = next;
    }
    out
}

/// Taylor coefficients of num/den at 0, to the requested order. Requires
/// den(0) != 0.
fn taylor_of_quotient(num: &Polynomial, den: &Polynomial, order: usize) -> Result<Vec<C64>> {
    let b0 = den.coeff(0);
    if b0.norm() < 1e-14 {
        return Err(Error::Singular(b0.norm()));
    }
    let mut c = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = num.coeff(k);
        for j in 1..=k {
            acc -= den.coeff(j) * c[k - j];
        }
        c.push(acc / b0);
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Full lifts with endpoint pinning
// ---------------------------------------------------------------------------

/// A matrix-valued analytic disc assembled from a reduced-frame lift, an
/// inner conjugation, a Mobius transport and a holomorphic conjugation path
/// pinning the far endpoint.
#[derive(Debug, Clone)]
pub struct MatrixDisc {
    n: usize,
    lambda: C64,
    left: CMatrix,
    right: CMatrix,
    f: Vec<LiftEntry>,
    psi_num: Vec<Polynomial>,
    den: Polynomial,
    endpoint_conj: Option<(CMatrix, C64)>,
}

impl Serialize for MatrixDisc {
    /// Emits the analytic content: the Mobius parameter, the superdiagonal
    /// pattern and the last-row rational entries. The constant inner frame
    /// and the endpoint conjugation are evaluation details.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let f: Vec<&str> = self
            .f
            .iter()
            .map(|e| match e {
                LiftEntry::One => "1",
                LiftEntry::Zeta => "zeta",
            })
            .collect();
        let poly_wire = |p: &Polynomial| -> Vec<[f64; 2]> {
            p.coeffs().iter().map(|c| [c.re, c.im]).collect()
        };
        let mut st = serializer.serialize_struct("MatrixDisc", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("lambda", &[self.lambda.re, self.lambda.im])?;
        st.serialize_field("f", &f)?;
        st.serialize_field(
            "psi_num",
            &self.psi_num.iter().map(poly_wire).collect::<Vec<_>>(),
        )?;
        st.serialize_field("den", &poly_wire(&self.den))?;
        st.serialize_field("endpoint_conjugated", &self.endpoint_conj.is_some())?;
        st.end()
    }
}

impl MatrixDisc {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Evaluates the matrix disc at a point of the unit disc.
    pub fn eval(&self, zeta: C64) -> Result<CMatrix> {
        let n = self.n;
        let den = self.den.eval(zeta);
        if den.norm() < 1e-14 {
            return Err(Error::Singular(den.norm()));
        }
        let mut m0 = CMatrix::zeros(n);
        for (idx, entry) in self.f.iter().enumerate() {
            let j = idx + 2;
            m0[(j - 2, j - 1)] = entry.eval(zeta);
        }
        for c in 0..n {
            m0[(n - 1, c)] = self.psi_num[n - 1 - c].eval(zeta) / den;
        }
        let m1 = self.left.mul(&m0).mul(&self.right);
        let m2 = mobius_matrix(self.lambda, &m1)?;
        match &self.endpoint_conj {
            None => Ok(m2),
            Some((log, zeta0)) => {
                let v = matrix_exp(&log.scale(zeta / zeta0));
                let v_inv = v.inverse()?;
                Ok(v.mul(&m2).mul(&v_inv))
            }
        }
    }

    /// The sigma image at a point (the disc this lift lies over).
    pub fn sigma_at(&self, zeta: C64) -> Result<SigmaPoint> {
        Ok(sigma(&self.eval(zeta)?))
    }
}

fn krylov_basis(m: &CMatrix, seed: u64) -> Result<CMatrix> {
    let n = m.n();
    let mut best: Option<(f64, CMatrix)> = None;
    for attempt in 0..8u64 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ (attempt.wrapping_mul(0x9E37_79B9)));
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut k = CMatrix::zeros(n);
        let mut col = v;
        for j in 0..n {
            if j > 0 {
                col = m.mul_vec(&col);
            }
            for i in 0..n {
                k[(i, j)] = col[i];
            }
        }
        let sv = k.singular_values();
        let quality = sv[n - 1] / sv[0].max(f64::MIN_POSITIVE);
        if best.as_ref().is_none_or(|(q, _)| quality > *q) {
            best = Some((quality, k));
        }
    }
    let (quality, k) = best.unwrap();
    if quality < 1e-12 {
        return Err(Error::NotCyclic(format!(
            "Krylov basis is numerically singular (quality {quality:.3e})"
        )));
    }
    Ok(k)
}

/// Eigenvector basis with columns matched to the canonically sorted
/// spectrum; only usable when the eigenvalues are distinct.
fn eigenvector_basis(m: &CMatrix) -> Result<CMatrix> {
    let n = m.n();
    let mut roots = crate::matrix_core::spectral::char_poly(m).roots(1e-10)?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut e = CMatrix::zeros(n);
    for (j, &r) in roots.iter().enumerate() {
        let shifted = m.sub(&CMatrix::identity(n).scale(r));
        let (_, v) = shifted.svd();
        // Right singular vector of the smallest singular value.
        let mut col: Vec<C64> = (0..n).map(|i| v[(i, n - 1)]).collect();
        // Phase-fix: largest entry real positive.
        let lead = col
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        if lead.norm() > 0.0 {
            let phase = lead / lead.norm();
            for z in col.iter_mut() {
                *z /= phase;
            }
        }
        for i in 0..n {
            e[(i, j)] = col[i];
        }
    }
    Ok(e)
}

/// Constant similarity mapping `g` to `a`: both must be cyclic with the same
/// spectrum. Eigenvector matching is tried first (well conditioned for
/// separated spectra), Krylov companion bases second. The result is
/// scale-normalized; conjugation is insensitive to scalar factors and the
/// logarithm is better behaved near unit scale.
fn cyclic_similarity(a: &CMatrix, g: &CMatrix) -> Result<CMatrix> {
    let normalize = |s: CMatrix| {
        // Unit scale, then phase-center the spectrum: conjugation ignores
        // scalar factors, and a log with small eigenvalue arguments keeps
        // the interpolating path exp(w log S) tame for complex w.
        let scale = s.norm_fro() / (s.n() as f64).sqrt();
        let s = s.scale(C64::new(1.0 / scale, 0.0));
        match crate::matrix_core::spectral::char_poly(&s).roots(1e-10) {
            Ok(roots) => {
                let det: C64 = roots.iter().product();
                if det.norm() > 1e-12 {
                    let mean_arg = det.arg() / s.n() as f64;
                    s.scale(C64::from_polar(1.0, -mean_arg))
                } else {
                    s
                }
            }
            Err(_) => s,
        }
    };
    let check = |s: &CMatrix| -> bool {
        match s.inverse() {
            Ok(s_inv) => {
                let err = s.mul(g).mul(&s_inv).sub(a).norm_fro();
                err <= 1e-8 * (1.0 + a.norm_fro())
            }
            Err(_) => false,
        }
    };
    if let (Ok(ea), Ok(eg)) = (eigenvector_basis(a), eigenvector_basis(g)) {
        if let Ok(eg_inv) = eg.inverse() {
            let s = normalize(ea.mul(&eg_inv));
            let sv = s.singular_values();
            if sv[s.n() - 1] > 1e-7 * sv[0] && check(&s) {
                return Ok(s);
            }
        }
    }
    let ka = krylov_basis(a, 0x00A1_1CE5)?;
    let kg = krylov_basis(g, 0x0B0B_51ED)?;
    let s = normalize(ka.mul(&kg.inverse()?));
    if !check(&s) {
        return Err(Error::VerificationFailed {
            stage: "cyclic similarity".into(),
            error: f64::NAN,
            limit: 1e-8,
        });
    }
    Ok(s)
}

/// Lifts a disc through B: produces a matrix-valued disc with value B at 0,
/// value A at `zeta0`, lying exactly over `phi`. B must have a single
/// eigenvalue (any Jordan structure), or be the dimension-3 case of one
/// double eigenvalue with a 2-dimensional eigenspace plus a simple one.
/// A must be cyclic with sigma(A) = phi(zeta0).
pub fn lift_through(
    b: &CMatrix,
    a: &CMatrix,
    phi: &AnalyticDisc,
    zeta0: C64,
    tol: f64,
    hint_b: Option<&ClusterHint>,
) -> Result<MatrixDisc> {
    let n = b.n();
    if a.n() != n || phi.n() != n {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    if zeta0.norm() == 0.0 || zeta0.norm() >= 1.0 {
        return Err(Error::InvalidInput(
            "zeta0 must lie in the punctured unit disc".into(),
        ));
    }
    if !in_spectral_ball(b, 0.0)? || !in_spectral_ball(a, 0.0)? {
        return Err(Error::InvalidInput(
            "both endpoints must lie in the spectral ball".into(),
        ));
    }
    if !is_cyclic(a, tol)? {
        return Err(Error::NotCyclic("the matrix at zeta0 must be cyclic".into()));
    }
    let sb = sigma(b);
    let sa = sigma(a);
    if phi.eval(C64::new(0.0, 0.0)).dist(&sb) > ENDPOINT_TOL {
        return Err(Error::InvalidInput(
            "disc does not interpolate sigma(B) at 0".into(),
        ));
    }
    if phi.eval(zeta0).dist(&sa) > ENDPOINT_TOL {
        return Err(Error::InvalidInput(
            "disc does not interpolate sigma(A) at zeta0".into(),
        ));
    }

    let sd = spectral_data(b, tol, hint_b)?;
    let mut disc = match sd.eigen.len() {
        1 => lift_single_eigenvalue(b, phi, b.trace() / n as f64, tol, hint_b)?,
        2 if n == 3 => lift_two_eigenvalues_dim3(b, phi, &sd, tol)?,
        k => {
            return Err(Error::NotSingleEigenvalue(format!(
                "{k} eigenvalue clusters, supported forms are single-eigenvalue or the \
                 3-dimensional double-plus-simple case"
            )))
        }
    };

    // Pin the far endpoint: conjugate by V(zeta) = exp(zeta/zeta0 log S)
    // where S maps the current value at zeta0 to A. V(0) = I keeps B fixed,
    // and conjugation leaves the sigma image untouched.
    let g = disc.eval(zeta0)?;
    if !is_cyclic(&g, tol).unwrap_or(true) {
        return Err(Error::NotCyclic(
            "lift value at zeta0 is unexpectedly derogatory".into(),
        ));
    }
    let s = cyclic_similarity(a, &g)?;
    let log_s = matrix_log(&s)?;
    disc.endpoint_conj = Some((log_s, zeta0));

    verify_lift(&disc, b, a, phi, zeta0)?;
    Ok(disc)
}

fn lift_single_eigenvalue(
    b: &CMatrix,
    phi: &AnalyticDisc,
    lambda: C64,
    tol: f64,
    hint_b: Option<&ClusterHint>,
) -> Result<MatrixDisc> {
    let n = b.n();
    let (form, p) = nilpotent_normal_form(b, tol, hint_b)?;
    let (nums, den) = mobius_transport_disc(lambda, phi);
    let d = degree_vector(&form).0;

    // Theta conditions on the reduced disc, read from exact Taylor data.
    let mut worst = 0.0f64;
    for i in 0..n {
        let coeffs = taylor_of_quotient(&nums[i], &den, d[i].saturating_sub(1))?;
        let mut factorial = 1.0;
        for (k, c) in coeffs.iter().enumerate().take(d[i]) {
            if k > 0 {
                factorial *= k as f64;
            }
            worst = worst.max(factorial * c.norm());
        }
    }
    if worst > THETA_TOL {
        return Err(Error::ThetaViolated(worst));
    }

    let psi_num = (1..=n)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            nums[j - 1]
                .strip_low(d[j - 1] - 1)
                .scale(C64::new(sign, 0.0))
        })
        .collect();
    let f = (2..=n)
        .map(|j| {
            if form.f0().contains(&j) {
                LiftEntry::Zeta
            } else {
                LiftEntry::One
            }
        })
        .collect();
    let p_inv = p.inverse()?;
    Ok(MatrixDisc {
        n,
        lambda,
        left: p_inv,
        right: p,
        f,
        psi_num,
        den,
        endpoint_conj: None,
    })
}

/// Dimension 3, B with a double eigenvalue of geometric multiplicity 2 and
/// a distinct simple eigenvalue: the reduced form is diag(0, 0, l1) and the
/// lift uses the full-shift frame with one extra derivative condition on
/// the last coordinate.
fn lift_two_eigenvalues_dim3(
    b: &CMatrix,
    phi: &AnalyticDisc,
    sd: &crate::matrix_core::spectral::SpectralData,
    tol: f64,
) -> Result<MatrixDisc> {
    let double = sd
        .eigen
        .iter()
        .find(|e| e.alg_mult == 2)
        .ok_or_else(|| Error::NotSingleEigenvalue("no double eigenvalue found".into()))?;
    sd.eigen
        .iter()
        .find(|e| e.alg_mult == 1)
        .ok_or_else(|| Error::NotSingleEigenvalue("no simple eigenvalue found".into()))?;
    if double.geo_mult != 2 {
        return Err(Error::NotSingleEigenvalue(
            "double eigenvalue must have a 2-dimensional eigenspace".into(),
        ));
    }
    // Refine: the double eigenvalue is a root of the characteristic
    // polynomial's derivative, which is simple there; the cluster centroid
    // only seeds the choice between the two quadratic roots.
    let s = sigma(b);
    let (s1, s2) = (s.coords()[0], s.coords()[1]);
    let disc_root = (s1 * s1 - 3.0 * s2).sqrt();
    let cand1 = (s1 + disc_root) / 3.0;
    let cand2 = (s1 - disc_root) / 3.0;
    let mu = if (cand1 - double.value).norm() < (cand2 - double.value).norm() {
        cand1
    } else {
        cand2
    };
    let simple_value = s1 - 2.0 * mu;
    let l1 = crate::matrix_core::spectral::mobius_scalar(mu, simple_value);

    // Reduced matrix and its diagonalizing frame.
    let reduced = mobius_matrix(mu, b)?;
    let scale = reduced.singular_values()[0].max(1.0);
    let kernel = reduced.null_space(tol * scale);
    if kernel.len() != 2 {
        return Err(Error::AmbiguousClustering(format!(
            "expected a 2-dimensional kernel after reduction, found {}",
            kernel.len()
        )));
    }
    let shifted = reduced.sub(&CMatrix::identity(3).scale(l1));
    let eigvec = shifted.null_space(tol * scale.max(shifted.singular_values()[0]));
    if eigvec.len() != 1 {
        return Err(Error::AmbiguousClustering(format!(
            "expected a simple eigenvector after reduction, found {}",
            eigvec.len()
        )));
    }
    let q = CMatrix::from_fn(3, |i, j| match j {
        0 => kernel[0][i],
        1 => kernel[1][i],
        _ => eigvec[0][i],
    });
    let q_inv = q.inverse()?;

    let (nums, den) = mobius_transport_disc(mu, phi);
    // Conditions: phi'_2 and phi'_3 vanish at 0 (interpolation of
    // sigma(reduced) = (l1, 0, 0)) and additionally phi'_3 has a double
    // zero. Only the extra derivative is a lifting condition proper.
    let t3 = taylor_of_quotient(&nums[2], &den, 1)?;
    if t3[1].norm() > THETA_TOL {
        return Err(Error::ThetaViolated(t3[1].norm()));
    }
    let psi_num = vec![
        nums[0].clone(),
        nums[1].strip_low(1).scale(C64::new(-1.0, 0.0)),
        nums[2].strip_low(2),
    ];
    let f = vec![LiftEntry::Zeta, LiftEntry::Zeta];

    // Frame matching at 0: the assembled lift has value W0 with last row
    // (psi_3(0), psi_2(0), l1); T carries its kernel and eigenvector onto
    // the reduced diagonal frame.
    let den0 = den.eval(C64::new(0.0, 0.0));
    let w_bottom = [
        psi_num[2].eval(C64::new(0.0, 0.0)) / den0,
        psi_num[1].eval(C64::new(0.0, 0.0)) / den0,
        psi_num[0].eval(C64::new(0.0, 0.0)) / den0,
    ];
    let lam = w_bottom[2];
    if lam.norm() < 1e-12 {
        return Err(Error::AmbiguousClustering(
            "reduced simple eigenvalue is numerically zero".into(),
        ));
    }
    let mut t = CMatrix::zeros(3);
    // Kernel vectors (1, 0, -w3/lam) and (0, 1, -w2/lam), eigenvector e3.
    t[(0, 0)] = C64::new(1.0, 0.0);
    t[(2, 0)] = -w_bottom[0] / lam;
    t[(1, 1)] = C64::new(1.0, 0.0);
    t[(2, 1)] = -w_bottom[1] / lam;
    t[(2, 2)] = C64::new(1.0, 0.0);
    let t_inv = t.inverse()?;

    Ok(MatrixDisc {
        n: 3,
        lambda: mu,
        left: q.mul(&t_inv),
        right: t.mul(&q_inv),
        f,
        psi_num,
        den,
        endpoint_conj: None,
    })
}

fn verify_lift(
    disc: &MatrixDisc,
    b: &CMatrix,
    a: &CMatrix,
    phi: &AnalyticDisc,
    zeta0: C64,
) -> Result<()> {
    let at0 = disc.eval(C64::new(0.0, 0.0))?;
    let err0 = at0.sub(b).norm_fro();
    if err0 > ENDPOINT_TOL {
        return Err(Error::VerificationFailed {
            stage: "lift endpoint at 0".into(),
            error: err0,
            limit: ENDPOINT_TOL,
        });
    }
    let at1 = disc.eval(zeta0)?;
    let err1 = at1.sub(a).norm_fro();
    if err1 > ENDPOINT_TOL {
        return Err(Error::VerificationFailed {
            stage: "lift endpoint at zeta0".into(),
            error: err1,
            limit: ENDPOINT_TOL,
        });
    }
    // The conjugation path has exponent zeta/zeta0, so its conditioning is
    // controlled on the circle through the far endpoint; sample there.
    let radius = zeta0.norm();
    let mut worst = 0.0f64;
    for k in 0..64 {
        let zeta = C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / 64.0);
        let dev = disc.sigma_at(zeta)?.dist(&phi.eval(zeta));
        worst = worst.max(dev);
    }
    if worst > ENDPOINT_TOL {
        return Err(Error::VerificationFailed {
            stage: "sigma image of lift".into(),
            error: worst,
            limit: ENDPOINT_TOL,
        });
    }
    Ok(())
}
