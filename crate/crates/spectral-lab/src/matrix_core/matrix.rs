//! Dense complex matrices, sized for the small dimensions of this toolkit.
//!
//! Everything here is written for n up to roughly 8: Gaussian elimination
//! with partial pivoting for inverses, one-sided Jacobi for singular values,
//! and scaling-and-squaring exp/log for the conjugation paths used by the
//! lifting code. No attempt is made at large-n performance.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense n-by-n complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    entries: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        CMatrix {
            n,
            entries: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from a row-major slice of length n*n.
    pub fn from_rows(n: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n*n");
        assert!(n >= 1);
        CMatrix {
            n,
            entries: entries.to_vec(),
        }
    }

    /// Real entries convenience constructor.
    pub fn from_real_rows(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n);
        Self::from_rows(
            n,
            &entries
                .iter()
                .map(|&x| C64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn conj_transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let mut m = self.clone();
        for (a, b) in m.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        m
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let mut m = self.clone();
        for (a, b) in m.entries.iter_mut().zip(&other.entries) {
            *a -= b;
        }
        m
    }

    pub fn scale(&self, c: C64) -> CMatrix {
        let mut m = self.clone();
        for a in m.entries.iter_mut() {
            *a *= c;
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn pow(&self, k: usize) -> CMatrix {
        let mut out = CMatrix::identity(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn norm_fro(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn norm_op(&self) -> f64 {
        self.singular_values()[0]
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Fails with `Error::Singular` when the smallest pivot encountered is
    /// below `1e-13` times the largest entry magnitude of the input.
    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.n;
        let scale = self.norm_max().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        let mut min_pivot = f64::INFINITY;
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            min_pivot = min_pivot.min(pivot_mag / scale);
            if pivot_mag < 1e-13 * scale {
                return Err(Error::Singular(pivot_mag / scale));
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        let _ = min_pivot;
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for col in 0..self.n {
            self.entries.swap(i * self.n + col, j * self.n + col);
        }
    }

    /// Singular values in descending order, by one-sided Jacobi.
    pub fn singular_values(&self) -> Vec<f64> {
        self.one_sided_jacobi().0
    }

    /// One-sided Jacobi SVD returning (singular values desc, V) with
    /// `self = U diag(s) V^H`; only V is accumulated.
    pub fn svd(&self) -> (Vec<f64>, CMatrix) {
        self.one_sided_jacobi()
    }

    fn one_sided_jacobi(&self) -> (Vec<f64>, CMatrix) {
        let n = self.n;
        // Columns of `b` are orthogonalized in place; rotations accumulate in v.
        let mut b = self.clone();
        let mut v = CMatrix::identity(n);
        let max_sweeps = 60;
        for _ in 0..max_sweeps {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    let mut app = 0.0;
                    let mut aqq = 0.0;
                    let mut apq = C64::new(0.0, 0.0);
                    for i in 0..n {
                        let bp = b[(i, p)];
                        let bq = b[(i, q)];
                        app += bp.norm_sqr();
                        aqq += bq.norm_sqr();
                        apq += bp.conj() * bq;
                    }
                    let denom = (app * aqq).sqrt();
                    if denom == 0.0 || apq.norm() <= 1e-15 * denom {
                        continue;
                    }
                    off = off.max(apq.norm() / denom);
                    let phase = apq / apq.norm();
                    let tau = (aqq - app) / (2.0 * apq.norm());
                    let t = if tau == 0.0 {
                        1.0
                    } else {
                        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..n {
                        let bp = b[(i, p)];
                        let bq = b[(i, q)];
                        b[(i, p)] = c * bp - s * phase.conj() * bq;
                        b[(i, q)] = s * phase * bp + c * bq;
                        let vp = v[(i, p)];
                        let vq = v[(i, q)];
                        v[(i, p)] = c * vp - s * phase.conj() * vq;
                        v[(i, q)] = s * phase * vp + c * vq;
                    }
                }
            }
            if off < 1e-14 {
                break;
            }
        }
        let mut cols: Vec<(f64, usize)> = (0..n)
            .map(|j| {
                let s = (0..n).map(|i| b[(i, j)].norm_sqr()).sum::<f64>().sqrt();
                (s, j)
            })
            .collect();
        cols.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let values = cols.iter().map(|&(s, _)| s).collect();
        let vperm = CMatrix::from_fn(n, |i, j| v[(i, cols[j].1)]);
        (values, vperm)
    }

    /// Numerical rank with an absolute singular-value threshold.
    pub fn rank_with_threshold(&self, threshold: f64) -> usize {
        self.singular_values()
            .iter()
            .filter(|&&s| s > threshold)
            .count()
    }

    /// Orthonormal basis (columns) of the numerical null space at the given
    /// absolute threshold.
    pub fn null_space(&self, threshold: f64) -> Vec<Vec<C64>> {
        let (s, v) = self.svd();
        let n = self.n;
        (0..n)
            .filter(|&j| s[j] <= threshold)
            .map(|j| (0..n).map(|i| v[(i, j)]).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.n + j]
    }
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn matrix_exp(m: &CMatrix) -> CMatrix {
    let norm = m.norm_fro();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let x = m.scale(C64::new(1.0 / 2f64.powi(s as i32), 0.0));
    let mut term = CMatrix::identity(m.n());
    let mut sum = CMatrix::identity(m.n());
    for k in 1..=24u32 {
        term = term.mul(&x).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    let mut out = sum;
    for _ in 0..s {
        out = out.mul(&out);
    }
    out
}

/// Principal square root by the Denman-Beavers iteration.
///
/// Requires no eigenvalues on the closed negative real axis; the caller is
/// responsible for pre-rotating the spectrum if needed.
fn matrix_sqrt_db(m: &CMatrix) -> Result<CMatrix> {
    let mut y = m.clone();
    let mut z = CMatrix::identity(m.n());
    for _ in 0..60 {
        let y_inv = y.inverse()?;
        let z_inv = z.inverse()?;
        let y_next = y.add(&z_inv).scale(C64::new(0.5, 0.0));
        let z_next = z.add(&y_inv).scale(C64::new(0.5, 0.0));
        let delta = y_next.sub(&y).norm_fro();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * (1.0 + y.norm_fro()) {
            break;
        }
    }
    Ok(y)
}

/// Matrix logarithm by inverse scaling and squaring.
///
/// Attempts a few spectral pre-rotations `e^{i theta} M` so the Denman-Beavers
/// square roots stay away from the negative real axis, and compensates the
/// rotation in the result. The output `L` satisfies `exp(L) = M` up to the
/// verification threshold; an error is returned when no rotation works.
pub fn matrix_log(m: &CMatrix) -> Result<CMatrix> {
    let scale = m.norm_fro();
    if scale == 0.0 {
        return Err(Error::Singular(0.0));
    }
    let pi = std::f64::consts::PI;
    let thetas = [
        0.0,
        pi / 3.0,
        -pi / 3.0,
        2.0 * pi / 3.0,
        pi / 6.0,
        -2.0 * pi / 3.0,
        pi / 2.0,
        5.0 * pi / 6.0,
    ];
    let mut last_err = 0.0;
    for &theta in &thetas {
        let rot = C64::from_polar(1.0, theta);
        let mut x = m.scale(rot);
        let mut k = 0u32;
        let mut ok = true;
        while x.sub(&CMatrix::identity(m.n())).norm_fro() > 0.25 {
            match matrix_sqrt_db(&x) {
                Ok(r) => x = r,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
            k += 1;
            if k > 50 {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        // log(I + E) by the Mercator series: converges since |E| <= 0.25.
        let e = x.sub(&CMatrix::identity(m.n()));
        let mut term = CMatrix::identity(m.n());
        let mut log_x = CMatrix::zeros(m.n());
        for j in 1..=48u32 {
            term = term.mul(&e);
            let c = if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64;
            log_x = log_x.add(&term.scale(C64::new(c, 0.0)));
        }
        let mut l = log_x.scale(C64::new(2f64.powi(k as i32), 0.0));
        // Undo the rotation: log M = log(e^{i theta} M) - i theta I.
        for i in 0..m.n() {
            l[(i, i)] -= C64::new(0.0, theta);
        }
        let back = matrix_exp(&l);
        let err = back.sub(m).norm_fro() / scale;
        if err <= 1e-12 {
            return Ok(l);
        }
        last_err = err;
    }
    Err(Error::VerificationFailed {
        stage: "matrix_log".into(),
        error: last_err,
        limit: 1e-12,
    })
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            n: usize,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let re = (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.re).collect())
            .collect();
        let im = (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.im).collect())
            .collect();
        Wire { n: self.n, re, im }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let w = Wire::deserialize(deserializer)?;
        if w.n == 0 {
            return Err(D::Error::custom("matrix dimension must be at least 1"));
        }
        if w.re.len() != w.n || w.im.len() != w.n {
            return Err(D::Error::custom("matrix rows do not match n"));
        }
        let mut entries = Vec::with_capacity(w.n * w.n);
        for (re_row, im_row) in w.re.iter().zip(&w.im) {
            if re_row.len() != w.n || im_row.len() != w.n {
                return Err(D::Error::custom("matrix columns do not match n"));
            }
            for (&re, &im) in re_row.iter().zip(im_row) {
                entries.push(C64::new(re, im));
            }
        }
        Ok(CMatrix { n: w.n, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_round_trip() {
        let a = CMatrix::from_rows(
            2,
            &[c(1.0, 1.0), c(2.0, 0.0), c(0.5, -0.3), c(0.0, 2.0)],
        );
        let inv = a.inverse().unwrap();
        let prod = a.mul(&inv);
        assert!(prod.sub(&CMatrix::identity(2)).norm_fro() < 1e-13);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = CMatrix::from_real_rows(2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(a.inverse(), Err(Error::Singular(_))));
    }

    #[test]
    fn jacobi_svd_known_values() {
        // diag(3, 4i) has singular values {4, 3}.
        let a = CMatrix::from_rows(2, &[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 4.0)]);
        let s = a.singular_values();
        assert!((s[0] - 4.0).abs() < 1e-12);
        assert!((s[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_gram() {
        let a = CMatrix::from_rows(
            3,
            &[
                c(1.0, 0.2),
                c(0.0, -1.0),
                c(2.0, 0.0),
                c(0.0, 0.0),
                c(3.0, 1.0),
                c(0.5, 0.5),
                c(-1.0, 0.0),
                c(0.0, 0.0),
                c(1.0, -1.0),
            ],
        );
        let (s, v) = a.svd();
        // A^H A = V diag(s^2) V^H
        let gram = a.conj_transpose().mul(&a);
        let mut rec = CMatrix::zeros(3);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    rec[(i, j)] += v[(i, k)] * s[k] * s[k] * v[(j, k)].conj();
                }
            }
        }
        assert!(gram.sub(&rec).norm_fro() < 1e-10 * (1.0 + gram.norm_fro()));
    }

    #[test]
    fn rank_of_nilpotent_shift() {
        let mut a = CMatrix::zeros(3);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 2)] = c(1.0, 0.0);
        assert_eq!(a.rank_with_threshold(1e-10), 2);
        assert_eq!(a.pow(2).rank_with_threshold(1e-10), 1);
        assert_eq!(a.pow(3).rank_with_threshold(1e-10), 0);
    }

    #[test]
    fn exp_log_round_trip() {
        let m = CMatrix::from_rows(
            3,
            &[
                c(0.2, 0.1),
                c(0.5, 0.0),
                c(0.0, -0.3),
                c(0.1, 0.0),
                c(-0.4, 0.2),
                c(0.3, 0.0),
                c(0.0, 0.0),
                c(0.2, -0.1),
                c(0.5, 0.4),
            ],
        );
        let e = matrix_exp(&m);
        let l = matrix_log(&e).unwrap();
        let back = matrix_exp(&l);
        assert!(back.sub(&e).norm_fro() < 1e-9 * (1.0 + e.norm_fro()));
    }

    #[test]
    fn log_handles_negative_real_eigenvalue() {
        // diag(-2, 0.5) has an eigenvalue on the negative real axis; the
        // rotation retry must still find a branch.
        let m = CMatrix::diagonal(&[c(-2.0, 0.0), c(0.5, 0.0)]);
        let l = matrix_log(&m).unwrap();
        let back = matrix_exp(&l);
        assert!(back.sub(&m).norm_fro() < 1e-9 * (1.0 + m.norm_fro()));
    }

    #[test]
    fn matrix_json_round_trip() {
        let a = CMatrix::from_rows(2, &[c(1.0, -2.0), c(0.0, 0.5), c(3.0, 0.0), c(0.0, 0.0)]);
        let s = serde_json::to_string(&a).unwrap();
        let b: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
