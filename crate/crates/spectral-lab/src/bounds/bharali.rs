//! Spectral lower bound for the Lempert function of the spectral ball:
//! products of pseudohyperbolic distances weighted by minimal-polynomial
//! multiplicities, maximized over both orderings of the pair.

use crate::error::{Error, Result};
use crate::gn_geometry::pseudo_hyperbolic;
use crate::matrix_core::matrix::CMatrix;
use crate::matrix_core::spectral::{spectral_data, ClusterHint, SpectralData};

/// Certified lower bound for the Lempert function at (A, B).
///
/// Evaluates
/// max{ max_{mu in sp(B)} prod_{lambda in sp(A)} rho(mu, lambda)^{m(lambda)} ;
///      max_{lambda in sp(A)} prod_{mu in sp(B)} rho(lambda, mu)^{m(mu)} }
/// where m is the minimal-polynomial multiplicity and rho the
/// pseudohyperbolic distance. Symmetric in (A, B) by construction.
pub fn bharali_lower(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<f64> {
    bharali_lower_with_hints(a, b, tol, None, None)
}

/// Same bound with declared cluster structure for either endpoint.
pub fn bharali_lower_with_hints(
    a: &CMatrix,
    b: &CMatrix,
    tol: f64,
    hint_a: Option<&ClusterHint>,
    hint_b: Option<&ClusterHint>,
) -> Result<f64> {
    let sa = spectral_data(a, tol, hint_a)?;
    let sb = spectral_data(b, tol, hint_b)?;
    if sa.spectral_radius() >= 1.0 || sb.spectral_radius() >= 1.0 {
        return Err(Error::InvalidInput(
            "both matrices must lie in the spectral ball".into(),
        ));
    }
    Ok(branch(&sb, &sa).max(branch(&sa, &sb)))
}

/// max over eigenvalues of `outer` of the product over `inner` of
/// rho(outer_value, inner_value)^{inner min_mult}.
fn branch(outer: &SpectralData, inner: &SpectralData) -> f64 {
    outer
        .eigen
        .iter()
        .map(|mu| {
            inner
                .eigen
                .iter()
                .map(|lam| pseudo_hyperbolic(mu.value, lam.value).powi(lam.min_mult as i32))
                .product::<f64>()
        })
        .fold(0.0, f64::max)
}
