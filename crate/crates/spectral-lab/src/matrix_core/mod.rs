//! Dense complex matrix primitives: characteristic polynomial, root
//! finding, spectral structure, cyclicity, companion matrices and the
//! Mobius automorphisms of the spectral ball.

pub mod matrix;
pub mod poly;
pub mod spectral;

pub use matrix::{matrix_exp, matrix_log, C64, CMatrix};
pub use poly::{poly_roots, roots_strictly_inside, Polynomial};
pub use spectral::{
    char_poly, char_poly_from_sigma, companion, in_spectral_ball, is_cyclic, is_cyclic_with_hint,
    mobius_matrix, mobius_scalar, sigma, spectral_data, spectral_radius, ClusterHint, EigenInfo,
    SpectralData,
};
