//! Numerical toolkit for the spectral ball and the symmetrized polydisc:
//! certified lower and upper bounds for Lempert-function values, a
//! constructive lifting of analytic discs through non-cyclic matrices, and
//! reproducible discontinuity certificates at desk scale.
//!
//! The crate is organized around the objects it computes with:
//!
//! - [`matrix_core`]: small dense complex matrices, characteristic
//!   polynomials, root finding, eigenvalue multiplicities, cyclicity,
//!   companion matrices and Mobius automorphisms.
//! - [`gn_geometry`]: membership and metric geometry of the symmetrized
//!   polydisc, including safe Euclidean inclusion radii.
//! - [`bounds`]: lower-bound engines (spectral products, boundary map
//!   family), optimization-based upper bounds over polynomial analytic
//!   discs, and sandwich reports.
//! - [`lifting`]: normal forms, degree vectors, derivative-vanishing
//!   conditions and companion-shaped lifts of discs through matrices with a
//!   single eigenvalue.
//! - [`discontinuity`]: the perturbation construction, cyclic approximants
//!   and the numeric certificates that exhibit discontinuity of the Lempert
//!   function, plus the Lempert-vs-Green strict inequality chain.
//! - [`cli`]: the batch front-end shared by the binary.

pub mod bounds;
pub mod cli;
pub mod config;
pub mod discontinuity;
pub mod error;
pub mod gn_geometry;
pub mod lifting;
pub mod matrix_core;

pub use config::RunConfig;
pub use error::{Error, Result};
