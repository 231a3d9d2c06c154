//! Polynomial analytic discs into the symmetrized polydisc.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gn_geometry::{max_root_modulus_certified, SigmaPoint};
use crate::matrix_core::matrix::C64;
use crate::matrix_core::poly::Polynomial;

/// A candidate disc: n polynomial coordinates in the disc variable.
///
/// The membership invariant (evaluations stay in the symmetrized polydisc)
/// is not enforced by construction; [`AnalyticDisc::boundary_margin`]
/// re-checks it on a boundary grid wherever a certificate depends on it.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticDisc {
    coords: Vec<Polynomial>,
    degree_cap: usize,
}

impl AnalyticDisc {
    pub fn new(coords: Vec<Polynomial>, degree_cap: usize) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("disc needs at least one coordinate".into()));
        }
        if coords.iter().any(|p| p.degree() > degree_cap) {
            return Err(Error::InvalidInput(format!(
                "coordinate degree exceeds cap {degree_cap}"
            )));
        }
        Ok(AnalyticDisc { coords, degree_cap })
    }

    /// The stationary disc at a point.
    pub fn constant(s: &SigmaPoint) -> Self {
        AnalyticDisc {
            coords: s.coords().iter().map(|&c| Polynomial::constant(c)).collect(),
            degree_cap: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn coords(&self) -> &[Polynomial] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Polynomial {
        &self.coords[i]
    }

    pub fn eval(&self, zeta: C64) -> SigmaPoint {
        SigmaPoint::new(self.coords.iter().map(|p| p.eval(zeta)).collect())
    }

    /// Smallest membership margin over a grid on the circle of the given
    /// radius: min over nodes of 1 - (max root modulus of the evaluated
    /// point). Positive means the whole grid sits inside the domain; by
    /// log-subharmonicity of the spectral radius the boundary controls the
    /// interior.
    ///
    /// The per-node modulus comes from bisecting the Schur-Cohn membership
    /// test, which stays exact for multiple roots (extremal discs ride the
    /// boundary with fully degenerate spectra); only nodes the recursion
    /// cannot decide fall back to root finding.
    pub fn boundary_margin(&self, grid: usize, radius: f64) -> Result<f64> {
        let mut margin = f64::INFINITY;
        for k in 0..grid {
            let zeta = C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / grid as f64);
            let point = self.eval(zeta);
            margin = margin.min(1.0 - max_root_modulus_certified(&point)?);
        }
        Ok(margin)
    }

    /// Adds the linear correction that pins `self(alpha)` to `target`
    /// exactly while keeping the value at 0 unchanged.
    pub fn project_interpolation(&self, alpha: C64, target: &SigmaPoint) -> Result<AnalyticDisc> {
        if alpha.norm() == 0.0 {
            return Err(Error::InvalidInput("projection needs alpha != 0".into()));
        }
        let current = self.eval(alpha);
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let delta = (target.coords()[i] - current.coords()[i]) / alpha;
                p.add(&Polynomial::monomial(delta, 1))
            })
            .collect();
        AnalyticDisc::new(coords, self.degree_cap.max(1))
    }
}

impl Serialize for AnalyticDisc {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeff_rows: Vec<Vec<[f64; 2]>> = self
            .coords
            .iter()
            .map(|p| p.coeffs().iter().map(|c| [c.re, c.im]).collect())
            .collect();
        let mut st = serializer.serialize_struct("AnalyticDisc", 3)?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("degree_cap", &self.degree_cap)?;
        st.serialize_field("coords", &coeff_rows)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for AnalyticDisc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            degree_cap: usize,
            coords: Vec<Vec<[f64; 2]>>,
        }
        let w = Wire::deserialize(deserializer)?;
        if w.coords.len() != w.n || w.n == 0 {
            return Err(serde::de::Error::custom("disc coordinate count must equal n"));
        }
        let coords = w
            .coords
            .iter()
            .map(|row| Polynomial::new(row.iter().map(|&[re, im]| C64::new(re, im)).collect()))
            .collect();
        AnalyticDisc::new(coords, w.degree_cap).map_err(serde::de::Error::custom)
    }
}
