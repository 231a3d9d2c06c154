//! Shared run configuration: tolerances, grids, seeds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs shared by the bound engines, certificates and the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Clustering / rank tolerance for spectral computations.
    pub tol: f64,
    /// Circle grid size for the Caratheodory bound (power of two).
    pub grid: usize,
    /// Polynomial degree cap for disc searches; `None` means 2n.
    pub degree: Option<usize>,
    /// Independent restarts of the disc search.
    pub restarts: usize,
    /// Master seed; all randomness derives from it.
    pub seed: u64,
    /// Strictness margin certificates must clear.
    pub margin: f64,
    /// Directions sampled when estimating safe inclusion radii.
    pub directions: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-7,
            grid: 4096,
            degree: None,
            restarts: 32,
            seed: 42,
            margin: 1e-4,
            directions: 1024,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 || self.margin <= 0.0 {
            return Err(Error::InvalidInput(
                "tol and margin must be positive".into(),
            ));
        }
        if self.grid == 0 || !self.grid.is_power_of_two() {
            return Err(Error::InvalidInput("grid must be a power of two".into()));
        }
        if self.restarts == 0 || self.directions == 0 {
            return Err(Error::InvalidInput(
                "restarts and directions must be positive".into(),
            ));
        }
        if self.degree == Some(0) {
            return Err(Error::InvalidInput("degree must be positive".into()));
        }
        Ok(())
    }

    pub fn degree_for(&self, n: usize) -> usize {
        self.degree.unwrap_or(2 * n).max(n)
    }
}
