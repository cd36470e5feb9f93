//! Sampled fields: static Green's-function potentials, the interaction
//! potentials built from them, Dirac-equation residuals on 1+1 grids, the
//! gauge-function family and its constraints, and field serialization.

mod dirac;
mod gauge;
pub mod io;
mod poisson;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::Spinor4;
use crate::grid::{Grid, GridError, GridField};

pub use dirac::{
    dalembert_density_residual, density, equation_residual, equation_residual_field,
    plane_wave, PlaneWave1p1,
};
pub use gauge::{
    fluctuation_mass_sq, gauge_alpha, gauge_constraint_residual, gauge_covariance_defect,
    gauge_f, gauge_transform, interaction_four_potential, GaugeCoefficients,
};
pub use poisson::{
    convolution_potential, coulomb_kernel, greens_poisson, greens_poisson_vector,
    interaction_potentials, laplacian_defect, InteractionPotentials, MAX_POINTS,
};

/// Smallest sample count per axis for which the central stencils and the
/// excluded boundary layer leave a meaningful interior.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("GridTooSmall: axis with {got} samples, need at least {min}")]
    GridTooSmall { min: usize, got: usize },
    #[error("GridTooLarge: axis with {got} samples exceeds the direct-sum cap {max}")]
    GridTooLarge { max: usize, got: usize },
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("SupportExceedsGrid: {0}")]
    SupportExceedsGrid(String),
    #[error("ZeroDensity: density vanishes at site {index}")]
    ZeroDensity { index: usize },
    #[error("InvalidCoefficients: {0}")]
    InvalidCoefficients(String),
    #[error("Format: {0}")]
    Format(String),
    #[error("Io: {0}")]
    Io(String),
}

impl From<GridError> for FieldError {
    fn from(e: GridError) -> Self {
        FieldError::ShapeMismatch(e.to_string())
    }
}

impl From<std::io::Error> for FieldError {
    fn from(e: std::io::Error) -> Self {
        FieldError::Io(e.to_string())
    }
}

fn check_min_points<G: Grid>(grid: &G) -> Result<(), FieldError> {
    for a in grid.axes() {
        if a.len < MIN_POINTS {
            return Err(FieldError::GridTooSmall {
                min: MIN_POINTS,
                got: a.len,
            });
        }
    }
    Ok(())
}

fn same_grid<G: Grid, A, B>(a: &GridField<G, A>, b: &GridField<G, B>) -> Result<(), FieldError> {
    if a.grid() != b.grid() {
        return Err(FieldError::ShapeMismatch(format!(
            "grids differ: {:?} vs {:?}",
            a.grid().axes(),
            b.grid().axes()
        )));
    }
    Ok(())
}

/// Values that central differences can be taken of.
pub(crate) trait Linear: Copy + Send + Sync {
    fn sub(self, other: Self) -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, k: f64) -> Self;
}

impl Linear for f64 {
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

impl Linear for Spinor4 {
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, k: f64) -> Self {
        self * Complex64::from(k)
    }
}
