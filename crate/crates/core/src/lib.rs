//! Numerical toolkit for a scalar-coupled, unitarily time-reversal invariant
//! Dirac equation and its conventional (vector-coupled) counterpart.
//!
//! Units are natural (hbar = c = 1) with energies and momenta in electron
//! masses unless a function says otherwise.

pub mod algebra;
pub mod checks;
pub mod exec;
pub mod fields;
pub mod grid;
pub mod nls;
pub mod radial;
pub mod scattering;
pub mod spectrum;
pub mod tolerances;

pub use exec::Execution;

/// CODATA 2018 fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.035999084;
/// Electron mass in eV.
pub const ELECTRON_MASS_EV: f64 = 510998.95;
