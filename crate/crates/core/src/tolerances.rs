//! Numerical tolerances shared by the library, its tests and the CLI header.

/// `|a g a^T - g|` accepted as Lorentz.
pub const LORENTZ_MEMBERSHIP: f64 = 1e-12;
/// `L gamma L^-1 = a gamma` entrywise.
pub const SPINOR_COVARIANCE: f64 = 1e-10;
/// Pairing of the energy-operator eigenvalues.
pub const SPECTRUM_PAIRING: f64 = 1e-12;

/// Closed-form ground state against `m / sqrt(1 + (Z alpha)^2)`.
pub const GROUND_STATE: f64 = 1e-12;
/// Largest `Z alpha` for which the series expansion is evaluated.
pub const SERIES_GUARD: f64 = 0.3;
/// Modified vs conventional doublet splitting, relative.
pub const SPLITTING_AGREEMENT: f64 = 1e-4;
/// Splitting vs `m (Z alpha)^4 / 32`, relative.
pub const SPLITTING_CLOSED_FORM: f64 = 1e-10;
/// Percent-difference table, absolute in percent.
pub const PERCENT_TABLE: f64 = 0.05;
/// Zeeman shifts must stay below this fraction of the fine splitting.
pub const ZEEMAN_WEAK_FIELD: f64 = 0.1;

/// Shooting solver against closed forms, relative to `m`.
pub const RADIAL_ORACLE: f64 = 1e-6;
/// Bisection width in energy.
pub const RADIAL_BISECTION: f64 = 1e-12;
pub const RADIAL_MAX_ITER: usize = 200;
/// Normalization of the radial functions.
pub const RADIAL_NORMALIZATION: f64 = 1e-8;

pub const SPINOR_NORM: f64 = 1e-12;
pub const SIGMA1: f64 = 1e-12;
pub const SIGMA2: f64 = 1e-10;
/// Low/high momentum limits of the Coulomb cross section.
pub const DCS_LIMIT: f64 = 1e-5;
/// Angular flatness of the cross-section ratio.
pub const DCS_RATIO_FLATNESS: f64 = 1e-10;
/// Default forward-angle cut in radians.
pub const THETA_MIN: f64 = 1e-3;

/// Point-source Poisson potential, relative.
pub const POISSON_POINT: f64 = 0.01;
/// Minimum measured convergence order of finite-difference residuals.
pub const MIN_ORDER: f64 = 1.9;

pub const SOLITON_SHAPE: f64 = 1e-6;
pub const NLS_NORM_DRIFT: f64 = 1e-9;
/// Largest `dt * max |N|` accepted by the split-step integrator.
pub const NLS_STABILITY: f64 = 0.1;

/// Every named constant, for output headers.
pub fn all() -> Vec<(&'static str, f64)> {
    vec![
        ("lorentz_membership", LORENTZ_MEMBERSHIP),
        ("series_guard", SERIES_GUARD),
        ("zeeman_weak_field", ZEEMAN_WEAK_FIELD),
        ("radial_bisection", RADIAL_BISECTION),
        ("radial_normalization", RADIAL_NORMALIZATION),
        ("spinor_norm", SPINOR_NORM),
        ("theta_min", THETA_MIN),
        ("nls_stability", NLS_STABILITY),
    ]
    .into_iter()
    .chain(Tolerances::default().entries())
    .collect()
}

macro_rules! acceptance_tolerances {
    ($($field:ident = $value:expr),* $(,)?) => {
        /// Acceptance tolerances, overridable by name (for example from a
        /// configuration file).
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct Tolerances {
            $(pub $field: f64,)*
        }

        impl Default for Tolerances {
            fn default() -> Self {
                Self { $($field: $value,)* }
            }
        }

        impl Tolerances {
            /// `(name, value)` pairs in declaration order.
            pub fn entries(&self) -> Vec<(&'static str, f64)> {
                vec![$((stringify!($field), self.$field),)*]
            }

            /// Sets the tolerance called `name`; fails on unknown names and on
            /// values that are negative or not finite.
            pub fn set(&mut self, name: &str, value: f64) -> Result<(), String> {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(format!("tolerance {name} = {value} must be finite and non-negative"));
                }
                match name {
                    $(stringify!($field) => self.$field = value,)*
                    _ => return Err(format!("unknown tolerance '{name}'")),
                }
                Ok(())
            }
        }
    };
}

acceptance_tolerances! {
    percent_table = PERCENT_TABLE,
    ground_state = GROUND_STATE,
    radial_oracle = RADIAL_ORACLE,
    splitting_agreement = SPLITTING_AGREEMENT,
    splitting_closed_form = SPLITTING_CLOSED_FORM,
    sigma1 = SIGMA1,
    sigma2 = SIGMA2,
    dcs_limit = DCS_LIMIT,
    dcs_ratio_flatness = DCS_RATIO_FLATNESS,
    spinor_covariance = SPINOR_COVARIANCE,
    spectrum_pairing = SPECTRUM_PAIRING,
    soliton_shape = SOLITON_SHAPE,
    nls_norm_drift = NLS_NORM_DRIFT,
    min_order = MIN_ORDER,
    poisson_point = POISSON_POINT,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_by_name() {
        let mut t = Tolerances::default();
        t.set("sigma1", 1e-9).unwrap();
        assert_eq!(t.sigma1, 1e-9);
        assert!(t.set("sigma9", 1.0).is_err());
        assert!(t.set("sigma2", -1.0).is_err());
        let names: Vec<_> = all().into_iter().map(|(n, _)| n).collect();
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(names.len(), dedup.len());
    }
}
