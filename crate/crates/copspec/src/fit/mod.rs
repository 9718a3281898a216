//! Parameter estimation for the candidate model classes.
//!
//! The estimators only need to be sqrt(n)-consistent for the bootstrap
//! diagnostics to be valid: Yule-Walker for AR, Hannan-Rissanen with a
//! conditional-sum-of-squares refinement for ARMA, and Gaussian QMLE via
//! Nelder-Mead for the GARCH family.

mod garch;
mod linear;
mod nelder_mead;

pub use garch::{fit_garch, GarchVariant};
pub use linear::{fit_ar, fit_arma};
pub use nelder_mead::{nelder_mead, NelderMeadOutcome};

use crate::error::{Error, Result};
use crate::models::{check_admissible, ModelSpec};

/// A fitted model with its objective value (negative Gaussian
/// quasi-log-likelihood for GARCH-family fits, residual variance for
/// linear fits).
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub spec: ModelSpec,
    pub objective_value: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub(crate) fn validated(self) -> Result<Self> {
        let adm = check_admissible(&self.spec);
        if !adm.admissible {
            return Err(Error::FitFailure(format!(
                "fitted spec {} inadmissible: {}",
                self.spec, adm.message
            )));
        }
        if self.converged && !self.objective_value.is_finite() {
            return Err(Error::FitFailure("non-finite objective at convergence".into()));
        }
        Ok(self)
    }

    /// Canonical text form: model text plus objective.
    pub fn to_text(&self) -> String {
        format!(
            "{} objective={} converged={} iterations={}",
            self.spec, self.objective_value, self.converged, self.iterations
        )
    }
}
