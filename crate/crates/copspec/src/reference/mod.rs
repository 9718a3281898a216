//! Ground-truth copula spectral densities and the asymptotic covariance of
//! the estimator, used as oracles by tests and by the `reference` CLI
//! subcommand.
//!
//! Gaussian linear models (AR/ARMA) admit analytic spectra through the
//! Gaussian copula; nonlinear models are handled by a long-run Monte Carlo
//! estimate with block standard errors.

mod asymptotic;
mod bvn;
mod gaussian;
mod mc;

pub use asymptotic::{asymptotic_covariance, AsymptoticCov};
pub use bvn::{bvn_cdf, std_normal_cdf, std_normal_quantile};
pub use gaussian::{arma_autocorrelations, gaussian_copula_spectrum};
pub use mc::{mc_copula_spectrum, McSpectrum};
