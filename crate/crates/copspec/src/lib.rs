//! Copula (quantile-based) spectral analysis of univariate time series with
//! parametric-bootstrap model diagnostics.
//!
//! The crate estimates copula spectral densities from ranks (clipped FFTs,
//! cross copula periodograms, kernel smoothing over Fourier frequencies) and
//! assesses candidate parametric model classes (ARMA and GARCH families) by
//! simulating replicate estimates from a fitted model: pointwise "typical
//! region" bands and uniform-in-quantile p-values per frequency, together
//! with the corresponding SVG/CSV outputs.

pub mod bootstrap;
pub mod cli;
pub mod error;
pub mod fit;
pub mod io;
pub mod kernel;
pub mod models;
pub mod reference;
pub mod series;
pub mod spectra;
pub mod stream;

pub use bootstrap::{
    algorithm2_pvalues, coverage_indicator, run_parametric_bootstrap, self_calibration_check,
    typical_regions, BootstrapEnsemble, CalibrationReport, CoverageField, EstimatorConfig,
    ModelClass, PValueField, TypicalRegions,
};
pub use error::{Error, Result};
pub use fit::{fit_ar, fit_arma, fit_garch, nelder_mead, FitResult, GarchVariant};
pub use kernel::{KernelKind, KernelSpec};
pub use models::{check_admissible, parse_model, simulate, Admissibility, ModelSpec, SimConfig};
pub use reference::{
    asymptotic_covariance, bvn_cdf, gaussian_copula_spectrum, mc_copula_spectrum, AsymptoticCov,
    McSpectrum,
};
pub use series::{FrequencyGrid, QuantileGrid, TimeSeries};
pub use spectra::{
    clipped_dft, copula_periodogram, rank_transform, smoothed_estimate, SmoothingPlan,
    SpectralMatrix,
};
pub use stream::{derive_seed, derive_stream};
