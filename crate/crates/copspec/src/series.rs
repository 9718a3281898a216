//! Core domain types: observation series, quantile-level grids and
//! frequency grids.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Minimum number of observations accepted anywhere in the crate.
pub const MIN_SERIES_LEN: usize = 8;

/// A finite real-valued observation sequence plus a label for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() < MIN_SERIES_LEN {
            return Err(Error::InvalidInput(format!(
                "series needs at least {MIN_SERIES_LEN} observations, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value {} at index {pos}",
                values[pos]
            )));
        }
        Ok(Self { values, label: label.into() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Strictly increasing quantile levels, all in the open interval (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileGrid {
    levels: Vec<f64>,
}

impl QuantileGrid {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput("empty quantile grid".into()));
        }
        for (i, &tau) in levels.iter().enumerate() {
            if !(tau > 0.0 && tau < 1.0) || !tau.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "quantile level {tau} at index {i} outside (0, 1)"
                )));
            }
            if i > 0 && levels[i - 1] >= tau {
                return Err(Error::InvalidInput(format!(
                    "quantile levels must be strictly increasing, got {} then {tau}",
                    levels[i - 1]
                )));
            }
        }
        Ok(Self { levels })
    }

    /// The {0.1, 0.5, 0.9} grid used for the 3x3 spectrum plots.
    pub fn display_default() -> Self {
        Self { levels: vec![0.1, 0.5, 0.9] }
    }

    /// The 19-level grid {0.05, 0.10, ..., 0.95} used for the uniform
    /// p-value diagnostics.
    pub fn pvalue_default() -> Self {
        Self { levels: (1..=19).map(|k| k as f64 / 20.0).collect() }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index of a level, matched to within 1e-12.
    pub fn index_of(&self, tau: f64) -> Option<usize> {
        self.levels.iter().position(|&t| (t - tau).abs() < 1e-12)
    }
}

/// Non-decreasing angular frequencies in [0, pi] (radians per step).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidInput("empty frequency grid".into()));
        }
        for (i, &w) in omegas.iter().enumerate() {
            if !w.is_finite() || w < 0.0 || w > PI + 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "frequency {w} at index {i} outside [0, pi]"
                )));
            }
            if i > 0 && omegas[i - 1] > w {
                return Err(Error::InvalidInput("frequencies must be non-decreasing".into()));
            }
        }
        Ok(Self { omegas })
    }

    /// Default evaluation grid {2*pi*j/64 : j = 0..=32}, spanning [0, pi].
    pub fn fourier_default() -> Self {
        Self { omegas: (0..=32).map(|j| 2.0 * PI * j as f64 / 64.0).collect() }
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn index_of(&self, omega: f64) -> Option<usize> {
        self.omegas.iter().position(|&w| (w - omega).abs() < 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_rejects_short_and_nonfinite() {
        assert!(TimeSeries::new(vec![1.0; 7], "x").is_err());
        let mut v = vec![0.5; 16];
        v[3] = f64::NAN;
        assert!(TimeSeries::new(v, "x").is_err());
        assert!(TimeSeries::new(vec![1.0; 8], "x").is_ok());
    }

    #[test]
    fn quantile_grid_validation() {
        assert!(QuantileGrid::new(vec![0.1, 0.5, 0.9]).is_ok());
        assert!(QuantileGrid::new(vec![0.5, 0.5]).is_err());
        assert!(QuantileGrid::new(vec![0.0, 0.5]).is_err());
        assert!(QuantileGrid::new(vec![0.5, 1.0]).is_err());
        assert_eq!(QuantileGrid::pvalue_default().len(), 19);
        assert_eq!(QuantileGrid::pvalue_default().index_of(0.5), Some(9));
    }

    #[test]
    fn frequency_grid_validation() {
        let g = FrequencyGrid::fourier_default();
        assert_eq!(g.len(), 33);
        assert!((g.omegas()[32] - PI).abs() < 1e-15);
        assert!(FrequencyGrid::new(vec![0.2, 0.1]).is_err());
        assert!(FrequencyGrid::new(vec![-0.1]).is_err());
        assert!(FrequencyGrid::new(vec![3.3]).is_err());
    }
}
