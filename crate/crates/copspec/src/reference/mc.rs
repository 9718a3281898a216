//! Monte Carlo copula spectral densities for models without a closed form.
//!
//! One long simulated path is split into 20 segments; each segment yields an
//! independent-ish plug-in estimate (empirical lag copulas into the
//! truncated Fourier sum) and the spread across segments gives standard
//! errors for both parts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{simulate, ModelSpec, SimConfig};
use crate::series::{FrequencyGrid, QuantileGrid};
use crate::spectra::SpectralMatrix;

const SEGMENTS: usize = 20;

/// Monte Carlo spectrum estimate with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct McSpectrum {
    pub estimate: SpectralMatrix,
    se_re: Vec<f64>,
    se_im: Vec<f64>,
}

impl McSpectrum {
    pub fn se_re(&self, i: usize, j: usize, k: usize) -> f64 {
        let nt = self.estimate.n_taus();
        let nf = self.estimate.n_freqs();
        self.se_re[(i * nt + j) * nf + k]
    }

    pub fn se_im(&self, i: usize, j: usize, k: usize) -> f64 {
        let nt = self.estimate.n_taus();
        let nf = self.estimate.n_freqs();
        self.se_im[(i * nt + j) * nf + k]
    }
}

/// Plug-in spectrum of one segment: empirical ranks, indicator series per
/// level, lag copulas up to `max_lag`, truncated Fourier sum.
fn segment_spectrum(
    segment: &[f64],
    taus: &QuantileGrid,
    omegas: &FrequencyGrid,
    max_lag: usize,
) -> Vec<Complex64> {
    let len = segment.len();
    let ranks = crate::spectra::ranks_of(segment);
    let indicators: Vec<Vec<u8>> = taus
        .levels()
        .iter()
        .map(|&tau| ranks.iter().map(|&r| u8::from(r <= tau)).collect())
        .collect();

    let nt = taus.len();
    let nf = omegas.len();
    // empirical C_h(tau_a, tau_b) = mean of ind_a[t+h] * ind_b[t]
    let cross = |a: usize, b: usize, h: usize| -> f64 {
        let num: u32 = indicators[a][h..]
            .iter()
            .zip(&indicators[b][..len - h])
            .map(|(x, y)| u32::from(x & y))
            .sum();
        f64::from(num) / (len - h) as f64
    };

    let mut values = vec![Complex64::new(0.0, 0.0); nt * nt * nf];
    for i in 0..nt {
        for j in 0..=i {
            let indep = taus.levels()[i] * taus.levels()[j];
            let c0 = cross(i, j, 0);
            let forward: Vec<f64> = (1..=max_lag).map(|h| cross(i, j, h)).collect();
            let backward: Vec<f64> = (1..=max_lag).map(|h| cross(j, i, h)).collect();
            for (k, &omega) in omegas.omegas().iter().enumerate() {
                let mut acc = Complex64::new(c0 - indep, 0.0);
                for h in 1..=max_lag {
                    let phase = h as f64 * omega;
                    let e = Complex64::new(phase.cos(), -phase.sin());
                    // C_{-h}(t1, t2) = C_h(t2, t1)
                    acc += (forward[h - 1] - indep) * e + (backward[h - 1] - indep) * e.conj();
                }
                let v = acc / (2.0 * PI);
                values[(i * nt + j) * nf + k] = v;
                if i != j {
                    values[(j * nt + i) * nf + k] = v.conj();
                }
            }
        }
    }
    values
}

/// Long-run Monte Carlo copula spectrum of an admissible model, with block
/// standard errors across 20 path segments.
pub fn mc_copula_spectrum(
    spec: &ModelSpec,
    taus: &QuantileGrid,
    omegas: &FrequencyGrid,
    max_lag: usize,
    sim_length: usize,
    seed: u64,
) -> Result<McSpectrum> {
    if max_lag == 0 {
        return Err(Error::InvalidInput("max_lag must be positive".into()));
    }
    if sim_length < 100 * max_lag {
        return Err(Error::InvalidInput(format!(
            "sim_length {sim_length} below 100 * max_lag = {}",
            100 * max_lag
        )));
    }
    let path = simulate(spec, &SimConfig::new(sim_length, seed))?;
    let seg_len = sim_length / SEGMENTS;

    let per_segment: Vec<Vec<Complex64>> = (0..SEGMENTS)
        .into_par_iter()
        .map(|s| {
            let segment = &path.values()[s * seg_len..(s + 1) * seg_len];
            segment_spectrum(segment, taus, omegas, max_lag)
        })
        .collect();

    let cells = taus.len() * taus.len() * omegas.len();
    let mut mean = vec![Complex64::new(0.0, 0.0); cells];
    for seg in &per_segment {
        for (m, v) in mean.iter_mut().zip(seg) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= SEGMENTS as f64;
    }
    let mut se_re = vec![0.0; cells];
    let mut se_im = vec![0.0; cells];
    for seg in &per_segment {
        for (idx, v) in seg.iter().enumerate() {
            se_re[idx] += (v.re - mean[idx].re).powi(2);
            se_im[idx] += (v.im - mean[idx].im).powi(2);
        }
    }
    let scale = 1.0 / ((SEGMENTS - 1) as f64 * SEGMENTS as f64);
    for idx in 0..cells {
        se_re[idx] = (se_re[idx] * scale).sqrt();
        se_im[idx] = (se_im[idx] * scale).sqrt();
    }

    let estimate = SpectralMatrix::from_values(taus.clone(), omegas.clone(), mean)?;
    Ok(McSpectrum { estimate, se_re, se_im })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_noise_is_flat_within_three_ses() {
        // a handful of frequencies keeps the number of 3-SE comparisons
        // small enough that the check is statistically meaningful
        let taus = QuantileGrid::display_default();
        let omegas =
            FrequencyGrid::new((0..=4).map(|j| PI * j as f64 / 4.0).collect()).unwrap();
        let spec = ModelSpec::Ar { coeffs: vec![] };
        let mc = mc_copula_spectrum(&spec, &taus, &omegas, 40, 100_000, 7).unwrap();
        for (i, &t1) in taus.levels().iter().enumerate() {
            for (j, &t2) in taus.levels().iter().enumerate() {
                let truth = (t1.min(t2) - t1 * t2) / (2.0 * PI);
                for k in 0..omegas.len() {
                    let v = mc.estimate.at(i, j, k);
                    let (sr, si) = (mc.se_re(i, j, k), mc.se_im(i, j, k));
                    assert!(
                        (v.re - truth).abs() < 3.0 * sr.max(1e-5),
                        "re {} vs {truth} (se {sr}) at ({t1},{t2},{k})",
                        v.re
                    );
                    assert!(v.im.abs() < 3.0 * si.max(1e-5));
                }
            }
        }
    }

    #[test]
    fn doubling_length_halves_standard_errors() {
        let taus = QuantileGrid::new(vec![0.5]).unwrap();
        let omegas = FrequencyGrid::new(vec![1.0]).unwrap();
        let spec = ModelSpec::Ar { coeffs: vec![0.5] };
        let a = mc_copula_spectrum(&spec, &taus, &omegas, 30, 80_000, 3).unwrap();
        let b = mc_copula_spectrum(&spec, &taus, &omegas, 30, 160_000, 3).unwrap();
        let ratio = b.se_re(0, 0, 0) / a.se_re(0, 0, 0);
        let target = 0.5f64.sqrt();
        assert!(
            ratio < target * 1.5 && ratio > target / 1.5,
            "se ratio {ratio} not near sqrt(1/2)"
        );
    }

    #[test]
    fn ar_diagonal_shape_matches_gaussian_oracle() {
        use crate::reference::gaussian_copula_spectrum;
        let taus = QuantileGrid::new(vec![0.5]).unwrap();
        let omegas = FrequencyGrid::new(vec![0.4, 2.2]).unwrap();
        let spec = ModelSpec::Ar { coeffs: vec![0.5] };
        let analytic = gaussian_copula_spectrum(&spec, &taus, &omegas, 64).unwrap();
        let mc = mc_copula_spectrum(&spec, &taus, &omegas, 50, 200_000, 5).unwrap();
        let ratio_true = analytic.at(0, 0, 0).re / analytic.at(0, 0, 1).re;
        let ratio_mc = mc.estimate.at(0, 0, 0).re / mc.estimate.at(0, 0, 1).re;
        // 3 MC standard errors propagated through the ratio
        let rel_se = (mc.se_re(0, 0, 0) / mc.estimate.at(0, 0, 0).re).abs()
            + (mc.se_re(0, 0, 1) / mc.estimate.at(0, 0, 1).re).abs();
        assert!(
            (ratio_mc - ratio_true).abs() < 3.0 * rel_se * ratio_true.abs(),
            "ratio {ratio_mc} vs analytic {ratio_true}"
        );
    }

    #[test]
    fn preconditions_enforced() {
        let taus = QuantileGrid::new(vec![0.5]).unwrap();
        let omegas = FrequencyGrid::new(vec![1.0]).unwrap();
        let spec = ModelSpec::Ar { coeffs: vec![0.5] };
        assert!(mc_copula_spectrum(&spec, &taus, &omegas, 100, 5000, 1).is_err());
        let bad = ModelSpec::Ar { coeffs: vec![1.1] };
        assert!(mc_copula_spectrum(&bad, &taus, &omegas, 10, 10_000, 1).is_err());
    }
}
