//! Analytic copula spectral densities for Gaussian linear (AR/ARMA) models.
//!
//! For a causal Gaussian ARMA process the lag-h copula is the Gaussian
//! copula at the lag-h autocorrelation, so
//! `f(omega) = (1/2pi) sum_{|h| <= H} (C_h - tau1 tau2) e^{-i h omega}`
//! with `C_h = Phi2(qnorm(tau1), qnorm(tau2); rho_h)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::bvn::{bvn_cdf, std_normal_quantile};
use crate::error::{Error, Result};
use crate::models::{check_admissible, ModelSpec};
use crate::series::{FrequencyGrid, QuantileGrid};
use crate::spectra::SpectralMatrix;

/// Tail threshold on |rho_h| controlling the truncation lag; together with
/// the Gaussian-copula Lipschitz bound |C_h - tau1 tau2| <= |rho_h| this
/// keeps the truncation error of f below 1e-8.
const RHO_TAIL: f64 = 1e-10;
const MAX_TRUNCATION: usize = 1 << 20;

/// Moving-average (psi) expansion of Q(z)/P(z).
fn psi_weights(ar: &[f64], ma: &[f64], len: usize) -> Vec<f64> {
    let mut psi = vec![0.0; len];
    if len == 0 {
        return psi;
    }
    psi[0] = 1.0;
    for j in 1..len {
        let mut v = if j <= ma.len() { ma[j - 1] } else { 0.0 };
        for (i, &a) in ar.iter().enumerate() {
            if j > i {
                v += a * psi[j - i - 1];
            }
        }
        psi[j] = v;
    }
    psi
}

/// Autocorrelations rho_0..rho_H of the ARMA process, truncated where the
/// tail falls below `RHO_TAIL` (H grows automatically from `h_init`).
pub fn arma_autocorrelations(ar: &[f64], ma: &[f64], h_init: usize) -> Result<Vec<f64>> {
    let mut h = h_init.max(16);
    loop {
        // enough psi terms that the autocovariance tail is resolved
        let len = 4 * h + 64;
        let psi = psi_weights(ar, ma, len);
        let gamma = |lag: usize| -> f64 {
            psi[..len - lag].iter().zip(&psi[lag..]).map(|(a, b)| a * b).sum()
        };
        let g0 = gamma(0);
        if !(g0.is_finite() && g0 > 0.0) {
            return Err(Error::Numerical("ARMA variance is not positive".into()));
        }
        let rho: Vec<f64> = (0..=h).map(|lag| gamma(lag) / g0).collect();
        // require the last 50 lags (or all past h/2) to be inside the tail
        let tail_start = h.saturating_sub(50).max(h / 2 + 1).min(h);
        let tail_ok = rho[tail_start..].iter().all(|r| r.abs() < RHO_TAIL);
        if tail_ok {
            return Ok(rho);
        }
        if h >= MAX_TRUNCATION {
            return Err(Error::Numerical(format!(
                "autocorrelations do not decay below {RHO_TAIL} within {MAX_TRUNCATION} lags"
            )));
        }
        h *= 2;
    }
}

/// Analytic copula spectral density of a Gaussian AR/ARMA model on the
/// requested grids. Nonlinear models are rejected; use the Monte Carlo
/// estimator for those.
pub fn gaussian_copula_spectrum(
    spec: &ModelSpec,
    taus: &QuantileGrid,
    omegas: &FrequencyGrid,
    h_init: usize,
) -> Result<SpectralMatrix> {
    let (ar, ma): (&[f64], &[f64]) = match spec {
        ModelSpec::Ar { coeffs } => (coeffs, &[]),
        ModelSpec::Arma { ar, ma } => (ar, ma),
        other => {
            return Err(Error::UnsupportedModel(format!(
                "{other} has no Gaussian-copula closed form; use the Monte Carlo estimator"
            )))
        }
    };
    let adm = check_admissible(spec);
    if !adm.admissible {
        return Err(Error::InvalidInput(format!("inadmissible model: {}", adm.message)));
    }

    let rho = arma_autocorrelations(ar, ma, h_init)?;
    let h_max = rho.len() - 1;

    let quantiles: Vec<f64> = taus
        .levels()
        .iter()
        .map(|&t| std_normal_quantile(t))
        .collect::<Result<_>>()?;

    let nt = taus.len();
    let nf = omegas.len();
    let mut values = vec![Complex64::new(0.0, 0.0); nt * nt * nf];
    for i in 0..nt {
        for j in 0..=i {
            let (t1, t2) = (taus.levels()[i], taus.levels()[j]);
            let indep = t1 * t2;
            // lag-copula table; rho is even in h, and the Gaussian copula is
            // symmetric in its arguments, so C_{-h} = C_h and f is real.
            let c: Vec<f64> = rho
                .iter()
                .map(|&r| {
                    if r == 1.0 {
                        Ok(t1.min(t2))
                    } else {
                        bvn_cdf(quantiles[i], quantiles[j], r)
                    }
                })
                .collect::<Result<_>>()?;
            for (k, &omega) in omegas.omegas().iter().enumerate() {
                let mut sum = c[0] - indep;
                for h in 1..=h_max {
                    sum += 2.0 * (c[h] - indep) * (h as f64 * omega).cos();
                }
                let v = Complex64::new(sum / (2.0 * PI), 0.0);
                values[(i * nt + j) * nf + k] = v;
                if i != j {
                    values[(j * nt + i) * nf + k] = v;
                }
            }
        }
    }
    SpectralMatrix::from_values(taus.clone(), omegas.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grids() -> (QuantileGrid, FrequencyGrid) {
        (QuantileGrid::display_default(), FrequencyGrid::fourier_default())
    }

    #[test]
    fn psi_weights_of_ar_one() {
        let psi = psi_weights(&[0.5], &[], 6);
        for (j, &p) in psi.iter().enumerate() {
            assert!((p - 0.5f64.powi(j as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn autocorrelations_of_ar_one() {
        let rho = arma_autocorrelations(&[0.5], &[], 16).unwrap();
        for (h, &r) in rho.iter().take(10).enumerate() {
            assert!((r - 0.5f64.powi(h as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn white_noise_closed_form() {
        let (taus, omegas) = grids();
        let f = gaussian_copula_spectrum(&ModelSpec::Ar { coeffs: vec![] }, &taus, &omegas, 16)
            .unwrap();
        for (i, &t1) in taus.levels().iter().enumerate() {
            for (j, &t2) in taus.levels().iter().enumerate() {
                let expect = (t1.min(t2) - t1 * t2) / (2.0 * PI);
                for k in 0..omegas.len() {
                    let v = f.at(i, j, k);
                    assert!((v.re - expect).abs() < 1e-10, "{t1},{t2}: {} vs {expect}", v.re);
                    assert_eq!(v.im, 0.0);
                }
            }
        }
        // headline value at (0.5, 0.5)
        assert!((f.at(1, 1, 0).re - 0.0397887).abs() < 1e-6);
    }

    #[test]
    fn gaussian_linear_models_have_zero_imaginary_part() {
        let (taus, omegas) = grids();
        for spec in [
            ModelSpec::Ar { coeffs: vec![0.5] },
            ModelSpec::Arma { ar: vec![0.1], ma: vec![0.8] },
            ModelSpec::Ar { coeffs: vec![0.2, -0.4, 0.2] },
        ] {
            let f = gaussian_copula_spectrum(&spec, &taus, &omegas, 16).unwrap();
            for v in f.values() {
                assert!(v.im.abs() < 1e-10);
            }
            assert!(f.hermitian_violation() < 1e-12);
        }
    }

    #[test]
    fn truncation_is_converged() {
        let (taus, omegas) = grids();
        let spec = ModelSpec::Ar { coeffs: vec![0.9] };
        let a = gaussian_copula_spectrum(&spec, &taus, &omegas, 16).unwrap();
        let b = gaussian_copula_spectrum(&spec, &taus, &omegas, 4096).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn nonlinear_model_is_unsupported() {
        let (taus, omegas) = grids();
        let spec = ModelSpec::Garch11 { omega0: 0.01, alpha: 0.4, beta: 0.5 };
        assert!(matches!(
            gaussian_copula_spectrum(&spec, &taus, &omegas, 16),
            Err(Error::UnsupportedModel(_))
        ));
    }
}
