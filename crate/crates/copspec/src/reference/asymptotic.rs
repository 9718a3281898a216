//! Asymptotic covariance of the limiting Gaussian process H0 of the
//! scaled estimation error sqrt(n b_n) (f_hat - f).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::spectra::SpectralMatrix;

/// Covariances of H0 between quantile-level pairs at one frequency.
#[derive(Debug, Clone)]
pub struct AsymptoticCov {
    pairs: Vec<(f64, f64)>,
    omega: f64,
    cov: Vec<Complex64>,
}

impl AsymptoticCov {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn cov(&self, i: usize, j: usize) -> Complex64 {
        self.cov[i * self.pairs.len() + j]
    }

    /// Variance of H0 at pair `i`; real and non-negative by construction.
    pub fn variance(&self, i: usize) -> f64 {
        self.cov(i, i).re
    }
}

/// Covariance of the limit process:
/// `Cov(H0((u1,v1); w), H0((u2,v2); w)) = 2 pi int W^2 *
///  [ f_(u1,u2)(w) f_(v1,v2)(-w) + f_(u1,v2)(w) f_(v1,u2)(-w) 1{w = 0 mod pi} ]`
/// with `f(-w) = conj(f(w))`. `f_true` must cover every level appearing in
/// `pairs` and contain `omega` in its frequency grid.
pub fn asymptotic_covariance(
    f_true: &SpectralMatrix,
    kernel: &KernelSpec,
    omega: f64,
    pairs: &[(f64, f64)],
) -> Result<AsymptoticCov> {
    let k = f_true
        .omegas()
        .index_of(omega)
        .ok_or_else(|| Error::InvalidInput(format!("omega {omega} not in the true spectrum grid")))?;
    let level_index = |tau: f64| -> Result<usize> {
        f_true.taus().index_of(tau).ok_or_else(|| {
            Error::InvalidInput(format!("quantile level {tau} missing from the true spectrum"))
        })
    };
    let indexed: Vec<(usize, usize)> = pairs
        .iter()
        .map(|&(u, v)| Ok((level_index(u)?, level_index(v)?)))
        .collect::<Result<_>>()?;

    let w2 = kernel.squared_integral();
    let at = |a: usize, b: usize| f_true.at(a, b, k);
    let at_neg = |a: usize, b: usize| f_true.at(a, b, k).conj();
    let on_pi_lattice = {
        let r = (omega / PI).round();
        (omega - r * PI).abs() < 1e-9
    };

    let p = pairs.len();
    let mut cov = vec![Complex64::new(0.0, 0.0); p * p];
    for (i, &(u1, v1)) in indexed.iter().enumerate() {
        for (j, &(u2, v2)) in indexed.iter().enumerate() {
            let mut value = at(u1, u2) * at_neg(v1, v2);
            if on_pi_lattice {
                value += at(u1, v2) * at_neg(v1, u2);
            }
            cov[i * p + j] = 2.0 * PI * w2 * value;
        }
    }
    Ok(AsymptoticCov { pairs: pairs.to_vec(), omega, cov })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelSpec;
    use crate::reference::gaussian_copula_spectrum;
    use crate::series::{FrequencyGrid, QuantileGrid};

    fn white_noise_truth() -> SpectralMatrix {
        let taus = QuantileGrid::display_default();
        let omegas = FrequencyGrid::new(vec![0.0, PI / 2.0, PI]).unwrap();
        gaussian_copula_spectrum(&ModelSpec::Ar { coeffs: vec![] }, &taus, &omegas, 16).unwrap()
    }

    #[test]
    fn white_noise_variance_closed_form() {
        let truth = white_noise_truth();
        let kernel = KernelSpec::epanechnikov(0.1).unwrap();
        let cov =
            asymptotic_covariance(&truth, &kernel, PI / 2.0, &[(0.5, 0.5)]).unwrap();
        let w2 = kernel.squared_integral();
        let expect = 2.0 * PI * w2 * (0.25 / (2.0 * PI)).powi(2);
        assert!((cov.variance(0) - expect).abs() < 1e-12);
        // same number written as int W^2 * 0.0625 / (2 pi)
        assert!((expect - w2 * 0.0625 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn indicator_doubles_variance_on_pi_lattice() {
        let truth = white_noise_truth();
        let kernel = KernelSpec::epanechnikov(0.1).unwrap();
        let at_half =
            asymptotic_covariance(&truth, &kernel, PI / 2.0, &[(0.5, 0.5)]).unwrap();
        let at_pi = asymptotic_covariance(&truth, &kernel, PI, &[(0.5, 0.5)]).unwrap();
        assert!((at_pi.variance(0) / at_half.variance(0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn missing_levels_rejected() {
        let truth = white_noise_truth();
        let kernel = KernelSpec::epanechnikov(0.1).unwrap();
        assert!(asymptotic_covariance(&truth, &kernel, PI / 2.0, &[(0.25, 0.5)]).is_err());
        assert!(asymptotic_covariance(&truth, &kernel, 0.123, &[(0.5, 0.5)]).is_err());
    }

    #[test]
    fn variances_are_nonnegative_for_off_diagonal_pairs() {
        let truth = white_noise_truth();
        let kernel = KernelSpec::epanechnikov(0.1).unwrap();
        for &omega in &[0.0, PI / 2.0, PI] {
            let cov = asymptotic_covariance(
                &truth,
                &kernel,
                omega,
                &[(0.1, 0.9), (0.1, 0.1), (0.5, 0.9)],
            )
            .unwrap();
            for i in 0..3 {
                assert!(cov.variance(i) >= 0.0);
                assert!(cov.cov(i, i).im.abs() < 1e-12);
            }
        }
    }
}
