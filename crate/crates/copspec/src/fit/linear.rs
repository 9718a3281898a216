//! Linear model fits: Yule-Walker AR and Hannan-Rissanen/CSS ARMA.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::nelder_mead::nelder_mead;
use super::FitResult;
use crate::error::{Error, Result};
use crate::models::{ar_inverse_roots, ModelSpec};
use crate::series::TimeSeries;

/// Biased sample autocovariances c_0..c_{max_lag} of the centered series.
fn autocovariances(values: &[f64], max_lag: usize) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|h| {
            centered[h..]
                .iter()
                .zip(&centered[..n - h])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// Levinson-Durbin recursion; returns (phi_1..phi_p, innovation variance).
fn levinson_durbin(c: &[f64], p: usize) -> Result<(Vec<f64>, f64)> {
    if c[0] <= 0.0 {
        return Err(Error::FitFailure("degenerate (constant) series".into()));
    }
    let mut phi = vec![0.0; p + 1];
    let mut prev = vec![0.0; p + 1];
    let mut sigma2 = c[0];
    for k in 1..=p {
        let mut acc = c[k];
        for j in 1..k {
            acc -= prev[j] * c[k - j];
        }
        let reflection = acc / sigma2;
        phi[k] = reflection;
        for j in 1..k {
            phi[j] = prev[j] - reflection * prev[k - j];
        }
        sigma2 *= 1.0 - reflection * reflection;
        if sigma2 <= 0.0 || !sigma2.is_finite() {
            return Err(Error::FitFailure(format!(
                "Levinson-Durbin variance became {sigma2} at order {k}"
            )));
        }
        prev[..=k].copy_from_slice(&phi[..=k]);
    }
    Ok((phi[1..=p].to_vec(), sigma2))
}

/// Yule-Walker AR(p) fit via Levinson-Durbin on biased autocovariances.
pub fn fit_ar(series: &TimeSeries, p: usize) -> Result<FitResult> {
    let n = series.len();
    if n <= 10 * p {
        return Err(Error::InvalidInput(format!(
            "AR({p}) fit needs n > {}, got {n}",
            10 * p
        )));
    }
    let c = autocovariances(series.values(), p);
    let (coeffs, sigma2) = levinson_durbin(&c, p)?;
    FitResult {
        spec: ModelSpec::Ar { coeffs },
        objective_value: sigma2,
        converged: true,
        iterations: p,
    }
    .validated()
}

/// Rebuild AR coefficients from inverse roots: prod_k (1 - lambda_k z)
/// expands to 1 - a_1 z - ... - a_p z^p.
fn coeffs_from_inverse_roots(lambda: &[Complex64]) -> Vec<f64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &l in lambda {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= l * c;
        }
        poly = next;
    }
    poly[1..].iter().map(|c| -c.re).collect()
}

/// If the AR part is non-stationary, pull every offending inverse root
/// radially back to modulus 1 - 1e-6.
fn project_to_stationarity(ar: &[f64]) -> Vec<f64> {
    if ar.is_empty() {
        return Vec::new();
    }
    let lambda = ar_inverse_roots(ar);
    if lambda.iter().all(|l| l.norm() < 1.0 - 1e-10) {
        return ar.to_vec();
    }
    let projected: Vec<Complex64> = lambda
        .iter()
        .map(|&l| {
            let r = l.norm();
            if r >= 1.0 - 1e-6 {
                l * ((1.0 - 1e-6) / r)
            } else {
                l
            }
        })
        .collect();
    let mut coeffs = coeffs_from_inverse_roots(&projected);
    coeffs.resize(ar.len(), 0.0);
    coeffs
}

/// Conditional sum of squares: mean squared recursion residual with zero
/// initialization, summed over t >= max(p, q).
fn css_objective(values: &[f64], ar: &[f64], ma: &[f64]) -> f64 {
    let n = values.len();
    let (p, q) = (ar.len(), ma.len());
    let skip = p.max(q);
    let mut eps = vec![0.0; n];
    let mut total = 0.0;
    for t in 0..n {
        let mut e = values[t];
        for (i, &a) in ar.iter().enumerate() {
            if t > i {
                e -= a * values[t - i - 1];
            }
        }
        for (j, &b) in ma.iter().enumerate() {
            if t > j {
                e -= b * eps[t - j - 1];
            }
        }
        if !e.is_finite() || e.abs() > 1e150 {
            return f64::INFINITY;
        }
        eps[t] = e;
        if t >= skip {
            total += e * e;
        }
    }
    total / (n - skip) as f64
}

/// Hannan-Rissanen two-stage ARMA(p, q) estimate refined by CSS.
pub fn fit_arma(series: &TimeSeries, p: usize, q: usize) -> Result<FitResult> {
    fit_arma_opts(series, p, q, true)
}

pub(crate) fn fit_arma_opts(
    series: &TimeSeries,
    p: usize,
    q: usize,
    refine: bool,
) -> Result<FitResult> {
    let n = series.len();
    if n <= 10 * (p + q) {
        return Err(Error::InvalidInput(format!(
            "ARMA({p},{q}) fit needs n > {}, got {n}",
            10 * (p + q)
        )));
    }
    let mean = series.values().iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = series.values().iter().map(|v| v - mean).collect();

    let mut initial = if q == 0 {
        // pure AR reduces to the Yule-Walker solution
        let base = fit_ar(series, p)?;
        match &base.spec {
            ModelSpec::Ar { coeffs } => coeffs.clone(),
            _ => unreachable!(),
        }
    } else {
        hannan_rissanen(&x, p, q)?
    };
    initial.resize(p + q, 0.0);

    let (theta, objective, iterations, converged) = if refine && p + q > 0 {
        let obj = |theta: &[f64]| css_objective(&x, &theta[..p], &theta[p..]);
        let out = nelder_mead(obj, &initial, 1e-10, 2000)?;
        (out.x, out.value, out.iterations, out.converged)
    } else {
        let value = css_objective(&x, &initial[..p], &initial[p..]);
        (initial, value, 0, true)
    };

    let ar = project_to_stationarity(&theta[..p]);
    let ma = theta[p..].to_vec();
    let objective_value = if ar == theta[..p] {
        objective
    } else {
        css_objective(&x, &ar, &ma)
    };
    FitResult {
        spec: ModelSpec::Arma { ar, ma },
        objective_value,
        converged,
        iterations,
    }
    .validated()
}

/// Stage 1 + 2 of Hannan-Rissanen: a long AR fit supplies residual proxies,
/// then x_t is regressed on its own lags and lagged residuals.
fn hannan_rissanen(x: &[f64], p: usize, q: usize) -> Result<Vec<f64>> {
    let n = x.len();
    let long_order = ((n as f64).ln().powi(2).ceil() as usize).clamp(1, n / 10);
    let c = autocovariances(x, long_order);
    let (long_ar, _) = levinson_durbin(&c, long_order)?;

    let mut eps = vec![0.0; n];
    for t in long_order..n {
        let mut e = x[t];
        for (i, &a) in long_ar.iter().enumerate() {
            e -= a * x[t - i - 1];
        }
        eps[t] = e;
    }

    let start = (long_order + q).max(p);
    let rows = n - start;
    let cols = p + q;
    if rows <= cols {
        return Err(Error::FitFailure("too few observations for the HR regression".into()));
    }
    let design = DMatrix::<f64>::from_fn(rows, cols, |r, cidx| {
        let t = start + r;
        if cidx < p {
            x[t - cidx - 1]
        } else {
            eps[t - (cidx - p) - 1]
        }
    });
    let y = DVector::<f64>::from_fn(rows, |r, _| x[start + r]);
    let xtx = design.transpose() * &design;
    let xty = design.transpose() * y;
    let theta = xtx
        .lu()
        .solve(&xty)
        .ok_or_else(|| Error::FitFailure("singular HR normal equations".into()))?;
    Ok(theta.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{simulate, SimConfig};

    fn coeffs_of(fit: &FitResult) -> (Vec<f64>, Vec<f64>) {
        match &fit.spec {
            ModelSpec::Ar { coeffs } => (coeffs.clone(), Vec::new()),
            ModelSpec::Arma { ar, ma } => (ar.clone(), ma.clone()),
            other => panic!("unexpected spec {other}"),
        }
    }

    #[test]
    fn yule_walker_order_one_closed_form() {
        // alternating series: sample lag-1 autocorrelation is -(n-1)/n
        let n = 64;
        let values: Vec<f64> = (0..n).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let fit = fit_ar(&TimeSeries::new(values, "alt").unwrap(), 1).unwrap();
        let (ar, _) = coeffs_of(&fit);
        let expect = -((n - 1) as f64) / n as f64;
        assert!((ar[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn ar_fit_on_white_noise_is_small() {
        let data = simulate(&ModelSpec::Ar { coeffs: vec![] }, &SimConfig::new(4096, 21)).unwrap();
        let fit = fit_ar(&data, 3).unwrap();
        let (ar, _) = coeffs_of(&fit);
        // asymptotic sd ~ 1/sqrt(n) = 0.016; 0.06 is a 3.5 sigma bound
        for a in ar {
            assert!(a.abs() < 0.06, "coefficient {a} too large");
        }
    }

    #[test]
    fn ar_fit_recovers_simulation_study_model() {
        let truth = vec![0.2, -0.4, 0.2];
        let data =
            simulate(&ModelSpec::Ar { coeffs: truth.clone() }, &SimConfig::new(4096, 22)).unwrap();
        let fit = fit_ar(&data, 3).unwrap();
        let (ar, _) = coeffs_of(&fit);
        for (est, tru) in ar.iter().zip(&truth) {
            assert!((est - tru).abs() < 0.05, "estimate {est} vs truth {tru}");
        }
    }

    #[test]
    fn ar_fit_rejects_constant_series() {
        let s = TimeSeries::new(vec![2.5; 64], "const").unwrap();
        assert!(matches!(fit_ar(&s, 2), Err(Error::FitFailure(_))));
    }

    #[test]
    fn ar_fit_needs_enough_data() {
        let s = TimeSeries::new(vec![0.0, 1.0, 0.5, -0.5, 0.2, 0.1, -0.3, 0.4], "tiny").unwrap();
        assert!(fit_ar(&s, 1).is_err());
    }

    #[test]
    fn arma_fit_recovers_simulation_study_model() {
        let spec = ModelSpec::Arma { ar: vec![0.1], ma: vec![0.8] };
        let data = simulate(&spec, &SimConfig::new(4096, 23)).unwrap();
        let fit = fit_arma(&data, 1, 1).unwrap();
        let (ar, ma) = coeffs_of(&fit);
        assert!((ar[0] - 0.1).abs() < 0.1, "ar {}", ar[0]);
        assert!((ma[0] - 0.8).abs() < 0.1, "ma {}", ma[0]);
    }

    #[test]
    fn arma_with_no_ma_reduces_to_yule_walker() {
        let data = simulate(&ModelSpec::Ar { coeffs: vec![0.2, -0.4, 0.2] }, &SimConfig::new(2048, 24))
            .unwrap();
        let unrefined = fit_arma_opts(&data, 3, 0, false).unwrap();
        let base = fit_ar(&data, 3).unwrap();
        let (ar, ma) = coeffs_of(&unrefined);
        let (ar_yw, _) = coeffs_of(&base);
        assert!(ma.is_empty());
        for (a, b) in ar.iter().zip(&ar_yw) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn arma_on_white_noise_gains_nothing() {
        let data = simulate(&ModelSpec::Ar { coeffs: vec![] }, &SimConfig::new(8192, 25)).unwrap();
        let null = fit_arma(&data, 0, 0).unwrap();
        let full = fit_arma(&data, 1, 1).unwrap();
        assert!((full.objective_value - null.objective_value).abs() < 1e-3);
    }

    #[test]
    fn projection_restores_stationarity() {
        let projected = project_to_stationarity(&[1.2]);
        let radius = ar_inverse_roots(&projected)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(radius < 1.0 - 1e-10);
        assert!((radius - (1.0 - 1e-6)).abs() < 1e-9);
        // stationary input is untouched
        assert_eq!(project_to_stationarity(&[0.5, -0.2]), vec![0.5, -0.2]);
    }
}
