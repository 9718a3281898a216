//! Gaussian quasi-maximum-likelihood estimation for ARCH(1), GARCH(1,1)
//! and EGARCH(1,1), minimized by Nelder-Mead over an unconstrained
//! reparameterization of the admissible set.

use super::nelder_mead::nelder_mead;
use super::FitResult;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::series::TimeSeries;

const UNIT_MARGIN: f64 = 1e-8;
const NM_TOL: f64 = 1e-8;
const NM_MAX_ITER: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GarchVariant {
    Arch1,
    Garch11,
    Egarch11,
}

impl GarchVariant {
    fn dim(self) -> usize {
        match self {
            GarchVariant::Arch1 => 2,
            GarchVariant::Garch11 => 3,
            GarchVariant::Egarch11 => 4,
        }
    }
}

/// Unconstrained u -> admissible parameters. omega = exp(u0); the ARCH/GARCH
/// pair is a scaled softmax (alpha, beta) = (1 - 1e-8) (e^{u1}, e^{u2}) /
/// (1 + e^{u1} + e^{u2}); the EGARCH beta is tanh(u3) (1 - 1e-8).
pub(crate) fn map_params(variant: GarchVariant, u: &[f64]) -> ModelSpec {
    match variant {
        GarchVariant::Arch1 => {
            let alpha = (1.0 - UNIT_MARGIN) * logistic(u[1]);
            ModelSpec::Arch1 { omega0: u[0].exp(), alpha }
        }
        GarchVariant::Garch11 => {
            let ea = u[1].exp();
            let eb = u[2].exp();
            let denom = 1.0 + ea + eb;
            ModelSpec::Garch11 {
                omega0: u[0].exp(),
                alpha: (1.0 - UNIT_MARGIN) * ea / denom,
                beta: (1.0 - UNIT_MARGIN) * eb / denom,
            }
        }
        GarchVariant::Egarch11 => ModelSpec::Egarch11 {
            omega0: u[0],
            alpha: u[1],
            gamma: u[2],
            beta: (1.0 - UNIT_MARGIN) * u[3].tanh(),
        },
    }
}

/// Inverse of [`map_params`] on the interior of the admissible set.
pub(crate) fn unmap_params(spec: &ModelSpec) -> Result<Vec<f64>> {
    match spec {
        ModelSpec::Arch1 { omega0, alpha } => {
            let a = alpha / (1.0 - UNIT_MARGIN);
            if !(0.0 < a && a < 1.0) || *omega0 <= 0.0 {
                return Err(Error::InvalidInput("arch1 parameters not interior".into()));
            }
            Ok(vec![omega0.ln(), (a / (1.0 - a)).ln()])
        }
        ModelSpec::Garch11 { omega0, alpha, beta } => {
            let a = alpha / (1.0 - UNIT_MARGIN);
            let b = beta / (1.0 - UNIT_MARGIN);
            let rest = 1.0 - a - b;
            if a <= 0.0 || b <= 0.0 || rest <= 0.0 || *omega0 <= 0.0 {
                return Err(Error::InvalidInput("garch11 parameters not interior".into()));
            }
            Ok(vec![omega0.ln(), (a / rest).ln(), (b / rest).ln()])
        }
        ModelSpec::Egarch11 { omega0, alpha, gamma, beta } => {
            let b = beta / (1.0 - UNIT_MARGIN);
            if b.abs() >= 1.0 {
                return Err(Error::InvalidInput("egarch11 beta not interior".into()));
            }
            Ok(vec![*omega0, *alpha, *gamma, b.atanh()])
        }
        other => Err(Error::InvalidInput(format!("{other} is not a GARCH-family spec"))),
    }
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Negative Gaussian quasi-log-likelihood (1/2) sum_t [ln s_t^2 + x_t^2/s_t^2]
/// with the variance recursion started at the sample variance.
pub(crate) fn negative_quasi_loglik(spec: &ModelSpec, x: &[f64], sample_var: f64) -> f64 {
    match spec {
        ModelSpec::Arch1 { omega0, alpha } => {
            garch_nll(*omega0, *alpha, 0.0, x, sample_var)
        }
        ModelSpec::Garch11 { omega0, alpha, beta } => {
            garch_nll(*omega0, *alpha, *beta, x, sample_var)
        }
        ModelSpec::Egarch11 { omega0, alpha, gamma, beta } => {
            let e_abs_z = (2.0 / std::f64::consts::PI).sqrt();
            let mut nll = 0.0;
            let mut log_s2 = sample_var.max(1e-300).ln();
            for t in 0..x.len() {
                if t > 0 {
                    let s_prev = (0.5 * log_s2).exp();
                    let z_prev = x[t - 1] / s_prev;
                    log_s2 = omega0
                        + alpha * (z_prev.abs() - e_abs_z)
                        + gamma * z_prev
                        + beta * log_s2;
                    log_s2 = log_s2.clamp(-700.0, 700.0);
                }
                let s2 = log_s2.exp();
                nll += 0.5 * (log_s2 + x[t] * x[t] / s2);
            }
            nll
        }
        _ => f64::INFINITY,
    }
}

fn garch_nll(omega0: f64, alpha: f64, beta: f64, x: &[f64], sample_var: f64) -> f64 {
    let mut s2 = sample_var;
    let mut nll = 0.0;
    for t in 0..x.len() {
        if t > 0 {
            s2 = omega0 + alpha * x[t - 1] * x[t - 1] + beta * s2;
        }
        if s2 <= 0.0 || !s2.is_finite() {
            return f64::INFINITY;
        }
        nll += 0.5 * (s2.ln() + x[t] * x[t] / s2);
    }
    nll
}

fn autocorr_of_squares(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    let mean = sq.iter().sum::<f64>() / n as f64;
    let c0: f64 = sq.iter().map(|v| (v - mean).powi(2)).sum();
    if c0 <= 0.0 {
        return 0.0;
    }
    let ch: f64 = sq[lag..]
        .iter()
        .zip(&sq[..n - lag])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    ch / c0
}

/// Method-of-moments-flavored heuristic start in the constrained space.
fn heuristic_start(variant: GarchVariant, x: &[f64], sample_var: f64) -> ModelSpec {
    let r1 = autocorr_of_squares(x, 1);
    let r2 = autocorr_of_squares(x, 2);
    match variant {
        GarchVariant::Arch1 => {
            let alpha = r1.clamp(0.05, 0.8);
            ModelSpec::Arch1 { omega0: sample_var * (1.0 - alpha), alpha }
        }
        GarchVariant::Garch11 => {
            let alpha = r1.clamp(0.05, 0.3);
            let persistence = if r1 > 1e-6 {
                (r2 / r1).clamp(alpha + 0.05, 0.97)
            } else {
                0.9
            };
            let beta = persistence - alpha;
            ModelSpec::Garch11 { omega0: sample_var * (1.0 - persistence), alpha, beta }
        }
        GarchVariant::Egarch11 => ModelSpec::Egarch11 {
            omega0: 0.1 * sample_var.max(1e-300).ln(),
            alpha: 0.2,
            gamma: -0.05,
            beta: 0.9,
        },
    }
}

/// Gaussian QMLE for the requested variant: three deterministic multi-starts
/// (heuristic plus two fixed perturbations), best objective wins with ties
/// broken by start index.
pub fn fit_garch(series: &TimeSeries, variant: GarchVariant) -> Result<FitResult> {
    let x = series.values();
    let n = x.len();
    if n < 200 {
        return Err(Error::InvalidInput(format!("GARCH fit needs n >= 200, got {n}")));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let sample_var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    if sample_var <= 0.0 {
        return Err(Error::FitFailure("degenerate (constant) series".into()));
    }

    let u0 = unmap_params(&heuristic_start(variant, x, sample_var))?;
    let d = variant.dim();
    let starts: Vec<Vec<f64>> = vec![
        u0.clone(),
        u0.iter().map(|v| v + 0.5).collect(),
        u0.iter().map(|v| v - 0.5).collect(),
    ];
    debug_assert!(starts.iter().all(|s| s.len() == d));

    let objective = |u: &[f64]| negative_quasi_loglik(&map_params(variant, u), x, sample_var);

    let mut best: Option<(usize, super::NelderMeadOutcome)> = None;
    let mut failures = Vec::new();
    for (idx, start) in starts.iter().enumerate() {
        match nelder_mead(&objective, start, NM_TOL, NM_MAX_ITER) {
            Ok(out) if out.value.is_finite() => {
                let better = match &best {
                    None => true,
                    Some((_, b)) => out.value < b.value,
                };
                if better {
                    best = Some((idx, out));
                }
            }
            Ok(out) => failures.push(format!("start {idx}: non-finite optimum {}", out.value)),
            Err(e) => failures.push(format!("start {idx}: {e}")),
        }
    }

    let (_, out) = best.ok_or_else(|| {
        Error::FitFailure(format!("all QMLE starts diverged: {}", failures.join("; ")))
    })?;
    FitResult {
        spec: map_params(variant, &out.x),
        objective_value: out.value,
        converged: out.converged,
        iterations: out.iterations,
    }
    .validated()
}
