//! Parametric model classes: specification, admissibility checks and
//! deterministic simulation.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::stream::derive_stream;

/// Margin used by the stationarity/persistence checks.
const STATIONARITY_MARGIN: f64 = 1e-10;
const PERSISTENCE_MARGIN: f64 = 1e-8;

/// Parametric model with standard Gaussian innovations.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Ar { coeffs: Vec<f64> },
    Arma { ar: Vec<f64>, ma: Vec<f64> },
    Arch1 { omega0: f64, alpha: f64 },
    Garch11 { omega0: f64, alpha: f64, beta: f64 },
    Egarch11 { omega0: f64, alpha: f64, gamma: f64, beta: f64 },
}

/// Outcome of an admissibility check with a human-readable diagnostic.
#[derive(Debug, Clone)]
pub struct Admissibility {
    pub admissible: bool,
    pub message: String,
}

impl Admissibility {
    fn ok() -> Self {
        Self { admissible: true, message: "admissible".into() }
    }

    fn fail(msg: impl Into<String>) -> Self {
        Self { admissible: false, message: msg.into() }
    }
}

/// Eigenvalues of the companion matrix of `z^p + t_1 z^{p-1} + ... + t_p`.
/// Trailing exact zeros are trimmed first (they only add roots at zero).
fn companion_eigenvalues(tail: &[f64]) -> Vec<Complex64> {
    let mut t = tail.to_vec();
    while t.last() == Some(&0.0) {
        t.pop();
    }
    let p = t.len();
    if p == 0 {
        return Vec::new();
    }
    let m = DMatrix::<f64>::from_fn(p, p, |r, c| {
        if r == 0 {
            -t[c]
        } else if r == c + 1 {
            1.0
        } else {
            0.0
        }
    });
    m.complex_eigenvalues().iter().copied().collect()
}

/// Reciprocals of the roots of `P(z) = 1 - a_1 z - ... - a_p z^p`; all roots
/// of P lie strictly outside the unit circle iff every returned value has
/// modulus < 1.
pub(crate) fn ar_inverse_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let tail: Vec<f64> = coeffs.iter().map(|&a| -a).collect();
    companion_eigenvalues(&tail)
}

/// Reciprocals of the roots of `Q(z) = 1 + b_1 z + ... + b_q z^q`.
fn ma_inverse_roots(coeffs: &[f64]) -> Vec<Complex64> {
    companion_eigenvalues(coeffs)
}

fn spectral_radius(roots: &[Complex64]) -> f64 {
    roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_finite(params: &[(&str, f64)]) -> Option<Admissibility> {
    for (name, v) in params {
        if !v.is_finite() {
            return Some(Admissibility::fail(format!("{name} = {v} is not finite")));
        }
    }
    None
}

/// Check whether a model specification is admissible (strictly stationary
/// with a well-defined recursion); the message names the violated constraint.
pub fn check_admissible(spec: &ModelSpec) -> Admissibility {
    match spec {
        ModelSpec::Ar { coeffs } => {
            if let Some(bad) =
                check_finite(&coeffs.iter().map(|&c| ("ar coefficient", c)).collect::<Vec<_>>())
            {
                return bad;
            }
            let radius = spectral_radius(&ar_inverse_roots(coeffs));
            if radius >= 1.0 - STATIONARITY_MARGIN {
                Admissibility::fail(format!(
                    "AR polynomial has a root with modulus <= 1 (companion spectral radius {radius:.12})"
                ))
            } else {
                Admissibility::ok()
            }
        }
        ModelSpec::Arma { ar, ma } => {
            let params: Vec<(&str, f64)> = ar
                .iter()
                .map(|&c| ("ar coefficient", c))
                .chain(ma.iter().map(|&c| ("ma coefficient", c)))
                .collect();
            if let Some(bad) = check_finite(&params) {
                return bad;
            }
            let lambda = ar_inverse_roots(ar);
            let radius = spectral_radius(&lambda);
            if radius >= 1.0 - STATIONARITY_MARGIN {
                return Admissibility::fail(format!(
                    "AR polynomial has a root with modulus <= 1 (companion spectral radius {radius:.12})"
                ));
            }
            let mu = ma_inverse_roots(ma);
            for a in &lambda {
                for b in &mu {
                    let scale = a.norm().max(b.norm()).max(1.0);
                    if (a - b).norm() < 1e-8 * scale {
                        return Admissibility::fail(
                            "AR and MA polynomials share a root".to_string(),
                        );
                    }
                }
            }
            Admissibility::ok()
        }
        ModelSpec::Arch1 { omega0, alpha } => {
            garch_admissible(*omega0, *alpha, 0.0)
        }
        ModelSpec::Garch11 { omega0, alpha, beta } => {
            garch_admissible(*omega0, *alpha, *beta)
        }
        ModelSpec::Egarch11 { omega0, alpha, gamma, beta } => {
            if let Some(bad) = check_finite(&[
                ("omega", *omega0),
                ("alpha", *alpha),
                ("gamma", *gamma),
                ("beta", *beta),
            ]) {
                return bad;
            }
            if beta.abs() > 1.0 - PERSISTENCE_MARGIN {
                Admissibility::fail(format!("|beta| = {} exceeds 1 - 1e-8", beta.abs()))
            } else {
                Admissibility::ok()
            }
        }
    }
}

fn garch_admissible(omega0: f64, alpha: f64, beta: f64) -> Admissibility {
    if let Some(bad) = check_finite(&[("omega", omega0), ("alpha", alpha), ("beta", beta)]) {
        return bad;
    }
    if omega0 <= 0.0 {
        Admissibility::fail(format!("omega = {omega0} must be > 0"))
    } else if alpha < 0.0 {
        Admissibility::fail(format!("alpha = {alpha} must be >= 0"))
    } else if beta < 0.0 {
        Admissibility::fail(format!("beta = {beta} must be >= 0"))
    } else if alpha + beta > 1.0 - PERSISTENCE_MARGIN {
        Admissibility::fail(format!("alpha + beta = {} exceeds 1 - 1e-8", alpha + beta))
    } else {
        Admissibility::ok()
    }
}

/// Simulation settings. `burn_in` draws are discarded before recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub replicate_index: u64,
}

impl SimConfig {
    pub const DEFAULT_BURN_IN: usize = 1000;

    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, burn_in: Self::DEFAULT_BURN_IN, seed, replicate_index: 0 }
    }

    pub fn with_replicate(mut self, replicate_index: u64) -> Self {
        self.replicate_index = replicate_index;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n < crate::series::MIN_SERIES_LEN {
            return Err(Error::InvalidInput(format!(
                "simulation length {} below minimum {}",
                self.n,
                crate::series::MIN_SERIES_LEN
            )));
        }
        Ok(())
    }
}

/// Simulate from an admissible model. The stream is fully determined by
/// `(seed, replicate_index)`, so replicate simulations are reproducible and
/// independent of scheduling.
pub fn simulate(spec: &ModelSpec, config: &SimConfig) -> Result<TimeSeries> {
    config.validate()?;
    let adm = check_admissible(spec);
    if !adm.admissible {
        return Err(Error::InvalidInput(format!("inadmissible model: {}", adm.message)));
    }
    let total = config.burn_in + config.n;
    let mut rng = derive_stream(config.seed, config.replicate_index);
    let z: Vec<f64> = (0..total).map(|_| StandardNormal.sample(&mut rng)).collect();

    let x = match spec {
        ModelSpec::Ar { coeffs } => linear_recursion(coeffs, &[], &z),
        ModelSpec::Arma { ar, ma } => linear_recursion(ar, ma, &z),
        ModelSpec::Arch1 { omega0, alpha } => garch_recursion(*omega0, *alpha, 0.0, &z),
        ModelSpec::Garch11 { omega0, alpha, beta } => {
            garch_recursion(*omega0, *alpha, *beta, &z)
        }
        ModelSpec::Egarch11 { omega0, alpha, gamma, beta } => {
            egarch_recursion(*omega0, *alpha, *gamma, *beta, &z)
        }
    };

    TimeSeries::new(x[config.burn_in..].to_vec(), spec.to_string())
}

fn linear_recursion(ar: &[f64], ma: &[f64], z: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; z.len()];
    for t in 0..z.len() {
        let mut v = z[t];
        for (i, &a) in ar.iter().enumerate() {
            if t > i {
                v += a * x[t - i - 1];
            }
        }
        for (j, &b) in ma.iter().enumerate() {
            if t > j {
                v += b * z[t - j - 1];
            }
        }
        x[t] = v;
    }
    x
}

fn garch_recursion(omega0: f64, alpha: f64, beta: f64, z: &[f64]) -> Vec<f64> {
    let denom = 1.0 - alpha - beta;
    let mut sigma2 = if denom > 0.0 { omega0 / denom } else { omega0 };
    let mut x = vec![0.0; z.len()];
    for t in 0..z.len() {
        if t > 0 {
            sigma2 = omega0 + alpha * x[t - 1] * x[t - 1] + beta * sigma2;
        }
        x[t] = sigma2.sqrt() * z[t];
    }
    x
}

fn egarch_recursion(omega0: f64, alpha: f64, gamma: f64, beta: f64, z: &[f64]) -> Vec<f64> {
    let e_abs_z = (2.0 / std::f64::consts::PI).sqrt();
    let mut log_sigma2 = omega0 / (1.0 - beta);
    let mut x = vec![0.0; z.len()];
    for t in 0..z.len() {
        if t > 0 {
            let prev = z[t - 1];
            log_sigma2 =
                omega0 + alpha * (prev.abs() - e_abs_z) + gamma * prev + beta * log_sigma2;
        }
        x[t] = (0.5 * log_sigma2).exp() * z[t];
    }
    x
}

// ---- canonical text form ----

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(xs: &[f64]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            ModelSpec::Ar { coeffs } => write!(f, "ar({})", join(coeffs)),
            ModelSpec::Arma { ar, ma } => write!(f, "arma({};{})", join(ar), join(ma)),
            ModelSpec::Arch1 { omega0, alpha } => {
                write!(f, "arch1(omega={omega0},alpha={alpha})")
            }
            ModelSpec::Garch11 { omega0, alpha, beta } => {
                write!(f, "garch11(omega={omega0},alpha={alpha},beta={beta})")
            }
            ModelSpec::Egarch11 { omega0, alpha, gamma, beta } => {
                write!(f, "egarch11(omega={omega0},alpha={alpha},gamma={gamma},beta={beta})")
            }
        }
    }
}

impl std::str::FromStr for ModelSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_model(text)
    }
}

fn parse_float_list(body: &str) -> Result<Vec<f64>> {
    let body = body.trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number `{tok}` in model text")))
        })
        .collect()
}

fn parse_named(body: &str, names: &[&str], what: &str) -> Result<Vec<f64>> {
    let mut out = vec![None; names.len()];
    for part in body.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("expected key=value in {what}, got `{part}`"))
        })?;
        let idx = names
            .iter()
            .position(|n| *n == key.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown parameter `{key}` in {what}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad number `{value}` in {what}")))?;
        out[idx] = Some(v);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| Error::InvalidInput(format!("missing parameter `{}` in {what}", names[i])))
        })
        .collect()
}

/// Parse the canonical text form, e.g. `ar(0.5)`, `arma(0.1;0.8)`,
/// `garch11(omega=0.01,alpha=0.4,beta=0.5)`.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let text = text.trim();
    let open = text
        .find('(')
        .ok_or_else(|| Error::InvalidInput(format!("model text `{text}` missing `(`")))?;
    if !text.ends_with(')') {
        return Err(Error::InvalidInput(format!("model text `{text}` missing closing `)`")));
    }
    let head = text[..open].trim().to_ascii_lowercase();
    let body = &text[open + 1..text.len() - 1];
    match head.as_str() {
        "ar" => Ok(ModelSpec::Ar { coeffs: parse_float_list(body)? }),
        "arma" => {
            let (ar_part, ma_part) = body.split_once(';').ok_or_else(|| {
                Error::InvalidInput("arma text needs `;` between ar and ma lists".into())
            })?;
            Ok(ModelSpec::Arma { ar: parse_float_list(ar_part)?, ma: parse_float_list(ma_part)? })
        }
        "arch1" => {
            let v = parse_named(body, &["omega", "alpha"], "arch1")?;
            Ok(ModelSpec::Arch1 { omega0: v[0], alpha: v[1] })
        }
        "garch11" => {
            let v = parse_named(body, &["omega", "alpha", "beta"], "garch11")?;
            Ok(ModelSpec::Garch11 { omega0: v[0], alpha: v[1], beta: v[2] })
        }
        "egarch11" => {
            let v = parse_named(body, &["omega", "alpha", "gamma", "beta"], "egarch11")?;
            Ok(ModelSpec::Egarch11 { omega0: v[0], alpha: v[1], gamma: v[2], beta: v[3] })
        }
        other => Err(Error::InvalidInput(format!("unknown model family `{other}`"))),
    }
}
