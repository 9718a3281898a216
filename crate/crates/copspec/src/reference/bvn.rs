//! Standard bivariate normal CDF via the single-integral identity
//! Phi2(a, b; rho) = Phi(a) Phi(b) + int_0^rho phi2(a, b; r) dr.

use std::f64::consts::PI;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse standard normal CDF; statrs' rational approximation polished by
/// two Newton steps against the erfc-based CDF.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::InvalidInput(format!("quantile level {p} outside (0, 1)")));
    }
    use statrs::distribution::{ContinuousCDF, Normal};
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut x = normal.inverse_cdf(p);
    for _ in 0..2 {
        let pdf = std_normal_pdf(x);
        if pdf <= 0.0 {
            break;
        }
        x -= (std_normal_cdf(x) - p) / pdf;
    }
    Ok(x)
}

/// Bivariate standard normal density with correlation r.
fn bvn_pdf(a: f64, b: f64, r: f64) -> f64 {
    let det = 1.0 - r * r;
    ((-(a * a - 2.0 * r * a * b + b * b) / (2.0 * det)).exp()) / (2.0 * PI * det.sqrt())
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(&f, a, b, fa, fm, fb, whole, tol, 60)
}

/// P(X <= a, Y <= b) for standard normals with correlation rho, to absolute
/// accuracy better than 1e-10.
pub fn bvn_cdf(a: f64, b: f64, rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) || !rho.is_finite() {
        return Err(Error::InvalidInput(format!("correlation {rho} outside [-1, 1]")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("bvn_cdf arguments must be finite".into()));
    }
    // comonotone / antimonotone limits are exact
    if rho == 1.0 {
        return Ok(std_normal_cdf(a.min(b)));
    }
    if rho == -1.0 {
        return Ok((std_normal_cdf(a) + std_normal_cdf(b) - 1.0).max(0.0));
    }
    let base = std_normal_cdf(a) * std_normal_cdf(b);
    let correction = integrate(|r| bvn_pdf(a, b, r), 0.0, rho, 1e-12);
    Ok((base + correction).clamp(0.0, 1.0))
}
