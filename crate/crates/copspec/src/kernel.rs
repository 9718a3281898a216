//! Smoothing kernels for the frequency domain.
//!
//! The weight function W is even, non-negative, supported on [-pi, pi] and
//! integrates to one; the estimator uses its 2*pi-periodized, bandwidth-scaled
//! version `W_n(u) = sum_j b^-1 W(b^-1 (u + 2*pi*j))`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Epanechnikov,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth <= PI) || !bandwidth.is_finite() {
            return Err(Error::InvalidInput(format!(
                "bandwidth {bandwidth} outside (0, pi]"
            )));
        }
        Ok(Self { kind, bandwidth })
    }

    pub fn epanechnikov(bandwidth: f64) -> Result<Self> {
        Self::new(KernelKind::Epanechnikov, bandwidth)
    }

    /// Unscaled weight W(u): Epanechnikov normalized to integrate to one
    /// over its support [-pi, pi], i.e. W(u) = (3/(4*pi)) (1 - (u/pi)^2).
    pub fn base_weight(&self, u: f64) -> f64 {
        match self.kind {
            KernelKind::Epanechnikov => {
                if u.abs() >= PI {
                    0.0
                } else {
                    let x = u / PI;
                    3.0 / (4.0 * PI) * (1.0 - x * x)
                }
            }
        }
    }

    /// Periodized, bandwidth-scaled weight W_n(u). Because the support of W
    /// is contained in [-pi, pi] and b <= pi, summing j in -2..=2 is exact.
    pub fn periodized_weight(&self, u: f64) -> f64 {
        let b = self.bandwidth;
        let mut total = 0.0;
        for j in -2i32..=2 {
            total += self.base_weight((u + 2.0 * PI * f64::from(j)) / b) / b;
        }
        total
    }

    /// Integral of W over [-pi, pi] by composite Simpson quadrature.
    pub fn integral(&self) -> f64 {
        simpson(|u| self.base_weight(u), -PI, PI, 4096)
    }

    /// Integral of W^2 over [-pi, pi] by composite Simpson quadrature
    /// (3/(5*pi) for the Epanechnikov weight; computed, not hardcoded).
    pub fn squared_integral(&self) -> f64 {
        simpson(|u| self.base_weight(u).powi(2), -PI, PI, 4096)
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) & !1; // even
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_bounds_enforced() {
        assert!(KernelSpec::epanechnikov(0.0).is_err());
        assert!(KernelSpec::epanechnikov(PI + 0.01).is_err());
        assert!(KernelSpec::epanechnikov(PI).is_ok());
    }

    #[test]
    fn integrates_to_one_and_is_even_nonnegative() {
        let k = KernelSpec::epanechnikov(0.1).unwrap();
        assert!((k.integral() - 1.0).abs() < 1e-6);
        for i in 0..200 {
            let u = -PI + 2.0 * PI * i as f64 / 199.0;
            assert!(k.base_weight(u) >= 0.0);
            assert!((k.base_weight(u) - k.base_weight(-u)).abs() < 1e-15);
        }
    }

    #[test]
    fn periodized_weight_at_zero_matches_closed_form() {
        // b = 0.1, u = 0 -> b^-1 W(0) = 10 * 3/(4*pi)
        let k = KernelSpec::epanechnikov(0.1).unwrap();
        let expect = 10.0 * 3.0 / (4.0 * PI);
        assert!((k.periodized_weight(0.0) - expect).abs() < 1e-12);
        assert!((expect - 2.38732).abs() < 1e-5);
    }

    #[test]
    fn periodized_weight_is_periodic() {
        let k = KernelSpec::epanechnikov(0.3).unwrap();
        for &u in &[0.0, 0.05, -0.2, 1.0] {
            assert!((k.periodized_weight(u) - k.periodized_weight(u + 2.0 * PI)).abs() < 1e-12);
        }
    }

    #[test]
    fn outside_scaled_support_is_zero() {
        // support of the scaled kernel is [-b*pi, b*pi]; u = 0.2*pi is outside
        // for b = 0.1 and no wrap term is active there.
        let k = KernelSpec::epanechnikov(0.1).unwrap();
        assert_eq!(k.periodized_weight(0.2 * PI), 0.0);
    }

    #[test]
    fn squared_integral_matches_analytic_value() {
        let k = KernelSpec::epanechnikov(0.1).unwrap();
        assert!((k.squared_integral() - 3.0 / (5.0 * PI)).abs() < 1e-10);
    }
}
