//! Derivative-free simplex minimization (Nelder-Mead) with the standard
//! reflection/expansion/contraction/shrink coefficients (1, 2, 0.5, 0.5).

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `f` starting from `start`; terminates when the simplex diameter
/// (max pairwise infinity-norm distance) drops below `tol` or after
/// `max_iter` iterations.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<NelderMeadOutcome> {
    nelder_mead_traced(f, start, tol, max_iter, None)
}

pub(crate) fn nelder_mead_traced(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    tol: f64,
    max_iter: usize,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<NelderMeadOutcome> {
    let d = start.len();
    if d == 0 {
        return Err(Error::InvalidInput("empty start point".into()));
    }
    let f0 = f(start);
    if !f0.is_finite() {
        return Err(Error::Numerical(format!("objective is {f0} at the start point")));
    }
    // treat non-finite values as +inf so the simplex retreats from them
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(start.to_vec());
    for i in 0..d {
        let mut v = start.to_vec();
        v[i] += 0.1 * v[i].abs().max(1.0);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let diameter = |simplex: &[Vec<f64>]| -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..simplex.len() {
            for b in a + 1..simplex.len() {
                let dist = simplex[a]
                    .iter()
                    .zip(&simplex[b])
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(dist);
            }
        }
        worst
    };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // order vertices: best first, worst last
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalued: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalued;

        if let Some(t) = trace.as_deref_mut() {
            t.push(values[0]);
        }
        if diameter(&simplex) < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..d)
            .map(|i| simplex[..d].iter().map(|v| v[i]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].clone();
        let blend = |a: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + a * (c - w))
                .collect()
        };

        let reflected = blend(1.0);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = blend(2.0);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
        } else if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
        } else {
            // contraction: outside if the reflection improved on the worst
            let (candidate, fc) = if fr < values[d] {
                let c = blend(0.5);
                let v = eval(&c);
                (c, v)
            } else {
                let c = blend(-0.5);
                let v = eval(&c);
                (c, v)
            };
            if fc < values[d].min(fr) {
                simplex[d] = candidate;
                values[d] = fc;
            } else {
                // shrink toward the best vertex
                let best = simplex[0].clone();
                for v in simplex.iter_mut().skip(1) {
                    for (x, b) in v.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                }
                for i in 1..=d {
                    values[i] = eval(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=d {
        if values[i] < values[best] {
            best = i;
        }
    }
    Ok(NelderMeadOutcome {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_one_dimensional() {
        let out = nelder_mead(|x| (x[0] - 3.0).powi(2), &[0.0], 1e-10, 2000).unwrap();
        assert!(out.converged);
        assert!((out.x[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock_classic_start() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = nelder_mead(f, &[-1.2, 1.0], 1e-12, 5000).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-4, "x0 = {}", out.x[0]);
        assert!((out.x[1] - 1.0).abs() < 1e-4, "x1 = {}", out.x[1]);
    }

    #[test]
    fn constant_objective_returns_start() {
        let out = nelder_mead(|_| 7.5, &[1.0, -2.0], 1e-8, 2000).unwrap();
        assert!(out.converged);
        assert_eq!(out.value, 7.5);
        assert!((out.x[0] - 1.0).abs() < 1.0 && (out.x[1] + 2.0).abs() < 1.0);
    }

    #[test]
    fn best_vertex_is_monotone() {
        let mut trace = Vec::new();
        let f = |x: &[f64]| x[0].powi(4) + (x[1] + 2.0).powi(2) + x[0].sin();
        nelder_mead_traced(f, &[2.0, 2.0], 1e-10, 500, Some(&mut trace)).unwrap();
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn non_finite_start_is_an_error() {
        assert!(nelder_mead(|x| (1.0 / x[0]).ln(), &[-1.0], 1e-8, 100).is_err());
    }
}
