//! Rank-based copula spectral density estimation.
//!
//! Pipeline: empirical ranks -> clipped 0/1 indicator series per quantile
//! level -> FFT ("clipped DFT") -> cross copula periodograms -> kernel
//! smoothing over Fourier frequencies. Everything here is a pure function of
//! its inputs and safe to call from multiple threads.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::series::{FrequencyGrid, QuantileGrid, TimeSeries};

/// Empirical-CDF transform evaluated at the data points:
/// output[t] = #{s : x[s] <= x[t]} / n. Ties are counted with `<=`.
pub fn rank_transform(series: &TimeSeries) -> Vec<f64> {
    ranks_of(series.values())
}

pub(crate) fn ranks_of(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        // group of tied values shares the count of elements <= them
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (j + 1) as f64 / n as f64;
        for &idx in &order[i..=j] {
            ranks[idx] = r;
        }
        i = j + 1;
    }
    ranks
}

/// DFT of the clipped indicator series 1{rank[t] <= tau} over the Fourier
/// frequencies 2*pi*s/n, s = 0..n-1, computed by FFT.
pub fn clipped_dft(ranks: &[f64], tau: f64) -> Result<Vec<Complex64>> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidInput(format!("tau {tau} outside [0, 1]")));
    }
    if ranks.is_empty() {
        return Err(Error::InvalidInput("empty rank sequence".into()));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(ranks.len());
    Ok(clipped_dft_with(ranks, tau, &fft))
}

fn clipped_dft_with(ranks: &[f64], tau: f64, fft: &Arc<dyn Fft<f64>>) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = ranks
        .iter()
        .map(|&r| Complex64::new(if r <= tau { 1.0 } else { 0.0 }, 0.0))
        .collect();
    fft.process(&mut buf);
    buf
}

/// Cross copula periodogram I(2*pi*s/n) = d1[s] * conj(d2[s]) / (2*pi*n),
/// using d_{tau,n}(-omega) = conj(d_{tau,n}(omega)) for real indicators.
pub fn copula_periodogram(d1: &[Complex64], d2: &[Complex64]) -> Result<Vec<Complex64>> {
    if d1.len() != d2.len() {
        return Err(Error::InvalidInput(format!(
            "clipped DFT length mismatch: {} vs {}",
            d1.len(),
            d2.len()
        )));
    }
    let n = d1.len() as f64;
    let scale = 1.0 / (2.0 * PI * n);
    Ok(d1
        .iter()
        .zip(d2)
        .map(|(a, b)| a * b.conj() * scale)
        .collect())
}

/// Complex-valued spectral estimates/true values indexed by
/// (tau_i, tau_j, omega_k), Hermitian in the quantile indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrix {
    taus: QuantileGrid,
    omegas: FrequencyGrid,
    values: Vec<Complex64>,
}

impl SpectralMatrix {
    pub fn from_values(
        taus: QuantileGrid,
        omegas: FrequencyGrid,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != taus.len() * taus.len() * omegas.len() {
            return Err(Error::InvalidInput(format!(
                "value count {} does not match grid {}x{}x{}",
                values.len(),
                taus.len(),
                taus.len(),
                omegas.len()
            )));
        }
        Ok(Self { taus, omegas, values })
    }

    pub fn taus(&self) -> &QuantileGrid {
        &self.taus
    }

    pub fn omegas(&self) -> &FrequencyGrid {
        &self.omegas
    }

    pub fn n_taus(&self) -> usize {
        self.taus.len()
    }

    pub fn n_freqs(&self) -> usize {
        self.omegas.len()
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.taus.len() + j) * self.omegas.len() + k
    }

    /// Estimate for the ordered pair (tau_i, tau_j) at omega_k.
    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.values[self.idx(i, j, k)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Largest violation of the Hermitian-in-tau symmetry, for diagnostics.
    pub fn hermitian_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n_taus() {
            for j in 0..self.n_taus() {
                for k in 0..self.n_freqs() {
                    let d = (self.at(i, j, k) - self.at(j, i, k).conj()).norm();
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    pub fn same_grids(&self, other: &SpectralMatrix) -> bool {
        self.taus == other.taus && self.omegas == other.omegas
    }
}

/// Precomputed smoothing weights for one (series length, frequency grid,
/// kernel) combination. Sharing a plan across bootstrap replicates avoids
/// re-deriving kernel weights and FFT twiddle tables.
pub struct SmoothingPlan {
    n: usize,
    omegas: FrequencyGrid,
    kernel: KernelSpec,
    fft: Arc<dyn Fft<f64>>,
    /// Per frequency: the nonzero (s, W_n(omega - 2*pi*s/n)) pairs,
    /// s restricted to 1..=n-1 (the zero frequency is excluded).
    weights: Vec<Vec<(usize, f64)>>,
}

impl SmoothingPlan {
    pub fn new(n: usize, omegas: &FrequencyGrid, kernel: &KernelSpec) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("series too short to smooth".into()));
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let weights = omegas
            .omegas()
            .iter()
            .map(|&omega| {
                let mut row = Vec::new();
                for s in 1..n {
                    let w = kernel.periodized_weight(omega - 2.0 * PI * s as f64 / n as f64);
                    if w > 0.0 {
                        row.push((s, w));
                    }
                }
                row
            })
            .collect();
        Ok(Self { n, omegas: omegas.clone(), kernel: *kernel, fft, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn omegas(&self) -> &FrequencyGrid {
        &self.omegas
    }

    /// Smoothed estimate from raw observation values (length must match the
    /// plan). The (i, j) entry with i >= j is computed directly and the
    /// (j, i) entry is its conjugate, so Hermitian symmetry holds exactly.
    pub fn estimate(&self, values: &[f64], taus: &QuantileGrid) -> Result<SpectralMatrix> {
        if values.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "plan built for n = {}, series has n = {}",
                self.n,
                values.len()
            )));
        }
        let ranks = ranks_of(values);
        let dfts: Vec<Vec<Complex64>> = taus
            .levels()
            .iter()
            .map(|&tau| clipped_dft_with(&ranks, tau, &self.fft))
            .collect();

        let nt = taus.len();
        let nf = self.omegas.len();
        // (2*pi/n) smoothing weight times the 1/(2*pi*n) periodogram factor
        let scale = 1.0 / (self.n as f64 * self.n as f64);
        let mut out = vec![Complex64::new(0.0, 0.0); nt * nt * nf];
        for i in 0..nt {
            for j in 0..=i {
                for (k, row) in self.weights.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(s, w) in row {
                        acc += (dfts[i][s] * dfts[j][s].conj()) * w;
                    }
                    let v = acc * scale;
                    out[(i * nt + j) * nf + k] = v;
                    if i != j {
                        out[(j * nt + i) * nf + k] = v.conj();
                    }
                }
            }
        }
        SpectralMatrix::from_values(taus.clone(), self.omegas.clone(), out)
    }
}

/// Kernel-smoothed copula spectral density estimate
/// `f(omega) = (2*pi/n) * sum_{s=1}^{n-1} W_n(omega - 2*pi*s/n) I(2*pi*s/n)`.
/// The zero frequency (s = 0 mod n) is excluded from the sum.
pub fn smoothed_estimate(
    series: &TimeSeries,
    taus: &QuantileGrid,
    omegas: &FrequencyGrid,
    kernel: &KernelSpec,
) -> Result<SpectralMatrix> {
    let plan = SmoothingPlan::new(series.len(), omegas, kernel)?;
    plan.estimate(series.values(), taus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::stream::derive_stream;

    // ---- independent straight-line oracles ----

    fn naive_dft(indicator: &[f64]) -> Vec<Complex64> {
        let n = indicator.len();
        (0..n)
            .map(|s| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, &x) in indicator.iter().enumerate() {
                    let phase = -2.0 * PI * (s * t) as f64 / n as f64;
                    acc += x * Complex64::new(phase.cos(), phase.sin());
                }
                acc
            })
            .collect()
    }

    fn naive_periodogram(ind1: &[f64], ind2: &[f64]) -> Vec<Complex64> {
        // direct double sum (1/(2*pi*n)) sum_{t1,t2} i1[t1] i2[t2] e^{-i w (t1-t2)}
        let n = ind1.len();
        (0..n)
            .map(|s| {
                let w = 2.0 * PI * s as f64 / n as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for t1 in 0..n {
                    for t2 in 0..n {
                        let phase = -w * (t1 as f64 - t2 as f64);
                        acc += ind1[t1] * ind2[t2] * Complex64::new(phase.cos(), phase.sin());
                    }
                }
                acc / (2.0 * PI * n as f64)
            })
            .collect()
    }

    fn naive_smoothed_single(
        values: &[f64],
        tau1: f64,
        tau2: f64,
        omega: f64,
        kernel: &KernelSpec,
    ) -> Complex64 {
        let n = values.len();
        let ranks = ranks_of(values);
        let i1: Vec<f64> = ranks.iter().map(|&r| f64::from(r <= tau1)).collect();
        let i2: Vec<f64> = ranks.iter().map(|&r| f64::from(r <= tau2)).collect();
        let d1 = naive_dft(&i1);
        let d2 = naive_dft(&i2);
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 1..n {
            let ws = kernel.periodized_weight(omega - 2.0 * PI * s as f64 / n as f64);
            let i12 = d1[s] * d2[s].conj() / (2.0 * PI * n as f64);
            acc += ws * i12;
        }
        acc * 2.0 * PI / n as f64
    }

    fn random_series(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = derive_stream(seed, 0);
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    // ---- rank transform ----

    #[test]
    fn ranks_strictly_increasing_input() {
        assert_eq!(ranks_of(&[1.0, 2.0, 3.0, 4.0]), vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn ranks_count_ties_with_leq() {
        // direct count of values <= each entry
        assert_eq!(ranks_of(&[2.0, 1.0, 2.0]), vec![1.0, 1.0 / 3.0, 1.0]);
    }

    #[test]
    fn ranks_constant_series() {
        assert_eq!(ranks_of(&[5.0, 5.0, 5.0]), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn rank_transform_on_series() {
        let s = TimeSeries::new((1..=8).map(f64::from).collect(), "inc").unwrap();
        let expect: Vec<f64> = (1..=8).map(|k| f64::from(k) / 8.0).collect();
        assert_eq!(rank_transform(&s), expect);
    }

    // ---- clipped DFT ----

    #[test]
    fn clipped_dft_tau_zero_is_zero() {
        let ranks = ranks_of(&random_series(1, 16));
        let d = clipped_dft(&ranks, 0.0).unwrap();
        assert!(d.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn clipped_dft_tau_one_is_point_mass_at_zero() {
        let ranks = ranks_of(&random_series(2, 16));
        let d = clipped_dft(&ranks, 1.0).unwrap();
        assert!((d[0].re - 16.0).abs() < 1e-10);
        assert!(d[0].im.abs() < 1e-10);
        for s in 1..16 {
            assert!(d[s].norm() < 1e-10);
        }
    }

    #[test]
    fn clipped_dft_matches_naive_sum() {
        for seed in 0..5u64 {
            let values = random_series(seed + 10, 16);
            let ranks = ranks_of(&values);
            for &tau in &[0.17, 0.5, 0.83] {
                let fast = clipped_dft(&ranks, tau).unwrap();
                let ind: Vec<f64> = ranks.iter().map(|&r| f64::from(r <= tau)).collect();
                let slow = naive_dft(&ind);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn clipped_dft_rejects_bad_tau() {
        assert!(clipped_dft(&[0.5], 1.5).is_err());
        assert!(clipped_dft(&[], 0.5).is_err());
    }

    // ---- periodogram ----

    #[test]
    fn periodogram_self_pair_is_real_nonnegative() {
        let ranks = ranks_of(&random_series(3, 16));
        let d = clipped_dft(&ranks, 0.4).unwrap();
        let i = copula_periodogram(&d, &d).unwrap();
        for c in i {
            assert_eq!(c.im, 0.0);
            assert!(c.re >= 0.0);
        }
    }

    #[test]
    fn periodogram_zero_vector() {
        let z = vec![Complex64::new(0.0, 0.0); 8];
        let d = vec![Complex64::new(1.0, 2.0); 8];
        let i = copula_periodogram(&z, &d).unwrap();
        assert!(i.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn periodogram_matches_double_sum() {
        let values = random_series(4, 8);
        let ranks = ranks_of(&values);
        let (t1, t2) = (0.3, 0.7);
        let d1 = clipped_dft(&ranks, t1).unwrap();
        let d2 = clipped_dft(&ranks, t2).unwrap();
        let fast = copula_periodogram(&d1, &d2).unwrap();
        let i1: Vec<f64> = ranks.iter().map(|&r| f64::from(r <= t1)).collect();
        let i2: Vec<f64> = ranks.iter().map(|&r| f64::from(r <= t2)).collect();
        let slow = naive_periodogram(&i1, &i2);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn periodogram_length_mismatch() {
        let a = vec![Complex64::new(1.0, 0.0); 8];
        let b = vec![Complex64::new(1.0, 0.0); 9];
        assert!(copula_periodogram(&a, &b).is_err());
    }

    // ---- smoothed estimate ----

    #[test]
    fn smoothed_matches_straight_line_oracle() {
        let values = random_series(5, 64);
        let series = TimeSeries::new(values.clone(), "x").unwrap();
        let taus = QuantileGrid::new(vec![0.2, 0.6]).unwrap();
        let omega = 1.1;
        let omegas = FrequencyGrid::new(vec![omega]).unwrap();
        let kernel = KernelSpec::epanechnikov(0.3).unwrap();
        let est = smoothed_estimate(&series, &taus, &omegas, &kernel).unwrap();
        for (i, &t1) in taus.levels().iter().enumerate() {
            for (j, &t2) in taus.levels().iter().enumerate() {
                let direct = naive_smoothed_single(&values, t1, t2, omega, &kernel);
                assert!((est.at(i, j, 0) - direct).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn diagonal_is_exactly_real() {
        let series = TimeSeries::new(random_series(6, 128), "x").unwrap();
        let taus = QuantileGrid::display_default();
        let omegas = FrequencyGrid::fourier_default();
        let kernel = KernelSpec::epanechnikov(0.1).unwrap();
        let est = smoothed_estimate(&series, &taus, &omegas, &kernel).unwrap();
        for i in 0..taus.len() {
            for k in 0..omegas.len() {
                assert!(est.at(i, i, k).im.abs() < 1e-10);
            }
        }
        assert!(est.hermitian_violation() < 1e-10);
    }

    #[test]
    fn iid_estimate_near_closed_form() {
        // i.i.d. uniforms; mean over omega in (0.5, pi) at tau = (0.5, 0.5)
        // should be near 0.25/(2*pi). Tolerance ~4 asymptotic sd of the
        // frequency-averaged estimate.
        let n = 1024;
        let series = TimeSeries::new(random_series(7, n), "u").unwrap();
        let taus = QuantileGrid::new(vec![0.5]).unwrap();
        let omegas = FrequencyGrid::fourier_default();
        let kernel = KernelSpec::epanechnikov(0.1).unwrap();
        let est = smoothed_estimate(&series, &taus, &omegas, &kernel).unwrap();
        let grid = omegas.omegas();
        let picks: Vec<usize> =
            (0..grid.len()).filter(|&k| grid[k] > 0.5 && grid[k] < PI).collect();
        let mean: f64 =
            picks.iter().map(|&k| est.at(0, 0, k).re).sum::<f64>() / picks.len() as f64;
        let truth = 0.25 / (2.0 * PI);
        assert!(
            (mean - truth).abs() < 0.006,
            "mean {mean} vs closed form {truth}"
        );
    }

    #[test]
    fn rank_invariance_under_monotone_transform() {
        let values = random_series(8, 64);
        let transformed: Vec<f64> = values.iter().map(|&x| (3.0 * x - 1.0).exp()).collect();
        let taus = QuantileGrid::display_default();
        let omegas = FrequencyGrid::fourier_default();
        let kernel = KernelSpec::epanechnikov(0.2).unwrap();
        let a = smoothed_estimate(
            &TimeSeries::new(values, "a").unwrap(),
            &taus,
            &omegas,
            &kernel,
        )
        .unwrap();
        let b = smoothed_estimate(
            &TimeSeries::new(transformed, "b").unwrap(),
            &taus,
            &omegas,
            &kernel,
        )
        .unwrap();
        assert_eq!(a.values(), b.values());
    }
}
