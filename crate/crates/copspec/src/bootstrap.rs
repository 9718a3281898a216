//! Parametric-bootstrap model diagnostics: typical regions (pointwise
//! quantile bands of the replicated estimator) and uniform-in-tau p-values
//! built from scaled sup-statistics.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{fit_ar, fit_arma, fit_garch, FitResult, GarchVariant};
use crate::kernel::KernelSpec;
use crate::models::{simulate, ModelSpec, SimConfig};
use crate::series::{FrequencyGrid, QuantileGrid, TimeSeries};
use crate::spectra::{SmoothingPlan, SpectralMatrix};
use crate::stream::{derive_seed, derive_stream};

/// Namespace tags for deriving disjoint sub-seed spaces.
const TAG_CALIBRATION_DATA: u64 = 0x0da7a;
const TAG_CALIBRATION_BOOT: u64 = 0x0b007;

/// Candidate model classes (parameters unknown, estimated from data).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelClass {
    Ar(usize),
    Arma(usize, usize),
    Arch1,
    Garch11,
    Egarch11,
}

impl ModelClass {
    pub fn fit(&self, data: &TimeSeries) -> Result<FitResult> {
        match *self {
            ModelClass::Ar(p) => fit_ar(data, p),
            ModelClass::Arma(p, q) => fit_arma(data, p, q),
            ModelClass::Arch1 => fit_garch(data, GarchVariant::Arch1),
            ModelClass::Garch11 => fit_garch(data, GarchVariant::Garch11),
            ModelClass::Egarch11 => fit_garch(data, GarchVariant::Egarch11),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            ModelClass::Ar(p) => format!("ar({p})"),
            ModelClass::Arma(p, q) => format!("arma({p},{q})"),
            ModelClass::Arch1 => "arch1".into(),
            ModelClass::Garch11 => "garch11".into(),
            ModelClass::Egarch11 => "egarch11".into(),
        }
    }
}

/// Estimator settings shared by the data estimate and every replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub taus: QuantileGrid,
    pub omegas: FrequencyGrid,
    pub kernel: KernelSpec,
}

impl EstimatorConfig {
    pub fn new(taus: QuantileGrid, omegas: FrequencyGrid, kernel: KernelSpec) -> Self {
        Self { taus, omegas, kernel }
    }

    pub fn estimate(&self, series: &TimeSeries) -> Result<SpectralMatrix> {
        crate::spectra::smoothed_estimate(series, &self.taus, &self.omegas, &self.kernel)
    }
}

/// Fitted model plus R replicate spectral estimates on shared grids.
#[derive(Debug, Clone)]
pub struct BootstrapEnsemble {
    pub fitted: FitResult,
    pub replicates: Vec<SpectralMatrix>,
    pub config: EstimatorConfig,
    pub seed: u64,
    pub r: usize,
}

impl BootstrapEnsemble {
    pub fn validate(&self) -> Result<()> {
        if self.r < 2 || self.replicates.len() != self.r {
            return Err(Error::InvalidInput(format!(
                "ensemble needs R >= 2 replicates, has {} of {}",
                self.replicates.len(),
                self.r
            )));
        }
        for (idx, rep) in self.replicates.iter().enumerate() {
            if rep.taus() != &self.config.taus || rep.omegas() != &self.config.omegas {
                return Err(Error::InvalidInput(format!("replicate {idx} grid mismatch")));
            }
        }
        Ok(())
    }
}

/// Fit the class once, then simulate and re-estimate R replicates from the
/// fitted model; replicate r uses the stream (seed, r).
pub fn run_parametric_bootstrap(
    data: &TimeSeries,
    class: ModelClass,
    r: usize,
    config: &EstimatorConfig,
    seed: u64,
) -> Result<BootstrapEnsemble> {
    if r < 2 {
        return Err(Error::InvalidInput(format!("bootstrap needs R >= 2, got {r}")));
    }
    let fitted = class.fit(data)?;
    let n = data.len();
    let plan = SmoothingPlan::new(n, &config.omegas, &config.kernel)?;

    let replicates: Vec<SpectralMatrix> = (0..r)
        .into_par_iter()
        .map(|rep| -> Result<SpectralMatrix> {
            let sim_cfg = SimConfig::new(n, seed).with_replicate(rep as u64);
            let path = simulate(&fitted.spec, &sim_cfg).map_err(|e| {
                Error::Numerical(format!("replicate {rep}: simulation failed: {e}"))
            })?;
            plan.estimate(path.values(), &config.taus)
                .map_err(|e| Error::Numerical(format!("replicate {rep}: estimation failed: {e}")))
        })
        .collect::<Result<_>>()?;

    let ensemble =
        BootstrapEnsemble { fitted, replicates, config: config.clone(), seed, r };
    ensemble.validate()?;
    Ok(ensemble)
}

/// Order-statistic quantile with linear interpolation at position
/// h = (R - 1) p + 1 on the sorted sample (returns the minimum at p = 0 and
/// the maximum at p = 1).
pub fn interpolated_quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let r = sorted.len();
    if r == 1 {
        return sorted[0];
    }
    let h = (r - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(r - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Pointwise bootstrap quantile bands, separately for real and imaginary
/// parts, stored per (tau_i, tau_j, omega_k).
#[derive(Debug, Clone, PartialEq)]
pub struct TypicalRegions {
    pub taus: QuantileGrid,
    pub omegas: FrequencyGrid,
    pub alpha: f64,
    pub lower_re: Vec<f64>,
    pub upper_re: Vec<f64>,
    pub lower_im: Vec<f64>,
    pub upper_im: Vec<f64>,
}

impl TypicalRegions {
    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.taus.len() + j) * self.omegas.len() + k
    }

    pub fn bounds_re(&self, i: usize, j: usize, k: usize) -> (f64, f64) {
        let idx = self.idx(i, j, k);
        (self.lower_re[idx], self.upper_re[idx])
    }

    pub fn bounds_im(&self, i: usize, j: usize, k: usize) -> (f64, f64) {
        let idx = self.idx(i, j, k);
        (self.lower_im[idx], self.upper_im[idx])
    }
}

/// Algorithm-1 bands: alpha/2 and 1 - alpha/2 quantiles of the replicate
/// values per (tau-pair, omega), separately for real and imaginary parts.
pub fn typical_regions(ensemble: &BootstrapEnsemble, alpha: f64) -> Result<TypicalRegions> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside (0, 1)")));
    }
    ensemble.validate()?;
    let taus = ensemble.config.taus.clone();
    let omegas = ensemble.config.omegas.clone();
    let cells = taus.len() * taus.len() * omegas.len();
    let mut lower_re = vec![0.0; cells];
    let mut upper_re = vec![0.0; cells];
    let mut lower_im = vec![0.0; cells];
    let mut upper_im = vec![0.0; cells];

    let mut buf_re = vec![0.0; ensemble.r];
    let mut buf_im = vec![0.0; ensemble.r];
    for i in 0..taus.len() {
        for j in 0..taus.len() {
            for k in 0..omegas.len() {
                for (r, rep) in ensemble.replicates.iter().enumerate() {
                    let v = rep.at(i, j, k);
                    buf_re[r] = v.re;
                    buf_im[r] = v.im;
                }
                buf_re.sort_unstable_by(f64::total_cmp);
                buf_im.sort_unstable_by(f64::total_cmp);
                let idx = (i * taus.len() + j) * omegas.len() + k;
                lower_re[idx] = interpolated_quantile(&buf_re, alpha / 2.0);
                upper_re[idx] = interpolated_quantile(&buf_re, 1.0 - alpha / 2.0);
                lower_im[idx] = interpolated_quantile(&buf_im, alpha / 2.0);
                upper_im[idx] = interpolated_quantile(&buf_im, 1.0 - alpha / 2.0);
            }
        }
    }
    Ok(TypicalRegions { taus, omegas, alpha, lower_re, upper_re, lower_im, upper_im })
}

/// Inclusive coverage indicators per (tau-pair, omega, part).
#[derive(Debug, Clone)]
pub struct CoverageField {
    pub taus: QuantileGrid,
    pub omegas: FrequencyGrid,
    pub covered_re: Vec<bool>,
    pub covered_im: Vec<bool>,
}

impl CoverageField {
    pub fn re(&self, i: usize, j: usize, k: usize) -> bool {
        self.covered_re[(i * self.taus.len() + j) * self.omegas.len() + k]
    }

    pub fn im(&self, i: usize, j: usize, k: usize) -> bool {
        self.covered_im[(i * self.taus.len() + j) * self.omegas.len() + k]
    }
}

pub fn coverage_indicator(
    estimate: &SpectralMatrix,
    regions: &TypicalRegions,
) -> Result<CoverageField> {
    if estimate.taus() != &regions.taus || estimate.omegas() != &regions.omegas {
        return Err(Error::InvalidInput("estimate and regions grids differ".into()));
    }
    let nt = regions.taus.len();
    let nf = regions.omegas.len();
    let mut covered_re = vec![false; nt * nt * nf];
    let mut covered_im = vec![false; nt * nt * nf];
    for i in 0..nt {
        for j in 0..nt {
            for k in 0..nf {
                let idx = (i * nt + j) * nf + k;
                let v = estimate.at(i, j, k);
                let (lr, ur) = regions.bounds_re(i, j, k);
                let (li, ui) = regions.bounds_im(i, j, k);
                covered_re[idx] = lr <= v.re && v.re <= ur;
                covered_im[idx] = li <= v.im && v.im <= ui;
            }
        }
    }
    Ok(CoverageField { taus: regions.taus.clone(), omegas: regions.omegas.clone(), covered_re, covered_im })
}

/// Signed p-values per quantile-level pair and frequency, plus the per-
/// frequency minimum. Pairs are stored for i <= j (tau_i <= tau_j); the
/// Hermitian symmetry makes the remaining ordered pairs redundant.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueField {
    pub levels: QuantileGrid,
    pub omegas: FrequencyGrid,
    pub r: usize,
    pub beta: f64,
    /// row-major over (upper-triangle pair index, omega index)
    pub p_re: Vec<f64>,
    pub p_im: Vec<f64>,
    pub sign_re: Vec<i8>,
    pub sign_im: Vec<i8>,
    pub p_min: Vec<f64>,
    pub warnings: Vec<String>,
}

impl PValueField {
    pub fn n_pairs(&self) -> usize {
        let k = self.levels.len();
        k * (k + 1) / 2
    }

    /// Index into the upper-triangle pair list for levels i <= j.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.levels.len());
        // pairs (0,0), (0,1), ..., (0,K-1), (1,1), ...
        let k = self.levels.len();
        i * k - i * (i + 1) / 2 + j
    }

    pub fn p_re_at(&self, i: usize, j: usize, omega_idx: usize) -> f64 {
        self.p_re[self.pair_index(i, j) * self.omegas.len() + omega_idx]
    }

    pub fn p_im_at(&self, i: usize, j: usize, omega_idx: usize) -> f64 {
        self.p_im[self.pair_index(i, j) * self.omegas.len() + omega_idx]
    }

    pub fn sign_re_at(&self, i: usize, j: usize, omega_idx: usize) -> i8 {
        self.sign_re[self.pair_index(i, j) * self.omegas.len() + omega_idx]
    }

    pub fn sign_im_at(&self, i: usize, j: usize, omega_idx: usize) -> i8 {
        self.sign_im[self.pair_index(i, j) * self.omegas.len() + omega_idx]
    }
}

/// Fraction of replicate max-statistics at or above `e`: the left limit
/// `1 - F_R(e-)` of the empirical CDF.
pub(crate) fn pvalue_from_stats(max_stats: &[f64], e: f64) -> f64 {
    let count = max_stats.iter().filter(|&&a| a >= e).count();
    count as f64 / max_stats.len() as f64
}

/// Algorithm 2: scaled sup-statistic p-values, separately per part, with the
/// per-frequency minimum over all level pairs and parts.
pub fn algorithm2_pvalues(
    ensemble: &BootstrapEnsemble,
    data_estimate: &SpectralMatrix,
    beta: f64,
) -> Result<PValueField> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::InvalidInput(format!("beta {beta} outside (0, 1)")));
    }
    ensemble.validate()?;
    if !data_estimate.same_grids(&ensemble.replicates[0]) {
        return Err(Error::InvalidInput("data estimate grids differ from ensemble".into()));
    }

    let levels = ensemble.config.taus.clone();
    let omegas = ensemble.config.omegas.clone();
    let k = levels.len();
    let nf = omegas.len();
    let r = ensemble.r;
    let n_pairs = k * (k + 1) / 2;
    let mut warnings = Vec::new();

    let mut p_re = vec![1.0; n_pairs * nf];
    let mut p_im = vec![1.0; n_pairs * nf];
    let mut sign_re = vec![1i8; n_pairs * nf];
    let mut sign_im = vec![1i8; n_pairs * nf];
    let mut p_min = vec![1.0; nf];

    let mut sorted = vec![0.0; r];
    for w in 0..nf {
        // per-pair scaling from the replicate beta-quantiles
        let mut centers_re = vec![0.0; n_pairs];
        let mut centers_im = vec![0.0; n_pairs];
        let mut deltas_re = vec![0.0; n_pairs];
        let mut deltas_im = vec![0.0; n_pairs];
        let mut pair = 0;
        for i in 0..k {
            for j in i..k {
                for part in 0..2 {
                    for (rep_idx, rep) in ensemble.replicates.iter().enumerate() {
                        let v = rep.at(i, j, w);
                        sorted[rep_idx] = if part == 0 { v.re } else { v.im };
                    }
                    sorted.sort_unstable_by(f64::total_cmp);
                    let l = interpolated_quantile(&sorted, beta / 2.0);
                    let u = interpolated_quantile(&sorted, 1.0 - beta / 2.0);
                    let c = (u + l) / 2.0;
                    let mut d = (u - l) / 2.0;
                    if part == 1 {
                        // the imaginary-part guard from the algorithm
                        if u == l {
                            d += 1e-6;
                        }
                    } else if d < 1e-12 {
                        d = 1e-12;
                        warnings.push(format!(
                            "degenerate real-part spread at pair ({}, {}), omega index {w}; clamped",
                            levels.levels()[i],
                            levels.levels()[j]
                        ));
                    }
                    if part == 0 {
                        centers_re[pair] = c;
                        deltas_re[pair] = d;
                    } else {
                        centers_im[pair] = c;
                        deltas_im[pair] = d;
                    }
                }
                pair += 1;
            }
        }

        // per-replicate sup statistics over all pairs and both parts
        let mut max_stats = vec![0.0f64; r];
        for (rep_idx, rep) in ensemble.replicates.iter().enumerate() {
            let mut worst = 0.0f64;
            let mut pair = 0;
            for i in 0..k {
                for j in i..k {
                    let v = rep.at(i, j, w);
                    worst = worst.max((v.re - centers_re[pair]).abs() / deltas_re[pair]);
                    worst = worst.max((v.im - centers_im[pair]).abs() / deltas_im[pair]);
                    pair += 1;
                }
            }
            max_stats[rep_idx] = worst;
        }

        // data statistics and p-values
        let mut pm = 1.0f64;
        let mut pair = 0;
        for i in 0..k {
            for j in i..k {
                let v = data_estimate.at(i, j, w);
                let e_re = (v.re - centers_re[pair]).abs() / deltas_re[pair];
                let e_im = (v.im - centers_im[pair]).abs() / deltas_im[pair];
                let idx = pair * nf + w;
                p_re[idx] = pvalue_from_stats(&max_stats, e_re);
                p_im[idx] = pvalue_from_stats(&max_stats, e_im);
                sign_re[idx] = if v.re - centers_re[pair] >= 0.0 { 1 } else { -1 };
                sign_im[idx] = if v.im - centers_im[pair] >= 0.0 { 1 } else { -1 };
                pm = pm.min(p_re[idx]).min(p_im[idx]);
                pair += 1;
            }
        }
        p_min[w] = pm;
    }

    Ok(PValueField {
        levels,
        omegas,
        r,
        beta,
        p_re,
        p_im,
        sign_re,
        sign_im,
        p_min,
        warnings,
    })
}

/// Aggregated self-calibration results: per-cell coverage rates and the
/// per-frequency frequency of `p_min <= alpha`, with binomial standard
/// errors implied by `reps`.
#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub taus: QuantileGrid,
    pub omegas: FrequencyGrid,
    pub alpha: f64,
    pub beta: f64,
    pub reps: usize,
    pub coverage_re: Vec<f64>,
    pub coverage_im: Vec<f64>,
    pub pmin_le_alpha: Vec<f64>,
}

impl CalibrationReport {
    pub fn coverage_re_at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coverage_re[(i * self.taus.len() + j) * self.omegas.len() + k]
    }

    pub fn coverage_im_at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coverage_im[(i * self.taus.len() + j) * self.omegas.len() + k]
    }

    /// Binomial standard error of a rate estimated from `reps` repetitions.
    pub fn binomial_se(&self, rate: f64) -> f64 {
        (rate * (1.0 - rate) / self.reps as f64).sqrt()
    }
}

/// Full pipeline repeated `reps` times: simulate data from `truth`, fit
/// `class`, bootstrap with R replicates, record Algorithm-1 coverage and
/// Algorithm-2 p_min per frequency.
#[allow(clippy::too_many_arguments)]
pub fn self_calibration_check(
    truth: &ModelSpec,
    class: ModelClass,
    n: usize,
    r: usize,
    reps: usize,
    alpha: f64,
    beta: f64,
    config: &EstimatorConfig,
    seed: u64,
) -> Result<CalibrationReport> {
    if reps == 0 {
        return Err(Error::InvalidInput("reps must be positive".into()));
    }
    let adm = crate::models::check_admissible(truth);
    if !adm.admissible {
        return Err(Error::InvalidInput(format!("inadmissible model: {}", adm.message)));
    }

    struct RepOutcome {
        covered_re: Vec<bool>,
        covered_im: Vec<bool>,
        pmin_hit: Vec<bool>,
    }

    let outcomes: Vec<RepOutcome> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<RepOutcome> {
            let data_seed = derive_seed(seed, TAG_CALIBRATION_DATA ^ (rep as u64) << 8);
            let boot_seed = derive_seed(seed, TAG_CALIBRATION_BOOT ^ (rep as u64) << 8);
            let data = simulate(truth, &SimConfig::new(n, data_seed))?;
            let ensemble = run_parametric_bootstrap(&data, class, r, config, boot_seed)?;
            let estimate = config.estimate(&data)?;
            let regions = typical_regions(&ensemble, alpha)?;
            let coverage = coverage_indicator(&estimate, &regions)?;
            let pvalues = algorithm2_pvalues(&ensemble, &estimate, beta)?;
            Ok(RepOutcome {
                covered_re: coverage.covered_re,
                covered_im: coverage.covered_im,
                pmin_hit: pvalues.p_min.iter().map(|&p| p <= alpha).collect(),
            })
        })
        .collect::<Result<_>>()?;

    let cells = config.taus.len() * config.taus.len() * config.omegas.len();
    let mut coverage_re = vec![0.0; cells];
    let mut coverage_im = vec![0.0; cells];
    let mut pmin_le_alpha = vec![0.0; config.omegas.len()];
    for outcome in &outcomes {
        for (acc, &hit) in coverage_re.iter_mut().zip(&outcome.covered_re) {
            *acc += f64::from(u8::from(hit));
        }
        for (acc, &hit) in coverage_im.iter_mut().zip(&outcome.covered_im) {
            *acc += f64::from(u8::from(hit));
        }
        for (acc, &hit) in pmin_le_alpha.iter_mut().zip(&outcome.pmin_hit) {
            *acc += f64::from(u8::from(hit));
        }
    }
    let scale = 1.0 / reps as f64;
    coverage_re.iter_mut().for_each(|v| *v *= scale);
    coverage_im.iter_mut().for_each(|v| *v *= scale);
    pmin_le_alpha.iter_mut().for_each(|v| *v *= scale);

    Ok(CalibrationReport {
        taus: config.taus.clone(),
        omegas: config.omegas.clone(),
        alpha,
        beta,
        reps,
        coverage_re,
        coverage_im,
        pmin_le_alpha,
    })
}

/// Derive the deterministic stream used for a calibration data set; exposed
/// for tests that need to reproduce a single repetition.
pub fn calibration_data_stream(seed: u64, rep: u64) -> rand_chacha::ChaCha12Rng {
    derive_stream(derive_seed(seed, TAG_CALIBRATION_DATA ^ rep << 8), 0)
}
