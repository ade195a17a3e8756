//! Null-distribution calibration for the k-sample statistic: permutation,
//! subsampling, and simulation from the estimated spectrum of the centered
//! kernel operator.
//!
//! All three report a p-value with the add-one convention
//! p = (1 + #{resampled ≥ observed}) / (B + 1), where "observed" is the
//! scaled statistic n·T̂. The resampling calibrators route both the observed
//! and the resampled statistics through the estimator's exact block-sum path,
//! so the observed value here is bitwise identical to
//! [`crate::estimator::gmmd_statistic`], and on data where resampling cannot
//! change the statistic the p-value is exactly 1.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::estimator::{block_sums_from_gram, gmmd_statistic, GroupedSamples};
use crate::kernel::{self, KernelSpec, Point};
use crate::Error;

/// Relative cutoff used when an eigenvalue within rounding noise of zero is
/// treated as zero; expressed on the scale of the operator eigenvalues
/// (Gram eigenvalues divided by n).
const EIGEN_CLAMP: f64 = 1e-8;

/// Rule for discarding trailing eigenvalues of an estimated spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Keep eigenvalues λ ≥ t·λ_max; t must lie in [0, 1).
    Threshold(f64),
    /// Keep the q largest eigenvalues.
    TopQ(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Threshold(1e-10)
    }
}

/// Estimated eigenvalues of the centered kernel operator: positive, sorted
/// descending, with a record of the pooled sample size they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    truncation: Truncation,
    source_size: usize,
}

impl Spectrum {
    /// Builds a spectrum from raw operator eigenvalue estimates. Values in
    /// [−1e−8, 0) are clamped to zero; anything more negative is rejected as
    /// an indefinite Gram matrix. Fails if no positive eigenvalue remains.
    pub fn new(raw: Vec<f64>, truncation: Truncation, source_size: usize) -> Result<Self, Error> {
        if raw.is_empty() {
            return Err(Error::Empty("eigenvalues"));
        }
        if !raw.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("eigenvalues"));
        }
        match truncation {
            Truncation::Threshold(t) => {
                if !t.is_finite() || !(0.0..1.0).contains(&t) {
                    return Err(Error::invalid(
                        "threshold",
                        alloc::format!("relative threshold must lie in [0, 1), got {t}"),
                    ));
                }
            }
            Truncation::TopQ(q) => {
                if q == 0 {
                    return Err(Error::invalid("q", "must keep at least one eigenvalue"));
                }
            }
        }
        let mut vals = Vec::with_capacity(raw.len());
        for v in raw {
            if v < -EIGEN_CLAMP {
                return Err(Error::IndefiniteGram {
                    value: v,
                    tolerance: EIGEN_CLAMP,
                });
            }
            vals.push(if v < 0.0 { 0.0 } else { v });
        }
        vals.sort_unstable_by(|a, b| f64::total_cmp(b, a));
        let lambda_max = vals[0];
        if lambda_max <= 0.0 {
            return Err(Error::DegenerateSpectrum);
        }
        match truncation {
            Truncation::Threshold(t) => {
                let cut = t * lambda_max;
                vals.retain(|&v| v >= cut);
            }
            Truncation::TopQ(q) => vals.truncate(q),
        }
        Ok(Spectrum {
            eigenvalues: vals,
            truncation,
            source_size,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Pooled sample size the estimate came from (0 for external spectra).
    pub fn source_size(&self) -> usize {
        self.source_size
    }
}

/// Estimates the operator spectrum from pooled data: eigenvalues of the
/// doubly centered Gram matrix divided by n.
pub fn estimate_spectrum(
    kernel: &KernelSpec,
    pooled: &[Point],
    truncation: Truncation,
) -> Result<Spectrum, Error> {
    kernel::validate_points(pooled)?;
    let n = pooled.len();
    if n < 2 {
        return Err(Error::invalid(
            "pooled",
            "spectrum estimation needs at least 2 points",
        ));
    }
    let refs: Vec<&Point> = pooled.iter().collect();
    let g = kernel::symmetric_gram_refs(kernel, &refs);
    let centered = kernel::center_gram(&g)?;
    let eigen = nalgebra::SymmetricEigen::try_new(centered, f64::EPSILON, 100 * n)
        .ok_or(Error::EigenFailure)?;
    let nf = n as f64;
    let raw: Vec<f64> = eigen.eigenvalues.iter().map(|v| v / nf).collect();
    Spectrum::new(raw, truncation, n)
}

/// Inputs for simulating the large-sample null distribution of the scaled
/// statistic: group proportions ρ, an operator spectrum, and a draw budget.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitLawConfig {
    rho: Vec<f64>,
    spectrum: Spectrum,
    draws: usize,
    seed: u64,
}

impl LimitLawConfig {
    pub fn new(
        rho: Vec<f64>,
        spectrum: Spectrum,
        draws: usize,
        seed: u64,
    ) -> Result<Self, Error> {
        if rho.len() < 2 {
            return Err(Error::TooFewGroups(rho.len()));
        }
        if !rho.iter().all(|&p| p.is_finite() && p > 0.0 && p < 1.0) {
            return Err(Error::invalid(
                "rho",
                "group proportions must lie strictly between 0 and 1",
            ));
        }
        let sum: f64 = rho.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "rho",
                alloc::format!("group proportions must sum to 1, got {sum}"),
            ));
        }
        if draws == 0 {
            return Err(Error::invalid("draws", "need at least 1 draw"));
        }
        Ok(LimitLawConfig {
            rho,
            spectrum,
            draws,
            seed,
        })
    }

    pub fn k(&self) -> usize {
        self.rho.len()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// True when the draw budget is below the floor the spectral p-value
    /// enforces; such configs are fine for moment checks but not for tests.
    pub fn low_draws(&self) -> bool {
        self.draws < 1000
    }
}

/// Simulates the limiting null distribution of the scaled statistic. One draw
/// is
///
/// ```text
/// S = Σ_p λ_p [ (k−2)(Z_p − k)
///             + Σ_j ( ρ_j⁻¹ (Y²_{p,j} − 1)
///                     − 2 Σ_{ℓ≠j} ρ_ℓ^{1/2} ρ_j^{−1/2} Y_{p,j} Y_{p,ℓ} ) ]
/// ```
///
/// with Y_{p,1}, …, Y_{p,k} independent standard normals drawn fresh for
/// every spectrum term p, and Z_p = Σ_j Y²_{p,j}.
pub fn simulate_limit_law(config: &LimitLawConfig) -> Vec<f64> {
    let k = config.k();
    let kf = k as f64;
    let inv_rho: Vec<f64> = config.rho.iter().map(|&p| 1.0 / p).collect();
    let sqrt_rho: Vec<f64> = config.rho.iter().map(|&p| libm::sqrt(p)).collect();
    let inv_sqrt_rho: Vec<f64> = sqrt_rho.iter().map(|&s| 1.0 / s).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut y = alloc::vec![0.0f64; k];
    let mut out = Vec::with_capacity(config.draws);
    for _ in 0..config.draws {
        let mut s = 0.0;
        for &lambda in config.spectrum.eigenvalues() {
            for slot in y.iter_mut() {
                *slot = rng.sample(StandardNormal);
            }
            let z: f64 = y.iter().map(|v| v * v).sum();
            let mut inner = 0.0;
            for j in 0..k {
                inner += inv_rho[j] * (y[j] * y[j] - 1.0);
                let mut coupled = 0.0;
                for l in 0..k {
                    if l != j {
                        coupled += sqrt_rho[l] * y[l];
                    }
                }
                inner -= 2.0 * inv_sqrt_rho[j] * y[j] * coupled;
            }
            s += lambda * ((kf - 2.0) * (z - kf) + inner);
        }
        out.push(s);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMethod {
    Permutation,
    Subsampling,
    Spectral,
}

/// A calibrated test outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub method: CalibrationMethod,
    /// Scaled statistic n·T̂ of the input data; for the resampling methods
    /// this is bitwise identical to what `gmmd_statistic` reports.
    pub observed: f64,
    /// Add-one p-value (1 + #{resampled ≥ observed}) / (resamples + 1).
    pub p_value: f64,
    /// Number of resampled or simulated statistics.
    pub resamples: usize,
    /// The resampled statistics (or limit-law draws), if requested.
    pub null_samples: Option<Vec<f64>>,
}

fn add_one_pvalue(count_ge: usize, resamples: usize) -> f64 {
    (1 + count_ge) as f64 / (resamples + 1) as f64
}

/// Permutation calibration: the pooled Gram matrix is computed once, and each
/// replicate shuffles the group-label vector. Replicate b draws its labels
/// from stream b of a ChaCha12 generator keyed by `seed`.
pub fn permutation_pvalue(
    kernel: &KernelSpec,
    data: &GroupedSamples,
    replications: usize,
    seed: u64,
    keep_null: bool,
) -> Result<CalibrationResult, Error> {
    if replications == 0 {
        return Err(Error::invalid("replications", "need at least 1 replication"));
    }
    let (pts, labels) = data.pooled_refs();
    let gram = kernel::symmetric_gram_refs(kernel, &pts);
    let identity: Vec<usize> = (0..pts.len()).collect();
    let k = data.k();
    let observed = crate::estimator::stat_from_sums(&block_sums_from_gram(
        &gram, &identity, &labels, k,
    ))
    .scaled;
    let mut count = 0usize;
    let mut kept = keep_null.then(|| Vec::with_capacity(replications));
    let mut shuffled = labels.clone();
    for b in 0..replications {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        shuffled.copy_from_slice(&labels);
        shuffled.shuffle(&mut rng);
        let s = crate::estimator::stat_from_sums(&block_sums_from_gram(
            &gram, &identity, &shuffled, k,
        ))
        .scaled;
        if s >= observed {
            count += 1;
        }
        if let Some(v) = kept.as_mut() {
            v.push(s);
        }
    }
    Ok(CalibrationResult {
        method: CalibrationMethod::Permutation,
        observed,
        p_value: add_one_pvalue(count, replications),
        resamples: replications,
        null_samples: kept,
    })
}

/// Subsampling calibration: each replicate shuffles the pooled indices once
/// and takes the first ⌊fraction·n_j⌋ positions of every group as its
/// subsample, recomputing the statistic at the subsample size. Requires each
/// subsampled group to keep at least 2 points.
pub fn subsampling_pvalue(
    kernel: &KernelSpec,
    data: &GroupedSamples,
    fraction: f64,
    replications: usize,
    seed: u64,
    keep_null: bool,
) -> Result<CalibrationResult, Error> {
    if replications == 0 {
        return Err(Error::invalid("replications", "need at least 1 replication"));
    }
    if !fraction.is_finite() || !(0.0..1.0).contains(&fraction) || fraction == 0.0 {
        return Err(Error::invalid(
            "fraction",
            alloc::format!("subsample fraction must lie in (0, 1), got {fraction}"),
        ));
    }
    let k = data.k();
    let sub_sizes: Vec<usize> = data
        .sizes()
        .iter()
        .map(|&n| libm::floor(fraction * n as f64) as usize)
        .collect();
    for (index, &m) in sub_sizes.iter().enumerate() {
        if m < 2 {
            return Err(Error::BlockTooSmall { index, size: m });
        }
    }
    let (pts, labels) = data.pooled_refs();
    let gram = kernel::symmetric_gram_refs(kernel, &pts);
    let identity: Vec<usize> = (0..pts.len()).collect();
    let observed = crate::estimator::stat_from_sums(&block_sums_from_gram(
        &gram, &identity, &labels, k,
    ))
    .scaled;
    let m_total: usize = sub_sizes.iter().sum();
    let mut count = 0usize;
    let mut kept = keep_null.then(|| Vec::with_capacity(replications));
    let mut order: Vec<usize> = identity.clone();
    let mut sub_idx = Vec::with_capacity(m_total);
    let mut sub_labels = Vec::with_capacity(m_total);
    let mut taken = alloc::vec![0usize; k];
    for b in 0..replications {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        order.copy_from_slice(&identity);
        order.shuffle(&mut rng);
        sub_idx.clear();
        sub_labels.clear();
        taken.iter_mut().for_each(|t| *t = 0);
        for &p in &order {
            let j = labels[p];
            if taken[j] < sub_sizes[j] {
                taken[j] += 1;
                sub_idx.push(p);
                sub_labels.push(j);
            }
        }
        let s = crate::estimator::stat_from_sums(&block_sums_from_gram(
            &gram, &sub_idx, &sub_labels, k,
        ))
        .scaled;
        if s >= observed {
            count += 1;
        }
        if let Some(v) = kept.as_mut() {
            v.push(s);
        }
    }
    Ok(CalibrationResult {
        method: CalibrationMethod::Subsampling,
        observed,
        p_value: add_one_pvalue(count, replications),
        resamples: replications,
        null_samples: kept,
    })
}

/// Spectral calibration: estimates the operator spectrum from the pooled
/// data (default truncation) and compares the observed scaled statistic
/// against simulated limit-law draws. Enforces a floor of 1000 draws.
pub fn spectral_pvalue(
    kernel: &KernelSpec,
    data: &GroupedSamples,
    draws: usize,
    seed: u64,
    keep_null: bool,
) -> Result<CalibrationResult, Error> {
    if draws < 1000 {
        return Err(Error::invalid(
            "draws",
            alloc::format!("spectral calibration needs at least 1000 draws, got {draws}"),
        ));
    }
    let observed = gmmd_statistic(kernel, data)?.scaled;
    let pooled = data.pooled_points();
    let spectrum = estimate_spectrum(kernel, &pooled, Truncation::default())?;
    let config = LimitLawConfig::new(data.weights(), spectrum, draws, seed)?;
    let sims = simulate_limit_law(&config);
    let count = sims.iter().filter(|&&s| s >= observed).count();
    Ok(CalibrationResult {
        method: CalibrationMethod::Spectral,
        observed,
        p_value: add_one_pvalue(count, draws),
        resamples: draws,
        null_samples: keep_null.then_some(sims),
    })
}
