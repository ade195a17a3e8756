//! Unbiased pairwise MMD² estimates and the k-sample test statistic built
//! from them.
//!
//! For groups j and ℓ the unbiased squared-MMD estimate is
//!
//! ```text
//! Γ̂_jℓ = Σ_{i≠r} K(x_ji, x_jr) / (n_j (n_j − 1))
//!       + Σ_{i≠r} K(x_ℓi, x_ℓr) / (n_ℓ (n_ℓ − 1))
//!       − 2 Σ_{i,r} K(x_ji, x_ℓr) / (n_j n_ℓ)
//! ```
//!
//! and the overall statistic weights each pair by its share of the pooled
//! sample: T̂ = Σ_{j<ℓ} ((n_j + n_ℓ)/n) Γ̂_jℓ, which is the double sum
//! Σ_j Σ_{ℓ≠j} (n_ℓ/n) Γ̂_jℓ regrouped over unordered pairs. The test works
//! with the scaled form n·T̂.
//!
//! All kernel sums go through an order-invariant fixed-point accumulator, so
//! a statistic computed from points and one computed from a pooled Gram
//! matrix with a permuted scan order agree bit for bit. The calibration
//! module leans on this to make its observed statistic identical to
//! [`gmmd_statistic`].

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::accum::FixedPointSum;
use crate::kernel::{self, KernelSpec, Point};
use crate::Error;

/// A k-sample dataset: at least two groups, each with at least two points,
/// all points finite and of one common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSamples {
    groups: Vec<Vec<Point>>,
    sizes: Vec<usize>,
    dim: usize,
    total: usize,
}

impl GroupedSamples {
    pub fn new(groups: Vec<Vec<Point>>) -> Result<Self, Error> {
        if groups.len() < 2 {
            return Err(Error::TooFewGroups(groups.len()));
        }
        for (index, g) in groups.iter().enumerate() {
            if g.len() < 2 {
                return Err(Error::GroupTooSmall {
                    index,
                    size: g.len(),
                    min: 2,
                });
            }
        }
        let dim = kernel::validate_points(groups.iter().flatten())?;
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        let total = sizes.iter().sum();
        Ok(GroupedSamples {
            groups,
            sizes,
            dim,
            total,
        })
    }

    /// Convenience constructor for scalar data.
    pub fn from_scalars(groups: Vec<Vec<f64>>) -> Result<Self, Error> {
        Self::new(
            groups
                .into_iter()
                .map(|g| g.into_iter().map(|v| vec![v]).collect())
                .collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn groups(&self) -> &[Vec<Point>] {
        &self.groups
    }

    pub fn group(&self, j: usize) -> &[Point] {
        &self.groups[j]
    }

    /// Empirical group proportions n_j / n.
    pub fn weights(&self) -> Vec<f64> {
        let nf = self.total as f64;
        self.sizes.iter().map(|&s| s as f64 / nf).collect()
    }

    /// All points concatenated in group order.
    pub fn pooled_points(&self) -> Vec<Point> {
        self.groups.iter().flatten().cloned().collect()
    }

    /// Borrowed pooled view plus the group label of each pooled position.
    pub(crate) fn pooled_refs(&self) -> (Vec<&Point>, Vec<usize>) {
        let mut pts = Vec::with_capacity(self.total);
        let mut labels = Vec::with_capacity(self.total);
        for (j, g) in self.groups.iter().enumerate() {
            for p in g {
                pts.push(p);
                labels.push(j);
            }
        }
        (pts, labels)
    }
}

/// Exact per-block kernel sums: one within-group sum per group (over
/// unordered pairs) and one cross sum per unordered group pair.
pub(crate) struct BlockSums {
    pub(crate) sizes: Vec<usize>,
    pub(crate) within: Vec<f64>,
    pub(crate) cross: Vec<f64>,
}

#[inline]
pub(crate) fn cross_index(k: usize, j: usize, l: usize) -> usize {
    debug_assert!(j < l && l < k);
    j * (2 * k - j - 1) / 2 + (l - j - 1)
}

/// Block sums evaluated directly from points.
pub(crate) fn block_sums_direct(kernel: &KernelSpec, data: &GroupedSamples) -> BlockSums {
    let k = data.k();
    let mut within = vec![FixedPointSum::new(); k];
    let mut cross = vec![FixedPointSum::new(); k * (k - 1) / 2];
    for (j, g) in data.groups().iter().enumerate() {
        for i in 0..g.len() {
            for r in (i + 1)..g.len() {
                within[j].add(kernel.eval_unchecked(&g[i], &g[r]));
            }
        }
    }
    for j in 0..k {
        for l in (j + 1)..k {
            let acc = &mut cross[cross_index(k, j, l)];
            for a in data.group(j) {
                for b in data.group(l) {
                    acc.add(kernel.eval_unchecked(a, b));
                }
            }
        }
    }
    BlockSums {
        sizes: data.sizes().to_vec(),
        within: within.iter().map(FixedPointSum::total).collect(),
        cross: cross.iter().map(FixedPointSum::total).collect(),
    }
}

/// Block sums read out of a precomputed pooled Gram matrix. Position t of the
/// assignment holds pooled index `idx[t]` with group label `labels[t]`; the
/// scan covers unordered position pairs, so each within pair and each cross
/// pair contributes exactly once. Because the accumulator is order-invariant,
/// any relabeling that induces the same blocks yields bitwise-equal sums.
pub(crate) fn block_sums_from_gram(
    gram: &DMatrix<f64>,
    idx: &[usize],
    labels: &[usize],
    k: usize,
) -> BlockSums {
    debug_assert_eq!(idx.len(), labels.len());
    let m = idx.len();
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut within = vec![FixedPointSum::new(); k];
    let mut cross = vec![FixedPointSum::new(); k * (k - 1) / 2];
    for t in 0..m {
        let (it, lt) = (idx[t], labels[t]);
        for u in (t + 1)..m {
            let v = gram[(it, idx[u])];
            let lu = labels[u];
            if lt == lu {
                within[lt].add(v);
            } else {
                let (a, b) = if lt < lu { (lt, lu) } else { (lu, lt) };
                cross[cross_index(k, a, b)].add(v);
            }
        }
    }
    BlockSums {
        sizes,
        within: within.iter().map(FixedPointSum::total).collect(),
        cross: cross.iter().map(FixedPointSum::total).collect(),
    }
}

/// The Γ̂ formula applied to exact block sums. Shared by every statistic path
/// so that pairwise entries, the k-sample statistic, and resampled statistics
/// stay bitwise consistent.
#[inline]
fn combine_gamma(wa: f64, wb: f64, cross: f64, na: usize, nb: usize) -> f64 {
    let na = na as f64;
    let nb = nb as f64;
    2.0 * wa / (na * (na - 1.0)) + 2.0 * wb / (nb * (nb - 1.0)) - 2.0 * cross / (na * nb)
}

/// The k-sample statistic in unscaled and scaled form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestStatistic {
    /// T̂ = Σ_{j<ℓ} ((n_j + n_ℓ)/n) Γ̂_jℓ
    pub t_hat: f64,
    /// n·T̂, the quantity whose null distribution the calibrators target.
    pub scaled: f64,
    /// Pooled sample size.
    pub n: usize,
    /// Number of groups.
    pub k: usize,
}

pub(crate) fn stat_from_sums(sums: &BlockSums) -> TestStatistic {
    let k = sums.sizes.len();
    let n: usize = sums.sizes.iter().sum();
    let nf = n as f64;
    let mut t = 0.0;
    for j in 0..k {
        for l in (j + 1)..k {
            // The combined pair weight (n_j + n_ℓ)/n is a single division, so
            // for k = 2 it is exactly 1.0 and T̂ collapses to Γ̂_12 bit for bit.
            let w = (sums.sizes[j] + sums.sizes[l]) as f64 / nf;
            t += w
                * combine_gamma(
                    sums.within[j],
                    sums.within[l],
                    sums.cross[cross_index(k, j, l)],
                    sums.sizes[j],
                    sums.sizes[l],
                );
        }
    }
    TestStatistic {
        t_hat: t,
        scaled: nf * t,
        n,
        k,
    }
}

/// Unbiased two-sample MMD² estimate between two samples of at least two
/// points each. Symmetric in its sample arguments (bitwise) and exactly zero
/// when both samples are the same list.
pub fn mmd2_unbiased(kernel: &KernelSpec, a: &[Point], b: &[Point]) -> Result<f64, Error> {
    for (index, s) in [a, b].into_iter().enumerate() {
        if s.len() < 2 {
            return Err(Error::GroupTooSmall {
                index,
                size: s.len(),
                min: 2,
            });
        }
    }
    let da = kernel::validate_points(a)?;
    let db = kernel::validate_points(b)?;
    if da != db {
        return Err(Error::DimensionMismatch {
            left: da,
            right: db,
        });
    }
    let mut wa = FixedPointSum::new();
    for i in 0..a.len() {
        for r in (i + 1)..a.len() {
            wa.add(kernel.eval_unchecked(&a[i], &a[r]));
        }
    }
    let mut wb = FixedPointSum::new();
    for i in 0..b.len() {
        for r in (i + 1)..b.len() {
            wb.add(kernel.eval_unchecked(&b[i], &b[r]));
        }
    }
    let mut cr = FixedPointSum::new();
    for x in a {
        for y in b {
            cr.add(kernel.eval_unchecked(x, y));
        }
    }
    Ok(combine_gamma(
        wa.total(),
        wb.total(),
        cr.total(),
        a.len(),
        b.len(),
    ))
}

/// All pairwise unbiased MMD² estimates of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMmdMatrix {
    entries: DMatrix<f64>,
}

impl PairwiseMmdMatrix {
    pub fn k(&self) -> usize {
        self.entries.nrows()
    }

    /// Γ̂_jℓ; zero on the diagonal. Panics if an index is out of range.
    pub fn entry(&self, j: usize, l: usize) -> f64 {
        self.entries[(j, l)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Population-weighted combination Σ_j Σ_{ℓ≠j} π_ℓ Γ̂_jℓ for externally
    /// supplied proportions π. This is the population-target form of the
    /// statistic; the test itself always uses the empirical proportions via
    /// [`gmmd_statistic`].
    pub fn weighted_combination(&self, pi: &[f64]) -> Result<f64, Error> {
        let k = self.k();
        if pi.len() != k {
            return Err(Error::DimensionMismatch {
                left: k,
                right: pi.len(),
            });
        }
        if !pi.iter().all(|&p| p.is_finite() && p > 0.0 && p < 1.0) {
            return Err(Error::invalid(
                "pi",
                "proportions must lie strictly between 0 and 1",
            ));
        }
        let sum: f64 = pi.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "pi",
                alloc::format!("proportions must sum to 1, got {sum}"),
            ));
        }
        let mut t = 0.0;
        for j in 0..k {
            for l in (j + 1)..k {
                t += (pi[j] + pi[l]) * self.entries[(j, l)];
            }
        }
        Ok(t)
    }
}

/// Computes every pairwise Γ̂_jℓ. Entry (j, ℓ) equals
/// `mmd2_unbiased(kernel, group_j, group_ℓ)` bit for bit.
pub fn pairwise_mmd(
    kernel: &KernelSpec,
    data: &GroupedSamples,
) -> Result<PairwiseMmdMatrix, Error> {
    let sums = block_sums_direct(kernel, data);
    let k = data.k();
    let mut entries = DMatrix::zeros(k, k);
    for j in 0..k {
        for l in (j + 1)..k {
            let g = combine_gamma(
                sums.within[j],
                sums.within[l],
                sums.cross[cross_index(k, j, l)],
                sums.sizes[j],
                sums.sizes[l],
            );
            entries[(j, l)] = g;
            entries[(l, j)] = g;
        }
    }
    Ok(PairwiseMmdMatrix { entries })
}

/// The k-sample test statistic of a dataset.
pub fn gmmd_statistic(
    kernel: &KernelSpec,
    data: &GroupedSamples,
) -> Result<TestStatistic, Error> {
    Ok(stat_from_sums(&block_sums_direct(kernel, data)))
}
