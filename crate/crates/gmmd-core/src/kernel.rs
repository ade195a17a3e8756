//! Bounded positive semi-definite kernels, Gram matrices, and the double
//! centering that realizes the centered kernel (the kernel with the mean
//! element subtracted from both feature arguments).
//!
//! Every shipped family is bounded by 1, which is the structural assumption
//! the test theory needs, and is what lets the estimator accumulate Gram
//! sums exactly (see `accum`). Unbounded kernels (linear, polynomial) are
//! deliberately not offered.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::Error;

/// A data point: a fixed-length vector of finite reals. Scalar data is the
/// one-dimensional case.
pub type Point = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// K(x,y) = exp(−γ‖x−y‖²)
    GaussianRbf,
    /// K(x,y) = exp(−γ‖x−y‖)
    Laplacian,
    /// K(x,y) = 1 / (1 + γ‖x−y‖²)
    RationalQuadratic,
}

/// A kernel family together with its bandwidth parameter γ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    bandwidth: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self, Error> {
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::invalid(
                "bandwidth",
                alloc::format!("must be a positive finite real, got {bandwidth}"),
            ));
        }
        Ok(KernelSpec { family, bandwidth })
    }

    /// Gaussian RBF kernel; the simulation studies use bandwidth 2.
    pub fn gaussian(bandwidth: f64) -> Result<Self, Error> {
        Self::new(KernelFamily::GaussianRbf, bandwidth)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Upper bound on kernel values; 1 for every shipped family.
    pub fn sup_bound(&self) -> f64 {
        1.0
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64, Error> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::Empty("point"));
        }
        if !(x.iter().all(|v| v.is_finite()) && y.iter().all(|v| v.is_finite())) {
            return Err(Error::NonFinite("point"));
        }
        Ok(self.eval_unchecked(x, y))
    }

    /// Kernel value for pre-validated points. Uses libm so std and no_std
    /// builds share one math path.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let d2 = squared_distance(x, y);
        match self.family {
            KernelFamily::GaussianRbf => libm::exp(-self.bandwidth * d2),
            KernelFamily::Laplacian => libm::exp(-self.bandwidth * libm::sqrt(d2)),
            KernelFamily::RationalQuadratic => 1.0 / (1.0 + self.bandwidth * d2),
        }
    }
}

#[inline]
fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, b) in x.iter().zip(y) {
        let d = a - b;
        s += d * d;
    }
    s
}

/// Checks that every point is finite and shares one dimension; returns it.
pub(crate) fn validate_points<'a, I>(points: I) -> Result<usize, Error>
where
    I: IntoIterator<Item = &'a Point>,
{
    let mut dim = None;
    for p in points {
        match dim {
            None => {
                if p.is_empty() {
                    return Err(Error::Empty("point"));
                }
                dim = Some(p.len());
            }
            Some(d) if d != p.len() => {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: p.len(),
                });
            }
            _ => {}
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
    }
    dim.ok_or(Error::Empty("point list"))
}

/// Gram matrix with entry (i, r) = K(xs[i], ys[r]). Symmetric (bitwise) when
/// called with the same list on both sides.
pub fn gram(kernel: &KernelSpec, xs: &[Point], ys: &[Point]) -> Result<DMatrix<f64>, Error> {
    let dx = validate_points(xs)?;
    let dy = validate_points(ys)?;
    if dx != dy {
        return Err(Error::DimensionMismatch {
            left: dx,
            right: dy,
        });
    }
    Ok(DMatrix::from_fn(xs.len(), ys.len(), |i, r| {
        kernel.eval_unchecked(&xs[i], &ys[r])
    }))
}

/// Symmetric Gram matrix over one point list, evaluating each unordered pair
/// once. Points must already be validated.
pub(crate) fn symmetric_gram_refs(kernel: &KernelSpec, pts: &[&Point]) -> DMatrix<f64> {
    let n = pts.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = kernel.eval_unchecked(pts[i], pts[i]);
        for r in (i + 1)..n {
            let v = kernel.eval_unchecked(pts[i], pts[r]);
            g[(i, r)] = v;
            g[(r, i)] = v;
        }
    }
    g
}

/// Double centering G̃ = H G H with H = I − (1/n)𝟙𝟙ᵀ, the empirical version of
/// subtracting the mean element from both kernel arguments. Expects a
/// symmetric matrix; row and column sums of the result vanish up to
/// accumulated rounding.
pub fn center_gram(g: &DMatrix<f64>) -> Result<DMatrix<f64>, Error> {
    if g.nrows() != g.ncols() {
        return Err(Error::NonSquare {
            rows: g.nrows(),
            cols: g.ncols(),
        });
    }
    let n = g.nrows();
    if n == 0 {
        return Err(Error::Empty("matrix"));
    }
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| g.row(i).iter().sum::<f64>() / nf).collect();
    let grand_mean = row_means.iter().sum::<f64>() / nf;
    // (rm_i + rm_j) is symmetric in (i, j), keeping the output bitwise
    // symmetric for symmetric input.
    Ok(DMatrix::from_fn(n, n, |i, j| {
        g[(i, j)] - (row_means[i] + row_means[j]) + grand_mean
    }))
}

/// Inner product of the empirical mean element of `xs` with the feature of
/// `y`: (1/n) Σ_i K(xs[i], y).
pub fn mean_element_inner(kernel: &KernelSpec, xs: &[Point], y: &[f64]) -> Result<f64, Error> {
    let d = validate_points(xs)?;
    if y.len() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: y.len(),
        });
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("point"));
    }
    let sum: f64 = xs.iter().map(|x| kernel.eval_unchecked(x, y)).sum();
    Ok(sum / xs.len() as f64)
}

/// Median-heuristic bandwidth: γ = 1 / (2·median²) over all pairwise
/// Euclidean distances of the pooled data. Offered as an opt-in alternative
/// to the default bandwidth.
pub fn median_heuristic_bandwidth(points: &[Point]) -> Result<f64, Error> {
    validate_points(points)?;
    let n = points.len();
    if n < 2 {
        return Err(Error::invalid(
            "points",
            "median heuristic needs at least 2 points",
        ));
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for r in (i + 1)..n {
            dists.push(libm::sqrt(squared_distance(&points[i], &points[r])));
        }
    }
    dists.sort_unstable_by(f64::total_cmp);
    let m = dists.len();
    let median = if m % 2 == 1 {
        dists[m / 2]
    } else {
        0.5 * (dists[m / 2 - 1] + dists[m / 2])
    };
    if median <= 0.0 {
        return Err(Error::invalid(
            "points",
            "median pairwise distance is zero; bandwidth undefined",
        ));
    }
    Ok(1.0 / (2.0 * median * median))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_must_be_positive() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
        assert!(KernelSpec::gaussian(f64::NAN).is_err());
        assert!(KernelSpec::gaussian(2.0).is_ok());
    }

    #[test]
    fn all_families_bounded_at_coincident_points() {
        for fam in [
            KernelFamily::GaussianRbf,
            KernelFamily::Laplacian,
            KernelFamily::RationalQuadratic,
        ] {
            let k = KernelSpec::new(fam, 1.3).unwrap();
            assert_eq!(k.eval(&[0.4, -0.2], &[0.4, -0.2]).unwrap(), 1.0);
            let v = k.eval(&[0.0, 0.0], &[3.0, -4.0]).unwrap();
            assert!(v > 0.0 && v < 1.0);
        }
    }

    #[test]
    fn median_heuristic_simple() {
        // distances {1, 1, 2} -> median 1 -> gamma = 1/2
        let pts = alloc::vec![alloc::vec![0.0], alloc::vec![1.0], alloc::vec![2.0]];
        let g = median_heuristic_bandwidth(&pts).unwrap();
        assert!((g - 0.5).abs() < 1e-15);

        let same = alloc::vec![alloc::vec![1.0]; 4];
        assert!(median_heuristic_bandwidth(&same).is_err());
    }
}
