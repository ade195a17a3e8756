//! Order-invariant summation for bounded kernel values.
//!
//! Floating-point addition is not associative, so a naive block sum can change
//! in its last bits when the same values arrive in a different order. That
//! would break the guarantee that the statistic is bit-identical under
//! reordering of points within a group. Kernel evaluations are bounded (sup
//! bound 1 for every shipped family), which allows exact fixed-point
//! accumulation: scale by 2^75, truncate to i128, sum integers. Integer
//! addition is associative, so the total depends only on the multiset of
//! addends. Quantization costs at most 2^-75 per addend, far below every
//! tolerance used in this crate.

// Capacity: |v| <= 16 maps to at most 2^79 per addend, leaving room for ~2^47
// addends before i128 overflow.
const SCALE: f64 = 37778931862957161709568.0; // 2^75
const INV_SCALE: f64 = 1.0 / SCALE;

#[derive(Clone, Copy, Default)]
pub(crate) struct FixedPointSum(i128);

impl FixedPointSum {
    pub(crate) fn new() -> Self {
        FixedPointSum(0)
    }

    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        debug_assert!(v.abs() <= 16.0, "addend {v} outside fixed-point range");
        // v * 2^75 is exact (power-of-two scaling); the cast truncates the
        // sub-2^-75 remainder deterministically.
        self.0 += (v * SCALE) as i128;
    }

    #[inline]
    pub(crate) fn total(&self) -> f64 {
        (self.0 as f64) * INV_SCALE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_invariant() {
        let vals = [0.9999, 1e-9, 0.5, 0.123456789, 1e-17, 0.25, 0.87, 1e-300];
        let mut fwd = FixedPointSum::new();
        for v in vals {
            fwd.add(v);
        }
        let mut rev = FixedPointSum::new();
        for v in vals.iter().rev() {
            rev.add(*v);
        }
        assert_eq!(fwd.total().to_bits(), rev.total().to_bits());
    }

    #[test]
    fn close_to_true_sum() {
        let mut acc = FixedPointSum::new();
        let mut naive = 0.0f64;
        let mut x = 0.731f64;
        for _ in 0..10_000 {
            x = (x * 997.0 + 0.1234).fract();
            acc.add(x);
            naive += x;
        }
        assert!((acc.total() - naive).abs() < 1e-9);
    }
}
