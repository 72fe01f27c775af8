//! Compensated summation.

use crate::scalar::Scalar;

/// Kahan compensated accumulator.
///
/// Prefix sums over a million-item score set feed directly into tight
/// oracle-equivalence tolerances, so plain `+=` is not good enough.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<S> {
    sum: S,
    compensation: S,
}

impl<S: Scalar> KahanSum<S> {
    pub fn new() -> Self {
        Self {
            sum: S::zero(),
            compensation: S::zero(),
        }
    }

    pub fn add(&mut self, value: S) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> S {
        self.sum
    }
}

impl<S: Scalar> Default for KahanSum<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Compensated sum of a slice.
pub fn kahan_sum<S: Scalar>(values: &[S]) -> S {
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}
