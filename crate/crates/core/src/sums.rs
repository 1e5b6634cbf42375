//! Compensated summation.
//!
//! Spectral sums routinely mix 1e6 terms spanning many orders of magnitude,
//! and several invariants are checked near machine precision, so plain
//! accumulation is not accurate enough.

/// Neumaier variant of Kahan summation.
pub(crate) fn kahan_sum<I>(xs: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Running compensated accumulator for prefix and suffix sweeps.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanAccumulator {
    sum: f64,
    comp: f64,
}

impl KahanAccumulator {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_ill_conditioned_sequence_exactly() {
        // 1 + 1e100 + 1 - 1e100 = 2, which naive summation loses entirely.
        let total = kahan_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(total, 2.0);
    }

    #[test]
    fn accumulator_matches_one_shot_sum() {
        let xs: Vec<f64> = (1..=1000).map(|i| 1.0 / f64::from(i)).collect();
        let mut acc = KahanAccumulator::default();
        for &x in &xs {
            acc.add(x);
        }
        assert_eq!(acc.value(), kahan_sum(xs.iter().copied()));
    }
}
