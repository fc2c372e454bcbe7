//! Compensated summation.
//!
//! Every long reduction in the crate goes through [`Neumaier`], the
//! Kahan–Babuška variant that stays correct when an addend is larger in
//! magnitude than the running sum.

/// Running compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub const fn new() -> Self {
        Neumaier { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one, keeping both its parts.
    #[inline]
    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Neumaier>().value()
}

/// Running compensated prefix sums: `out[i] = v[0] + ... + v[i]`.
pub fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = Neumaier::new();
    values
        .iter()
        .map(|&v| {
            acc.add(v);
            acc.value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let vals = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(vals), 2.0);
        let naive: f64 = vals.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn adding_zero_is_bitwise_neutral() {
        let mut a = Neumaier::new();
        for k in 1..100 {
            a.add(1.0 / k as f64);
        }
        let before = a;
        a.add(0.0);
        assert_eq!(a, before);
    }

    #[test]
    fn merge_matches_sequential() {
        let vals: Vec<f64> = (1..=10_000).map(|k| 1.0 / (k as f64).powi(2)).collect();
        let whole = sum(vals.iter().copied());
        let mut left: Neumaier = vals[..5000].iter().copied().collect();
        let right: Neumaier = vals[5000..].iter().copied().collect();
        left.merge(&right);
        assert!((left.value() - whole).abs() <= 2.0 * f64::EPSILON * whole);
    }

    #[test]
    fn prefix_sums_are_cumulative() {
        assert_eq!(prefix_sums(&[1.0, 2.0, 3.0]), vec![1.0, 3.0, 6.0]);
    }
}
