//! Compensated summation with a fixed evaluation order.

/// Neumaier's variant of Kahan summation.
///
/// Terms must be added in a fixed order for results to be reproducible; all
/// callers in this crate add in ascending index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if libm::fabs(self.sum) >= libm::fabs(term) {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for t in iter {
            acc.add(t);
        }
        acc
    }
}

/// Sum of an iterator with compensation.
pub fn compensated<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}
