/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Accumulates an alternating series by adding consecutive terms in pairs
/// before they reach the compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct PairedSum {
    acc: CompensatedSum,
    pending: Option<f64>,
}

impl PairedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        match self.pending.take() {
            Some(prev) => self.acc.add(prev + x),
            None => self.pending = Some(x),
        }
    }

    pub(crate) fn value(&self) -> f64 {
        self.acc.value() + self.pending.unwrap_or(0.0)
    }
}
