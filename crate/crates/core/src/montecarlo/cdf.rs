use crate::error::{Error, Result};

/// Empirical distribution of a sample set.
///
/// The i-th smallest of n samples (1-based) sits at plotting position i/n.
/// Percentiles interpolate linearly between neighbouring positions and clamp
/// to the minimum below 1/n.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("CDF of an empty sample set".into()));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("CDF samples contain NaN".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples ≤ `x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&s| s <= x);
        count as f64 / self.sorted.len() as f64
    }

    /// Value at cumulative probability `q` in [0, 1].
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let h = q.clamp(0.0, 1.0) * n as f64;
        if h <= 1.0 {
            return self.sorted[0];
        }
        let lo = h.floor() as usize;
        if lo >= n {
            return self.sorted[n - 1];
        }
        let frac = h - lo as f64;
        let a = self.sorted[lo - 1];
        let b = self.sorted[lo];
        a + frac * (b - a)
    }

    pub fn percentile(&self, pct: f64) -> f64 {
        self.quantile(pct / 100.0)
    }

    /// Percentiles 0, 1, ..., 100.
    pub fn percentile_table(&self) -> Vec<(u32, f64)> {
        (0..=100)
            .map(|p| (p, self.percentile(f64::from(p))))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }
}
