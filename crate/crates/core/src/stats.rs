use serde::{Deserialize, Serialize};

/// Monte Carlo estimate: sample mean, its standard error and the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl BoundEstimate {
    /// Summarizes samples in index order with Neumaier-compensated sums, so the
    /// result depends only on the sample values and not on how they were
    /// produced.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                n: 0,
            };
        }
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let stderr = if n > 1 {
            let ss = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, n }
    }

    /// `mean ± k·stderr`.
    pub fn interval(&self, k: f64) -> (f64, f64) {
        (self.mean - k * self.stderr, self.mean + k * self.stderr)
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Pooled standard error of a difference of two independent estimates.
pub fn pooled_stderr(a: &BoundEstimate, b: &BoundEstimate) -> f64 {
    (a.stderr * a.stderr + b.stderr * b.stderr).sqrt()
}
