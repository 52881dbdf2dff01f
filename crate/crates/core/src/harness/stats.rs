use serde::{Deserialize, Serialize};

/// Location summaries with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// `sd / √n` with the unbiased standard deviation; 0 for a single value.
    pub mean_stderr: f64,
    pub median: f64,
    /// Large-sample approximation `√(π/2) · sd / √n`.
    pub median_stderr: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let mean_stderr = std / (n as f64).sqrt();
        Some(Self {
            n,
            mean,
            mean_stderr,
            median,
            median_stderr: (std::f64::consts::PI / 2.0).sqrt() * mean_stderr,
            std,
        })
    }
}
