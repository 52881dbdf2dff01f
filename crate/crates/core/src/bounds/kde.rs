//! Univariate CDF estimates of fidelity samples.

use libm::erfc;

use crate::error::{Error, Result};

/// Bandwidth used when the sample standard deviation is zero.
pub const DEGENERATE_BANDWIDTH: f64 = 1e-6;

pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Gaussian-kernel density estimate; the CDF is the exact mixture of normal CDFs.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeModel {
    samples: Vec<f64>,
    bandwidth: f64,
}

impl KdeModel {
    /// Fits with Scott's rule `h = σ̂ n^(-1/5)`, `σ̂` the unbiased standard deviation.
    pub fn fit(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::NotEnoughSamples { needed: 2, have: n });
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        let h = sd * (n as f64).powf(-0.2);
        let bandwidth = if h > 0.0 { h } else { DEGENERATE_BANDWIDTH };
        Self::with_bandwidth(samples, bandwidth)
    }

    pub fn with_bandwidth(samples: &[f64], bandwidth: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::NotEnoughSamples { needed: 1, have: 0 });
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {bandwidth}")));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("non-finite fidelity sample".into()));
        }
        Ok(Self { samples: samples.to_vec(), bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn cdf(&self, v: f64) -> f64 {
        let h = self.bandwidth;
        let total: f64 = self.samples.iter().map(|s| standard_normal_cdf((v - s) / h)).sum();
        (total / self.samples.len() as f64).clamp(0.0, 1.0)
    }
}

/// `#{s ≤ v} / n`.
pub fn empirical_cdf(samples: &[f64], v: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|&&s| s <= v).count() as f64 / samples.len() as f64
}

/// KDE when there are at least two samples, the empirical CDF otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum CdfEstimate {
    Kde(KdeModel),
    Empirical(Vec<f64>),
}

impl CdfEstimate {
    pub fn fit(samples: &[f64]) -> Result<Self> {
        match samples.len() {
            0 => Err(Error::NotEnoughSamples { needed: 1, have: 0 }),
            1 => Ok(Self::Empirical(samples.to_vec())),
            _ => Ok(Self::Kde(KdeModel::fit(samples)?)),
        }
    }

    pub fn cdf(&self, v: f64) -> f64 {
        match self {
            Self::Kde(k) => k.cdf(v),
            Self::Empirical(s) => empirical_cdf(s, v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn limits() {
        let k = KdeModel::fit(&[0.2, 0.5, 0.9]).unwrap();
        assert_eq!(k.cdf(-1e6), 0.0);
        assert_eq!(k.cdf(1e6), 1.0);
    }

    #[test]
    fn constant_sample_is_centered() {
        let k = KdeModel::fit(&[0.5; 10]).unwrap();
        assert_eq!(k.bandwidth(), DEGENERATE_BANDWIDTH);
        assert!((k.cdf(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn symmetric_two_point_mixture() {
        let k = KdeModel::with_bandwidth(&[0.0, 1.0], 0.1).unwrap();
        assert!((k.cdf(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scott_bandwidth() {
        // sd of {1, 2, 3, 4} with ddof = 1 is sqrt(5/3).
        let k = KdeModel::fit(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let expected = (5.0f64 / 3.0).sqrt() * 4f64.powf(-0.2);
        assert!((k.bandwidth() - expected).abs() < 1e-15);
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert!((standard_normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((standard_normal_cdf(1.96) - 0.975_002_104_851_779_5).abs() < 1e-12);
        assert!((standard_normal_cdf(-1.0) - 0.158_655_253_931_457).abs() < 1e-12);
    }

    #[test]
    fn close_to_empirical_cdf_for_uniform_samples() {
        use crate::rng::stream;
        use rand::Rng;
        let mut rng = stream(11, &[]);
        let xs: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        let k = KdeModel::fit(&xs).unwrap();
        let sup = (0..=200)
            .map(|i| i as f64 / 200.0)
            .map(|v| (k.cdf(v) - empirical_cdf(&xs, v)).abs())
            .fold(0.0, f64::max);
        assert!(sup < 0.05, "{sup}");
    }

    #[test]
    fn fallback_for_single_sample() {
        let c = CdfEstimate::fit(&[0.8]).unwrap();
        assert_eq!(c.cdf(0.79), 0.0);
        assert_eq!(c.cdf(0.8), 1.0);
        assert!(CdfEstimate::fit(&[]).is_err());
        assert!(KdeModel::fit(&[0.8]).is_err());
    }

    proptest! {
        #[test]
        fn cdf_is_monotone_and_bounded(
            xs in proptest::collection::vec(-1.0f64..1.0, 2..30),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let k = KdeModel::fit(&xs).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (clo, chi) = (k.cdf(lo), k.cdf(hi));
            prop_assert!((0.0..=1.0).contains(&clo) && (0.0..=1.0).contains(&chi));
            prop_assert!(clo <= chi);
        }
    }
}
