//! Quality metrics and the fidelity oracle consumed by the strategies.
//!
//! All metrics follow "higher is better". The default, [`QualityMetric::AbsFidelity`],
//! is `1 - |g(x) - e(x)|` and is deliberately not clamped at zero.

use std::fmt;
use std::sync::Arc;

use crate::blackbox::BlackBox;
use crate::error::{check_dim, Error, Result};
use crate::explanation::Explanation;
use crate::point::Point;

pub type SlopeFn = Arc<dyn Fn(&Point) -> Vec<f64> + Send + Sync>;
pub type CustomFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum QualityMetric {
    /// `1 - |g(x) - e(x)|`.
    AbsFidelity,
    /// `|β_x · α| / (‖β_x‖ ‖α‖)` where `β_x` is the black box's local linear
    /// piece at `x` and `α` the explanation's coefficients.
    CosineFidelity { beta_of: SlopeFn },
    /// `h(explanation value, model value)`.
    Custom { h: CustomFn },
}

impl QualityMetric {
    pub fn cosine<F>(beta_of: F) -> Self
    where
        F: Fn(&Point) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::CosineFidelity { beta_of: Arc::new(beta_of) }
    }

    pub fn custom<F>(h: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::Custom { h: Arc::new(h) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::AbsFidelity => "abs-fidelity",
            Self::CosineFidelity { .. } => "cosine-fidelity",
            Self::Custom { .. } => "custom",
        }
    }
}

impl fmt::Debug for QualityMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `|b · a| / (‖b‖ ‖a‖)`.
pub fn cosine_similarity(b: &[f64], a: &[f64]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    let dot: f64 = b.iter().zip(a).map(|(x, y)| x * y).sum();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nb == 0.0 || na == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(dot.abs() / (nb * na))
}

/// Anything that maps a batch of points to their quality values.
///
/// Strategies only see this trait, so tests can drive them with closures.
pub trait FidelityOracle: Sync {
    fn fidelities(&self, xs: &[Point]) -> Result<Vec<f64>>;
}

impl<F> FidelityOracle for F
where
    F: Fn(&[Point]) -> Result<Vec<f64>> + Sync,
{
    fn fidelities(&self, xs: &[Point]) -> Result<Vec<f64>> {
        self(xs)
    }
}

/// The quality metric `f_{x0}` bound to one model and one explanation.
#[derive(Clone, Debug)]
pub struct Fidelity {
    metric: QualityMetric,
    explanation: Explanation,
    blackbox: BlackBox,
}

impl Fidelity {
    pub fn new(metric: QualityMetric, explanation: Explanation, blackbox: BlackBox) -> Result<Self> {
        if let (Some(a), Some(b)) = (explanation.dim(), blackbox.dim()) {
            check_dim(b, a)?;
        }
        if let QualityMetric::CosineFidelity { .. } = metric {
            match explanation.alpha() {
                Some(alpha) if alpha.iter().any(|&a| a != 0.0) => {}
                Some(_) => return Err(Error::ZeroNorm),
                None => {
                    return Err(Error::InvalidArgument(
                        "cosine fidelity needs a linear explanation".into(),
                    ))
                }
            }
        }
        Ok(Self { metric, explanation, blackbox })
    }

    pub fn blackbox(&self) -> &BlackBox {
        &self.blackbox
    }

    pub fn explanation(&self) -> &Explanation {
        &self.explanation
    }

    pub fn metric(&self) -> &QualityMetric {
        &self.metric
    }

    pub fn at(&self, x: &Point) -> Result<f64> {
        Ok(self.fidelities(std::slice::from_ref(x))?[0])
    }
}

impl FidelityOracle for Fidelity {
    fn fidelities(&self, xs: &[Point]) -> Result<Vec<f64>> {
        match &self.metric {
            QualityMetric::AbsFidelity => {
                let ys = self.blackbox.evaluate_batch(xs)?;
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| Ok(1.0 - (y - self.explanation.apply(x)?).abs()))
                    .collect()
            }
            QualityMetric::Custom { h } => {
                let ys = self.blackbox.evaluate_batch(xs)?;
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| Ok(h(self.explanation.apply(x)?, y)))
                    .collect()
            }
            QualityMetric::CosineFidelity { beta_of } => {
                // Each local slope estimate counts as one query against the model.
                self.blackbox.charge(xs.len() as u64);
                let alpha = self.explanation.alpha().expect("checked in Fidelity::new");
                xs.iter().map(|x| cosine_similarity(&beta_of(x), alpha)).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn perfect_fit_has_fidelity_one() {
        let g = BlackBox::from_fn(1, |x| 2.0 * x[0] + 1.0);
        let f = Fidelity::new(QualityMetric::AbsFidelity, Explanation::linear(vec![2.0], 1.0), g).unwrap();
        assert_eq!(f.at(&pt(&[0.3])).unwrap(), 1.0);
    }

    #[test]
    fn abs_fidelity_subtracts_gap() {
        let g = BlackBox::from_fn(1, |_| 0.9);
        let f = Fidelity::new(QualityMetric::AbsFidelity, Explanation::linear(vec![0.0], 0.75), g).unwrap();
        assert!((f.at(&pt(&[0.0])).unwrap() - 0.85).abs() < 1e-12);
    }

    #[test]
    fn abs_fidelity_is_not_clamped() {
        let g = BlackBox::from_fn(1, |_| 5.0);
        let f = Fidelity::new(QualityMetric::AbsFidelity, Explanation::linear(vec![0.0], 0.0), g).unwrap();
        assert_eq!(f.at(&pt(&[0.0])).unwrap(), -4.0);
    }

    #[test]
    fn synthetic_corner_in_ten_dims() {
        // Center piece of the synthetic benchmark: g(x) = Σ x_i.
        let g = BlackBox::from_fn(10, |x| x.iter().sum());
        let f = Fidelity::new(QualityMetric::AbsFidelity, Explanation::linear(vec![0.75; 10], 0.0), g).unwrap();
        let v = f.at(&Point::splat(10, 0.1).unwrap()).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
    }

    #[test]
    fn each_evaluation_costs_one_query() {
        let g = BlackBox::from_fn(1, |x| x[0]);
        let f = Fidelity::new(QualityMetric::AbsFidelity, Explanation::linear(vec![1.0], 0.0), g.clone()).unwrap();
        let xs: Vec<Point> = (0..13).map(|i| pt(&[i as f64])).collect();
        f.fidelities(&xs).unwrap();
        assert_eq!(g.query_count(), 13);
    }

    #[test]
    fn cosine_fidelity() {
        let g = BlackBox::from_fn(2, |x| x[0]);
        let m = QualityMetric::cosine(|x: &Point| if x[0] > 0.0 { vec![1.0, 0.0] } else { vec![1.0, 1.0] });
        let f = Fidelity::new(m, Explanation::linear(vec![1.0, 1.0], 0.0), g.clone()).unwrap();
        assert!((f.at(&pt(&[-1.0, 0.0])).unwrap() - 1.0).abs() < 1e-12);
        assert!((f.at(&pt(&[1.0, 0.0])).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(g.query_count(), 2);
    }

    #[test]
    fn cosine_with_zero_vectors_fails() {
        let g = BlackBox::from_fn(2, |x| x[0]);
        let zero_alpha = Fidelity::new(
            QualityMetric::cosine(|_: &Point| vec![1.0, 0.0]),
            Explanation::linear(vec![0.0, 0.0], 0.0),
            g.clone(),
        );
        assert!(matches!(zero_alpha, Err(Error::ZeroNorm)));
        let f = Fidelity::new(
            QualityMetric::cosine(|_: &Point| vec![0.0, 0.0]),
            Explanation::linear(vec![1.0, 0.0], 0.0),
            g,
        )
        .unwrap();
        assert!(matches!(f.at(&pt(&[0.0, 0.0])), Err(Error::ZeroNorm)));
    }

    #[test]
    fn custom_metric_receives_explanation_then_model() {
        let g = BlackBox::from_fn(1, |_| 3.0);
        let m = QualityMetric::custom(|e, y| e - y);
        let f = Fidelity::new(m, Explanation::linear(vec![0.0], 1.0), g).unwrap();
        assert_eq!(f.at(&pt(&[0.0])).unwrap(), -2.0);
    }
}
