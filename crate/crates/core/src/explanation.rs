use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Result};
use crate::point::Point;

/// A local explanation computed for some example and applicable anywhere.
#[derive(Clone)]
pub enum Explanation {
    /// `alpha · x + intercept`.
    Linear { alpha: Vec<f64>, intercept: f64 },
    /// Any other deterministic surrogate.
    Generic(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl Explanation {
    pub fn linear(alpha: Vec<f64>, intercept: f64) -> Self {
        Self::Linear { alpha, intercept }
    }

    pub fn generic<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::Generic(Arc::new(f))
    }

    pub fn apply(&self, x: &Point) -> Result<f64> {
        match self {
            Self::Linear { alpha, intercept } => {
                check_dim(alpha.len(), x.dim())?;
                Ok(alpha.iter().zip(x.iter()).map(|(a, v)| a * v).sum::<f64>() + intercept)
            }
            Self::Generic(f) => Ok(f(x)),
        }
    }

    /// Linear coefficients, if this is a linear explanation.
    pub fn alpha(&self) -> Option<&[f64]> {
        match self {
            Self::Linear { alpha, .. } => Some(alpha),
            Self::Generic(_) => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.alpha().map(<[f64]>::len)
    }
}

impl fmt::Debug for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear { alpha, intercept } => f
                .debug_struct("Linear")
                .field("alpha", alpha)
                .field("intercept", intercept)
                .finish(),
            Self::Generic(_) => f.write_str("Generic(..)"),
        }
    }
}
