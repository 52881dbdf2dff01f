//! Query-only models and the counting wrapper every certification run goes through.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{check_dim, Result};
use crate::point::Point;

/// A model that can only be queried. Implementations must be deterministic and
/// safe to call from several threads at once.
pub trait Model: Send + Sync {
    /// Input dimension, when the model knows it.
    fn dim(&self) -> Option<usize> {
        None
    }

    /// Evaluates the model on every point, preserving order.
    fn evaluate_batch(&self, xs: &[Point]) -> Result<Vec<f64>>;
}

/// Adapts a plain function into a [`Model`].
pub struct FnModel<F> {
    dim: usize,
    f: F,
}

impl<F> FnModel<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Model for FnModel<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }

    fn evaluate_batch(&self, xs: &[Point]) -> Result<Vec<f64>> {
        xs.iter()
            .map(|x| {
                check_dim(self.dim, x.dim())?;
                Ok((self.f)(x))
            })
            .collect()
    }
}

/// A model together with an atomic query counter.
///
/// Every point handed to [`BlackBox::evaluate`] or [`BlackBox::evaluate_batch`]
/// adds exactly one to [`BlackBox::query_count`], whether or not the model
/// call succeeds.
#[derive(Clone)]
pub struct BlackBox {
    model: Arc<dyn Model>,
    queries: Arc<AtomicU64>,
}

impl BlackBox {
    pub fn new(model: impl Model + 'static) -> Self {
        Self::from_arc(Arc::new(model))
    }

    pub fn from_arc(model: Arc<dyn Model>) -> Self {
        Self {
            model,
            queries: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn from_fn<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(FnModel::new(dim, f))
    }

    pub fn dim(&self) -> Option<usize> {
        self.model.dim()
    }

    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        let ys = self.evaluate_batch(std::slice::from_ref(x))?;
        Ok(ys[0])
    }

    pub fn evaluate_batch(&self, xs: &[Point]) -> Result<Vec<f64>> {
        if let Some(d) = self.model.dim() {
            for x in xs {
                check_dim(d, x.dim())?;
            }
        }
        self.charge(xs.len() as u64);
        let ys = self.model.evaluate_batch(xs)?;
        if ys.len() != xs.len() {
            return Err(crate::Error::BlackBox(format!(
                "model returned {} values for {} points",
                ys.len(),
                xs.len()
            )));
        }
        Ok(ys)
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    /// Records queries spent outside [`BlackBox::evaluate_batch`], e.g. local
    /// slope estimates used by cosine fidelity.
    pub fn charge(&self, n: u64) {
        self.queries.fetch_add(n, Ordering::SeqCst);
    }
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("dim", &self.model.dim())
            .field("query_count", &self.query_count())
            .finish()
    }
}
