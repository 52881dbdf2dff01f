//! Piecewise-linear synthetic benchmark with a closed-form optimal half-width.
//!
//! `g(x) = Σ_i φ(x_i)` with `φ(t) = t` on `[-2, 2]`, `4 - t` above and
//! `-4 - t` below. With the hyperplane explanation `e(x) = c Σ_i x_i`, the
//! fidelity on the center piece is `1 - (1 - c)|Σ_i x_i|`, whose minimum over
//! `[-w, w]^d` is reached at a corner with `|Σ x_i| = d w`. For `θ = c` the
//! largest certifiable half-width is therefore `1/d`.

use crate::blackbox::{BlackBox, Model};
use crate::error::{check_dim, Error, Result};
use crate::explanation::Explanation;
use crate::point::Point;

pub const BREAKPOINT: f64 = 2.0;

pub fn phi(t: f64) -> f64 {
    if t > BREAKPOINT {
        2.0 * BREAKPOINT - t
    } else if t < -BREAKPOINT {
        -2.0 * BREAKPOINT - t
    } else {
        t
    }
}

/// Slope of `φ` at `t` (the breakpoints belong to the center piece).
pub fn phi_slope(t: f64) -> f64 {
    if t.abs() > BREAKPOINT {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticPwl {
    dim: usize,
}

impl SyntheticPwl {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim }
    }

    pub fn value(x: &[f64]) -> f64 {
        x.iter().map(|&t| phi(t)).sum()
    }

    /// Coefficients of the linear piece containing `x`.
    pub fn piece_slopes(x: &[f64]) -> Vec<f64> {
        x.iter().map(|&t| phi_slope(t)).collect()
    }

    /// ℓ2 Lipschitz constant `√d` (each φ is 1-Lipschitz).
    pub fn lipschitz_l2(&self) -> f64 {
        (self.dim as f64).sqrt()
    }
}

impl Model for SyntheticPwl {
    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }

    fn evaluate_batch(&self, xs: &[Point]) -> Result<Vec<f64>> {
        xs.iter()
            .map(|x| {
                check_dim(self.dim, x.dim())?;
                Ok(Self::value(x))
            })
            .collect()
    }
}

/// `e(x) = slope · Σ_i x_i`.
pub fn hyperplane_explanation(dim: usize, slope: f64) -> Explanation {
    Explanation::linear(vec![slope; dim], 0.0)
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub blackbox: BlackBox,
    pub explanation: Explanation,
    /// Optimal half-width around the origin for `θ = slope`.
    pub optimal_half_width: f64,
    pub x0: Point,
}

pub fn make_synthetic(dim: usize, slope: f64) -> Result<Synthetic> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(slope > 0.0 && slope < 1.0) {
        return Err(Error::InvalidArgument(format!("slope must lie in (0, 1), got {slope}")));
    }
    Ok(Synthetic {
        blackbox: BlackBox::new(SyntheticPwl::new(dim)),
        explanation: hyperplane_explanation(dim, slope),
        optimal_half_width: 1.0 / dim as f64,
        x0: Point::zeros(dim),
    })
}
