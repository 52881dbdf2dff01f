use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::point::Point;

/// The set `{x : lb < ‖x - center‖∞ ≤ ub}`; for `lb = 0` the whole closed cube.
///
/// The outer boundary is closed and the inner one open, so the shells produced
/// by consecutive successful certifications partition the final cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellRegion {
    center: Point,
    lb: f64,
    ub: f64,
}

impl ShellRegion {
    pub fn new(center: Point, lb: f64, ub: f64) -> Result<Self> {
        if !(lb.is_finite() && ub.is_finite() && lb >= 0.0 && ub > lb) {
            return Err(Error::InvalidArgument(format!(
                "shell needs 0 <= lb < ub, got lb = {lb}, ub = {ub}"
            )));
        }
        Ok(Self { center, lb, ub })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn lb(&self) -> f64 {
        self.lb
    }

    pub fn ub(&self) -> f64 {
        self.ub
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Exact membership test.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        check_dim(self.dim(), x.dim())?;
        Ok(self.contains_coords(x))
    }

    pub(crate) fn contains_coords(&self, x: &[f64]) -> bool {
        let r = x
            .iter()
            .zip(self.center.iter())
            .map(|(a, c)| (a - c).abs())
            .fold(0.0, f64::max);
        r <= self.ub && (self.lb == 0.0 || r > self.lb)
    }
}
