use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A point in feature space. Coordinates are finite and the vector is non-empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("point must have at least one coordinate".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("coordinate {i} is not finite")));
        }
        Ok(Self(coords))
    }

    /// Builds a point from coordinates already known to be finite.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self(vec![0.0; dim])
    }

    pub fn splat(dim: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// ℓ∞ distance to `other`.
    pub fn linf_distance(&self, other: &Point) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![0.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(serde_json::from_str::<Point>("[]").is_err());
    }

    #[test]
    fn linf_distance_takes_max_coordinate_gap() {
        let a = Point::new(vec![0.0, 1.0, -2.0]).unwrap();
        let b = Point::new(vec![0.5, 1.0, 1.0]).unwrap();
        assert_eq!(a.linf_distance(&b).unwrap(), 3.0);
        assert!(a.linf_distance(&Point::zeros(2)).is_err());
    }
}
