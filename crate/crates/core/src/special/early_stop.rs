use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopSignal {
    Continue,
    /// Every piece of the model has been seen and all reach `θ`.
    CertifyAll,
}

/// Distinct-value accumulator for models known to have at most `p` linear
/// pieces, when the metric takes one value per piece (e.g. cosine fidelity
/// against a linear explanation).
#[derive(Debug, Clone)]
pub struct PiecewiseEarlyStop {
    pieces: usize,
    theta: f64,
    tol: f64,
    values: Vec<f64>,
}

impl PiecewiseEarlyStop {
    pub const DEFAULT_TOL: f64 = 1e-9;

    pub fn new(pieces: usize, theta: f64, tol: f64) -> Self {
        assert!(pieces >= 1, "a piecewise model has at least one piece");
        Self { pieces, theta, tol, values: Vec::new() }
    }

    pub fn distinct(&self) -> &[f64] {
        &self.values
    }

    pub fn observe(&mut self, fidelity: f64) -> Result<StopSignal> {
        if !self.values.iter().any(|v| (v - fidelity).abs() <= self.tol) {
            self.values.push(fidelity);
        }
        if self.values.len() > self.pieces {
            return Err(Error::TooManyPieces { seen: self.values.len(), pieces: self.pieces });
        }
        Ok(self.signal())
    }

    pub fn observe_all(&mut self, fidelities: impl IntoIterator<Item = f64>) -> Result<StopSignal> {
        let mut last = self.signal();
        for f in fidelities {
            last = self.observe(f)?;
        }
        Ok(last)
    }

    fn signal(&self) -> StopSignal {
        if self.values.len() == self.pieces && self.values.iter().all(|&v| v >= self.theta) {
            StopSignal::CertifyAll
        } else {
            StopSignal::Continue
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_piece_certifies_immediately() {
        let mut s = PiecewiseEarlyStop::new(1, 0.75, 1e-9);
        assert_eq!(s.observe(0.9).unwrap(), StopSignal::CertifyAll);
    }

    #[test]
    fn all_pieces_above_threshold_stop() {
        let mut s = PiecewiseEarlyStop::new(3, 0.75, 1e-9);
        assert_eq!(s.observe(0.9).unwrap(), StopSignal::Continue);
        assert_eq!(s.observe(0.9 + 1e-12).unwrap(), StopSignal::Continue);
        assert_eq!(s.observe(0.8).unwrap(), StopSignal::Continue);
        assert_eq!(s.observe(0.95).unwrap(), StopSignal::CertifyAll);
    }

    #[test]
    fn sub_threshold_value_blocks_stop() {
        let mut s = PiecewiseEarlyStop::new(3, 0.75, 1e-9);
        assert_eq!(s.observe_all([0.9, 0.6]).unwrap(), StopSignal::Continue);
        assert_eq!(s.observe(0.8).unwrap(), StopSignal::Continue);
    }

    #[test]
    fn too_many_values_is_an_error() {
        let mut s = PiecewiseEarlyStop::new(2, 0.5, 1e-9);
        assert!(s.observe_all([0.9, 0.8, 0.7]).is_err());
    }

    proptest! {
        #[test]
        fn never_certifies_after_a_violation(vals in proptest::collection::vec(0.0f64..1.0, 1..20), p in 1usize..25) {
            let theta = 0.5;
            let mut s = PiecewiseEarlyStop::new(p, theta, 1e-9);
            let mut seen_low = false;
            for v in vals {
                seen_low |= v < theta;
                match s.observe(v) {
                    Ok(StopSignal::CertifyAll) => prop_assert!(!seen_low),
                    Ok(StopSignal::Continue) => {}
                    Err(_) => break,
                }
            }
        }
    }
}
