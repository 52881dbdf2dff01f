use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lipschitz constant `l` of the black box (w.r.t. ℓ2) and the tolerated
/// infidelity `θ̄` (`1 - θ` for absolute fidelity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzInfo {
    pub l: f64,
    pub theta_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadStart {
    /// ℓ2 radius `θ̄ / (‖α‖ + l)` guaranteed to be violation-free.
    pub l2_radius: f64,
    /// Half-width of the largest ℓ∞ cube inside that ball, `r / √d`.
    pub linf_half_width: f64,
}

/// Region certified without queries for a linear explanation that is exact at
/// `x0`: `|g(y) - e(y)| ≤ (l + ‖α‖) ‖y - x0‖`.
///
/// The ℓ∞ half-width can be passed as `DriverConfig::initial_lb`.
pub fn lipschitz_headstart(alpha: &[f64], info: LipschitzInfo) -> Result<HeadStart> {
    if alpha.is_empty() {
        return Err(Error::InvalidArgument("explanation has no coefficients".into()));
    }
    if !(info.l >= 0.0 && info.theta_bar >= 0.0) {
        return Err(Error::InvalidArgument("l and theta_bar must be non-negative".into()));
    }
    let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    let denom = norm + info.l;
    if denom == 0.0 {
        return Err(Error::InvalidArgument("‖α‖ + l must be positive".into()));
    }
    let l2_radius = info.theta_bar / denom;
    Ok(HeadStart { l2_radius, linf_half_width: l2_radius / (alpha.len() as f64).sqrt() })
}
