//! Joint-limit-penalized manipulability.
//!
//! The dexterity of a configuration is
//!
//! ```text
//! Dex = sqrt(det(J J^T)) * [1 - exp(-K * prod_j (t_j - dn_j)(up_j - t_j) / (up_j - dn_j)^2)]
//! ```
//!
//! so it vanishes both at kinematic singularities and whenever any joint
//! sits on a travel limit. Raw values are normalized over a sample set by
//! max-division before thresholding or voxelization.

use nalgebra::Matrix6;

use crate::error::{Error, Result};
use crate::kinematics::{geometric_jacobian, JointVector, ManipulatorModel};

/// How far below zero det(J J^T) may fall before it is treated as a real
/// numerical failure instead of round-off.
const DET_ROUNDOFF: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DexterityConfig {
    /// Scaling factor K of the penalty exponent. The default makes the
    /// penalty factor indistinguishable from 1 at joint-range midpoints
    /// (exponent about -24) while still collapsing to 0 within the last
    /// fraction of a percent of travel.
    pub k: f64,
}

impl Default for DexterityConfig {
    fn default() -> Self {
        DexterityConfig { k: 1e5 }
    }
}

impl DexterityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scaling factor K must be positive, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Yoshikawa measure `sqrt(det(J J^T))` of a square Jacobian.
///
/// Round-off can push det(J J^T) slightly negative at singularities; values
/// above `-1e-15` clamp to zero, anything worse is reported as a numerical
/// failure.
pub fn manipulability(jac: &Matrix6<f64>) -> Result<f64> {
    let det = (jac * jac.transpose()).determinant();
    if det >= 0.0 {
        Ok(det.sqrt())
    } else if det > -DET_ROUNDOFF {
        Ok(0.0)
    } else {
        Err(Error::NumericalFailure(format!(
            "det(JJ^T) = {det} is negative beyond round-off"
        )))
    }
}

/// Penalty factor in `[0, 1)`: 0 when any joint sits exactly on a limit,
/// approaching 1 deep inside the travel ranges. A joint with a degenerate
/// (zero-width) interval permanently sits on its limit, so the penalty is 0.
pub fn joint_limit_penalty(
    q: &JointVector,
    model: &ManipulatorModel,
    cfg: &DexterityConfig,
) -> Result<f64> {
    let mut product = 1.0;
    for (j, link) in model.links().iter().enumerate() {
        let theta = q.0[j];
        if theta < link.theta_down || theta > link.theta_up {
            return Err(Error::InvalidInput(format!(
                "joint {} angle {theta} outside [{}, {}]",
                j + 1,
                link.theta_down,
                link.theta_up
            )));
        }
        let range = link.theta_up - link.theta_down;
        if range == 0.0 {
            product = 0.0;
        } else {
            product *= (theta - link.theta_down) * (link.theta_up - theta) / (range * range);
        }
    }
    Ok(1.0 - (-cfg.k * product).exp())
}

/// Raw penalized dexterity of one configuration.
pub fn dexterity(model: &ManipulatorModel, q: &JointVector, cfg: &DexterityConfig) -> Result<f64> {
    let w = manipulability(&geometric_jacobian(model, q))?;
    Ok(w * joint_limit_penalty(q, model, cfg)?)
}

/// Divide a sample set by its maximum so the best configuration maps to
/// exactly 1. Order is preserved; normalizing twice is a no-op.
pub fn normalize_dexterity(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::InvalidInput(
            "cannot normalize an empty dexterity sequence".into(),
        ));
    }
    let max = raw.iter().fold(0.0f64, |m, &v| m.max(v));
    if !(max > 0.0) {
        return Err(Error::DegenerateWorkspace(
            "all sampled dexterity values are zero".into(),
        ));
    }
    Ok(raw.iter().map(|&v| v / max).collect())
}
