use serde::Serialize;

use super::eps::check_eps;
use crate::error::Result;
use crate::prob::{JointSystem, Variable};

/// Key accounting of an EPS system, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyMetrics {
    pub h_u: f64,
    /// I(R; UX).
    pub consumption: f64,
    /// H(R | UX).
    pub residual: f64,
    /// I(R; X).
    pub excess: f64,
}

/// Expected, residual and excess key consumption. Rejects non-EPS joints.
pub fn key_metrics(joint: &JointSystem) -> Result<KeyMetrics> {
    use Variable::*;
    check_eps(joint).require()?;
    Ok(KeyMetrics {
        h_u: joint.entropy(&[U]),
        consumption: joint.mutual_info(&[R], &[U, X]),
        residual: joint.cond_entropy(&[R], &[U, X]),
        excess: joint.mutual_info(&[R], &[X]),
    })
}
