use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{EpsError, Result};
use crate::prob::{JointSystem, Prob, Variable};

pub const SECRECY: &str = "secrecy I(U;X)=0";
pub const ZERO_ERROR: &str = "zero-error H(U|RX)=0";
pub const KEY_INDEPENDENCE: &str = "key independence I(U;R)=0";

/// A cell that breaks one of the constraints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: &'static str,
    pub cell: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsReport {
    pub secrecy_ok: bool,
    pub zero_error_ok: bool,
    pub key_independence_ok: bool,
    pub violations: Vec<Violation>,
}

impl EpsReport {
    pub fn is_eps(&self) -> bool {
        self.secrecy_ok && self.zero_error_ok && self.key_independence_ok
    }

    pub fn failed_constraints(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.secrecy_ok {
            out.push(SECRECY);
        }
        if !self.zero_error_ok {
            out.push(ZERO_ERROR);
        }
        if !self.key_independence_ok {
            out.push(KEY_INDEPENDENCE);
        }
        out
    }

    /// `Ok` for EPS systems, otherwise an error naming the failed constraints.
    pub fn require(&self) -> Result<()> {
        if self.is_eps() {
            Ok(())
        } else {
            Err(EpsError::NotEps(self.failed_constraints().join(", ")))
        }
    }
}

fn factorization_violation(
    joint: &JointSystem,
    a: Variable,
    b: Variable,
    constraint: &'static str,
) -> Option<Violation> {
    let (ka, kb, pab, prod) = joint
        .joint()
        .independence_witness(&[a as usize], &[b as usize])
        .expect("distinct variables")?;
    let la = &joint.labels(a)[ka[0]];
    let lb = &joint.labels(b)[kb[0]];
    Some(Violation {
        constraint,
        cell: format!("{a:?}={la}, {b:?}={lb}"),
        detail: format!("P({a:?},{b:?}) = {pab} but P({a:?})P({b:?}) = {prod}"),
    })
}

/// Exact check of the three constraints. Secrecy and key independence are
/// factorization tests; zero error asks that each positive (r, x) pair
/// admit exactly one message.
pub fn check_eps(joint: &JointSystem) -> EpsReport {
    let mut violations = Vec::new();

    let secrecy = factorization_violation(joint, Variable::U, Variable::X, SECRECY);
    let key_ind = factorization_violation(joint, Variable::U, Variable::R, KEY_INDEPENDENCE);

    let mut decoded: BTreeMap<(usize, usize), Vec<(usize, &Prob)>> = BTreeMap::new();
    for ((u, r, x), p) in joint.cells() {
        decoded.entry((r, x)).or_default().push((u, p));
    }
    let mut zero_error_ok = true;
    for ((r, x), us) in &decoded {
        if us.len() > 1 {
            zero_error_ok = false;
            let names: Vec<String> = us
                .iter()
                .map(|(u, p)| format!("{}:{}", joint.labels(Variable::U)[*u], p))
                .collect();
            violations.push(Violation {
                constraint: ZERO_ERROR,
                cell: format!(
                    "R={}, X={}",
                    joint.labels(Variable::R)[*r],
                    joint.labels(Variable::X)[*x]
                ),
                detail: format!("messages {} share this pair", names.join(" ")),
            });
        }
    }

    let secrecy_ok = secrecy.is_none();
    let key_independence_ok = key_ind.is_none();
    violations.extend(secrecy);
    violations.extend(key_ind);
    EpsReport {
        secrecy_ok,
        zero_error_ok,
        key_independence_ok,
        violations,
    }
}
