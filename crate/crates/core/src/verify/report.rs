//! Line-oriented and structured renderings of verifier results.
//!
//! Text lines are `CHECK<TAB>name<TAB>lhs<TAB>rhs<TAB>PASS|FAIL`, followed
//! by `WITNESS<TAB>constraint<TAB>cell<TAB>detail` for every violation.

use std::fmt::Write;

use serde::Serialize;

use super::bounds::{check_bounds, BoundReport, Regime};
use super::eps::{check_eps, EpsReport, KEY_INDEPENDENCE, SECRECY, ZERO_ERROR};
use super::metrics::{key_metrics, KeyMetrics};
use crate::error::{EpsError, Result};
use crate::prob::{info_report, InfoReport, JointSystem};

/// Everything `verify` computes for one joint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub eps: EpsReport,
    pub info: InfoReport,
    pub metrics: Option<KeyMetrics>,
    pub bounds: Vec<BoundReport>,
    /// Regimes that were skipped, with the unmet precondition.
    pub skipped: Vec<(String, String)>,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.eps.is_eps() && self.bounds.iter().all(BoundReport::all_ok)
    }
}

/// Runs the EPS checks and, for an EPS joint, every bound whose regime
/// applies. Regimes with unmet preconditions are listed in `skipped`.
pub fn verify_joint(joint: &JointSystem) -> Result<VerifyReport> {
    let eps = check_eps(joint);
    let info = info_report(joint);
    let mut bounds = Vec::new();
    let mut skipped = Vec::new();
    let metrics = if eps.is_eps() {
        for regime in [Regime::OneShot, Regime::MinKey, Regime::MinChannel] {
            match check_bounds(joint, regime) {
                Ok(b) => bounds.push(b),
                Err(EpsError::RegimePrecondition(why)) => skipped.push((regime.to_string(), why)),
                Err(e) => return Err(e),
            }
        }
        Some(key_metrics(joint)?)
    } else {
        skipped.push(("all".to_string(), "system is not EPS".to_string()));
        None
    };
    Ok(VerifyReport {
        eps,
        info,
        metrics,
        bounds,
        skipped,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn render_eps(rep: &EpsReport) -> String {
    let mut out = String::new();
    let rows = [
        (SECRECY, "P(U,X)", "P(U)P(X)", rep.secrecy_ok),
        (ZERO_ERROR, "messages per (r,x)", "1", rep.zero_error_ok),
        (KEY_INDEPENDENCE, "P(U,R)", "P(U)P(R)", rep.key_independence_ok),
    ];
    for (name, lhs, rhs, ok) in rows {
        writeln!(out, "CHECK\t{name}\t{lhs}\t{rhs}\t{}", verdict(ok)).unwrap();
    }
    for v in &rep.violations {
        writeln!(out, "WITNESS\t{}\t{}\t{}", v.constraint, v.cell, v.detail).unwrap();
    }
    out
}

pub fn render_bounds(rep: &BoundReport) -> String {
    let mut out = String::new();
    for c in &rep.checks {
        writeln!(
            out,
            "CHECK\t[{}] {}\t{}\t{}\t{}",
            rep.regime,
            c.name,
            c.lhs,
            c.rhs,
            verdict(c.ok)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ciphers::{build_one_time_pad, induced_joint};
    use crate::prob::FiniteDist;
    use crate::verify::{check_bounds, check_eps, Regime};

    #[test]
    fn verify_joint_runs_applicable_regimes() {
        let j = induced_joint(&build_one_time_pad(&FiniteDist::uniform(3).unwrap()));
        let rep = verify_joint(&j).unwrap();
        assert!(rep.all_ok());
        assert!(rep.metrics.is_some());
        assert_eq!(rep.bounds.len() + rep.skipped.len(), 3);

        let ex3 = crate::fixtures::example3_joint();
        let rep = verify_joint(&ex3).unwrap();
        assert!(rep.eps.is_eps());
        let regimes: Vec<Regime> = rep.bounds.iter().map(|b| b.regime).collect();
        assert_eq!(regimes, [Regime::OneShot, Regime::MinKey], "{:?}", rep.skipped);
        assert!(rep.all_ok());
    }

    #[test]
    fn text_lines_have_five_fields() {
        let j = induced_joint(&build_one_time_pad(&FiniteDist::uniform(3).unwrap()));
        let text = render_eps(&check_eps(&j));
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.split('\t').count() == 5 && l.ends_with("PASS")));
        let text = render_bounds(&check_bounds(&j, Regime::OneShot).unwrap());
        assert!(text.lines().all(|l| l.split('\t').count() == 5));
        assert!(text.contains("[one_shot] max P_X <= 1/|U|\t1/3\t1/3\tPASS"));
    }
}
