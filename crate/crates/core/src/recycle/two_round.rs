//! Two consecutive uses of a shared key: round one is a [`CipherSpec`],
//! round two is an arbitrary kernel that may draw on anything the sender
//! knows after round one.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::example2::build_example2;
use super::extraction::{build_extraction, extraction_metrics, residual_contexts, ExtractionMetrics};
use crate::ciphers::{build_one_time_pad, induced_joint, CipherSpec};
use crate::error::{EpsError, Result};
use crate::prob::{ratio, FiniteDist, Joint, Prob, TOLERANCE};

const U: usize = 0;
const V: usize = 1;
const R: usize = 2;
const X: usize = 3;
const Y: usize = 4;

/// Joint law of the two messages.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageCoupling {
    pub v_labels: Vec<String>,
    /// `(u index, v index, mass)`.
    pub cells: Vec<(usize, usize, Prob)>,
}

impl MessageCoupling {
    pub fn new(v_labels: Vec<String>, cells: Vec<(usize, usize, Prob)>) -> Result<Self> {
        let total: Prob = cells.iter().map(|c| &c.2).sum();
        if total != Prob::from_integer(1.into()) {
            return Err(EpsError::NotNormalized(total.to_string()));
        }
        if let Some(c) = cells.iter().find(|c| c.1 >= v_labels.len()) {
            return Err(EpsError::OutOfAlphabet {
                alphabet: "second message",
                index: c.1,
                size: v_labels.len(),
            });
        }
        if let Some(c) = cells.iter().find(|c| c.2.is_negative()) {
            return Err(EpsError::NegativeMass {
                label: format!("{},{}", c.0, c.1),
                mass: c.2.to_string(),
            });
        }
        Ok(Self { v_labels, cells })
    }

    /// V independent of U with law `v`.
    pub fn independent(u: &FiniteDist, v: &FiniteDist) -> Self {
        let mut cells = Vec::with_capacity(u.len() * v.len());
        for (i, pu) in u.masses().iter().enumerate() {
            for (j, pv) in v.masses().iter().enumerate() {
                cells.push((i, j, pu * pv));
            }
        }
        Self {
            v_labels: v.labels().to_vec(),
            cells,
        }
    }

    fn u_marginal(&self, n: usize) -> Vec<Prob> {
        let mut out = vec![Prob::zero(); n];
        for (u, _, p) in &self.cells {
            if *u < n {
                out[*u] += p;
            }
        }
        out
    }
}

/// What the sender holds when choosing the second ciphertext.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstRound {
    pub u: usize,
    pub r: usize,
    pub aux: usize,
    pub x: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoRoundReport {
    pub h_v_given_u: f64,
    /// H(R | UX) of round one.
    pub residual_first_round: f64,
    /// I(XY; UV) in bits.
    pub joint_secrecy_mi: f64,
    /// I(XY; UV) = 0 by exact factorization.
    pub joint_secrecy_exact: bool,
    pub u_decodable: bool,
    pub v_decodable: bool,
    /// Joint secrecy plus both decodability conditions.
    pub preconditions: bool,
    /// H(V|U) ≤ H(R|UX).
    pub residual_bound_ok: bool,
    pub newkey: Option<ExtractionMetrics>,
}

impl TwoRoundReport {
    pub fn newkey_gain(&self) -> Option<f64> {
        self.newkey.as_ref().map(|m| m.gain)
    }

    pub fn bound_newkey2(&self) -> Option<bool> {
        self.newkey.as_ref().map(|m| m.newkey2)
    }

    pub fn bound_newkey3(&self) -> Option<bool> {
        self.newkey.as_ref().and_then(|m| m.newkey3)
    }
}

/// Builds the exact joint over (U, V, R, X, Y) and evaluates it.
/// `round2` returns the law of Y as `(mass, label)` pairs. When
/// `target_key` is given, the round-one residual is also run through the
/// key extraction.
pub fn simulate_two_rounds<F>(
    round1: &CipherSpec,
    coupling: &MessageCoupling,
    round2: F,
    target_key: Option<&FiniteDist>,
) -> Result<TwoRoundReport>
where
    F: Fn(FirstRound, usize) -> Vec<(Prob, String)>,
{
    let source = round1.source();
    if coupling.u_marginal(source.len()) != source.masses()
        || coupling.cells.iter().any(|c| c.0 >= source.len())
    {
        return Err(EpsError::ContextMismatch(
            "coupling's first-message marginal differs from the round-one source".into(),
        ));
    }

    let mut y_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut y_labels = Vec::new();
    let mut cells: Vec<(Vec<usize>, Prob)> = Vec::new();
    for (u, v, puv) in &coupling.cells {
        if puv.is_zero() {
            continue;
        }
        for (r, pr) in round1.key().masses().iter().enumerate() {
            for (aux, (pa, x)) in round1.encoder_row(*u, r)?.iter().enumerate() {
                let base = puv * pr * pa;
                let first = FirstRound { u: *u, r, aux, x: *x };
                let ys = round2(first, *v);
                let total: Prob = ys.iter().map(|y| &y.0).sum();
                if total != Prob::from_integer(1.into()) {
                    return Err(EpsError::NotNormalized(format!("round-two law: {total}")));
                }
                for (py, label) in ys {
                    let next = y_labels.len();
                    let yi = *y_index.entry(label.clone()).or_insert(next);
                    if yi == next {
                        y_labels.push(label);
                    }
                    cells.push((vec![*u, *v, r, *x, yi], &base * py));
                }
            }
        }
    }
    let joint = Joint::new(
        ["U", "V", "R", "X", "Y"].iter().map(|s| s.to_string()).collect(),
        vec![
            source.labels().to_vec(),
            coupling.v_labels.clone(),
            round1.key().labels().to_vec(),
            round1.x_labels().to_vec(),
            y_labels,
        ],
        cells,
    )?;

    let joint_secrecy_exact = joint.is_independent(&[X, Y], &[U, V])?;
    let u_decodable = joint.is_function_of(&[U], &[R, X]);
    let v_decodable = joint.is_function_of(&[V], &[R, X, Y]);
    let h_v_given_u = joint.cond_entropy(&[V], &[U]);
    let residual = joint.cond_entropy(&[R], &[U, X]);

    let newkey = match target_key {
        Some(t) => {
            let (contexts, weights) = residual_contexts(&induced_joint(round1))?;
            let plan = build_extraction(t, &contexts)?;
            Some(extraction_metrics(&plan, &weights)?)
        }
        None => None,
    };

    Ok(TwoRoundReport {
        h_v_given_u,
        residual_first_round: residual,
        joint_secrecy_mi: joint.mutual_info(&[X, Y], &[U, V]),
        joint_secrecy_exact,
        u_decodable,
        v_decodable,
        preconditions: joint_secrecy_exact && u_decodable && v_decodable,
        residual_bound_ok: h_v_given_u <= residual + TOLERANCE,
        newkey,
    })
}

fn bit(b: usize) -> String {
    b.to_string()
}

fn fair_bit() -> FiniteDist {
    FiniteDist::uniform(2).expect("valid")
}

/// Round one pads U with the first of two key bits; round two pads V with
/// the second.
pub fn scenario_independent_pads() -> Result<TwoRoundReport> {
    let spec = build_one_time_pad(&fair_bit()).extend_key(&fair_bit());
    let coupling = MessageCoupling::independent(&fair_bit(), &fair_bit());
    simulate_two_rounds(
        &spec,
        &coupling,
        |f, v| vec![(ratio(1, 1), bit(v ^ (f.r % 2)))],
        Some(&fair_bit()),
    )
}

/// Same key budget, but round two uses the first message as its pad.
pub fn scenario_message_as_key() -> Result<TwoRoundReport> {
    let spec = build_one_time_pad(&fair_bit()).extend_key(&fair_bit());
    let coupling = MessageCoupling::independent(&fair_bit(), &fair_bit());
    simulate_two_rounds(&spec, &coupling, |f, v| vec![(ratio(1, 1), bit(v ^ f.u))], None)
}

/// The two-bit-key scheme with the fresh bit reused: when U = 0, a fair bit
/// V is padded with the fresh bit; otherwise V = 0 and Y is an independent
/// fair bit.
pub fn scenario_recycled_fresh_bit() -> Result<TwoRoundReport> {
    let ex = build_example2(2)?;
    let quarter = ratio(1, 4);
    let coupling = MessageCoupling::new(
        vec!["0".into(), "1".into()],
        vec![
            (0, 0, quarter.clone()),
            (0, 1, quarter.clone()),
            (1, 0, quarter.clone()),
            (2, 0, quarter),
        ],
    )?;
    simulate_two_rounds(
        &ex.spec,
        &coupling,
        |f, v| {
            if f.u == 0 {
                vec![(ratio(1, 1), bit(v ^ f.aux))]
            } else {
                vec![(ratio(1, 2), bit(0)), (ratio(1, 2), bit(1))]
            }
        },
        None,
    )
}

/// Round two needs more key than is left over: a uniform 4-ary V padded
/// with the single spare key bit.
pub fn scenario_short_residual() -> Result<TwoRoundReport> {
    let spec = build_one_time_pad(&fair_bit()).extend_key(&fair_bit());
    let coupling = MessageCoupling::independent(&fair_bit(), &FiniteDist::uniform(4)?);
    simulate_two_rounds(&spec, &coupling, |f, v| vec![(ratio(1, 1), bit(v ^ (f.r % 2)))], None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_pads_are_jointly_secret() {
        let rep = scenario_independent_pads().unwrap();
        assert!(rep.preconditions);
        assert!(rep.joint_secrecy_exact);
        assert!(rep.joint_secrecy_mi.abs() < 1e-12);
        assert!((rep.h_v_given_u - 1.0).abs() < 1e-12);
        assert!((rep.residual_first_round - 1.0).abs() < 1e-12);
        assert!(rep.residual_bound_ok);
        assert_eq!(rep.bound_newkey2(), Some(true));
        assert!((rep.newkey_gain().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn message_as_key_leaks() {
        let rep = scenario_message_as_key().unwrap();
        assert!(!rep.joint_secrecy_exact);
        assert!(rep.joint_secrecy_mi >= 1.0 - 1e-12);
        assert!(rep.v_decodable && rep.u_decodable);
        assert!(!rep.preconditions);
        assert!(rep.residual_bound_ok);
    }

    #[test]
    fn recycled_fresh_bit_is_secret() {
        let rep = scenario_recycled_fresh_bit().unwrap();
        assert!(rep.preconditions, "{rep:?}");
        assert!((rep.h_v_given_u - 0.5).abs() < 1e-12);
        assert!((rep.residual_first_round - 0.5).abs() < 1e-12);
        assert!(rep.residual_bound_ok);
    }

    #[test]
    fn short_residual_is_reported() {
        let rep = scenario_short_residual().unwrap();
        assert!(!rep.residual_bound_ok);
        assert!(!rep.v_decodable || !rep.joint_secrecy_exact);
    }

    #[test]
    fn coupling_must_match_source() {
        let spec = build_one_time_pad(&fair_bit());
        let bad = MessageCoupling::independent(
            &FiniteDist::from_fractions(&[(1, 3), (2, 3)]).unwrap(),
            &fair_bit(),
        );
        assert!(matches!(
            simulate_two_rounds(&spec, &bad, |_, _| vec![(ratio(1, 1), "y".into())], None),
            Err(EpsError::ContextMismatch(_))
        ));
    }
}
