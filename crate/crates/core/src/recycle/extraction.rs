//! Fresh keys from residual randomness: overlay the target key's partition
//! of [0,1) on each context's residual partition and let A name the piece.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{EpsError, Result};
use crate::prob::{entropy, entropy_of_masses, FiniteDist, JointSystem, Prob, Variable, TOLERANCE};

/// The overlay for one (u, x) context.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextPlan {
    pub context: String,
    /// P(R | u, x); residual cells follow the label order of this dist.
    pub residual: FiniteDist,
    /// `a_kernel[r][a]` is P(A = a | R = r).
    pub a_kernel: Vec<Vec<Prob>>,
    /// `s_map[r][a]` is the target index S produced by (r, a).
    pub s_map: Vec<Vec<usize>>,
}

impl ContextPlan {
    /// P(S = s | context) from the residual and the A kernel.
    pub fn induced_target(&self, size: usize) -> Vec<Prob> {
        let mut out = vec![Prob::zero(); size];
        for (r, pr) in self.residual.masses().iter().enumerate() {
            for (pa, &s) in self.a_kernel[r].iter().zip(&self.s_map[r]) {
                out[s] += pr * pa;
            }
        }
        out
    }

    /// H(A | R, context) in bits.
    pub fn h_a_given_r(&self) -> f64 {
        self.residual
            .masses()
            .iter()
            .zip(&self.a_kernel)
            .map(|(pr, row)| crate::prob::to_f64(pr) * entropy_of_masses(row))
            .sum()
    }

    /// Largest number of residual values that share one target value.
    pub fn max_preimages(&self) -> usize {
        let mut by_s: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (r, row) in self.s_map.iter().enumerate() {
            for &s in row {
                by_s.entry(s).or_default().insert(r);
            }
        }
        by_s.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// S is a function of (A, R) by construction; this checks the converse,
    /// that A is recovered from (S, R).
    pub fn a_determined_by_s_and_r(&self) -> bool {
        self.s_map.iter().all(|row| {
            let distinct: BTreeSet<_> = row.iter().collect();
            distinct.len() == row.len()
        })
    }

    fn rows_are_distributions(&self) -> bool {
        self.a_kernel.iter().all(|row| {
            row.iter().all(Signed::is_positive) && row.iter().sum::<Prob>() == Prob::from_integer(1.into())
        }) && self.a_kernel.len() == self.residual.len()
            && self.s_map.iter().zip(&self.a_kernel).all(|(s, a)| s.len() == a.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionPlan {
    pub target: FiniteDist,
    pub contexts: Vec<ContextPlan>,
}

fn overlay(target: &FiniteDist, residual: &FiniteDist) -> (Vec<Vec<Prob>>, Vec<Vec<usize>>) {
    let t = target.masses();
    let mut t_hi = Vec::with_capacity(t.len());
    let mut acc = Prob::zero();
    for m in t {
        acc += m;
        t_hi.push(acc.clone());
    }
    let mut a_kernel = Vec::with_capacity(residual.len());
    let mut s_map = Vec::with_capacity(residual.len());
    let mut lo = Prob::zero();
    let mut s = 0usize;
    for pr in residual.masses() {
        let hi = &lo + pr;
        let mut row_a = Vec::new();
        let mut row_s = Vec::new();
        let mut cursor = lo.clone();
        // Skip target cells that end at or before the start of this residual cell.
        while s < t_hi.len() && t_hi[s] <= cursor {
            s += 1;
        }
        while cursor < hi {
            let end = if t_hi[s] < hi { t_hi[s].clone() } else { hi.clone() };
            let piece = &end - &cursor;
            if piece.is_positive() {
                row_a.push(piece / pr);
                row_s.push(s);
            }
            cursor = end;
            if t_hi[s] <= cursor && s + 1 < t_hi.len() {
                s += 1;
            }
        }
        a_kernel.push(row_a);
        s_map.push(row_s);
        lo = hi;
    }
    (a_kernel, s_map)
}

/// Builds the overlay for every context. Any two valid distributions work;
/// the near-lossless guarantee additionally needs
/// [`ExtractionPlan::precondition_holds`].
pub fn build_extraction(
    target: &FiniteDist,
    residual_by_context: &[(String, FiniteDist)],
) -> Result<ExtractionPlan> {
    if residual_by_context.is_empty() {
        return Err(EpsError::EmptySupport);
    }
    let mut seen = BTreeSet::new();
    let mut contexts = Vec::with_capacity(residual_by_context.len());
    for (name, residual) in residual_by_context {
        if !seen.insert(name.clone()) {
            return Err(EpsError::DuplicateLabel(name.clone()));
        }
        let (a_kernel, s_map) = overlay(target, residual);
        contexts.push(ContextPlan {
            context: name.clone(),
            residual: residual.clone(),
            a_kernel,
            s_map,
        });
    }
    Ok(ExtractionPlan {
        target: target.clone(),
        contexts,
    })
}

impl ExtractionPlan {
    /// max target mass < min residual mass over all contexts.
    pub fn precondition_holds(&self) -> bool {
        self.contexts
            .iter()
            .all(|c| self.target.max_mass() < c.residual.min_mass())
    }

    /// Every context induces exactly the target law on S.
    pub fn target_matches(&self) -> bool {
        self.contexts
            .iter()
            .all(|c| c.induced_target(self.target.len()) == self.target.masses())
    }

    pub fn is_structurally_valid(&self) -> bool {
        self.contexts
            .iter()
            .all(|c| c.rows_are_distributions() && c.a_determined_by_s_and_r())
    }

    pub fn max_preimages(&self) -> usize {
        self.contexts.iter().map(ContextPlan::max_preimages).max().unwrap_or(0)
    }

    pub fn context(&self, name: &str) -> Option<&ContextPlan> {
        self.contexts.iter().find(|c| c.context == name)
    }
}

/// Key-extraction figures for a plan weighted by context probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionMetrics {
    pub h_s: f64,
    /// H(A | R, context).
    pub h_a_given_r: f64,
    /// H(R | context), the residual randomness.
    pub residual: f64,
    /// H(S) − H(A | R, context).
    pub gain: f64,
    /// gain ≤ residual.
    pub newkey2: bool,
    /// gain ≥ residual − 1; only asserted when the precondition holds.
    pub newkey3: Option<bool>,
    /// gain − (residual − 1).
    pub slack: f64,
    pub precondition: bool,
    pub max_preimages: usize,
}

pub fn extraction_metrics(plan: &ExtractionPlan, weights: &FiniteDist) -> Result<ExtractionMetrics> {
    if weights.len() != plan.contexts.len() {
        return Err(EpsError::ContextMismatch(format!(
            "{} weights for {} contexts",
            weights.len(),
            plan.contexts.len()
        )));
    }
    let mut h_a = 0.0;
    let mut residual = 0.0;
    for (label, w) in weights.iter() {
        let ctx = plan
            .context(label)
            .ok_or_else(|| EpsError::ContextMismatch(label.to_string()))?;
        let wf = crate::prob::to_f64(w);
        h_a += wf * ctx.h_a_given_r();
        residual += wf * entropy(&ctx.residual);
    }
    let h_s = entropy(&plan.target);
    let gain = h_s - h_a;
    let precondition = plan.precondition_holds();
    Ok(ExtractionMetrics {
        h_s,
        h_a_given_r: h_a,
        residual,
        gain,
        newkey2: gain <= residual + TOLERANCE,
        newkey3: precondition.then_some(gain >= residual - 1.0 - TOLERANCE),
        slack: gain - (residual - 1.0),
        precondition,
        max_preimages: plan.max_preimages(),
    })
}

/// P(R | u, x) for every positive (u, x), named `u,x`, with weights P(u, x).
pub fn residual_contexts(joint: &JointSystem) -> Result<(Vec<(String, FiniteDist)>, FiniteDist)> {
    let mut by_ctx: BTreeMap<(usize, usize), BTreeMap<usize, Prob>> = BTreeMap::new();
    for ((u, r, x), p) in joint.cells() {
        *by_ctx.entry((u, x)).or_default().entry(r).or_insert_with(Prob::zero) += p;
    }
    let ul = joint.labels(Variable::U);
    let rl = joint.labels(Variable::R);
    let xl = joint.labels(Variable::X);
    let mut contexts = Vec::with_capacity(by_ctx.len());
    let mut names = Vec::with_capacity(by_ctx.len());
    let mut weights = Vec::with_capacity(by_ctx.len());
    for ((u, x), rs) in by_ctx {
        let total: Prob = rs.values().sum();
        let labels: Vec<String> = rs.keys().map(|&r| rl[r].clone()).collect();
        let masses = rs.values().map(|p| p / &total).collect();
        let name = format!("{},{}", ul[u], xl[x]);
        contexts.push((name.clone(), FiniteDist::new(labels, masses)?));
        names.push(name);
        weights.push(total);
    }
    Ok((contexts, FiniteDist::new(names, weights)?))
}
