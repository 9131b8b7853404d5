//! Entropy, divergence and majorization over exact distributions.
//!
//! Masses are exact; the returned information quantities are `f64` in bits
//! unless a base is given. Comparisons against zero use [`TOLERANCE`].

use num_traits::Zero;

use super::dist::FiniteDist;
use super::rational::{to_f64, Prob};
use crate::error::{EpsError, Result};

/// Global comparison tolerance for floating information quantities, in bits.
pub const TOLERANCE: f64 = 1e-9;

/// Logarithm base for displayed quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Base {
    Bits,
    Nats,
    Other(f64),
}

impl Base {
    /// Converts a value in bits to this base.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            Base::Bits => bits,
            Base::Nats => bits * std::f64::consts::LN_2,
            Base::Other(b) => bits / b.log2(),
        }
    }
}

pub fn entropy_of_masses<'a>(masses: impl IntoIterator<Item = &'a Prob>) -> f64 {
    masses
        .into_iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            let p = to_f64(p);
            -p * p.log2()
        })
        .sum()
}

pub fn entropy_f64(masses: &[f64]) -> f64 {
    masses
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Shannon entropy in bits.
pub fn entropy(dist: &FiniteDist) -> f64 {
    entropy_of_masses(dist.masses())
}

pub fn entropy_in(dist: &FiniteDist, base: Base) -> f64 {
    base.from_bits(entropy(dist))
}

/// h(γ) = −γ log γ − (1−γ) log(1−γ), with h(0) = h(1) = 0.
pub fn binary_entropy(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) || gamma.is_nan() {
        return Err(EpsError::OutOfRange(gamma));
    }
    Ok(entropy_f64(&[gamma, 1.0 - gamma]))
}

/// D(p‖q) in bits, with supports aligned by label.
pub fn relative_entropy(p: &FiniteDist, q: &FiniteDist) -> Result<f64> {
    let mut total = 0.0;
    for (label, pm) in p.iter() {
        let qm = q
            .mass_of(label)
            .ok_or_else(|| EpsError::DivergenceInfinite(label.to_string()))?;
        if pm == qm {
            continue;
        }
        let ratio = to_f64(&(pm / qm));
        total += to_f64(pm) * ratio.log2();
    }
    Ok(total.max(0.0))
}

fn sorted_desc(p: &[Prob]) -> Vec<Prob> {
    let mut v = p.to_vec();
    v.sort_by(|a, b| b.cmp(a));
    v
}

/// True iff the descending partial sums of `p` dominate those of `q`
/// (shorter vectors padded with zeros).
pub fn majorizes(p: &[Prob], q: &[Prob]) -> bool {
    let p = sorted_desc(p);
    let q = sorted_desc(q);
    let n = p.len().max(q.len());
    let zero = Prob::zero();
    let mut sp = Prob::zero();
    let mut sq = Prob::zero();
    for i in 0..n {
        sp += p.get(i).unwrap_or(&zero);
        sq += q.get(i).unwrap_or(&zero);
        if sp < sq {
            return false;
        }
    }
    true
}

pub fn dist_majorizes(p: &FiniteDist, q: &FiniteDist) -> bool {
    majorizes(p.masses(), q.masses())
}
