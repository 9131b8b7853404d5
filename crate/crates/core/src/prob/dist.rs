use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rational::{int, ratio, to_f64, Prob};
use crate::error::{EpsError, Result};

/// A labeled finite distribution with exact masses. Zero masses are dropped at
/// construction, so `len()` is the support size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteDist {
    labels: Vec<String>,
    masses: Vec<Prob>,
}

impl FiniteDist {
    pub fn new<L: Into<String>>(labels: Vec<L>, masses: Vec<Prob>) -> Result<Self> {
        if labels.len() != masses.len() {
            return Err(EpsError::LengthMismatch {
                what: "labels vs masses",
                left: labels.len(),
                right: masses.len(),
            });
        }
        let mut seen = HashSet::new();
        let mut out_labels = Vec::with_capacity(labels.len());
        let mut out_masses = Vec::with_capacity(masses.len());
        let mut total = Prob::zero();
        for (label, mass) in labels.into_iter().zip(masses) {
            let label = label.into();
            if !seen.insert(label.clone()) {
                return Err(EpsError::DuplicateLabel(label));
            }
            if mass.is_negative() {
                return Err(EpsError::NegativeMass {
                    label,
                    mass: mass.to_string(),
                });
            }
            total += &mass;
            if mass.is_positive() {
                out_labels.push(label);
                out_masses.push(mass);
            }
        }
        if out_masses.is_empty() {
            return Err(EpsError::EmptySupport);
        }
        if !total.is_one() {
            return Err(EpsError::NotNormalized(total.to_string()));
        }
        Ok(Self {
            labels: out_labels,
            masses: out_masses,
        })
    }

    /// Labels `0..n-1`.
    pub fn from_masses(masses: Vec<Prob>) -> Result<Self> {
        let labels = (0..masses.len()).map(|i| i.to_string()).collect();
        Self::new(labels, masses)
    }

    pub fn from_fractions(fracs: &[(i64, i64)]) -> Result<Self> {
        Self::from_masses(fracs.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    /// Masses `weights[i] / sum(weights)`, labeled `0..n-1`.
    pub fn from_weights(weights: &[u64]) -> Result<Self> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(EpsError::EmptySupport);
        }
        Self::from_masses(
            weights
                .iter()
                .map(|&w| ratio(w as i64, total as i64))
                .collect(),
        )
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::uniform_labeled((0..n).map(|i| i.to_string()).collect())
    }

    pub fn uniform_labeled(labels: Vec<String>) -> Result<Self> {
        let n = labels.len() as i64;
        if n == 0 {
            return Err(EpsError::EmptySupport);
        }
        let masses = vec![ratio(1, n); labels.len()];
        Self::new(labels, masses)
    }

    pub fn point(label: impl Into<String>) -> Self {
        Self {
            labels: vec![label.into()],
            masses: vec![int(1)],
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn masses(&self) -> &[Prob] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Prob)> {
        self.labels.iter().map(String::as_str).zip(self.masses.iter())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn mass_of(&self, label: &str) -> Option<&Prob> {
        self.index_of(label).map(|i| &self.masses[i])
    }

    pub fn max_mass(&self) -> &Prob {
        self.masses.iter().max().expect("nonempty support")
    }

    pub fn min_mass(&self) -> &Prob {
        self.masses.iter().min().expect("nonempty support")
    }

    pub fn is_uniform(&self) -> bool {
        self.masses.iter().all(|m| m == &self.masses[0])
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.masses.iter().map(to_f64).collect()
    }

    /// Product distribution with labels `a|b`.
    pub fn product(&self, other: &FiniteDist) -> FiniteDist {
        let mut labels = Vec::with_capacity(self.len() * other.len());
        let mut masses = Vec::with_capacity(self.len() * other.len());
        for (la, ma) in self.iter() {
            for (lb, mb) in other.iter() {
                labels.push(format!("{la}|{lb}"));
                masses.push(ma * mb);
            }
        }
        FiniteDist { labels, masses }
    }
}

impl fmt::Display for FiniteDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (l, m)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}: {m}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for FiniteDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (l, m) in self.iter() {
            seq.serialize_element(&(l, m.to_string()))?;
        }
        seq.end()
    }
}
