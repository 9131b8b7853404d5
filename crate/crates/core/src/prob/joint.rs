//! Exact joint distributions over named discrete variables.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::dist::FiniteDist;
use super::measures::{entropy_of_masses, TOLERANCE};
use super::rational::Prob;
use crate::error::{EpsError, Result};

/// A joint law over `k` variables. Cells are keyed by one symbol index per
/// variable; only positive cells are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    names: Vec<String>,
    alphabets: Vec<Vec<String>>,
    cells: BTreeMap<Vec<usize>, Prob>,
}

fn normalize_vars(vars: &[usize]) -> Vec<usize> {
    let mut v = vars.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

impl Joint {
    pub fn new(
        names: Vec<String>,
        alphabets: Vec<Vec<String>>,
        cells: impl IntoIterator<Item = (Vec<usize>, Prob)>,
    ) -> Result<Self> {
        if names.len() != alphabets.len() {
            return Err(EpsError::LengthMismatch {
                what: "variable names vs alphabets",
                left: names.len(),
                right: alphabets.len(),
            });
        }
        let mut table: BTreeMap<Vec<usize>, Prob> = BTreeMap::new();
        let mut total = Prob::zero();
        for (key, mass) in cells {
            if key.len() != names.len() {
                return Err(EpsError::LengthMismatch {
                    what: "cell arity vs variables",
                    left: key.len(),
                    right: names.len(),
                });
            }
            for (v, &s) in key.iter().enumerate() {
                if s >= alphabets[v].len() {
                    return Err(EpsError::OutOfAlphabet {
                        alphabet: "joint",
                        index: s,
                        size: alphabets[v].len(),
                    });
                }
            }
            if mass.is_negative() {
                return Err(EpsError::NegativeMass {
                    label: format!("{key:?}"),
                    mass: mass.to_string(),
                });
            }
            if mass.is_zero() {
                continue;
            }
            total += &mass;
            *table.entry(key).or_insert_with(Prob::zero) += mass;
        }
        if table.is_empty() {
            return Err(EpsError::EmptySupport);
        }
        if !total.is_one() {
            return Err(EpsError::NotNormalized(total.to_string()));
        }
        Ok(Self {
            names,
            alphabets,
            cells: table,
        })
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn alphabet(&self, var: usize) -> &[String] {
        &self.alphabets[var]
    }

    pub fn cells(&self) -> impl Iterator<Item = (&[usize], &Prob)> {
        self.cells.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn prob(&self, key: &[usize]) -> Prob {
        self.cells.get(key).cloned().unwrap_or_else(Prob::zero)
    }

    fn check_vars(&self, vars: &[usize]) -> Result<()> {
        match vars.iter().find(|&&v| v >= self.arity()) {
            Some(&v) => Err(EpsError::UnknownVariable(v)),
            None => Ok(()),
        }
    }

    /// Exact marginal over `vars` (sorted, deduplicated).
    pub fn marginal(&self, vars: &[usize]) -> BTreeMap<Vec<usize>, Prob> {
        let vars = normalize_vars(vars);
        let mut out: BTreeMap<Vec<usize>, Prob> = BTreeMap::new();
        for (key, mass) in &self.cells {
            let k: Vec<usize> = vars.iter().map(|&v| key[v]).collect();
            *out.entry(k).or_insert_with(Prob::zero) += mass;
        }
        out
    }

    /// Marginal of one variable as a labeled distribution.
    pub fn marginal_dist(&self, var: usize) -> FiniteDist {
        let m = self.marginal(&[var]);
        let labels: Vec<String> = m.keys().map(|k| self.alphabets[var][k[0]].clone()).collect();
        FiniteDist::new(labels, m.into_values().collect()).expect("marginal of a valid joint")
    }

    pub fn entropy(&self, vars: &[usize]) -> f64 {
        if vars.is_empty() {
            return 0.0;
        }
        entropy_of_masses(self.marginal(vars).values())
    }

    /// H(a | given).
    pub fn cond_entropy(&self, a: &[usize], given: &[usize]) -> f64 {
        let both: Vec<usize> = a.iter().chain(given).copied().collect();
        (self.entropy(&both) - self.entropy(given)).max(0.0)
    }

    /// I(a; b), clamped to 0 within tolerance.
    pub fn mutual_info(&self, a: &[usize], b: &[usize]) -> f64 {
        let both: Vec<usize> = a.iter().chain(b).copied().collect();
        clamp(self.entropy(a) + self.entropy(b) - self.entropy(&both))
    }

    /// I(a; b | c).
    pub fn cond_mutual_info(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let ac: Vec<usize> = a.iter().chain(c).copied().collect();
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        let abc: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
        clamp(self.entropy(&ac) + self.entropy(&bc) - self.entropy(&abc) - self.entropy(c))
    }

    fn check_disjoint(&self, groups: &[&[usize]]) -> Result<()> {
        let mut seen = vec![false; self.arity()];
        for g in groups {
            self.check_vars(g)?;
            for &v in normalize_vars(g).iter() {
                if seen[v] {
                    return Err(EpsError::OverlappingGroups);
                }
                seen[v] = true;
            }
        }
        Ok(())
    }

    /// Exact test that the marginal over `a ∪ b` factorizes as P(a)·P(b).
    pub fn is_independent(&self, a: &[usize], b: &[usize]) -> Result<bool> {
        self.independence_witness(a, b).map(|w| w.is_none())
    }

    /// First cell `(a, b)` where P(a,b) ≠ P(a)P(b), if any. Keys are in the
    /// order of the sorted variable lists of `a` and `b`.
    pub fn independence_witness(
        &self,
        a: &[usize],
        b: &[usize],
    ) -> Result<Option<(Vec<usize>, Vec<usize>, Prob, Prob)>> {
        self.check_disjoint(&[a, b])?;
        let a = normalize_vars(a);
        let b = normalize_vars(b);
        if a.is_empty() || b.is_empty() {
            return Ok(None);
        }
        let ma = self.marginal(&a);
        let mb = self.marginal(&b);
        let mut ab: BTreeMap<(Vec<usize>, Vec<usize>), Prob> = BTreeMap::new();
        for (key, mass) in &self.cells {
            let ka = a.iter().map(|&v| key[v]).collect();
            let kb = b.iter().map(|&v| key[v]).collect();
            *ab.entry((ka, kb)).or_insert_with(Prob::zero) += mass;
        }
        let zero = Prob::zero();
        for (ka, pa) in &ma {
            for (kb, pb) in &mb {
                let joint = ab.get(&(ka.clone(), kb.clone())).unwrap_or(&zero);
                let product = pa * pb;
                if *joint != product {
                    return Ok(Some((ka.clone(), kb.clone(), joint.clone(), product)));
                }
            }
        }
        Ok(None)
    }

    /// Exact test of I(a; b | c) = 0: P(abc)P(c) = P(ac)P(bc) on every cell.
    pub fn is_cond_independent(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<bool> {
        self.check_disjoint(&[a, b, c])?;
        if c.is_empty() {
            return self.is_independent(a, b);
        }
        let a = normalize_vars(a);
        let b = normalize_vars(b);
        let c = normalize_vars(c);
        let proj = |key: &[usize], vars: &[usize]| -> Vec<usize> { vars.iter().map(|&v| key[v]).collect() };
        let mut by_c: BTreeMap<Vec<usize>, (Prob, BTreeMap<Vec<usize>, Prob>, BTreeMap<Vec<usize>, Prob>, BTreeMap<(Vec<usize>, Vec<usize>), Prob>)> =
            BTreeMap::new();
        for (key, mass) in &self.cells {
            let entry = by_c.entry(proj(key, &c)).or_insert_with(|| {
                (Prob::zero(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new())
            });
            entry.0 += mass;
            let ka = proj(key, &a);
            let kb = proj(key, &b);
            *entry.1.entry(ka.clone()).or_insert_with(Prob::zero) += mass;
            *entry.2.entry(kb.clone()).or_insert_with(Prob::zero) += mass;
            *entry.3.entry((ka, kb)).or_insert_with(Prob::zero) += mass;
        }
        let zero = Prob::zero();
        for (pc, mac, mbc, mabc) in by_c.values() {
            for (ka, pac) in mac {
                for (kb, pbc) in mbc {
                    let pabc = mabc.get(&(ka.clone(), kb.clone())).unwrap_or(&zero);
                    if pabc * pc != pac * pbc {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// True iff `target` is a deterministic function of `given` on the support.
    pub fn is_function_of(&self, target: &[usize], given: &[usize]) -> bool {
        let target = normalize_vars(target);
        let given = normalize_vars(given);
        let mut seen: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for key in self.cells.keys() {
            let g: Vec<usize> = given.iter().map(|&v| key[v]).collect();
            let t: Vec<usize> = target.iter().map(|&v| key[v]).collect();
            match seen.get(&g) {
                Some(prev) if *prev != t => return false,
                Some(_) => {}
                None => {
                    seen.insert(g, t);
                }
            }
        }
        true
    }
}

fn clamp(v: f64) -> f64 {
    if v.abs() < TOLERANCE {
        0.0
    } else {
        v
    }
}

/// The three roles of a one-shot cipher system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    U = 0,
    R = 1,
    X = 2,
}

fn idx(vars: &[Variable]) -> Vec<usize> {
    vars.iter().map(|&v| v as usize).collect()
}

/// Joint law of (message U, key R, ciphertext X).
#[derive(Debug, Clone, PartialEq)]
pub struct JointSystem {
    joint: Joint,
}

impl JointSystem {
    pub fn new(
        u_labels: Vec<String>,
        r_labels: Vec<String>,
        x_labels: Vec<String>,
        table: impl IntoIterator<Item = ((usize, usize, usize), Prob)>,
    ) -> Result<Self> {
        let joint = Joint::new(
            vec!["U".into(), "R".into(), "X".into()],
            vec![u_labels, r_labels, x_labels],
            table.into_iter().map(|((u, r, x), p)| (vec![u, r, x], p)),
        )?;
        Ok(Self { joint })
    }

    /// Builds from labeled cells; alphabets follow first appearance.
    pub fn from_labeled(cells: Vec<(String, String, String, Prob)>) -> Result<Self> {
        let mut alph: [Vec<String>; 3] = Default::default();
        let mut lookup: [BTreeMap<String, usize>; 3] = Default::default();
        let mut table = Vec::with_capacity(cells.len());
        for (u, r, x, p) in cells {
            let mut key = [0usize; 3];
            for (v, label) in [u, r, x].into_iter().enumerate() {
                let next = alph[v].len();
                let i = *lookup[v].entry(label.clone()).or_insert(next);
                if i == next {
                    alph[v].push(label);
                }
                key[v] = i;
            }
            table.push(((key[0], key[1], key[2]), p));
        }
        let [u, r, x] = alph;
        Self::new(u, r, x, table)
    }

    pub fn joint(&self) -> &Joint {
        &self.joint
    }

    pub fn labels(&self, v: Variable) -> &[String] {
        self.joint.alphabet(v as usize)
    }

    pub fn prob(&self, u: usize, r: usize, x: usize) -> Prob {
        self.joint.prob(&[u, r, x])
    }

    pub fn marginal(&self, v: Variable) -> FiniteDist {
        self.joint.marginal_dist(v as usize)
    }

    pub fn cells(&self) -> impl Iterator<Item = ((usize, usize, usize), &Prob)> {
        self.joint.cells().map(|(k, p)| ((k[0], k[1], k[2]), p))
    }

    pub fn entropy(&self, vars: &[Variable]) -> f64 {
        self.joint.entropy(&idx(vars))
    }

    pub fn cond_entropy(&self, a: &[Variable], given: &[Variable]) -> f64 {
        self.joint.cond_entropy(&idx(a), &idx(given))
    }

    pub fn mutual_info(&self, a: &[Variable], b: &[Variable]) -> f64 {
        self.joint.mutual_info(&idx(a), &idx(b))
    }
}

/// Exact factorization test between two disjoint groups of {U, R, X}.
pub fn is_independent(joint: &JointSystem, a: &[Variable], b: &[Variable]) -> Result<bool> {
    joint.joint.is_independent(&idx(a), &idx(b))
}

/// Single, pairwise and conditional measures of a one-shot system, in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoReport {
    pub h_u: f64,
    pub h_r: f64,
    pub h_x: f64,
    pub i_ux: f64,
    pub i_ur: f64,
    pub i_xr: f64,
    pub h_u_given_rx: f64,
    pub h_r_given_ux: f64,
    pub h_x_given_ur: f64,
    /// I(R; UX), the expected key consumption.
    pub i_r_uxjoint: f64,
}

pub fn info_report(joint: &JointSystem) -> InfoReport {
    use Variable::*;
    InfoReport {
        h_u: joint.entropy(&[U]),
        h_r: joint.entropy(&[R]),
        h_x: joint.entropy(&[X]),
        i_ux: joint.mutual_info(&[U], &[X]),
        i_ur: joint.mutual_info(&[U], &[R]),
        i_xr: joint.mutual_info(&[X], &[R]),
        h_u_given_rx: joint.cond_entropy(&[U], &[R, X]),
        h_r_given_ux: joint.cond_entropy(&[R], &[U, X]),
        h_x_given_ur: joint.cond_entropy(&[X], &[U, R]),
        i_r_uxjoint: joint.mutual_info(&[R], &[U, X]),
    }
}
