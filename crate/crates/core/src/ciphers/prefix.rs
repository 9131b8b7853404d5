//! d-ary prefix codes: Huffman and Shannon constructions.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::{One, Zero};

use super::spec::digits_label;
use crate::error::{EpsError, Result};
use crate::prob::rational::ceil_log_inverse;
use crate::prob::{int, FiniteDist, Prob};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCode {
    arity: u32,
    labels: Vec<String>,
    codewords: Vec<Vec<u8>>,
}

fn check_arity(arity: u32) -> Result<()> {
    if (2..=36).contains(&arity) {
        Ok(())
    } else {
        Err(EpsError::BadArity(arity))
    }
}

impl PrefixCode {
    /// Builds a code from explicit codewords; rejects codes that are not prefix-free.
    pub fn new(arity: u32, labels: Vec<String>, codewords: Vec<Vec<u8>>) -> Result<Self> {
        check_arity(arity)?;
        if labels.len() != codewords.len() {
            return Err(EpsError::LengthMismatch {
                what: "labels vs codewords",
                left: labels.len(),
                right: codewords.len(),
            });
        }
        if codewords.iter().flatten().any(|&d| d as u32 >= arity) {
            return Err(EpsError::InvalidParameter {
                name: "codeword",
                value: "digit".into(),
                reason: "digit not below arity",
            });
        }
        let code = Self {
            arity,
            labels,
            codewords,
        };
        if !code.is_prefix_free() {
            return Err(EpsError::InvalidParameter {
                name: "codewords",
                value: "set".into(),
                reason: "not prefix-free",
            });
        }
        Ok(code)
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn codewords(&self) -> &[Vec<u8>] {
        &self.codewords
    }

    pub fn codeword_of(&self, label: &str) -> Option<&[u8]> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.codewords[i].as_slice())
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.codewords.iter().map(Vec::len).collect()
    }

    /// γ, the longest codeword length.
    pub fn max_length(&self) -> usize {
        self.codewords.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// E[σ(U)] as an exact rational; symbols missing from the code are an error.
    pub fn expected_length(&self, source: &FiniteDist) -> Result<Prob> {
        let mut total = Prob::zero();
        for (label, p) in source.iter() {
            let cw = self
                .codeword_of(label)
                .ok_or_else(|| EpsError::CodeMismatch(label.to_string()))?;
            total += p * int(cw.len() as i64);
        }
        Ok(total)
    }

    /// Σ d^(−σ(u)).
    pub fn kraft_sum(&self) -> Prob {
        let d = int(self.arity as i64);
        self.codewords
            .iter()
            .map(|cw| Prob::one() / num_traits::pow(d.clone(), cw.len()))
            .sum()
    }

    pub fn is_prefix_free(&self) -> bool {
        let mut sorted: Vec<&Vec<u8>> = self.codewords.iter().collect();
        sorted.sort();
        // After lexicographic sorting a prefix sits directly before some word it prefixes.
        sorted.windows(2).all(|w| !w[1].starts_with(w[0]))
    }

    pub fn codeword_string(&self, i: usize) -> String {
        digits_label(&self.codewords[i])
    }
}

/// Huffman code with deterministic tie-breaking: the smallest masses merge
/// first, equal masses by creation order, and children take digits in the
/// order they were popped. Non-binary codes are padded with zero-mass dummies.
pub fn huffman_code(source: &FiniteDist, arity: u32) -> Result<PrefixCode> {
    check_arity(arity)?;
    let n = source.len();
    let d = arity as usize;
    let dummies = ((d - 1) - (n - 1) % (d - 1)) % (d - 1);

    // children[id] is empty for leaves.
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut heap = BinaryHeap::new();
    for m in source.masses() {
        heap.push(Reverse((m.clone(), children.len())));
        children.push(Vec::new());
    }
    for _ in 0..dummies {
        heap.push(Reverse((Prob::zero(), children.len())));
        children.push(Vec::new());
    }
    while heap.len() > 1 {
        let mut mass = Prob::zero();
        let mut kids = Vec::with_capacity(d);
        for _ in 0..d {
            let Reverse((m, id)) = heap.pop().expect("padding keeps merges full");
            mass += m;
            kids.push(id);
        }
        heap.push(Reverse((mass, children.len())));
        children.push(kids);
    }
    let root = heap.pop().expect("nonempty").0 .1;

    let mut codewords = vec![Vec::new(); n];
    let mut stack = vec![(root, Vec::new())];
    while let Some((id, prefix)) = stack.pop() {
        if children[id].is_empty() {
            if id < n {
                codewords[id] = prefix;
            }
            continue;
        }
        for (digit, &kid) in children[id].iter().enumerate() {
            let mut p = prefix.clone();
            p.push(digit as u8);
            stack.push((kid, p));
        }
    }
    PrefixCode::new(arity, source.labels().to_vec(), codewords)
}

/// Shannon code: σ(u) = ⌈log_d 1/P(u)⌉ computed exactly; codewords are the
/// first σ(u) d-ary digits of the cumulative mass of the symbols preceding u
/// in (decreasing mass, label order).
pub fn shannon_code(source: &FiniteDist, arity: u32) -> Result<PrefixCode> {
    check_arity(arity)?;
    let masses = source.masses();
    let mut order: Vec<usize> = (0..masses.len()).collect();
    order.sort_by(|&a, &b| masses[b].cmp(&masses[a]).then(a.cmp(&b)));
    let d = int(arity as i64);
    let mut codewords = vec![Vec::new(); masses.len()];
    let mut cumulative = Prob::zero();
    for &i in &order {
        let len = ceil_log_inverse(&masses[i], arity) as usize;
        let mut frac = cumulative.clone();
        let mut cw = Vec::with_capacity(len);
        for _ in 0..len {
            frac *= &d;
            let digit = frac.floor();
            frac -= &digit;
            cw.push(digit.to_integer().try_into().expect("digit below arity"));
        }
        codewords[i] = cw;
        cumulative += &masses[i];
    }
    PrefixCode::new(arity, source.labels().to_vec(), codewords)
}
