//! Binary-source EPS systems as decoding matrices: G[i][j] is the message
//! decoded from ciphertext i under key j, x and r are the ciphertext and key
//! laws, and P(X=i, R=j) = x_i r_j.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::linalg::{null_space, rank, solve_unique, transpose, Matrix};
use crate::error::{EpsError, Result};
use crate::prob::{int, JointSystem, Prob};

pub const DEFAULT_MATRIX_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleWitness {
    pub g: Vec<Vec<u8>>,
    pub x: Vec<Prob>,
    pub r: Vec<Prob>,
    pub p_u1: Prob,
}

fn as_matrix(g: &[Vec<u8>]) -> Matrix {
    g.iter()
        .map(|row| row.iter().map(|&v| int(v as i64)).collect())
        .collect()
}

impl FeasibleWitness {
    pub fn rows(&self) -> usize {
        self.g.len()
    }

    pub fn cols(&self) -> usize {
        self.g.first().map_or(0, Vec::len)
    }

    /// Σ_j G[i][j] r_j = p for every row.
    pub fn rows_balanced(&self) -> bool {
        self.g.iter().all(|row| {
            row.iter()
                .zip(&self.r)
                .filter(|(&g, _)| g == 1)
                .map(|(_, r)| r)
                .sum::<Prob>()
                == self.p_u1
        })
    }

    /// Σ_i x_i G[i][j] = p for every column.
    pub fn cols_balanced(&self) -> bool {
        (0..self.cols()).all(|j| {
            self.g
                .iter()
                .zip(&self.x)
                .filter(|(row, _)| row[j] == 1)
                .map(|(_, x)| x)
                .sum::<Prob>()
                == self.p_u1
        })
    }

    pub fn laws_valid(&self) -> bool {
        let one = Prob::one();
        self.x.len() == self.rows()
            && self.r.len() == self.cols()
            && self.x.iter().all(|v| !v.is_negative())
            && self.r.iter().all(|v| !v.is_negative())
            && self.x.iter().sum::<Prob>() == one
            && self.r.iter().sum::<Prob>() == one
    }

    /// All four constraints, exactly.
    pub fn is_valid(&self) -> bool {
        self.laws_valid() && self.rows_balanced() && self.cols_balanced()
    }

    pub fn support_size(&self) -> usize {
        self.x.iter().filter(|v| v.is_positive()).count()
            + self.r.iter().filter(|v| v.is_positive()).count()
    }

    /// The EPS system with P(u, r=j, x=i) = x_i r_j 1{u = G[i][j]}.
    pub fn to_joint(&self) -> JointSystem {
        let mut cells = Vec::with_capacity(self.rows() * self.cols());
        for (i, row) in self.g.iter().enumerate() {
            for (j, &u) in row.iter().enumerate() {
                cells.push(((u as usize, j, i), &self.x[i] * &self.r[j]));
            }
        }
        let labels = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        JointSystem::new(labels(2), labels(self.cols()), labels(self.rows()), cells)
            .expect("witness laws are normalized")
    }

    /// Swaps the roles of ciphertext and key.
    pub fn transposed(&self) -> Self {
        let g = (0..self.cols())
            .map(|j| self.g.iter().map(|row| row[j]).collect())
            .collect();
        Self {
            g,
            x: self.r.clone(),
            r: self.x.clone(),
            p_u1: self.p_u1.clone(),
        }
    }

    pub fn matrix_string(&self) -> String {
        self.g
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect::<String>())
            .collect::<Vec<_>>()
            .join("/")
    }
}

fn check_p(p: &Prob) -> Result<()> {
    if p.is_positive() && *p < Prob::one() {
        Ok(())
    } else {
        Err(EpsError::InvalidParameter {
            name: "p_u1",
            value: p.to_string(),
            reason: "must lie strictly between 0 and 1",
        })
    }
}

/// Strictly positive point of { v >= 0 : A v = b }, if one exists. Every
/// vertex is the unique solution on its support; the mean of all vertices
/// is strictly positive exactly when their supports cover every coordinate.
pub fn positive_solution(a: &Matrix, b: &[Prob]) -> Option<Vec<Prob>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut vertices: BTreeSet<Vec<Prob>> = BTreeSet::new();
    for mask in 1u32..(1 << cols) {
        let support: Vec<usize> = (0..cols).filter(|j| mask >> j & 1 == 1).collect();
        let sub: Matrix = a
            .iter()
            .map(|row| support.iter().map(|&j| row[j].clone()).collect())
            .collect();
        if let Some(z) = solve_unique(&sub, b) {
            if z.iter().all(|v| !v.is_negative()) {
                let mut full = vec![Prob::zero(); cols];
                for (&j, v) in support.iter().zip(z) {
                    full[j] = v;
                }
                vertices.insert(full);
            }
        }
    }
    if vertices.is_empty() {
        return None;
    }
    let k = int(vertices.len() as i64);
    let mean: Vec<Prob> = (0..cols)
        .map(|j| vertices.iter().map(|v| &v[j]).sum::<Prob>() / &k)
        .collect();
    mean.iter().all(Signed::is_positive).then_some(mean)
}

fn balance_system(g: &Matrix, p: &Prob) -> (Matrix, Vec<Prob>) {
    let cols = g.first().map_or(0, Vec::len);
    let mut a = g.clone();
    a.push(vec![Prob::one(); cols]);
    let mut b = vec![p.clone(); g.len()];
    b.push(Prob::one());
    (a, b)
}

/// Strictly positive (x, r) for a fixed matrix, if any.
pub fn feasible_for(g: &[Vec<u8>], p: &Prob) -> Option<FeasibleWitness> {
    let gm = as_matrix(g);
    let (ar, br) = balance_system(&gm, p);
    let r = positive_solution(&ar, &br)?;
    let (ax, bx) = balance_system(&transpose(&gm), p);
    let x = positive_solution(&ax, &bx)?;
    Some(FeasibleWitness {
        g: g.to_vec(),
        x,
        r,
        p_u1: p.clone(),
    })
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..m).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(m, &mut cur, &mut out);
    out
}

fn permute_mask(mask: u32, perm: &[usize]) -> u32 {
    perm.iter()
        .enumerate()
        .fold(0, |acc, (to, &from)| acc | ((mask >> from & 1) << to))
}

/// Least sorted row-mask list over all column permutations; row order is
/// already quotiented out by sorting.
pub fn canonical_rows(rows: &[u32], perms: &[Vec<usize>]) -> Vec<u32> {
    perms
        .iter()
        .map(|p| {
            let mut v: Vec<u32> = rows.iter().map(|&r| permute_mask(r, p)).collect();
            v.sort_unstable();
            v
        })
        .min()
        .expect("at least the identity")
}

fn multisets(values: &[u32], n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(values: &[u32], start: usize, n: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..values.len() {
            cur.push(values[i]);
            rec(values, i, n, cur, out);
            cur.pop();
        }
    }
    rec(values, 0, n, &mut cur, &mut out);
    out
}

fn rows_to_matrix(rows: &[u32], m: usize) -> Vec<Vec<u8>> {
    rows.iter()
        .map(|&r| (0..m).map(|j| (r >> j & 1) as u8).collect())
        .collect()
}

/// All n×m decoding matrices (one per row/column-permutation class) that
/// admit strictly positive x and r, with a witness for each, in canonical
/// order. All-zero and all-one rows are skipped since they can never meet
/// a row balance of p with 0 < p < 1.
pub fn enumerate_decoding_systems(p_u1: &Prob, n: usize, m: usize) -> Result<Vec<FeasibleWitness>> {
    enumerate_with_cap(p_u1, n, m, DEFAULT_MATRIX_CAP)
}

pub fn enumerate_with_cap(p_u1: &Prob, n: usize, m: usize, cap: usize) -> Result<Vec<FeasibleWitness>> {
    check_p(p_u1)?;
    for (what, v) in [("rows", n), ("columns", m)] {
        if v < 2 {
            return Err(EpsError::InvalidParameter {
                name: "matrix size",
                value: format!("{what}={v}"),
                reason: "need at least 2",
            });
        }
        if v > cap {
            return Err(EpsError::BudgetExceeded {
                what: "decoding matrix dimension",
                value: v,
                cap,
            });
        }
    }
    let perms = permutations(m);
    let full = (1u32 << m) - 1;
    let values: Vec<u32> = (1..full).collect();
    let candidates = multisets(&values, n);
    Ok(candidates
        .par_iter()
        .filter(|rows| canonical_rows(rows, &perms) == **rows)
        .filter_map(|rows| feasible_for(&rows_to_matrix(rows, m), p_u1))
        .collect())
}

/// The mass shift along one row dependency: with Σ_A α_i G_i = Σ_B α_k G_k,
/// move ε α_i out of each A row and ε α_k into each B row, ε = min x_i/α_i.
/// Returns the shifted x (with at least one new zero), or `None` when the
/// rows are independent.
pub fn row_shift(w: &FeasibleWitness) -> Option<Vec<Prob>> {
    let gt = transpose(&as_matrix(&w.g));
    let c = null_space(&gt).into_iter().next()?;
    let eps = c
        .iter()
        .zip(&w.x)
        .filter(|(ci, _)| ci.is_positive())
        .map(|(ci, xi)| xi / ci)
        .min()
        .expect("a dependency among nonzero 0/1 rows has both signs");
    Some(w.x.iter().zip(&c).map(|(xi, ci)| xi - &eps * ci).collect())
}

fn drop_zero_rows(w: &FeasibleWitness, x: Vec<Prob>) -> FeasibleWitness {
    let keep: Vec<usize> = (0..x.len()).filter(|&i| x[i].is_positive()).collect();
    FeasibleWitness {
        g: keep.iter().map(|&i| w.g[i].clone()).collect(),
        x: keep.iter().map(|&i| x[i].clone()).collect(),
        r: w.r.clone(),
        p_u1: w.p_u1.clone(),
    }
}

/// One reduction step on linearly dependent rows; rows whose mass reaches
/// zero are removed. Independent rows are returned unchanged.
pub fn reduce_dependent_rows(w: &FeasibleWitness) -> FeasibleWitness {
    match row_shift(w) {
        Some(x) => drop_zero_rows(w, x),
        None => w.clone(),
    }
}

pub fn reduce_dependent_columns(w: &FeasibleWitness) -> FeasibleWitness {
    reduce_dependent_rows(&w.transposed()).transposed()
}

/// Alternates row and column reductions until both are independent.
pub fn reduce_to_fixpoint(w: &FeasibleWitness) -> FeasibleWitness {
    let mut cur = w.clone();
    loop {
        let next = reduce_dependent_columns(&reduce_dependent_rows(&cur));
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// For a square invertible G, the unique z with Gᵀ z = 1; then x = p z.
pub fn square_solution(w: &FeasibleWitness) -> Option<Vec<Prob>> {
    if w.rows() != w.cols() {
        return None;
    }
    let gm = as_matrix(&w.g);
    if rank(&gm) != w.rows() {
        return None;
    }
    solve_unique(&transpose(&gm), &vec![Prob::one(); w.cols()])
}
