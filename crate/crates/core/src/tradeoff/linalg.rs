//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::prob::Prob;

pub type Matrix = Vec<Vec<Prob>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Prob::one() / &m[row][col];
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..cols {
                    let delta = &f * &m[row][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut c = m.clone();
    rref(&mut c).len()
}

/// A basis of { c : M c = 0 }, one vector per free column, each scaled so
/// that its first nonzero entry is positive.
pub fn null_space(m: &Matrix) -> Vec<Vec<Prob>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = m.clone();
    let pivots = rref(&mut r);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Prob::zero(); cols];
        v[free] = Prob::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r[i][free].clone();
        }
        if let Some(first) = v.iter().find(|c| !c.is_zero()) {
            if *first < Prob::zero() {
                for c in v.iter_mut() {
                    *c = -c.clone();
                }
            }
        }
        basis.push(v);
    }
    basis
}

/// The unique solution of `A z = b`, or `None` when there is none or many.
pub fn solve_unique(a: &Matrix, b: &[Prob]) -> Option<Vec<Prob>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) || pivots.len() != cols {
        return None;
    }
    Some((0..cols).map(|i| aug[i][cols].clone()).collect())
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{int, ratio};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = null_space(&a);
        assert_eq!(ns, vec![vec![int(1), int(-1), int(0)]]);
        for v in &ns {
            for row in &a {
                let dot: Prob = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn unique_solutions() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let z = solve_unique(&a, &[int(3), int(4)]).unwrap();
        assert_eq!(z, vec![int(1), int(1)]);
        let singular = m(&[&[1, 1], &[2, 2]]);
        assert!(solve_unique(&singular, &[int(1), int(2)]).is_none());
        assert!(solve_unique(&singular, &[int(1), int(3)]).is_none());
        let over = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(
            solve_unique(&over, &[ratio(1, 2), ratio(1, 3), ratio(5, 6)]).unwrap(),
            vec![ratio(1, 2), ratio(1, 3)]
        );
        assert!(solve_unique(&over, &[ratio(1, 2), ratio(1, 3), ratio(1, 6)]).is_none());
    }
}
