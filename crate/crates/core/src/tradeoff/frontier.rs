use std::fmt::Write;

use serde::Serialize;

use super::decoding::enumerate_with_cap;
use crate::ciphers::{psi_exact, psi_floor, PartitionCodeSpec};
use crate::error::{EpsError, Result};
use crate::prob::{entropy, FiniteDist, JointSystem, Prob, Variable, TOLERANCE};
use crate::verify::{check_eps, key_metrics};

/// Appends independent randomness to the ciphertext: X' = (X, A).
pub fn pad_ciphertext(joint: &JointSystem, pad: &FiniteDist) -> Result<JointSystem> {
    check_eps(joint).require()?;
    let xl = joint.labels(Variable::X);
    let mut x_labels = Vec::with_capacity(xl.len() * pad.len());
    for x in xl {
        for a in pad.labels() {
            x_labels.push(format!("{x}|{a}"));
        }
    }
    let k = pad.len();
    let cells: Vec<((usize, usize, usize), Prob)> = joint
        .cells()
        .flat_map(|((u, r, x), p)| {
            pad.masses()
                .iter()
                .enumerate()
                .map(move |(a, pa)| ((u, r, x * k + a), p * pa))
        })
        .collect();
    JointSystem::new(
        joint.labels(Variable::U).to_vec(),
        joint.labels(Variable::R).to_vec(),
        x_labels,
        cells,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: u64,
    pub consumption: f64,
    pub divergence: f64,
    pub h_x: f64,
}

/// Floor-rounded partition codes at each θ, evaluated analytically so θ can
/// be far larger than any materialized key alphabet.
pub fn theta_sweep(source: &FiniteDist, thetas: &[u64]) -> Result<Vec<SweepRow>> {
    thetas
        .iter()
        .map(|&theta| {
            let code = psi_floor(source, theta)?;
            Ok(SweepRow {
                theta,
                consumption: code.consumption(source)?,
                divergence: code.divergence(source)?,
                h_x: code.h_x(),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow], precision: usize) -> String {
    let mut out = String::from("theta,consumption,divergence,h_x\n");
    for r in rows {
        writeln!(
            out,
            "{},{:.p$},{:.p$},{:.p$}",
            r.theta,
            r.consumption,
            r.divergence,
            r.h_x,
            p = precision
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffPoint {
    /// H(X) − log|U|.
    pub gamma: f64,
    /// I(R; UX).
    pub consumption: f64,
    pub h_x: f64,
    pub witness: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrontierBudget {
    /// Largest θ tried in the partition family.
    pub max_theta: u64,
    /// Largest decoding-matrix dimension tried for binary sources.
    pub max_matrix: usize,
}

impl Default for FrontierBudget {
    fn default() -> Self {
        Self {
            max_theta: 64,
            max_matrix: 4,
        }
    }
}

/// Ψ with Σψ = θ, every ψ ≥ 1, minimizing I(R;UX) = Σ P_i log(θ/ψ_i).
/// The objective is separable and concave in each ψ_i, so handing out the
/// units one at a time to the largest marginal gain is optimal.
pub fn best_partition(source: &FiniteDist, theta: u64) -> Result<PartitionCodeSpec> {
    let n = source.len() as u64;
    if theta < n {
        return Err(EpsError::ThetaTooSmall {
            theta,
            label: source.labels()[0].clone(),
        });
    }
    let p = source.to_f64_vec();
    let mut psi = vec![1u64; source.len()];
    for _ in n..theta {
        let best = (0..psi.len())
            .max_by(|&a, &b| {
                let ga = p[a] * ((psi[a] + 1) as f64 / psi[a] as f64).ln();
                let gb = p[b] * ((psi[b] + 1) as f64 / psi[b] as f64).ln();
                ga.partial_cmp(&gb).unwrap().then(b.cmp(&a))
            })
            .expect("nonempty");
        psi[best] += 1;
    }
    PartitionCodeSpec::new(psi)
}

struct Candidate {
    gamma: f64,
    consumption: f64,
    witness: String,
}

fn candidates(source: &FiniteDist, budget: FrontierBudget) -> Result<Vec<Candidate>> {
    let n = source.len();
    let log_n = (n as f64).log2();
    let mut out = vec![Candidate {
        gamma: 0.0,
        consumption: log_n,
        witness: "one-time pad".into(),
    }];
    if n == 1 {
        return Ok(out);
    }
    for theta in (n as u64 + 1)..=budget.max_theta {
        let code = best_partition(source, theta)?;
        out.push(Candidate {
            gamma: code.h_x() - log_n,
            consumption: code.consumption(source)?,
            witness: format!("partition {:?}", code.psi()),
        });
    }
    if let Ok(code) = psi_exact(source) {
        out.push(Candidate {
            gamma: code.h_x() - log_n,
            consumption: code.consumption(source)?,
            witness: format!("partition {:?}", code.psi()),
        });
    }
    if n == 2 && budget.max_matrix >= 2 {
        let p1 = source.masses()[1].clone();
        for rows in 2..=budget.max_matrix {
            for cols in 2..=budget.max_matrix {
                for w in enumerate_with_cap(&p1, rows, cols, budget.max_matrix)? {
                    let joint = w.to_joint();
                    let m = key_metrics(&joint)?;
                    out.push(Candidate {
                        gamma: entropy(&joint.marginal(Variable::X)) - log_n,
                        consumption: m.consumption,
                        witness: format!("decoding matrix {}", w.matrix_string()),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Upper bounds on the least consumption at each ciphertext-entropy excess
/// γ, from constructive systems only. Any system can be padded up to a
/// larger γ at no cost, so each grid point takes the best candidate at or
/// below it. A candidate only displaces the incumbent when it is lower by
/// more than the float tolerance.
pub fn tradeoff_frontier(
    source: &FiniteDist,
    gamma_grid: &[f64],
    budget: FrontierBudget,
) -> Result<Vec<TradeoffPoint>> {
    if let Some(&g) = gamma_grid.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(EpsError::OutOfRange(g));
    }
    let cands = candidates(source, budget)?;
    let log_n = (source.len() as f64).log2();
    Ok(gamma_grid
        .iter()
        .map(|&gamma| {
            let mut best = &cands[0];
            for c in &cands[1..] {
                if c.gamma <= gamma + TOLERANCE && c.consumption < best.consumption - TOLERANCE {
                    best = c;
                }
            }
            TradeoffPoint {
                gamma,
                consumption: best.consumption,
                h_x: log_n + gamma,
                witness: if best.gamma < gamma - TOLERANCE {
                    format!("{} + pad", best.witness)
                } else {
                    best.witness.clone()
                },
            }
        })
        .collect())
}

pub fn frontier_csv(points: &[TradeoffPoint], precision: usize) -> String {
    let mut out = String::from("gamma,consumption,h_x,witness\n");
    for p in points {
        writeln!(
            out,
            "{:.prec$},{:.prec$},{:.prec$},\"{}\"",
            p.gamma,
            p.consumption,
            p.h_x,
            p.witness,
            prec = precision
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ciphers::{build_one_time_pad, induced_joint};
    use crate::fixtures::skewed_four;
    use crate::prob::{binary_entropy, info_report};

    #[test]
    fn padding_keeps_consumption() {
        let j = induced_joint(&build_one_time_pad(&FiniteDist::uniform(2).unwrap()));
        let padded = pad_ciphertext(&j, &FiniteDist::uniform(2).unwrap()).unwrap();
        assert!(check_eps(&padded).is_eps());
        let rep = info_report(&padded);
        assert!((rep.h_x - 2.0).abs() < 1e-12);
        assert!((rep.i_r_uxjoint - 1.0).abs() < 1e-12);

        let same = pad_ciphertext(&j, &FiniteDist::point("a")).unwrap();
        assert_eq!(same.joint().num_cells(), j.joint().num_cells());
        assert_eq!(info_report(&same), info_report(&j));
    }

    #[test]
    fn padded_otp_point() {
        let j = induced_joint(&build_one_time_pad(&FiniteDist::uniform(4).unwrap()));
        let pad = FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap();
        let padded = pad_ciphertext(&j, &pad).unwrap();
        let m = key_metrics(&padded).unwrap();
        let gamma = entropy(&padded.marginal(Variable::X)) - 2.0;
        assert!((gamma - binary_entropy(0.9).unwrap()).abs() < 1e-9);
        assert!((gamma - 0.469).abs() < 5e-4);
        assert!((m.consumption - 2.0).abs() < 1e-9);
    }

    #[test]
    fn sweep_examples() {
        let rows = theta_sweep(&FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap(), &[10]).unwrap();
        assert!(rows[0].divergence.abs() < 1e-12);
        assert!((rows[0].consumption - 0.4690).abs() < 5e-4);
        let src = FiniteDist::from_fractions(&[(7071, 10000), (2929, 10000)]).unwrap();
        let rows = theta_sweep(&src, &[100, 1000, 10000]).unwrap();
        assert!((rows[0].divergence - 0.014_499_6).abs() < 1e-6);
        assert!(rows[2].divergence.abs() < 1e-9);
        assert!(theta_sweep(&src, &[2]).is_err());
        let csv = sweep_csv(&rows, 4);
        assert!(csv.starts_with("theta,consumption,divergence,h_x\n100,"));
    }

    #[test]
    fn best_partition_matches_exact_when_possible() {
        let src = FiniteDist::from_fractions(&[(1, 2), (1, 4), (1, 4)]).unwrap();
        assert_eq!(best_partition(&src, 4).unwrap().psi(), &[2, 1, 1]);
        assert_eq!(best_partition(&src, 8).unwrap().psi(), &[4, 2, 2]);
        assert!(best_partition(&src, 2).is_err());
    }

    #[test]
    fn frontier_is_monotone_and_anchored() {
        let src = skewed_four();
        let grid: Vec<f64> = (0..10).map(|i| i as f64 * 0.25).collect();
        let pts = tradeoff_frontier(&src, &grid, FrontierBudget::default()).unwrap();
        assert_eq!(pts[0].consumption, 2.0);
        assert!(pts.windows(2).all(|w| w[1].consumption <= w[0].consumption));
        let h = entropy(&src);
        assert!(pts.iter().all(|p| p.consumption >= h - 1e-9));
        // θ = 10 is exact: consumption reaches H(U) by γ = log 10 − 2.
        let at = tradeoff_frontier(&src, &[10f64.log2() - 2.0], FrontierBudget::default()).unwrap();
        assert!((at[0].consumption - h).abs() < 1e-9);
        let csv = frontier_csv(&pts, 4);
        assert!(csv.starts_with("gamma,consumption,h_x,witness\n0.0000,2.0000,2.0000,\"one-time pad\""));
    }

    #[test]
    fn binary_frontier_uses_matrices() {
        let src = FiniteDist::from_fractions(&[(3, 5), (2, 5)]).unwrap();
        let g = 1.921_928_094_887_362 - 1.0;
        let pts = tradeoff_frontier(&src, &[0.0, g], FrontierBudget::default()).unwrap();
        assert_eq!(pts[0].consumption, 1.0);
        assert!((pts[1].consumption - entropy(&src)).abs() < 1e-9);
        assert!(pts[1].witness.starts_with("decoding matrix"));
        assert!(tradeoff_frontier(&src, &[-1.0], FrontierBudget::default()).is_err());
    }
}
