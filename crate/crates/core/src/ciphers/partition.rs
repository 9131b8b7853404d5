//! One-time pad and partition codes.
//!
//! A partition code spreads message `i` uniformly over `ψ_i` consecutive
//! slots of `{0, …, θ−1}` and masks the slot with a uniform key:
//! `X = (A + R) mod θ`. The one-time pad is the case `Ψ = (1, …, 1)`.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::spec::{CipherSpec, Decoder};
use crate::error::{EpsError, Result};
use crate::prob::rational::{bigint_to_u64, floor_times, lcm_of_denominators};
use crate::prob::{ratio, to_f64, FiniteDist, Prob};

/// Ψ, θ = Σψ and the cell offsets `[0, ψ₁, ψ₁+ψ₂, …, θ]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionCodeSpec {
    psi: Vec<u64>,
    theta: u64,
    cumulative: Vec<u64>,
}

impl PartitionCodeSpec {
    pub fn new(psi: Vec<u64>) -> Result<Self> {
        if psi.is_empty() {
            return Err(EpsError::EmptySupport);
        }
        if let Some(index) = psi.iter().position(|&p| p == 0) {
            return Err(EpsError::ZeroPsi { index });
        }
        let mut cumulative = Vec::with_capacity(psi.len() + 1);
        let mut acc = 0u64;
        cumulative.push(0);
        for &p in &psi {
            acc = acc.checked_add(p).ok_or(EpsError::InvalidParameter {
                name: "theta",
                value: "sum of psi".into(),
                reason: "overflows 64 bits",
            })?;
            cumulative.push(acc);
        }
        Ok(Self {
            psi,
            theta: acc,
            cumulative,
        })
    }

    pub fn psi(&self) -> &[u64] {
        &self.psi
    }

    pub fn theta(&self) -> u64 {
        self.theta
    }

    pub fn cumulative(&self) -> &[u64] {
        &self.cumulative
    }

    /// Q(i) = ψ_i / θ over all cells (including a slack cell if present).
    pub fn q_dist(&self) -> FiniteDist {
        FiniteDist::from_weights(&self.psi).expect("psi positive")
    }

    fn check_source(&self, source: &FiniteDist) -> Result<()> {
        let l = source.len();
        if self.psi.len() != l && self.psi.len() != l + 1 {
            return Err(EpsError::LengthMismatch {
                what: "psi vs source support",
                left: self.psi.len(),
                right: l,
            });
        }
        Ok(())
    }

    /// D(P_U ‖ Q_U) in bits. A trailing slack cell carries no source mass.
    pub fn divergence(&self, source: &FiniteDist) -> Result<f64> {
        self.check_source(source)?;
        let theta = self.theta as i64;
        let mut d = 0.0;
        for (p, &psi) in source.masses().iter().zip(&self.psi) {
            let q = ratio(psi as i64, theta);
            if *p != q {
                d += to_f64(p) * to_f64(&(p / q)).log2();
            }
        }
        Ok(d.max(0.0))
    }

    /// Σ P_U(i) log₂(θ / ψ_i).
    pub fn consumption(&self, source: &FiniteDist) -> Result<f64> {
        self.check_source(source)?;
        let theta = self.theta as f64;
        Ok(source
            .masses()
            .iter()
            .zip(&self.psi)
            .map(|(p, &psi)| to_f64(p) * (theta / psi as f64).log2())
            .sum())
    }

    /// H(X) = H(R) = log₂ θ.
    pub fn h_x(&self) -> f64 {
        (self.theta as f64).log2()
    }

    /// ⌈log₂ θ⌉, the integer number of binary channel uses.
    pub fn channel_uses(&self) -> u32 {
        let mut k = 0u32;
        while (1u128 << k) < self.theta as u128 {
            k += 1;
        }
        k
    }
}

/// Largest θ for which the full encoder/joint tables are materialized.
pub const MAX_MATERIALIZED_THETA: u64 = 4096;

/// X = (U + R) mod M with R uniform on the message alphabet.
pub fn build_one_time_pad(source: &FiniteDist) -> CipherSpec {
    let psi = vec![1; source.len()];
    let mut spec = build_partition_code(source, &psi).expect("all-ones psi is valid");
    spec.scheme = "otp".into();
    spec
}

pub fn build_partition_code(source: &FiniteDist, psi: &[u64]) -> Result<CipherSpec> {
    let code = PartitionCodeSpec::new(psi.to_vec())?;
    build_partition_from_spec(source, &code)
}

pub fn build_partition_from_spec(source: &FiniteDist, code: &PartitionCodeSpec) -> Result<CipherSpec> {
    code.check_source(source)?;
    let theta = code.theta;
    if theta > MAX_MATERIALIZED_THETA {
        return Err(EpsError::BudgetExceeded {
            what: "theta",
            value: theta as usize,
            cap: MAX_MATERIALIZED_THETA as usize,
        });
    }
    let t = theta as usize;
    let labels: Vec<String> = (0..t).map(|i| i.to_string()).collect();
    let key = FiniteDist::uniform(t)?;
    let encoder = (0..source.len())
        .map(|u| {
            let psi = code.psi[u];
            let start = code.cumulative[u] as usize;
            let weight = ratio(1, psi as i64);
            (0..t)
                .map(|r| {
                    (0..psi as usize)
                        .map(|a| (weight.clone(), (start + a + r) % t))
                        .collect()
                })
                .collect()
        })
        .collect();
    let scheme = format!(
        "partition({})",
        code.psi
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    CipherSpec::from_parts(
        scheme,
        source.clone(),
        key,
        labels,
        encoder,
        Decoder::Modular {
            theta,
            cumulative: code.cumulative.clone(),
        },
    )
}

/// ψ_i = θ·P_U(i) with θ the least common denominator, so Q_U = P_U.
pub fn psi_exact(source: &FiniteDist) -> Result<PartitionCodeSpec> {
    let lcm = lcm_of_denominators(source.masses());
    bigint_to_u64(&lcm, "theta")?;
    let theta_q = Prob::from_integer(lcm);
    let psi = source
        .masses()
        .iter()
        .map(|p| {
            (p * &theta_q)
                .to_integer()
                .to_u64()
                .expect("theta * p is at most theta")
        })
        .collect();
    PartitionCodeSpec::new(psi)
}

/// ψ_i = ⌊P_U(i)·θ⌋ plus a slack cell holding the remainder (dropped when empty).
pub fn psi_floor(source: &FiniteDist, theta: u64) -> Result<PartitionCodeSpec> {
    let mut psi = Vec::with_capacity(source.len() + 1);
    for (label, p) in source.iter() {
        let f = floor_times(p, theta);
        if f.is_zero() {
            return Err(EpsError::ThetaTooSmall {
                theta,
                label: label.to_string(),
            });
        }
        psi.push(bigint_to_u64(&f, "psi")?);
    }
    let used: u64 = psi.iter().sum();
    let rest = theta.checked_sub(used).expect("floors never exceed theta");
    if rest > 0 {
        psi.push(rest);
    }
    PartitionCodeSpec::new(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ciphers::spec::{decrypt, encrypt, induced_joint};
    use crate::prob::{entropy, info_report, is_independent, Variable};

    fn labeled(masses: &[(i64, i64)], first: usize) -> FiniteDist {
        let labels: Vec<String> = (first..first + masses.len()).map(|i| i.to_string()).collect();
        FiniteDist::new(labels, masses.iter().map(|&(n, d)| ratio(n, d)).collect()).unwrap()
    }

    #[test]
    fn psi_exact_examples() {
        let c = psi_exact(&FiniteDist::from_fractions(&[(1, 2), (1, 4), (1, 4)]).unwrap()).unwrap();
        assert_eq!((c.theta(), c.psi()), (4, &[2, 1, 1][..]));
        let c = psi_exact(&FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap()).unwrap();
        assert_eq!((c.theta(), c.psi()), (10, &[9, 1][..]));
        let c = psi_exact(&FiniteDist::from_fractions(&[(3, 5), (2, 5)]).unwrap()).unwrap();
        assert_eq!((c.theta(), c.psi()), (5, &[3, 2][..]));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn psi_floor_examples() {
        let src = FiniteDist::from_fractions(&[(7071, 10000), (2929, 10000)]).unwrap();
        let c = psi_floor(&src, 100).unwrap();
        assert_eq!(c.psi(), &[70, 29, 1]);
        // Oracle: direct evaluation of Σ p log2(p θ / ψ).
        let oracle = 0.7071f64 * (0.7071f64 / 0.70).log2() + 0.2929f64 * (0.2929f64 / 0.29).log2();
        assert!((c.divergence(&src).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 0.0145).abs() < 1e-4);

        let half = FiniteDist::uniform(2).unwrap();
        let c = psi_floor(&half, 4).unwrap();
        assert_eq!(c.psi(), &[2, 2]);
        assert_eq!(c.divergence(&half).unwrap(), 0.0);

        let src = FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap();
        match psi_floor(&src, 3) {
            Err(EpsError::ThetaTooSmall { theta: 3, label }) => assert_eq!(label, "1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn large_theta_does_not_wrap() {
        let src = FiniteDist::from_fractions(&[(1, 3), (2, 3)]).unwrap();
        let c = psi_floor(&src, 1_000_000).unwrap();
        assert_eq!(c.psi(), &[333_333, 666_666, 1]);
        assert_eq!(c.theta(), 1_000_000);
        assert!(c.divergence(&src).unwrap() < 1e-5);
        assert!(build_partition_from_spec(&src, &c).is_err());
    }

    #[test]
    fn zero_psi_and_length_mismatch() {
        let src = FiniteDist::uniform(2).unwrap();
        assert!(matches!(
            build_partition_code(&src, &[1, 0]),
            Err(EpsError::ZeroPsi { index: 1 })
        ));
        assert!(matches!(
            build_partition_code(&src, &[1, 1, 1, 1]),
            Err(EpsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn encrypt_decrypt_examples() {
        // Ψ=(1,1): u=2 (index 1), r=1 → A=1, x=0.
        let s = build_partition_code(&labeled(&[(1, 2), (1, 2)], 1), &[1, 1]).unwrap();
        assert_eq!(encrypt(&s, 1, 1, 0).unwrap(), 0);
        assert_eq!(decrypt(&s, 0, 1).unwrap(), 1);
        // Ψ=(2,1), θ=3: u=2, r=2 → A=2, x=1.
        let s = build_partition_code(&labeled(&[(2, 3), (1, 3)], 1), &[2, 1]).unwrap();
        assert_eq!(encrypt(&s, 1, 2, 0).unwrap(), 1);
        assert_eq!(decrypt(&s, 1, 2).unwrap(), 1);
        // OTP M=4: u=3, r=2 → x=1.
        let s = build_one_time_pad(&FiniteDist::uniform(4).unwrap());
        assert_eq!(encrypt(&s, 3, 2, 0).unwrap(), 1);
        assert_eq!(decrypt(&s, 1, 2).unwrap(), 3);
        assert!(matches!(
            encrypt(&s, 4, 0, 0),
            Err(EpsError::OutOfAlphabet { .. })
        ));
        assert!(matches!(
            encrypt(&s, 0, 0, 1),
            Err(EpsError::OutOfAlphabet { .. })
        ));
    }

    #[test]
    fn slack_cells_never_decode() {
        let src = FiniteDist::from_fractions(&[(2, 3), (1, 3)]).unwrap();
        let code = psi_floor(&src, 4).unwrap();
        assert_eq!(code.psi(), &[2, 1, 1]);
        let s = build_partition_from_spec(&src, &code).unwrap();
        s.check_round_trip().unwrap();
        // A = 3 is the slack slot: x = 3 with r = 0.
        assert!(matches!(decrypt(&s, 3, 0), Err(EpsError::InvalidPair { .. })));
        let j = induced_joint(&s);
        assert!(is_independent(&j, &[Variable::U], &[Variable::X]).unwrap());
        // Q_U differs from P_U here, so the ciphertext leaks about the key.
        assert!(!is_independent(&j, &[Variable::X], &[Variable::R]).unwrap());
    }

    #[test]
    fn one_time_pad_joints() {
        let s = build_one_time_pad(&FiniteDist::uniform(2).unwrap());
        let j = induced_joint(&s);
        assert_eq!(j.joint().num_cells(), 4);
        assert!(j.cells().all(|(_, p)| *p == ratio(1, 4)));

        let s = build_one_time_pad(&FiniteDist::point("only"));
        let rep = info_report(&induced_joint(&s));
        assert_eq!((rep.h_x, rep.h_r), (0.0, 0.0));

        let src = FiniteDist::from_fractions(&[(3, 10), (3, 10), (3, 10), (1, 10)]).unwrap();
        let rep = info_report(&induced_joint(&build_one_time_pad(&src)));
        assert!((rep.i_r_uxjoint - 2.0).abs() < 1e-12);
        assert!(rep.i_r_uxjoint > entropy(&src));
    }

    #[test]
    fn partition_formulas_match_joint() {
        let src = FiniteDist::from_weights(&[1, 1, 1, 3, 4, 7, 11]).unwrap();
        let code = psi_exact(&src).unwrap();
        assert_eq!(code.theta(), 28);
        let rep = info_report(&induced_joint(&build_partition_from_spec(&src, &code).unwrap()));
        assert!((rep.i_r_uxjoint - code.consumption(&src).unwrap()).abs() < 1e-9);
        assert!((rep.i_r_uxjoint - entropy(&src)).abs() < 1e-9);
        assert!((rep.h_x - 28f64.log2()).abs() < 1e-9);
        assert_eq!(code.channel_uses(), 5);

        // Ψ' = (1,1) on (0.9, 0.1): consumption 1, H(X) = 1.
        let src = FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap();
        let c = PartitionCodeSpec::new(vec![1, 1]).unwrap();
        assert!((c.consumption(&src).unwrap() - 1.0).abs() < 1e-12);
        let rep = info_report(&induced_joint(&build_partition_from_spec(&src, &c).unwrap()));
        assert!((rep.i_r_uxjoint - 1.0).abs() < 1e-9);
        assert!((rep.h_x - 1.0).abs() < 1e-12);
    }
}
