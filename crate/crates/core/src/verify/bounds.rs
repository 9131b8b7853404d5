use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::eps::check_eps;
use crate::error::{EpsError, Result};
use crate::prob::{
    binary_entropy, entropy, int, is_independent, to_f64, FiniteDist, JointSystem, Prob,
    Variable, TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    OneShot,
    MinKey,
    MinChannel,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::OneShot => "one_shot",
            Regime::MinKey => "min_key",
            Regime::MinChannel => "min_channel",
        })
    }
}

impl FromStr for Regime {
    type Err = EpsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one_shot" | "one-shot" => Ok(Regime::OneShot),
            "min_key" | "min-key" => Ok(Regime::MinKey),
            "min_channel" | "min-channel" => Ok(Regime::MinChannel),
            _ => Err(EpsError::InvalidParameter {
                name: "regime",
                value: s.into(),
                reason: "expected one_shot, min_key or min_channel",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Exact,
    Float,
}

/// One evaluated inequality or equality condition. `lhs`/`rhs` are exact
/// rationals for exact checks and decimal renderings otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub lhs_value: f64,
    pub rhs_value: f64,
    pub ok: bool,
    pub kind: CheckKind,
}

impl Check {
    fn exact(name: impl Into<String>, lhs: &Prob, rhs: &Prob, ok: bool) -> Self {
        Self {
            name: name.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            lhs_value: to_f64(lhs),
            rhs_value: to_f64(rhs),
            ok,
            kind: CheckKind::Exact,
        }
    }

    fn float(name: impl Into<String>, lhs: f64, rhs: f64, ok: bool) -> Self {
        Self {
            name: name.into(),
            lhs: format!("{lhs:.12}"),
            rhs: format!("{rhs:.12}"),
            lhs_value: lhs,
            rhs_value: rhs,
            ok,
            kind: CheckKind::Float,
        }
    }

    fn flag(name: impl Into<String>, lhs: bool, rhs: bool) -> Self {
        Self {
            name: name.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            lhs_value: lhs as u8 as f64,
            rhs_value: rhs as u8 as f64,
            ok: lhs == rhs,
            kind: CheckKind::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub regime: Regime,
    pub checks: Vec<Check>,
}

impl BoundReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const MAX_PX: &str = "max P_X <= 1/|U|";
pub const MAX_PR: &str = "max P_R <= 1/|U|";
pub const HX_LOG_U: &str = "H(X) >= log|U|";
pub const HR_LOG_U: &str = "H(R) >= log|U|";
pub const HX_EQUALITY: &str = "H(X) = log|U| iff P_X uniform on |U| symbols";
pub const HR_EQUALITY: &str = "H(R) = log|U| iff P_R uniform on |U| symbols";
pub const MAX_PX_MIN_PU: &str = "max P_X <= min P_U";
pub const MAX_PR_MIN_PU: &str = "max P_R <= min P_U";
pub const MIN_H_FLOOR_BOUND: &str =
    "min{H(X),H(R)} >= h(pi*floor(1/pi)) + pi*floor(1/pi)*log floor(1/pi)";
pub const FLOOR_BOUND_LOG: &str = "h(pi*floor(1/pi)) + pi*floor(1/pi)*log floor(1/pi) >= log(1/pi)";
pub const FLOOR_BOUND_EQUALITY: &str = "floor bound = log(1/pi) iff 1/pi is an integer";
pub const NONUNIFORM_STRICT: &str = "P_U non-uniform => min{H(X),H(R)} > log|U|";
pub const MIN_CHANNEL_CONSUMPTION: &str = "I(R;UX) = log|U|";
pub const MIN_CHANNEL_DETERMINISTIC: &str = "H(X|RU) = 0 (one ciphertext per (u,r))";
pub const MIN_CHANNEL_UNIFORM_X: &str = "P_X uniform on |U| symbols";

/// The floor bound `h(π⌊1/π⌋) + π⌊1/π⌋ log⌊1/π⌋` and `log(1/π)`, in bits.
pub fn cor2_bound(pi: &Prob) -> Result<(f64, f64)> {
    let pv = to_f64(pi);
    if !(pv > 0.0 && pv <= 1.0) {
        return Err(EpsError::OutOfRange(pv));
    }
    let k = (Prob::one() / pi).floor();
    let t = pi * &k;
    let kf = k.to_integer().to_f64().expect("finite");
    let floor_bound = binary_entropy(to_f64(&t))? + to_f64(&t) * kf.log2();
    Ok((floor_bound, -pv.log2()))
}

fn is_uniform_on(dist: &FiniteDist, n: usize) -> bool {
    dist.len() == n && dist.is_uniform()
}

fn one_shot_checks(n: usize, dist: &FiniteDist, max_name: &str, h_name: &str, eq_name: &str) -> Vec<Check> {
    let inv = Prob::new(1.into(), (n as i64).into());
    let log_n = (n as f64).log2();
    let h = entropy(dist);
    vec![
        Check::exact(max_name, dist.max_mass(), &inv, *dist.max_mass() <= inv),
        Check::float(h_name, h, log_n, h >= log_n - TOLERANCE),
        Check::flag(eq_name, (h - log_n).abs() < TOLERANCE, is_uniform_on(dist, n)),
    ]
}

/// Evaluates every bound that applies in `regime`. The joint must be EPS;
/// `min_key` also needs I(X;R)=0 exactly and `min_channel` needs
/// H(X) = log|U|.
pub fn check_bounds(joint: &JointSystem, regime: Regime) -> Result<BoundReport> {
    check_eps(joint).require()?;
    let pu = joint.marginal(Variable::U);
    let px = joint.marginal(Variable::X);
    let pr = joint.marginal(Variable::R);
    let n = pu.len();
    let log_n = (n as f64).log2();
    let mut checks = Vec::new();
    match regime {
        Regime::OneShot => {
            checks.extend(one_shot_checks(n, &px, MAX_PX, HX_LOG_U, HX_EQUALITY));
            checks.extend(one_shot_checks(n, &pr, MAX_PR, HR_LOG_U, HR_EQUALITY));
        }
        Regime::MinKey => {
            if !is_independent(joint, &[Variable::X], &[Variable::R])? {
                return Err(EpsError::RegimePrecondition(
                    "min_key needs I(X;R)=0 exactly".into(),
                ));
            }
            let pi = pu.min_mass().clone();
            checks.push(Check::exact(MAX_PX_MIN_PU, px.max_mass(), &pi, *px.max_mass() <= pi));
            checks.push(Check::exact(MAX_PR_MIN_PU, pr.max_mass(), &pi, *pr.max_mass() <= pi));
            let (floor_bound, log_inv) = cor2_bound(&pi)?;
            let h_min = entropy(&px).min(entropy(&pr));
            checks.push(Check::float(
                MIN_H_FLOOR_BOUND,
                h_min,
                floor_bound,
                h_min >= floor_bound - TOLERANCE,
            ));
            checks.push(Check::float(
                FLOOR_BOUND_LOG,
                floor_bound,
                log_inv,
                floor_bound >= log_inv - TOLERANCE,
            ));
            let inv = Prob::one() / &pi;
            checks.push(Check::flag(
                FLOOR_BOUND_EQUALITY,
                (floor_bound - log_inv).abs() < TOLERANCE,
                inv.is_integer(),
            ));
            if !pu.is_uniform() {
                checks.push(Check::float(
                    NONUNIFORM_STRICT,
                    h_min,
                    log_n,
                    h_min > log_n + TOLERANCE,
                ));
            }
        }
        Regime::MinChannel => {
            let h_x = entropy(&px);
            if (h_x - log_n).abs() >= TOLERANCE {
                return Err(EpsError::RegimePrecondition(format!(
                    "min_channel needs H(X) = log|U| = {log_n:.6}, got {h_x:.6}"
                )));
            }
            let consumption = joint.mutual_info(&[Variable::R], &[Variable::U, Variable::X]);
            checks.push(Check::float(
                MIN_CHANNEL_CONSUMPTION,
                consumption,
                log_n,
                (consumption - log_n).abs() < TOLERANCE,
            ));
            let mut per_ur: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for ((u, r, _), _) in joint.cells() {
                *per_ur.entry((u, r)).or_default() += 1;
            }
            let widest = per_ur.values().copied().max().unwrap_or(0);
            checks.push(Check::exact(
                MIN_CHANNEL_DETERMINISTIC,
                &int(widest as i64),
                &int(1),
                widest == 1,
            ));
            checks.push(Check::flag(MIN_CHANNEL_UNIFORM_X, is_uniform_on(&px, n), true));
        }
    }
    Ok(BoundReport { regime, checks })
}

/// Screens a candidate key law for a source with `num_messages` symbols
/// against the one-shot necessary conditions, before any cipher exists.
pub fn check_candidate_key(num_messages: usize, key: &FiniteDist) -> Result<BoundReport> {
    if num_messages == 0 {
        return Err(EpsError::EmptySupport);
    }
    let inv = Prob::new(1.into(), (num_messages as i64).into());
    let log_n = (num_messages as f64).log2();
    let h = entropy(key);
    Ok(BoundReport {
        regime: Regime::OneShot,
        checks: vec![
            Check::exact(MAX_PR, key.max_mass(), &inv, *key.max_mass() <= inv),
            Check::float(HR_LOG_U, h, log_n, h >= log_n - TOLERANCE),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ciphers::{build_one_time_pad, build_partition_code, induced_joint};
    use crate::fixtures::example3_joint;
    use crate::prob::ratio;

    #[test]
    fn example1_candidates() {
        let first = FiniteDist::from_fractions(&[(4, 10), (2, 10), (2, 10), (2, 10)]).unwrap();
        let rep = check_candidate_key(4, &first).unwrap();
        assert!(!rep.get(HR_LOG_U).unwrap().ok);
        let second = FiniteDist::from_fractions(&[(4, 10), (15, 100), (15, 100), (15, 100), (15, 100)]).unwrap();
        let rep = check_candidate_key(4, &second).unwrap();
        assert!(rep.get(HR_LOG_U).unwrap().ok);
        let c = rep.get(MAX_PR).unwrap();
        assert!(!c.ok);
        assert_eq!((c.lhs.as_str(), c.rhs.as_str()), ("2/5", "1/4"));
    }

    #[test]
    fn otp_one_shot_and_min_channel() {
        let src = FiniteDist::from_fractions(&[(3, 10), (3, 10), (3, 10), (1, 10)]).unwrap();
        let j = induced_joint(&build_one_time_pad(&src));
        let rep = check_bounds(&j, Regime::OneShot).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        let rep = check_bounds(&j, Regime::MinChannel).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        // Skewed OTP has I(X;R) > 0.
        assert!(matches!(
            check_bounds(&j, Regime::MinKey),
            Err(EpsError::RegimePrecondition(_))
        ));
    }

    #[test]
    fn partition_code_fails_min_channel_precondition() {
        let src = FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap();
        let j = induced_joint(&build_partition_code(&src, &[9, 1]).unwrap());
        assert!(matches!(
            check_bounds(&j, Regime::MinChannel),
            Err(EpsError::RegimePrecondition(_))
        ));
        let rep = check_bounds(&j, Regime::MinKey).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        let rep = check_bounds(&j, Regime::OneShot).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
    }

    #[test]
    fn example3_min_key() {
        let j = example3_joint();
        let rep = check_bounds(&j, Regime::MinKey).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        let c = rep.get(MAX_PX_MIN_PU).unwrap();
        assert_eq!((c.lhs.as_str(), c.rhs.as_str()), ("2/5", "2/5"));
        let h_x = entropy(&j.marginal(Variable::X));
        assert!((h_x - 1.921_928_094_887_362).abs() < 1e-12);
        assert!(h_x < 5f64.log2());
    }

    #[test]
    fn floor_bound_values() {
        let (b, l) = cor2_bound(&ratio(1, 4)).unwrap();
        assert!((b - 2.0).abs() < 1e-12 && (l - 2.0).abs() < 1e-12);
        let (b, l) = cor2_bound(&ratio(3, 10)).unwrap();
        assert!((b - 1.895_461_844_238_322).abs() < 1e-9);
        assert!(b > l);
        assert!((l - 1.736_965_594_166_206).abs() < 1e-9);
        assert!(cor2_bound(&ratio(0, 1)).is_err());
    }

    #[test]
    fn wider_uniform_ciphertext_is_strict() {
        // X uniform on 4 symbols for a binary source: no equality, and the
        // iff check agrees with that.
        let j = induced_joint(&build_partition_code(&FiniteDist::uniform(2).unwrap(), &[2, 2]).unwrap());
        let rep = check_bounds(&j, Regime::OneShot).unwrap();
        let eq = rep.get(HX_EQUALITY).unwrap();
        assert!(eq.ok);
        assert_eq!(eq.lhs, "false");
        assert!(rep.get(HX_LOG_U).unwrap().lhs_value > 1.5);
    }

    #[test]
    fn perturbed_otp_is_refused() {
        let mut cells = vec![];
        for (u, r, x, p) in [(0, 0, 0, (1, 8)), (0, 1, 1, (3, 8)), (1, 0, 1, (1, 4)), (1, 1, 0, (1, 4))] {
            cells.push((u.to_string(), r.to_string(), x.to_string(), ratio(p.0, p.1)));
        }
        let j = JointSystem::from_labeled(cells).unwrap();
        assert!(matches!(check_bounds(&j, Regime::OneShot), Err(EpsError::NotEps(m)) if m.contains("I(U;X)")));
    }
}
