//! Small hand-specified systems used by tests, the CLI and the tables.

use crate::prob::{ratio, FiniteDist, JointSystem};

/// P_U = (0.3, 0.3, 0.3, 0.1).
pub fn skewed_four() -> FiniteDist {
    FiniteDist::from_fractions(&[(3, 10), (3, 10), (3, 10), (1, 10)]).expect("valid")
}

/// The weights (1,1,1,3,4,7,11) over 28.
pub fn table1_source() -> FiniteDist {
    FiniteDist::from_weights(&TABLE1_PHI).expect("valid")
}

pub const TABLE1_PHI: [u64; 7] = [1, 1, 1, 3, 4, 7, 11];

/// P_U = (0.9, 0.1).
pub fn table2_source() -> FiniteDist {
    FiniteDist::from_fractions(&[(9, 10), (1, 10)]).expect("valid")
}

/// Binary source with P_U(0) = 3/5, X and R independent on {0,1,2,3} with
/// masses (2/5,1/5,1/5,1/5). U = 0 iff exactly one of X, R is 0, or X = R ≠ 0.
pub fn example3_joint() -> JointSystem {
    let w = [ratio(2, 5), ratio(1, 5), ratio(1, 5), ratio(1, 5)];
    let mut cells = Vec::with_capacity(16);
    for (x, px) in w.iter().enumerate() {
        for (r, pr) in w.iter().enumerate() {
            let zero = (x == 0) != (r == 0) || (x == r && x != 0);
            let u = if zero { "0" } else { "1" };
            cells.push((u.to_string(), r.to_string(), x.to_string(), px * pr));
        }
    }
    JointSystem::from_labeled(cells).expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{is_independent, Variable};

    #[test]
    fn example3_marginals() {
        let j = example3_joint();
        let pu = j.marginal(Variable::U);
        assert_eq!(pu.mass_of("0"), Some(&ratio(3, 5)));
        assert!(is_independent(&j, &[Variable::X], &[Variable::R]).unwrap());
        assert!(is_independent(&j, &[Variable::U], &[Variable::X]).unwrap());
        assert!(is_independent(&j, &[Variable::U], &[Variable::R]).unwrap());
    }
}
