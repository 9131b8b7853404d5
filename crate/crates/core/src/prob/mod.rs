//! Exact finite distributions and the information measures built on them.

pub mod dist;
pub mod joint;
pub mod measures;
pub mod rational;

pub use dist::FiniteDist;
pub use joint::{info_report, is_independent, InfoReport, Joint, JointSystem, Variable};
pub use measures::{
    binary_entropy, dist_majorizes, entropy, entropy_f64, entropy_in, entropy_of_masses,
    majorizes, relative_entropy, Base, TOLERANCE,
};
pub use rational::{int, parse_rational, ratio, to_f64, Prob};
