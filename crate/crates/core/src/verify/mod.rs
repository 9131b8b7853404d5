//! Exact EPS constraint checks, key accounting and the lower bounds.

pub mod bounds;
pub mod eps;
pub mod metrics;
pub mod report;

pub use bounds::{check_bounds, check_candidate_key, cor2_bound, BoundReport, Check, CheckKind, Regime};
pub use eps::{check_eps, EpsReport, Violation, KEY_INDEPENDENCE, SECRECY, ZERO_ERROR};
pub use metrics::{key_metrics, KeyMetrics};
pub use report::{render_bounds, render_eps, verify_joint, VerifyReport};
