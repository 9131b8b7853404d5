//! Multi-round key accounting: extracting fresh keys from residual
//! randomness and checking two consecutive uses of a shared key.

pub mod example2;
pub mod extraction;
pub mod two_round;

pub use example2::{build_example2, Example2};
pub use extraction::{
    build_extraction, extraction_metrics, residual_contexts, ContextPlan, ExtractionMetrics,
    ExtractionPlan,
};
pub use two_round::{
    scenario_independent_pads, scenario_message_as_key, scenario_recycled_fresh_bit,
    scenario_short_residual, simulate_two_rounds, FirstRound, MessageCoupling, TwoRoundReport,
};
