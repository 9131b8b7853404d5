//! The consumption versus channel-use tradeoff: decoding-matrix search for
//! binary sources, ciphertext padding, θ sweeps and the constructive frontier.

pub mod decoding;
pub mod frontier;
pub mod linalg;

pub use decoding::{
    enumerate_decoding_systems, enumerate_with_cap, feasible_for, reduce_dependent_columns,
    reduce_dependent_rows, reduce_to_fixpoint, row_shift, square_solution, FeasibleWitness,
    DEFAULT_MATRIX_CAP,
};
pub use frontier::{
    best_partition, frontier_csv, pad_ciphertext, sweep_csv, theta_sweep, tradeoff_frontier,
    FrontierBudget, SweepRow, TradeoffPoint,
};
