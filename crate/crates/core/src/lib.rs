//! Construction, verification and analysis of error-free perfect-secrecy
//! cipher systems over finite alphabets, with exact rational probabilities.

pub mod ciphers;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod prob;
pub mod recycle;
pub mod tables;
pub mod tradeoff;
pub mod verify;

pub use error::{EpsError, Result};
