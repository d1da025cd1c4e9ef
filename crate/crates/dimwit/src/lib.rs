//! File formats, reports, parallel drivers and the command line for the
//! determinant dimension witness. The numerics live in [`dimwit_core`].

pub mod cli;
pub mod drivers;
mod error;
pub mod format;
pub mod fsutil;
pub mod report;

pub use error::{Error, Result};
