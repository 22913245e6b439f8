//! Server-side conversions between representations. Every operation
//! returns its output with the ledger delta it caused.

mod lagrange;
mod maps;

pub use lagrange::*;
pub use maps::*;
