//! CKKS-style SIMD arithmetic on slot vectors with cost accounting.
//!
//! Values live in [`CipherVec`]s whose slots are evaluated exactly, in
//! emulated fixed point, or in noisy floating point depending on the
//! context's [`ArithmeticProfile`]. Every operation goes through a
//! [`HeContext`], which enforces the depth budget and records the operation in
//! its [`CostLedger`].

mod context;
mod ledger;
mod profile;
mod slots;

pub use context::{CipherVec, ContextParams, HeContext, PlainVec};
pub use ledger::CostLedger;
pub use profile::{ArithmeticProfile, DEFAULT_FRAC_BITS, DEFAULT_INT_BITS};
pub use slots::{ExactComplex, FixedComplex};
