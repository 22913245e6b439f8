//! Ledger deltas for a single encrypted operation.

use serde::Serialize;

use crate::error::Result;
use crate::simd::{CipherVec, CostLedger, HeContext};

/// Output of an encrypted operation with the cost it added to the context.
///
/// `cost` counts vector operations; `slot_mults` counts the scalar
/// multiplications those vector operations stand for over the active slots.
/// Depth fields of `cost` are the depth of the output itself.
#[derive(Debug, Clone, Serialize)]
pub struct Measured<T> {
    pub output: T,
    pub cost: CostLedger,
    pub slot_mults: u64,
}

pub trait Depth {
    /// `(depth, pt_free_depth)` of the deepest ciphertext.
    fn depths(&self) -> (u32, u32);
}

impl Depth for CipherVec {
    fn depths(&self) -> (u32, u32) {
        (self.depth(), self.pt_free_depth())
    }
}

impl<T: Depth> Depth for Vec<T> {
    fn depths(&self) -> (u32, u32) {
        self.iter().map(Depth::depths).fold((0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
    }
}

/// Runs `f` and records the ledger delta. `f` returns its output and the
/// number of slot-level multiplications it performed.
pub fn measure<T: Depth>(ctx: &HeContext, f: impl FnOnce() -> Result<(T, u64)>) -> Result<Measured<T>> {
    let before = ctx.ledger();
    let (output, slot_mults) = f()?;
    let mut cost = ctx.ledger().since(&before);
    (cost.max_depth, cost.max_pt_free_depth) = output.depths();
    Ok(Measured { output, cost, slot_mults })
}
