use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

/// Operation counters for one computation.
///
/// `max_depth` counts plaintext-ciphertext multiplications as one level;
/// `max_pt_free_depth` only counts ciphertext-ciphertext multiplications.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    pub ct_mults: u64,
    pub pt_mults: u64,
    pub adds: u64,
    pub rotations: u64,
    pub conjugations: u64,
    pub bootstraps: u64,
    pub max_depth: u32,
    #[serde(default)]
    pub max_pt_free_depth: u32,
}

impl CostLedger {
    /// Counter differences since `earlier`. Depth fields keep the later value.
    pub fn since(&self, earlier: &CostLedger) -> CostLedger {
        CostLedger {
            ct_mults: self.ct_mults - earlier.ct_mults,
            pt_mults: self.pt_mults - earlier.pt_mults,
            adds: self.adds - earlier.adds,
            rotations: self.rotations - earlier.rotations,
            conjugations: self.conjugations - earlier.conjugations,
            bootstraps: self.bootstraps - earlier.bootstraps,
            max_depth: self.max_depth,
            max_pt_free_depth: self.max_pt_free_depth,
        }
    }

    /// Sum of all multiplications regardless of operand kind.
    pub fn total_mults(&self) -> u64 {
        self.ct_mults + self.pt_mults
    }

    pub(crate) fn observe_depth(&mut self, depth: u32, pt_free_depth: u32) {
        self.max_depth = self.max_depth.max(depth);
        self.max_pt_free_depth = self.max_pt_free_depth.max(pt_free_depth);
    }
}

/// Merges per-worker ledgers: counters add, depths take the maximum.
impl AddAssign<&CostLedger> for CostLedger {
    fn add_assign(&mut self, rhs: &CostLedger) {
        self.ct_mults += rhs.ct_mults;
        self.pt_mults += rhs.pt_mults;
        self.adds += rhs.adds;
        self.rotations += rhs.rotations;
        self.conjugations += rhs.conjugations;
        self.bootstraps += rhs.bootstraps;
        self.max_depth = self.max_depth.max(rhs.max_depth);
        self.max_pt_free_depth = self.max_pt_free_depth.max(rhs.max_pt_free_depth);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_sums_counters_and_maxes_depth() {
        let mut a = CostLedger { ct_mults: 3, adds: 1, max_depth: 2, ..Default::default() };
        let b = CostLedger { ct_mults: 1, rotations: 4, max_depth: 5, ..Default::default() };
        a += &b;
        assert_eq!(a.ct_mults, 4);
        assert_eq!(a.rotations, 4);
        assert_eq!(a.max_depth, 5);
    }

    #[test]
    fn json_has_integer_fields() {
        let l = CostLedger { ct_mults: 7, max_depth: 3, ..Default::default() };
        let v: serde_json::Value = serde_json::to_value(l).unwrap();
        for key in ["ct_mults", "pt_mults", "adds", "rotations", "conjugations", "bootstraps", "max_depth"] {
            assert!(v[key].is_u64(), "{key}");
        }
    }
}
