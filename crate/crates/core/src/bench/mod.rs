//! Experiment runners that turn conversions into cost-model tables.

mod comparator_suite;
mod num2onehot;
mod record;
mod spec;
mod tradeoff;

pub use comparator_suite::run_comparator_suite;
pub use num2onehot::{run_num2onehot, Variant};
pub use record::*;
pub use spec::*;
pub use tradeoff::{run_tradeoff, Layout};

use crate::conversions::{shadow_bounds, ShadowBoundsRow};
use crate::error::Result;

pub fn run_shadow_bounds(max_level: usize) -> Result<Vec<ShadowBoundsRow>> {
    shadow_bounds(max_level)
}

/// Runs whatever `spec.experiment` names.
pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    Ok(match spec.experiment {
        Experiment::Tradeoff => Report::Records(run_tradeoff(spec)?),
        Experiment::Num2onehot => Report::Records(run_num2onehot(spec)?),
        Experiment::ComparatorSuite => Report::Records(run_comparator_suite(spec)?),
        Experiment::ShadowBounds => Report::ShadowBounds(run_shadow_bounds(spec.max_level())?),
    })
}
