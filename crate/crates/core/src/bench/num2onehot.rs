//! Numeric to one-hot conversion: precision and overflow per algorithm.

use serde::{Deserialize, Serialize};

use super::record::BenchRecord;
use super::spec::ExperimentSpec;
use super::tradeoff::{run_cell, Layout};
use crate::comparators::{eq_approx, Operand};
use crate::conversions::*;
use crate::error::{HeError, Result};
use crate::measure::measure;
use crate::rational::int;
use crate::simd::{CipherVec, CostLedger, HeContext, PlainVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Alg1,
    Alg2,
    Alg1Shadow,
    Alg2Shadow,
    NaiveEq,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Alg1, Variant::Alg2, Variant::Alg1Shadow, Variant::Alg2Shadow, Variant::NaiveEq];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Alg1 => "alg1",
            Variant::Alg2 => "alg2",
            Variant::Alg1Shadow => "alg1-shadow",
            Variant::Alg2Shadow => "alg2-shadow",
            Variant::NaiveEq => "naive-eq",
        }
    }
}

fn rows_error(ctx: &HeContext, rows: &[CipherVec], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for (c, row) in rows.iter().enumerate() {
        let v = ctx.decrypt_real(row);
        for (x, got) in v.iter().take(n).enumerate() {
            let want = if x == c { 1.0 } else { 0.0 };
            worst = worst.max((got - want).abs());
        }
    }
    worst
}

/// All of `[n]` in one batch, one class per output ciphertext.
fn class_major(ctx: &HeContext, v: Variant, n: usize, shadow: Option<&ShadowTree>, spec: &ExperimentSpec) -> Result<(CostLedger, f64)> {
    let x = ctx.encrypt_ints(&(0..n as i64).collect::<Vec<_>>())?;
    let out = match v {
        Variant::Alg1 => numeric_to_one_hot_alg1(ctx, &x, n, None, PathOrder::LeafToRoot)?.outputs,
        Variant::Alg2 => numeric_to_one_hot_alg2(ctx, &x, n, None)?.outputs,
        Variant::Alg1Shadow => numeric_to_one_hot_alg1(ctx, &x, n, shadow, PathOrder::LeafToRoot)?.outputs,
        Variant::Alg2Shadow => numeric_to_one_hot_alg2(ctx, &x, n, shadow)?.outputs,
        Variant::NaiveEq => {
            let cfg = spec.eq_for(n as u64);
            measure(ctx, || {
                let rows = (0..n)
                    .map(|c| {
                        let y = PlainVec::broadcast(int(c as i64), ctx.slot_count());
                        Ok(eq_approx(ctx, &x, Operand::Plain(&y), &cfg)?.output)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((rows, 0))
            })?
        }
    };
    Ok((out.cost, rows_error(ctx, &out.output, n)))
}

/// One sample per ciphertext; only the equality sweep has this form.
fn sample_major(ctx: &HeContext, n: usize, spec: &ExperimentSpec) -> Result<(CostLedger, f64)> {
    let cfg = spec.eq_for(n as u64);
    let mut total = CostLedger::default();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let x = ctx.encrypt_ints(&[a as i64])?;
        let r = numeric_to_one_hot_naive(ctx, &x, n, &cfg)?;
        let v = ctx.decrypt_real(&r.output);
        for (i, got) in v.iter().take(n).enumerate() {
            worst = worst.max((got - if i == a { 1.0 } else { 0.0 }).abs());
        }
        total += &r.cost;
    }
    Ok((total, worst))
}

/// Every variant for every `n`, sweeping all inputs in `[n]`. Overflow is
/// reported, not raised. The sample-major layout only runs `naive-eq`.
pub fn run_num2onehot(spec: &ExperimentSpec) -> Result<Vec<BenchRecord>> {
    spec.validate()?;
    let layout = Layout::from_shape(spec.shape())?;
    let profile = spec.profile();
    let mut out = Vec::new();
    for n in spec.n_values() {
        if n < 2 {
            return Err(HeError::InvalidParameter(format!("num2onehot needs n >= 2, got {n}")));
        }
        let n = n as usize;
        match layout {
            Layout::ClassMajor => {
                let shadow = build_shadow_tree(tree_width(n))?;
                let s = spec.slots().max(n.next_power_of_two());
                for v in Variant::ALL {
                    let cell = run_cell(profile, s, spec.seed, |ctx| class_major(ctx, v, n, Some(&shadow), spec))?;
                    out.push(BenchRecord::from_cell(v.name(), n as u64, 1, &cell, s as f64, &spec.weights));
                }
            }
            Layout::SampleMajor => {
                let s = spec.slots().max(n.next_power_of_two());
                let cell = run_cell(profile, s, spec.seed, |ctx| sample_major(ctx, n, spec))?;
                out.push(BenchRecord::from_cell(Variant::NaiveEq.name(), n as u64, 1, &cell, n as f64, &spec.weights));
            }
        }
    }
    Ok(out)
}
