//! Equality and order circuits against integer oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::record::{BenchRecord, Cell};
use super::spec::ExperimentSpec;
use super::tradeoff::run_cell;
use crate::comparators::*;
use crate::error::{HeError, Result};
use crate::rational::int;
use crate::representations::{ceil_log2, greater_map_of, Orientation};
use crate::simd::{CostLedger, HeContext, PlainVec};

const MAX_PAIRS: usize = 256;

fn bits_of(v: u64, w: usize) -> Vec<u8> {
    (0..w).map(|i| ((v >> i) & 1) as u8).collect()
}

/// Every ordered pair in `[count]` when small enough, otherwise a seeded
/// sample that keeps the diagonal well represented.
fn pairs(count: u64, seed: u64) -> Vec<(u64, u64)> {
    if count * count <= MAX_PAIRS as u64 {
        return (0..count).flat_map(|a| (0..count).map(move |b| (a, b))).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ count);
    (0..MAX_PAIRS)
        .map(|i| {
            let a = rng.random_range(0..count);
            let b = if i % 2 == 0 { a } else { rng.random_range(0..count) };
            (a, b)
        })
        .collect()
}

fn default_zt(w: u64) -> u32 {
    ceil_log2(w) + 3
}

fn bitvec_cell(ctx: &HeContext, w: usize, circuit: &str, zt: u32, seed: u64) -> Result<(CostLedger, f64)> {
    let ps = pairs(1 << w, seed);
    let a: Vec<Vec<u8>> = ps.iter().map(|&(x, _)| bits_of(x, w)).collect();
    let b: Vec<Vec<u8>> = ps.iter().map(|&(_, y)| bits_of(y, w)).collect();
    let r = match circuit {
        "bitvec-equal" => bitvec_equal(ctx, &BitVecPair::encrypt(ctx, &a, &b)?)?,
        "bitvec-equal-xorsum" => bitvec_equal_xorsum(ctx, &BitVecPair::encrypt(ctx, &a, &b)?, zt)?,
        _ => bitvec_equal_complex(ctx, &encrypt_bit_pairs(ctx, &a)?, &encrypt_bit_pairs(ctx, &b)?, zt)?,
    };
    let out = ctx.decrypt_real(&r.output);
    let err = ps
        .iter()
        .zip(&out)
        .map(|(&(x, y), o)| (o - if x == y { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    Ok((r.cost, err))
}

fn eq_cell(ctx: &HeContext, n: u64, spec: &ExperimentSpec) -> Result<(CostLedger, f64)> {
    let cfg = spec.eq_for(n);
    let x = ctx.encrypt_ints(&(0..n as i64).collect::<Vec<_>>())?;
    let mut cost = None;
    let mut worst: f64 = 0.0;
    for c in 0..n {
        let y = PlainVec::broadcast(int(c as i64), ctx.slot_count());
        let r = eq_approx(ctx, &x, Operand::Plain(&y), &cfg)?;
        let out = ctx.decrypt_real(&r.output);
        for (xv, o) in out.iter().take(n as usize).enumerate() {
            worst = worst.max((o - if xv as u64 == c { 1.0 } else { 0.0 }).abs());
        }
        cost.get_or_insert(r.cost);
    }
    Ok((cost.unwrap_or_default(), worst))
}

fn onehot(ctx: &HeContext, v: u64, n: u64) -> Result<crate::simd::CipherVec> {
    ctx.encrypt_ints(&(0..n).map(|i| i64::from(i == v)).collect::<Vec<_>>())
}

fn ge_cell(ctx: &HeContext, n: u64, seed: u64) -> Result<(CostLedger, f64)> {
    let mut cost = None;
    let mut worst: f64 = 0.0;
    for (a, b) in pairs(n, seed) {
        let g = greater_map_of(a as usize, n as usize, Orientation::Greater)?;
        let g = ctx.encrypt_ints(&g.bits.iter().map(|&v| v as i64).collect::<Vec<_>>())?;
        let r = ge_via_maps(ctx, &g, GeOperand::Cipher(&onehot(ctx, b, n)?), n as usize)?;
        let got = ctx.decrypt_real(&r.output.ct)[r.output.slot];
        worst = worst.max((got - if b > a { 1.0 } else { 0.0 }).abs());
        cost.get_or_insert(r.cost);
    }
    Ok((cost.unwrap_or_default(), worst))
}

fn range_cell(ctx: &HeContext, n: u64, path: RangePath, seed: u64) -> Result<(CostLedger, f64)> {
    let triples: Vec<(u64, u64, u64)> = if n * n * n <= 16 * MAX_PAIRS as u64 {
        (0..n)
            .flat_map(|v| (0..n).flat_map(move |lo| (lo..n).map(move |hi| (v, lo, hi))))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n);
        (0..MAX_PAIRS)
            .map(|_| {
                let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
                (rng.random_range(0..n), x.min(y), x.max(y))
            })
            .collect()
    };
    let mut cost = None;
    let mut worst: f64 = 0.0;
    for (v, lo, hi) in triples {
        let r = range_check(ctx, &onehot(ctx, v, n)?, lo as usize, hi as usize, n as usize, path)?;
        let got = ctx.decrypt_real(&r.output)[0];
        worst = worst.max((got - if (lo..=hi).contains(&v) { 1.0 } else { 0.0 }).abs());
        cost.get_or_insert(r.cost);
    }
    Ok((cost.unwrap_or_default(), worst))
}

/// For each bit width `w` in `spec.n`: the three bit-vector equality
/// circuits over `w`-bit values (the complex one for even `w` only), then
/// map comparisons over the domain `2^w`. Finally `eq-approx` over its
/// configured domain. Counters are per circuit evaluation.
pub fn run_comparator_suite(spec: &ExperimentSpec) -> Result<Vec<BenchRecord>> {
    spec.validate()?;
    let profile = spec.profile();
    let w8 = &spec.weights;
    let mut out = Vec::new();
    let record = |name: &str, n: u64, bw: u64, cell: &Cell| BenchRecord::from_cell(name, n, bw, cell, 1.0, w8);
    for w in spec.n_values() {
        if !(1..=16).contains(&w) {
            return Err(HeError::InvalidParameter(format!("bit width {w} outside 1..=16")));
        }
        let wu = w as usize;
        let zt = spec.zt_iters.unwrap_or_else(|| default_zt(w));
        let slots = MAX_PAIRS;
        let mut circuits = vec!["bitvec-equal", "bitvec-equal-xorsum"];
        if w % 2 == 0 {
            circuits.push("bitvec-equal-complex");
        }
        for c in circuits {
            let cell = run_cell(profile, slots, spec.seed, |ctx| bitvec_cell(ctx, wu, c, zt, spec.seed))?;
            let bw = if c == "bitvec-equal-complex" { w / 2 } else { w };
            out.push(record(c, w, bw, &cell));
        }
        let domain = 1u64 << w.min(8);
        let slots = (domain as usize).next_power_of_two();
        let cell = run_cell(profile, slots, spec.seed, |ctx| ge_cell(ctx, domain, spec.seed))?;
        out.push(record("ge-via-maps", domain, domain, &cell));
        for (name, path) in [("range-map-product", RangePath::MapProduct), ("range-interval-mask", RangePath::IntervalMask)] {
            let cell = run_cell(profile, slots, spec.seed, |ctx| range_cell(ctx, domain, path, spec.seed))?;
            out.push(record(name, domain, domain, &cell));
        }
    }
    let domain = spec.eq.map_or(100, |e| e.domain_bound);
    let slots = (domain as usize).next_power_of_two();
    let cell = run_cell(profile, slots, spec.seed, |ctx| eq_cell(ctx, domain, spec))?;
    out.push(record("eq-approx", domain, 1, &cell));
    Ok(out)
}
