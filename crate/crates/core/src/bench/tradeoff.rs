//! Bandwidth against server cost for each input representation.
//!
//! Two layouts are supported. Class-major `[n/1,m/s]` keeps one ciphertext
//! per class with the batch of `m = s` samples across its slots, so costs
//! are amortized over `s`. Sample-major `[n/s,m/1]` keeps one sample per
//! ciphertext with the classes across slots; the slot count is raised to fit
//! the longest intermediate map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::record::{BenchRecord, Cell};
use super::spec::ExperimentSpec;
use crate::comparators::{eq_approx, product_tree, EqConfig, Operand};
use crate::conversions::*;
use crate::error::{HeError, Result};
use crate::measure::{measure, Measured};
use crate::packing::{ShapeSpec, Term};
use crate::rational::int;
use crate::representations::*;
use crate::simd::{ArithmeticProfile, CipherVec, ContextParams, CostLedger, HeContext, PlainVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `[n/1,m/s]`
    ClassMajor,
    /// `[n/s,m/1]`
    SampleMajor,
}

impl Layout {
    /// Reads a shape string over the class dimension `n` and batch `m`.
    pub fn from_shape(shape: &str) -> Result<Layout> {
        let spec = ShapeSpec::parse(shape)?;
        let is = |t: &Term, name: &str| matches!(t, Term::Sym(s) if s == name);
        if !is(&spec.dims[0], "n") || !is(&spec.dims[1], "m") {
            return Err(HeError::InvalidTileShape(format!("'{shape}' must tile [n/..,m/..]")));
        }
        match (&spec.tiles[0], &spec.tiles[1]) {
            (Term::Num(1), t) if is(t, "s") => Ok(Layout::ClassMajor),
            (t, Term::Num(1)) if is(t, "s") => Ok(Layout::SampleMajor),
            _ => Err(HeError::InvalidTileShape(format!(
                "'{shape}' is not supported; use [n/1,m/s] or [n/s,m/1]"
            ))),
        }
    }
}

/// Runs `f` under `profile`; on overflow the costs come from a rerun with
/// exact-free float arithmetic and the cell is flagged.
pub(crate) fn run_cell(
    profile: ArithmeticProfile,
    slots: usize,
    seed: u64,
    f: impl Fn(&HeContext) -> Result<(CostLedger, f64)>,
) -> Result<Cell> {
    let ctx = HeContext::new(ContextParams::new(slots, profile).with_seed(seed))?;
    match f(&ctx) {
        Ok((cost, max_abs_error)) => Ok(Cell { cost, max_abs_error, overflowed: false }),
        Err(HeError::Overflow { .. }) => {
            let ctx = HeContext::new(ContextParams::new(slots, ArithmeticProfile::noisy(0.0)).with_seed(seed))?;
            let (cost, _) = f(&ctx)?;
            Ok(Cell { cost, max_abs_error: f64::INFINITY, overflowed: true })
        }
        Err(e) => Err(e),
    }
}

/// `count` values in `[n]`, starting with the two ends.
pub(crate) fn sample_values(n: u64, count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n);
    (0..count)
        .map(|j| match j {
            0 => 0,
            1 => n - 1,
            _ => rng.random_range(0..n),
        })
        .collect()
}

/// Worst deviation of class rows from the indicator of `samples`.
fn class_rows_error(ctx: &HeContext, rows: &[CipherVec], samples: &[u64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (c, row) in rows.iter().enumerate() {
        let v = ctx.decrypt_real(row);
        for (j, &a) in samples.iter().enumerate() {
            let want = if a as usize == c { 1.0 } else { 0.0 };
            worst = worst.max((v[j] - want).abs());
        }
    }
    worst
}

fn map_error(ctx: &HeContext, map: &CipherVec, a: u64, n: usize) -> f64 {
    let v = ctx.decrypt_real(map);
    (0..n).map(|i| (v[i] - if i as u64 == a { 1.0 } else { 0.0 }).abs()).fold(0.0, f64::max)
}

/// Indicator rows `r < q` of `values mod q`, one ciphertext per row.
fn encrypt_rows(ctx: &HeContext, values: &[u64], q: u64) -> Result<Vec<CipherVec>> {
    (0..q)
        .map(|r| ctx.encrypt_ints(&values.iter().map(|&v| i64::from(v % q == r)).collect::<Vec<_>>()))
        .collect()
}

/// Row `c < rows` is the product of `parts[i][c mod len_i]`.
fn crt_rows(ctx: &HeContext, parts: &[Vec<CipherVec>], rows: usize) -> Result<Vec<CipherVec>> {
    (0..rows)
        .map(|c| product_tree(ctx, parts.iter().map(|p| p[c % p.len()].clone()).collect()))
        .collect()
}

fn hier_rows<'a>(
    ctx: &HeContext,
    node: &HierNode,
    leaves: &mut impl Iterator<Item = &'a Vec<CipherVec>>,
) -> Result<Vec<CipherVec>> {
    if node.is_leaf() {
        return leaves.next().cloned().ok_or_else(|| HeError::InconsistentTree("ran out of leaves".into()));
    }
    let parts = node.children.iter().map(|c| hier_rows(ctx, c, leaves)).collect::<Result<Vec<_>>>()?;
    crt_rows(ctx, &parts, node.modulus as usize)
}

/// Deepest split whose leaves keep at least three classes.
pub fn default_hier_levels(n: u64) -> u32 {
    let mut best = 1;
    for levels in 2..=8 {
        match build_hier_basis(n, levels) {
            Ok(b) if b.root.leaves().iter().all(|&q| q >= 3) => best = levels,
            _ => break,
        }
    }
    best
}

struct Bases {
    params: EncodeParams,
}

impl Bases {
    fn new(n: u64, reps: &[RepKind], spec: &ExperimentSpec) -> Result<Self> {
        let mut params = EncodeParams::default();
        if reps.contains(&RepKind::Crt) {
            params.crt = Some(find_crt_basis(n, spec.crt_strategy())?.basis);
        }
        if reps.iter().any(|r| matches!(r, RepKind::HierCrt | RepKind::NumericHierCrt)) {
            let levels = spec.hier_levels.unwrap_or_else(|| default_hier_levels(n));
            params.hier = Some(build_hier_basis(n, levels)?);
        }
        Ok(Bases { params })
    }

    fn crt(&self) -> &CrtBasis {
        self.params.crt.as_ref().expect("crt basis built")
    }

    fn hier(&self) -> &HierBasis {
        self.params.hier.as_ref().expect("hier basis built")
    }
}

fn leaf_residues(samples: &[u64], basis: &HierBasis) -> Result<Vec<Vec<u64>>> {
    let per_sample = samples.iter().map(|&a| Ok(encode_hier(a, basis)?.leaf_residues())).collect::<Result<Vec<_>>>()?;
    Ok((0..basis.leaf_count()).map(|i| per_sample.iter().map(|r| r[i]).collect()).collect())
}

fn eq_rows(ctx: &HeContext, x: &CipherVec, q: u64, cfg: &EqConfig) -> Result<Vec<CipherVec>> {
    (0..q)
        .map(|c| {
            let y = PlainVec::broadcast(int(c as i64), ctx.slot_count());
            Ok(eq_approx(ctx, x, Operand::Plain(&y), cfg)?.output)
        })
        .collect()
}

fn class_major_cell(ctx: &HeContext, kind: RepKind, n: u64, b: &Bases, spec: &ExperimentSpec) -> Result<(CostLedger, f64)> {
    let samples = sample_values(n, ctx.slot_count(), spec.seed);
    let rows = n as usize;
    let measured: Measured<Vec<CipherVec>> = match kind {
        RepKind::OneHot => return Ok((CostLedger::default(), 0.0)),
        RepKind::Numeric => {
            let x = ctx.encrypt_ints(&samples.iter().map(|&a| a as i64).collect::<Vec<_>>())?;
            let cfg = spec.eq_for(n);
            measure(ctx, || Ok((eq_rows(ctx, &x, n, &cfg)?, 0)))?
        }
        RepKind::Binary => {
            let k = ceil_log2(n);
            let bits = (0..k)
                .map(|i| ctx.encrypt_ints(&samples.iter().map(|&a| ((a >> i) & 1) as i64).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>>>()?;
            measure(ctx, || {
                let comp = bits.iter().map(|v| ctx.scalar_sub(&int(1), v)).collect::<Result<Vec<_>>>()?;
                let out = (0..rows)
                    .map(|c| {
                        let sel = (0..k as usize)
                            .map(|i| if (c >> i) & 1 == 1 { bits[i].clone() } else { comp[i].clone() })
                            .collect();
                        product_tree(ctx, sel)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((out, 0))
            })?
        }
        RepKind::Crt => {
            let parts = b
                .crt()
                .moduli()
                .iter()
                .map(|&q| encrypt_rows(ctx, &samples, q))
                .collect::<Result<Vec<_>>>()?;
            measure(ctx, || Ok((crt_rows(ctx, &parts, rows)?, 0)))?
        }
        RepKind::HierCrt | RepKind::NumericHierCrt => {
            let basis = b.hier();
            let residues = leaf_residues(&samples, basis)?;
            let moduli = basis.root.leaves();
            if kind == RepKind::HierCrt {
                let leaves = residues
                    .iter()
                    .zip(&moduli)
                    .map(|(r, &q)| encrypt_rows(ctx, r, q))
                    .collect::<Result<Vec<_>>>()?;
                measure(ctx, || Ok((hier_rows(ctx, &basis.root, &mut leaves.iter())?, 0)))?
            } else {
                let xs = residues
                    .iter()
                    .map(|r| ctx.encrypt_ints(&r.iter().map(|&v| v as i64).collect::<Vec<_>>()))
                    .collect::<Result<Vec<_>>>()?;
                measure(ctx, || {
                    let leaves = xs
                        .iter()
                        .zip(&moduli)
                        .map(|(x, &q)| eq_rows(ctx, x, q, &spec.eq_for(q)))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((hier_rows(ctx, &basis.root, &mut leaves.iter())?, 0))
                })?
            }
        }
    };
    let err = class_rows_error(ctx, &measured.output, &samples);
    Ok((measured.cost, err))
}

/// Slots a sample-major conversion needs.
fn sample_major_width(kind: RepKind, n: u64, b: &Bases) -> u64 {
    match kind {
        RepKind::OneHot | RepKind::Numeric => n,
        RepKind::Binary => n.next_power_of_two().max(2),
        RepKind::Crt => b.crt().m(),
        RepKind::HierCrt | RepKind::NumericHierCrt => b.hier().root.children.iter().map(|c| c.modulus).product(),
    }
}

fn sample_major_one(
    ctx: &HeContext,
    kind: RepKind,
    replicated: bool,
    n: u64,
    a: u64,
    b: &Bases,
    spec: &ExperimentSpec,
) -> Result<(CostLedger, f64)> {
    let s = ctx.slot_count();
    let r: Measured<CipherVec> = match kind {
        RepKind::OneHot => return Ok((CostLedger::default(), 0.0)),
        RepKind::Numeric if replicated => {
            let x = ctx.encrypt_ints(&vec![a as i64; n as usize])?;
            let classes = PlainVec::from_ints(0..n as i64).padded(s);
            eq_approx(ctx, &x, Operand::Plain(&classes), &spec.eq_for(n))?
        }
        RepKind::Numeric => {
            let x = ctx.encrypt_ints(&[a as i64])?;
            numeric_to_one_hot_naive(ctx, &x, n as usize, &spec.eq_for(n))?
        }
        RepKind::Binary => {
            let rep = BinaryRep::encode(a, n)?;
            let bits = rep.bits().iter().map(|&v| ctx.encrypt_ints(&[v as i64])).collect::<Result<Vec<_>>>()?;
            binary_to_one_hot(ctx, &bits, n.next_power_of_two().max(2) as usize)?
        }
        RepKind::Crt => {
            let subs = encrypt_crt(ctx, &CrtRep::encode(a, b.crt())?)?;
            crt_to_one_hot(ctx, &subs, b.crt())?
        }
        RepKind::HierCrt => {
            let leaves = encrypt_hier(ctx, &encode_hier(a, b.hier())?)?;
            hier_crt_to_one_hot(ctx, &leaves, b.hier())?
        }
        RepKind::NumericHierCrt => {
            let basis = b.hier();
            let rep = encode_hier(a, basis)?;
            let xs = rep.leaf_residues().iter().map(|&v| ctx.encrypt_ints(&[v as i64])).collect::<Result<Vec<_>>>()?;
            let moduli = basis.root.leaves();
            measure(ctx, || {
                let leaves = xs
                    .iter()
                    .zip(&moduli)
                    .map(|(x, &q)| {
                        let o = numeric_to_one_hot_naive(ctx, x, q as usize, &spec.eq_for(q))?.output;
                        // slots past q compare 0 with 0; clear them before tiling
                        let mask = PlainVec::from_ints((0..s).map(|i| i64::from((i as u64) < q)));
                        ctx.pt_mul(&mask, &o)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let r = hier_crt_to_one_hot(ctx, &leaves, basis)?;
                Ok((r.output, 0))
            })?
        }
    };
    let err = map_error(ctx, &r.output, a, n as usize);
    Ok((r.cost, err))
}

fn sample_major_cell(ctx: &HeContext, kind: RepKind, replicated: bool, n: u64, b: &Bases, spec: &ExperimentSpec) -> Result<(CostLedger, f64)> {
    let mut total = CostLedger::default();
    let mut worst: f64 = 0.0;
    for a in sample_values(n, spec.samples(), spec.seed) {
        let (cost, err) = sample_major_one(ctx, kind, replicated, n, a, b, spec)?;
        total += &cost;
        worst = worst.max(err);
    }
    Ok((total, worst))
}

/// One record per `(n, representation)`; the sample-major layout adds a
/// `numeric-replicated` row where the client uploads `x` already repeated
/// across the class slots instead of the server rotating it there.
pub fn run_tradeoff(spec: &ExperimentSpec) -> Result<Vec<BenchRecord>> {
    spec.validate()?;
    let layout = Layout::from_shape(spec.shape())?;
    let reps = spec.representations();
    let profile = spec.profile();
    let mut out = Vec::new();
    for n in spec.n_values() {
        if n < 2 {
            return Err(HeError::InvalidParameter(format!("tradeoff needs n >= 2, got {n}")));
        }
        let bases = Bases::new(n, &reps, spec)?;
        for &kind in &reps {
            let bandwidth = slot_cost(n, kind, &bases.params)?;
            let variants: &[bool] = match (layout, kind) {
                (Layout::SampleMajor, RepKind::Numeric) => &[false, true],
                _ => &[false],
            };
            for &replicated in variants {
                let (cell, per) = match layout {
                    Layout::ClassMajor => {
                        let s = spec.slots();
                        let cell = run_cell(profile, s, spec.seed, |ctx| class_major_cell(ctx, kind, n, &bases, spec))?;
                        (cell, s as f64)
                    }
                    Layout::SampleMajor => {
                        let s = spec.slots().max(sample_major_width(kind, n, &bases).next_power_of_two() as usize);
                        let cell = run_cell(profile, s, spec.seed, |ctx| {
                            sample_major_cell(ctx, kind, replicated, n, &bases, spec)
                        })?;
                        (cell, spec.samples() as f64)
                    }
                };
                let (name, bw) = if replicated {
                    ("numeric-replicated".to_string(), n)
                } else {
                    (kind.name().to_string(), bandwidth)
                };
                out.push(BenchRecord::from_cell(name, n, bw, &cell, per, &spec.weights));
            }
        }
    }
    Ok(out)
}
