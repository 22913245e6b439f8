//! Numeric to one-hot conversion through Lagrange basis polynomials
//! evaluated on a product tree, with the optional shadow tree of per-node
//! constants that keeps intermediate values small.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::comparators::{eq_approx, EqConfig, Operand};
use crate::error::{HeError, Result};
use crate::measure::{measure, Depth, Measured};
use crate::rational::{int, to_f64};
use crate::simd::{CipherVec, CostLedger, HeContext, PlainVec};

use super::maps::tile;

/// `S[c] = prod_{i != c} (c - i)` over the 1-based classes `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangeDenominators {
    values: Vec<BigInt>,
}

impl LagrangeDenominators {
    pub fn new(n: usize) -> Self {
        let values = (1..=n as i64)
            .map(|c| (1..=n as i64).filter(|&i| i != c).map(|i| BigInt::from(c - i)).product())
            .collect();
        LagrangeDenominators { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `S[c]` for `c` in `1..=n`.
    pub fn get(&self, c: usize) -> &BigInt {
        &self.values[c - 1]
    }

    pub fn inverse(&self, c: usize) -> BigRational {
        BigRational::new(BigInt::one(), self.get(c).clone())
    }
}

/// Padded tree width for `n` classes.
pub fn tree_width(n: usize) -> usize {
    n.next_power_of_two().max(2)
}

fn levels_of(width: usize) -> Result<usize> {
    if !width.is_power_of_two() || width < 2 {
        return Err(HeError::NotPowerOfTwo(width));
    }
    Ok(width.trailing_zeros() as usize)
}

/// Index sets `{c - i : i != c}` per node after the intersection phase, before
/// the sibling swap. `result[l][i]` is node `i` at height `l` (leaves at 0).
pub fn phase_one_sets(ell: usize) -> Vec<Vec<BTreeSet<i64>>> {
    let n = 1i64 << ell;
    let mut s: Vec<BTreeSet<i64>> = (0..n).map(|c| (0..n).filter(|&i| i != c).map(|i| c - i).collect()).collect();
    let mut t = Vec::with_capacity(ell);
    for _ in 0..ell {
        let mut next = Vec::with_capacity(s.len() / 2);
        let mut level = Vec::with_capacity(s.len());
        for pair in s.chunks(2) {
            let common: BTreeSet<i64> = pair[0].intersection(&pair[1]).copied().collect();
            level.push(pair[0].difference(&common).copied().collect());
            level.push(pair[1].difference(&common).copied().collect());
            next.push(common);
        }
        t.push(level);
        s = next;
    }
    t
}

fn set_product(set: &BTreeSet<i64>) -> BigInt {
    set.iter().map(|&v| BigInt::from(v)).product()
}

/// Exact per-node constants. `constants[l][i]` multiplies node `i` at height
/// `l`; the root carries none. For every leaf, the constants inside the
/// subtrees hanging off its path multiply to `1 / S[c]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ShadowNode", try_from = "ShadowNode")]
pub struct ShadowTree {
    constants: Vec<Vec<BigRational>>,
}

pub fn build_shadow_tree(n: usize) -> Result<ShadowTree> {
    let ell = levels_of(n)?;
    let mut sets = phase_one_sets(ell);
    for level in &mut sets {
        for pair in level.chunks_mut(2) {
            pair.swap(0, 1);
        }
    }
    let products: Vec<Vec<BigInt>> = sets.iter().map(|l| l.iter().map(set_product).collect()).collect();
    let mut constants: Vec<Vec<BigRational>> = Vec::with_capacity(ell);
    constants.push(products[0].iter().map(|p| BigRational::new(BigInt::one(), p.clone())).collect());
    for l in 1..ell {
        let level = products[l]
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let children = &products[l - 1][2 * i] * &products[l - 1][2 * i + 1];
                BigRational::new(children, p.clone())
            })
            .collect();
        constants.push(level);
    }
    Ok(ShadowTree { constants })
}

impl ShadowTree {
    pub fn n(&self) -> usize {
        self.constants[0].len()
    }

    pub fn levels(&self) -> usize {
        self.constants.len()
    }

    pub fn constant(&self, level: usize, index: usize) -> &BigRational {
        &self.constants[level][index]
    }

    pub fn level(&self, level: usize) -> &[BigRational] {
        &self.constants[level]
    }

    /// Product of every constant in the subtree rooted at (`level`, `index`).
    pub fn subtree_product(&self, level: usize, index: usize) -> BigRational {
        let mut acc = BigRational::one();
        for (l, width) in (0..=level).rev().zip(0..) {
            let span = 1usize << width;
            for j in index * span..(index + 1) * span {
                acc *= &self.constants[l][j];
            }
        }
        acc
    }

    /// Smallest and largest strictly positive constant.
    pub fn positive_bounds(&self) -> (BigRational, BigRational) {
        let positive: Vec<&BigRational> =
            self.constants.iter().flatten().filter(|v| v.is_positive()).collect();
        let min = positive.iter().min().map(|v| (*v).clone()).unwrap_or_else(BigRational::zero);
        let max = positive.iter().max().map(|v| (*v).clone()).unwrap_or_else(BigRational::zero);
        (min, max)
    }
}

/// JSON form: nested nodes with exact numerator/denominator strings. The
/// root is `1/1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowNode {
    pub numerator: String,
    pub denominator: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ShadowNode>,
}

impl ShadowNode {
    fn of(tree: &ShadowTree, level: usize, index: usize) -> ShadowNode {
        let v = &tree.constants[level][index];
        let children = if level == 0 {
            Vec::new()
        } else {
            vec![Self::of(tree, level - 1, 2 * index), Self::of(tree, level - 1, 2 * index + 1)]
        };
        ShadowNode { numerator: v.numer().to_string(), denominator: v.denom().to_string(), children }
    }

    fn value(&self) -> Result<BigRational> {
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| HeError::InvalidParameter(format!("bad integer '{s}' in shadow tree")))
        };
        let d = parse(&self.denominator)?;
        if d.is_zero() {
            return Err(HeError::InvalidParameter("zero denominator in shadow tree".into()));
        }
        Ok(BigRational::new(parse(&self.numerator)?, d))
    }

    fn collect(&self, depth: usize, out: &mut Vec<Vec<BigRational>>) -> Result<()> {
        if out.len() <= depth {
            out.push(Vec::new());
        }
        out[depth].push(self.value()?);
        match self.children.len() {
            0 => Ok(()),
            2 => self.children.iter().try_for_each(|c| c.collect(depth + 1, out)),
            k => Err(HeError::InconsistentTree(format!("shadow node with {k} children"))),
        }
    }
}

impl From<ShadowTree> for ShadowNode {
    fn from(tree: ShadowTree) -> Self {
        let top = tree.levels() - 1;
        ShadowNode {
            numerator: "1".into(),
            denominator: "1".into(),
            children: vec![ShadowNode::of(&tree, top, 0), ShadowNode::of(&tree, top, 1)],
        }
    }
}

impl TryFrom<ShadowNode> for ShadowTree {
    type Error = HeError;

    fn try_from(root: ShadowNode) -> Result<Self> {
        if root.children.len() != 2 {
            return Err(HeError::InconsistentTree("shadow root needs two children".into()));
        }
        let mut by_depth = Vec::new();
        for c in &root.children {
            c.collect(0, &mut by_depth)?;
        }
        for (d, level) in by_depth.iter().enumerate() {
            if level.len() != 2 << d {
                return Err(HeError::InconsistentTree("shadow tree is not balanced".into()));
            }
        }
        by_depth.reverse();
        Ok(ShadowTree { constants: by_depth })
    }
}

/// Node values of the product tree. `levels[l][i]` is node `i` at height `l`;
/// the last level holds the root.
#[derive(Debug, Clone)]
pub struct ProductTree {
    pub levels: Vec<Vec<CipherVec>>,
}

impl Depth for ProductTree {
    fn depths(&self) -> (u32, u32) {
        self.levels.iter().map(|l| l.depths()).fold((0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
    }
}

impl ProductTree {
    /// Leaves `x + 1 - c` for the 1-based classes `c`, then pairwise products.
    /// With a shadow tree every non-root node is also scaled by its constant.
    pub fn build(ctx: &HeContext, x: &CipherVec, width: usize, shadow: Option<&ShadowTree>) -> Result<Self> {
        let ell = levels_of(width)?;
        if let Some(s) = shadow {
            if s.n() != width {
                return Err(HeError::ShapeMismatch(format!("shadow tree for {} classes, tree has {width}", s.n())));
            }
        }
        let scale = |v: CipherVec, level: usize, i: usize| match shadow {
            Some(s) => ctx.mul_scalar(&v, s.constant(level, i)),
            None => Ok(v),
        };
        let shifted = ctx.add_scalar(x, &int(1))?;
        let leaves = (0..width)
            .map(|i| scale(ctx.add_scalar(&shifted, &int(-(i as i64 + 1)))?, 0, i))
            .collect::<Result<Vec<_>>>()?;
        let mut levels = vec![leaves];
        for l in 1..=ell {
            let prev = &levels[l - 1];
            let next = (0..prev.len() / 2)
                .map(|i| {
                    let v = ctx.mul(&prev[2 * i], &prev[2 * i + 1])?;
                    if l < ell {
                        scale(v, l, i)
                    } else {
                        Ok(v)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            levels.push(next);
        }
        Ok(ProductTree { levels })
    }

    pub fn width(&self) -> usize {
        self.levels[0].len()
    }

    pub fn sibling(&self, level: usize, index: usize) -> &CipherVec {
        &self.levels[level][index ^ 1]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathOrder {
    /// Siblings multiplied from the leaf upward (depth `log2 n`).
    #[default]
    LeafToRoot,
    /// From the root downward; same value, deeper circuit.
    RootToLeaf,
}

/// Outputs of a tree conversion with separate costs for the tree build and
/// for the stage after it.
#[derive(Debug, Clone)]
pub struct TreeRun {
    /// One ciphertext per class; slot `j` of `outputs[c]` is `P_c(x[j])`.
    pub outputs: Measured<Vec<CipherVec>>,
    pub build: CostLedger,
    pub stage: CostLedger,
}

fn check_input(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(HeError::InvalidParameter("n must be positive".into()));
    }
    Ok(tree_width(n))
}

fn finish_run(
    ctx: &HeContext,
    n: usize,
    build: Measured<ProductTree>,
    stage: impl FnOnce(&ProductTree) -> Result<(Vec<CipherVec>, u64)>,
) -> Result<TreeRun> {
    let tree = build.output;
    let stage = measure(ctx, || stage(&tree))?;
    let mut total = build.cost;
    total += &stage.cost;
    let mut outputs = stage.output;
    outputs.truncate(n);
    let measured = Measured { output: outputs, cost: total, slot_mults: build.slot_mults + stage.slot_mults };
    Ok(TreeRun { outputs: measured, build: build.cost, stage: stage.cost })
}

fn build_tree(ctx: &HeContext, x: &CipherVec, width: usize, shadow: Option<&ShadowTree>) -> Result<Measured<ProductTree>> {
    let s = ctx.slot_count() as u64;
    measure(ctx, || {
        let t = ProductTree::build(ctx, x, width, shadow)?;
        let scaled = if shadow.is_some() { 2 * width as u64 - 2 } else { 0 };
        Ok((t, (width as u64 - 1 + scaled) * s))
    })
}

/// Shallow but big: each output multiplies the sibling values along its
/// leaf's path. `x` holds 0-based class indices, one sample per slot.
pub fn numeric_to_one_hot_alg1(
    ctx: &HeContext,
    x: &CipherVec,
    n: usize,
    shadow: Option<&ShadowTree>,
    order: PathOrder,
) -> Result<TreeRun> {
    let width = check_input(n)?;
    let ell = levels_of(width)?;
    let den = LagrangeDenominators::new(width);
    let build = build_tree(ctx, x, width, shadow)?;
    let s = ctx.slot_count() as u64;
    finish_run(ctx, n, build, |tree| {
        let mut outs = Vec::with_capacity(width);
        for c in 0..width {
            let mut path: Vec<&CipherVec> = (0..ell).map(|l| tree.sibling(l, c >> l)).collect();
            if order == PathOrder::RootToLeaf {
                path.reverse();
            }
            let mut acc = match shadow {
                Some(_) => path[0].clone(),
                None => ctx.mul_scalar(path[0], &den.inverse(c + 1))?,
            };
            for v in &path[1..] {
                acc = ctx.mul(&acc, v)?;
            }
            outs.push(acc);
        }
        let per_leaf = (ell as u64 - 1) + u64::from(shadow.is_none());
        Ok((outs, width as u64 * per_leaf * s))
    })
}

/// Small but less shallow: a second tree is filled top-down with
/// `parent * sibling`, so its leaves are the products of all other leaves.
pub fn numeric_to_one_hot_alg2(ctx: &HeContext, x: &CipherVec, n: usize, shadow: Option<&ShadowTree>) -> Result<TreeRun> {
    let width = check_input(n)?;
    let ell = levels_of(width)?;
    let den = LagrangeDenominators::new(width);
    let build = build_tree(ctx, x, width, shadow)?;
    let s = ctx.slot_count() as u64;
    finish_run(ctx, n, build, |tree| {
        let mut mults = 0u64;
        // children of the root: parent value is 1
        let mut upper: Vec<CipherVec> = (0..2).map(|i| tree.sibling(ell - 1, i).clone()).collect();
        for l in (0..ell - 1).rev() {
            upper = (0..2 << (ell - 1 - l))
                .map(|i| ctx.mul(&upper[i >> 1], tree.sibling(l, i)))
                .collect::<Result<Vec<_>>>()?;
            mults += upper.len() as u64;
        }
        let outs = match shadow {
            Some(_) => upper,
            None => {
                mults += width as u64;
                upper
                    .iter()
                    .enumerate()
                    .map(|(c, v)| ctx.mul_scalar(v, &den.inverse(c + 1)))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok((outs, mults * s))
    })
}

/// `n` parallel equality tests against the classes. `x` holds one 0-based
/// index in slot 0 (other slots zero); it is tiled over `n` slots first.
/// Slots at or beyond `n` compare 0 with 0 and should be ignored.
pub fn numeric_to_one_hot_naive(ctx: &HeContext, x: &CipherVec, n: usize, cfg: &EqConfig) -> Result<Measured<CipherVec>> {
    if n == 0 || n > ctx.slot_count() {
        return Err(HeError::SlotCountMismatch { expected: n, got: ctx.slot_count() });
    }
    let before = ctx.ledger();
    let dup = tile(ctx, x, 1, n)?;
    let classes = PlainVec::from_ints(0..n as i64).padded(ctx.slot_count());
    let mut r = eq_approx(ctx, &dup, Operand::Plain(&classes), cfg)?;
    let mut cost = ctx.ledger().since(&before);
    (cost.max_depth, cost.max_pt_free_depth) = (r.cost.max_depth, r.cost.max_pt_free_depth);
    r.cost = cost;
    r.slot_mults = cfg.ct_mults() * n as u64;
    Ok(r)
}

/// Exact `P_c(x)` for 1-based class `c` and 1-based point `x`.
pub fn lagrange_oracle(n: usize, c: usize, x: i64) -> BigRational {
    let num: BigInt = (1..=n as i64).filter(|&i| i as usize != c).map(|i| BigInt::from(x - i)).product();
    BigRational::new(num, LagrangeDenominators::new(n).get(c).clone())
}

/// Rows of the shadow-constant bounds table for `2..=max_ell` levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowBoundsRow {
    pub ell: usize,
    pub min: f64,
    pub max: f64,
    pub log2_min: f64,
    pub log2_max: f64,
}

pub fn shadow_bounds(max_ell: usize) -> Result<Vec<ShadowBoundsRow>> {
    if !(2..=16).contains(&max_ell) {
        return Err(HeError::InvalidParameter(format!("levels must be in 2..=16, got {max_ell}")));
    }
    (2..=max_ell)
        .map(|ell| {
            let (lo, hi) = build_shadow_tree(1 << ell)?.positive_bounds();
            let (min, max) = (to_f64(&lo), to_f64(&hi));
            Ok(ShadowBoundsRow { ell, min, max, log2_min: min.log2(), log2_max: max.log2() })
        })
        .collect()
}
