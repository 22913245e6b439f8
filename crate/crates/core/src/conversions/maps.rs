//! Conversions between map-shaped representations: CRT, hierarchical CRT,
//! binary, numeric residues and greater maps. A map of length `n` lives in
//! slots `[0, n)` of one ciphertext; scalar results land in slot 0.

use serde::{Deserialize, Serialize};

use crate::comparators::{product_tree, Operand};
use crate::error::{HeError, Result};
use crate::measure::{measure, Measured};
use crate::rational::int;
use crate::representations::{ceil_log2, CrtBasis, CrtRep, HierBasis, HierCrtRep, HierNode, OneHotMap};
use crate::simd::{CipherVec, HeContext, PlainVec};

fn fits(ctx: &HeContext, len: usize) -> Result<()> {
    if len > ctx.slot_count() {
        return Err(HeError::SlotCountMismatch { expected: len, got: ctx.slot_count() });
    }
    Ok(())
}

pub fn encrypt_map(ctx: &HeContext, map: &OneHotMap) -> Result<CipherVec> {
    ctx.encrypt_ints(&map.bits().iter().map(|&b| b as i64).collect::<Vec<_>>())
}

pub fn encrypt_crt(ctx: &HeContext, rep: &CrtRep) -> Result<Vec<CipherVec>> {
    rep.submaps.iter().map(|m| encrypt_map(ctx, m)).collect()
}

/// Encrypts the leaf maps of a hierarchical representation, left to right.
pub fn encrypt_hier(ctx: &HeContext, rep: &HierCrtRep) -> Result<Vec<CipherVec>> {
    rep.leaf_maps.iter().map(|m| encrypt_map(ctx, m)).collect()
}

/// Repeats the first `period` slots of `v` until `total` slots are covered.
/// Slots `[period, total)` of `v` must be zero. Uses `O(log(total/period))`
/// rotations and additions.
pub fn tile(ctx: &HeContext, v: &CipherVec, period: usize, total: usize) -> Result<CipherVec> {
    if period == 0 || !total.is_multiple_of(period) {
        return Err(HeError::InvalidParameter(format!("cannot tile period {period} over {total} slots")));
    }
    fits(ctx, total)?;
    let mut reps = total / period;
    let mut block = v.clone();
    let mut block_len = 1usize;
    let mut acc: Option<CipherVec> = None;
    let mut offset = 0usize;
    loop {
        if reps & 1 == 1 {
            let shifted = if offset == 0 { block.clone() } else { ctx.rotate(&block, -((offset * period) as i64))? };
            acc = Some(match acc {
                None => shifted,
                Some(a) => ctx.add(&a, &shifted)?,
            });
            offset += block_len;
        }
        reps >>= 1;
        if reps == 0 {
            break;
        }
        let r = ctx.rotate(&block, -((block_len * period) as i64))?;
        block = ctx.add(&block, &r)?;
        block_len *= 2;
    }
    Ok(acc.expect("at least one repetition"))
}

/// Keeps slot `slot` and zeroes the rest (one plaintext multiplication).
pub fn extract_slot(ctx: &HeContext, v: &CipherVec, slot: usize) -> Result<CipherVec> {
    let mask = PlainVec::from_ints((0..ctx.slot_count()).map(|i| i64::from(i == slot)));
    ctx.pt_mul(&mask, v)
}

/// `<classes, o>` in slot 0.
pub fn one_hot_to_numeric(ctx: &HeContext, o: &CipherVec, classes: Operand<'_>, n: usize) -> Result<Measured<CipherVec>> {
    fits(ctx, n)?;
    if let Operand::Plain(p) = classes {
        if p.len() > ctx.slot_count() {
            return Err(HeError::SlotCountMismatch { expected: ctx.slot_count(), got: p.len() });
        }
    }
    measure(ctx, || {
        let prod = match classes {
            Operand::Cipher(c) => ctx.mul(c, o)?,
            Operand::Plain(p) => ctx.pt_mul(&p.clone().padded(ctx.slot_count()), o)?,
        };
        Ok((ctx.rotate_and_sum(&prod, n.next_power_of_two())?, n as u64))
    })
}

/// Tiles each submap across `m` slots and multiplies the tiles with a
/// balanced tree: `k - 1` vector multiplications, depth `ceil(log2 k)`.
pub fn crt_to_one_hot(ctx: &HeContext, submaps: &[CipherVec], basis: &CrtBasis) -> Result<Measured<CipherVec>> {
    if submaps.len() != basis.moduli().len() {
        return Err(HeError::ShapeMismatch(format!(
            "{} submaps for {} moduli",
            submaps.len(),
            basis.moduli().len()
        )));
    }
    let m = basis.m() as usize;
    fits(ctx, m)?;
    measure(ctx, || {
        let tiled = duplicate_submaps(ctx, submaps, basis)?;
        let k = tiled.len() as u64;
        Ok((product_tree(ctx, tiled)?, m as u64 * (k - 1)))
    })
}

/// The duplicated vectors `o^d_j` before they are multiplied.
pub fn duplicate_submaps(ctx: &HeContext, submaps: &[CipherVec], basis: &CrtBasis) -> Result<Vec<CipherVec>> {
    let m = basis.m() as usize;
    submaps.iter().zip(basis.moduli()).map(|(v, &q)| tile(ctx, v, q as usize, m)).collect()
}

/// Applies [`crt_to_one_hot`] bottom-up over the modulus tree. The result
/// is a map over the product of the root's two children, with the one at
/// the encoded value.
pub fn hier_crt_to_one_hot(ctx: &HeContext, leaves: &[CipherVec], basis: &HierBasis) -> Result<Measured<CipherVec>> {
    let expected = basis.leaf_count();
    if leaves.len() != expected {
        return Err(HeError::InconsistentTree(format!("{} leaf maps for {expected} leaves", leaves.len())));
    }
    measure(ctx, || {
        let mut it = leaves.iter();
        let mut slot_mults = 0;
        let (map, _) = combine(ctx, &basis.root, &mut it, &mut slot_mults)?;
        Ok((map, slot_mults))
    })
}

/// Returns the node's map and its length.
fn combine<'a>(
    ctx: &HeContext,
    node: &HierNode,
    leaves: &mut impl Iterator<Item = &'a CipherVec>,
    slot_mults: &mut u64,
) -> Result<(CipherVec, u64)> {
    if node.is_leaf() {
        let v = leaves.next().ok_or_else(|| HeError::InconsistentTree("ran out of leaf maps".into()))?;
        return Ok((v.clone(), node.modulus));
    }
    let parts = node
        .children
        .iter()
        .map(|c| combine(ctx, c, leaves, slot_mults))
        .collect::<Result<Vec<_>>>()?;
    let moduli: Vec<u64> = node.children.iter().map(|c| c.modulus).collect();
    let product: u64 = moduli.iter().product();
    let basis = CrtBasis::new(moduli, product)?;
    let maps: Vec<CipherVec> = parts.into_iter().map(|(v, _)| v).collect();
    let r = crt_to_one_hot(ctx, &maps, &basis)?;
    *slot_mults += r.slot_mults;
    Ok((r.output, product))
}

/// Plaintext masks `w_i[x] = bit i of x` over `n` slots.
pub fn bit_masks(n: usize) -> Vec<Vec<i64>> {
    (0..ceil_log2(n as u64)).map(|i| (0..n).map(|x| ((x >> i) & 1) as i64).collect()).collect()
}

/// The selector `1 - w_i + dup(a[i]) (2 w_i - 1)` for every bit.
pub fn binary_selectors(ctx: &HeContext, bits: &[CipherVec], n: usize) -> Result<Vec<CipherVec>> {
    if !n.is_power_of_two() || n < 2 {
        return Err(HeError::NotPowerOfTwo(n));
    }
    if bits.len() != ceil_log2(n as u64) as usize {
        return Err(HeError::ShapeMismatch(format!("{} bits for n = {n}", bits.len())));
    }
    fits(ctx, n)?;
    let s = ctx.slot_count();
    bits.iter()
        .zip(bit_masks(n))
        .map(|(b, w)| {
            let dup = tile(ctx, b, 1, n)?;
            let slope = PlainVec::from_ints(w.iter().map(|&x| 2 * x - 1)).padded(s);
            let offset = PlainVec::from_ints(w.iter().map(|&x| 1 - x)).padded(s);
            ctx.add_plain(&ctx.pt_mul(&slope, &dup)?, &offset)
        })
        .collect()
}

/// Bits (each in slot 0, other slots zero) to a one-hot map over `n` slots.
pub fn binary_to_one_hot(ctx: &HeContext, bits: &[CipherVec], n: usize) -> Result<Measured<CipherVec>> {
    measure(ctx, || {
        let selectors = binary_selectors(ctx, bits, n)?;
        let k = selectors.len() as u64;
        Ok((product_tree(ctx, selectors)?, n as u64 * (2 * k - 1)))
    })
}

fn mask_dot(ctx: &HeContext, o: &CipherVec, mask: &[i64]) -> Result<CipherVec> {
    let p = PlainVec::from_ints(mask.iter().copied()).padded(ctx.slot_count());
    let prod = ctx.pt_mul(&p, o)?;
    ctx.rotate_and_sum(&prod, mask.len().next_power_of_two())
}

/// `a[k] = <m_k, o>` with bit-extraction masks; each bit ends in slot 0.
pub fn one_hot_to_binary(ctx: &HeContext, o: &CipherVec, n: usize) -> Result<Measured<Vec<CipherVec>>> {
    fits(ctx, n.next_power_of_two())?;
    measure(ctx, || {
        let masks = bit_masks(n);
        let k = masks.len() as u64;
        let bits = masks.iter().map(|m| mask_dot(ctx, o, m)).collect::<Result<Vec<_>>>()?;
        Ok((bits, k * n as u64))
    })
}

/// Numeric residues `a mod p_k` via masks `m_k[i] = i mod p_k`, each in slot 0.
pub fn one_hot_to_crt(ctx: &HeContext, o: &CipherVec, n: usize, basis: &CrtBasis) -> Result<Measured<Vec<CipherVec>>> {
    if basis.m() != n as u64 {
        return Err(HeError::ShapeMismatch(format!("basis product {} differs from map length {n}", basis.m())));
    }
    fits(ctx, n.next_power_of_two())?;
    measure(ctx, || {
        let outs = basis
            .moduli()
            .iter()
            .map(|&p| mask_dot(ctx, o, &(0..n as u64).map(|i| (i % p) as i64).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Ok((outs, basis.moduli().len() as u64 * n as u64))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefixForm {
    /// `g[j] = 1` iff `j >= a`.
    Inclusive,
    /// `g[j] = 1` iff `j > a`.
    Greater,
    /// `g[j] = 1` iff `j < a` (on the first `n` slots).
    Less,
}

/// Prefix-sum greater map of a packed one-hot map: `log2 n` rotations and
/// additions, no multiplications. Needs `2 * next_pow2(n)` slots so the
/// shifted partial sums never wrap; slots `>= n` hold partial sums.
pub fn greater_map_from_one_hot(ctx: &HeContext, o: &CipherVec, n: usize, form: PrefixForm) -> Result<Measured<CipherVec>> {
    fits(ctx, 2 * n.next_power_of_two())?;
    measure(ctx, || {
        let mut acc = o.clone();
        let mut step = 1;
        while step < n {
            let r = ctx.rotate(&acc, -(step as i64))?;
            acc = ctx.add(&acc, &r)?;
            step <<= 1;
        }
        let out = match form {
            PrefixForm::Inclusive => acc,
            PrefixForm::Greater => ctx.rotate(&acc, -1)?,
            PrefixForm::Less => {
                let ones = PlainVec::from_ints((0..n).map(|_| 1)).padded(ctx.slot_count());
                ctx.plain_sub(&ones, &acc)?
            }
        };
        Ok((out, 0))
    })
}

/// Prefix sums over one ciphertext per class: `n - 1` additions.
pub fn greater_map_from_slots(ctx: &HeContext, o: &[CipherVec], form: PrefixForm) -> Result<Measured<Vec<CipherVec>>> {
    if o.is_empty() {
        return Err(HeError::InvalidParameter("empty one-hot map".into()));
    }
    measure(ctx, || {
        let mut inclusive = vec![o[0].clone()];
        for v in &o[1..] {
            let next = ctx.add(inclusive.last().expect("non-empty"), v)?;
            inclusive.push(next);
        }
        let out = match form {
            PrefixForm::Inclusive => inclusive,
            PrefixForm::Greater => {
                let zero = ctx.sub(&o[0], &o[0])?;
                std::iter::once(zero).chain(inclusive.into_iter().take(o.len() - 1)).collect()
            }
            PrefixForm::Less => inclusive.iter().map(|g| ctx.scalar_sub(&int(1), g)).collect::<Result<_>>()?,
        };
        Ok((out, 0))
    })
}
