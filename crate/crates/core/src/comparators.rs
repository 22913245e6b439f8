//! Equality, greater-than and range circuits.

use serde::{Deserialize, Serialize};

use crate::error::{HeError, Result};
use crate::measure::{measure, Depth, Measured};
use crate::rational::{frac, int};
use crate::representations::ceil_log2;
use crate::simd::{CipherVec, HeContext, PlainVec};

/// Second operand of a comparison.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Cipher(&'a CipherVec),
    Plain(&'a PlainVec),
}

/// Approximate equality on integers in `[domain_bound]`.
///
/// Evaluates `t = 1 - ((x - y) / n)^2`, squares it `amplify` times so that every
/// nonzero difference lands below 1/2, then applies `sharpen_iters` rounds of
/// `t^2 (3 - 2t)`, which fixes 0 and 1 and pulls everything else toward them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EqConfig {
    pub alpha: f64,
    pub beta: f64,
    pub sharpen_iters: u32,
    pub domain_bound: u64,
    /// Squarings before sharpening; `None` picks `ceil(log2(n^2))`.
    pub amplify: Option<u32>,
}

impl Default for EqConfig {
    fn default() -> Self {
        EqConfig { alpha: 0.5, beta: 0.05, sharpen_iters: 4, domain_bound: 100, amplify: None }
    }
}

impl EqConfig {
    pub fn for_domain(domain_bound: u64) -> Self {
        EqConfig { domain_bound, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(HeError::InvalidParameter("alpha and beta must be positive".into()));
        }
        if self.sharpen_iters == 0 {
            return Err(HeError::InvalidParameter("sharpen_iters must be at least 1".into()));
        }
        if self.domain_bound == 0 {
            return Err(HeError::InvalidParameter("domain_bound must be positive".into()));
        }
        Ok(())
    }

    pub fn amplify_squarings(&self) -> u32 {
        self.amplify.unwrap_or_else(|| ceil_log2(self.domain_bound * self.domain_bound))
    }

    /// Depth the ledger reports for one evaluation.
    pub fn advertised_depth(&self) -> u32 {
        2 + self.amplify_squarings() + 2 * self.sharpen_iters
    }

    /// Ciphertext multiplications per evaluation.
    pub fn ct_mults(&self) -> u64 {
        1 + self.amplify_squarings() as u64 + 2 * self.sharpen_iters as u64
    }

    /// Plaintext evaluation of the polynomial at difference `d`.
    pub fn eval(&self, d: f64) -> f64 {
        let n = self.domain_bound as f64;
        let mut t = 1.0 - (d / n) * (d / n);
        for _ in 0..self.amplify_squarings() {
            t *= t;
        }
        for _ in 0..self.sharpen_iters {
            t = t * t * (3.0 - 2.0 * t);
        }
        t
    }

    /// Worst error over all integer differences in the domain.
    pub fn predicted_error(&self) -> f64 {
        let n = self.domain_bound as i64;
        (0..n).map(|d| if d == 0 { (1.0 - self.eval(0.0)).abs() } else { self.eval(d as f64).abs() }).fold(0.0, f64::max)
    }

    /// Whether the configuration meets its own `beta` tolerance.
    pub fn meets_beta(&self) -> bool {
        self.predicted_error() <= self.beta
    }
}

pub fn eq_approx(ctx: &HeContext, x: &CipherVec, y: Operand<'_>, cfg: &EqConfig) -> Result<Measured<CipherVec>> {
    cfg.validate()?;
    measure(ctx, || {
        let d = match y {
            Operand::Cipher(y) => ctx.sub(x, y)?,
            Operand::Plain(y) => ctx.sub_plain(x, y)?,
        };
        let scaled = ctx.mul_scalar(&d, &frac(1, cfg.domain_bound as i64))?;
        let sq = ctx.square(&scaled)?;
        let mut t = ctx.scalar_sub(&int(1), &sq)?;
        for _ in 0..cfg.amplify_squarings() {
            t = ctx.square(&t)?;
        }
        for _ in 0..cfg.sharpen_iters {
            t = smoothstep(ctx, &t)?;
        }
        Ok((t, cfg.ct_mults() * ctx.slot_count() as u64))
    })
}

fn smoothstep(ctx: &HeContext, t: &CipherVec) -> Result<CipherVec> {
    let t2 = ctx.square(t)?;
    let lin = ctx.scalar_sub(&int(3), &ctx.mul_scalar(t, &int(2))?)?;
    ctx.mul(&t2, &lin)
}

/// Multiplies all inputs with a balanced tree: `len - 1` multiplications,
/// depth `ceil(log2 len)` above the inputs.
pub fn product_tree(ctx: &HeContext, items: Vec<CipherVec>) -> Result<CipherVec> {
    if items.is_empty() {
        return Err(HeError::InvalidParameter("empty product".into()));
    }
    let mut level = items;
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(ctx.mul(&a, &b)?),
                None => next.push(a),
            }
        }
        level = next;
    }
    Ok(level.pop().expect("non-empty"))
}

fn sum_all(ctx: &HeContext, items: &[CipherVec]) -> Result<CipherVec> {
    let mut acc = items[0].clone();
    for v in &items[1..] {
        acc = ctx.add(&acc, v)?;
    }
    Ok(acc)
}

/// Bit operands, one ciphertext per bit position; slot `j` holds sample `j`.
#[derive(Debug, Clone)]
pub struct BitVecPair {
    pub a: Vec<CipherVec>,
    pub b: Vec<CipherVec>,
}

impl BitVecPair {
    /// Encrypts per-sample bit vectors (`a[j]` and `b[j]` go to slot `j`).
    pub fn encrypt(ctx: &HeContext, a: &[Vec<u8>], b: &[Vec<u8>]) -> Result<Self> {
        Ok(BitVecPair { a: encrypt_bits(ctx, a)?, b: encrypt_bits(ctx, b)? })
    }

    pub fn width(&self) -> usize {
        self.a.len()
    }

    fn check(&self) -> Result<usize> {
        if self.a.len() != self.b.len() || self.a.is_empty() {
            return Err(HeError::ShapeMismatch(format!("bit widths {} and {}", self.a.len(), self.b.len())));
        }
        Ok(self.a.len())
    }
}

fn bit_width(samples: &[Vec<u8>]) -> Result<usize> {
    let w = samples.first().map_or(0, Vec::len);
    if w == 0 || samples.iter().any(|s| s.len() != w) {
        return Err(HeError::ShapeMismatch("samples need a common non-zero bit width".into()));
    }
    Ok(w)
}

pub fn encrypt_bits(ctx: &HeContext, samples: &[Vec<u8>]) -> Result<Vec<CipherVec>> {
    let w = bit_width(samples)?;
    (0..w)
        .map(|i| ctx.encrypt_ints(&samples.iter().map(|s| s[i] as i64).collect::<Vec<_>>()))
        .collect()
}

/// Packs bits `2i` and `2i + 1` as `a[2i] + i a[2i+1]`, one ciphertext per pair.
pub fn encrypt_bit_pairs(ctx: &HeContext, samples: &[Vec<u8>]) -> Result<Vec<CipherVec>> {
    let w = bit_width(samples)?;
    if w % 2 != 0 {
        return Err(HeError::InvalidParameter(format!("complex packing needs an even bit width, got {w}")));
    }
    (0..w / 2)
        .map(|i| {
            let vals: Vec<num_complex::Complex64> = samples
                .iter()
                .map(|s| num_complex::Complex64::new(s[2 * i] as f64, s[2 * i + 1] as f64))
                .collect();
            ctx.encrypt(&vals)
        })
        .collect()
}

/// `AND_i XNOR(a[i], b[i])` with `XNOR(x, y) = 1 - (x - y)^2`.
pub fn bitvec_equal(ctx: &HeContext, p: &BitVecPair) -> Result<Measured<CipherVec>> {
    let n = p.check()?;
    measure(ctx, || {
        let xnors = p
            .a
            .iter()
            .zip(&p.b)
            .map(|(a, b)| ctx.scalar_sub(&int(1), &ctx.square(&ctx.sub(a, b)?)?))
            .collect::<Result<Vec<_>>>()?;
        Ok((product_tree(ctx, xnors)?, (2 * n - 1) as u64))
    })
}

/// `(1 - s/n)^(2^zt_iters)`: exactly 1 at `s = 0`, at most
/// [`zero_test_bound`] for integer `s` in `[1, n]`.
pub fn zero_test(ctx: &HeContext, s: &CipherVec, n: u64, zt_iters: u32) -> Result<CipherVec> {
    let mut t = ctx.scalar_sub(&int(1), &ctx.mul_scalar(s, &frac(1, n as i64))?)?;
    for _ in 0..zt_iters {
        t = ctx.square(&t)?;
    }
    Ok(t)
}

pub fn zero_test_bound(n: u64, zt_iters: u32) -> f64 {
    (1.0 - 1.0 / n as f64).powf(2f64.powi(zt_iters as i32))
}

/// Equality through `ZeroTest(sum_i (a[i] - b[i])^2)`.
pub fn bitvec_equal_xorsum(ctx: &HeContext, p: &BitVecPair, zt_iters: u32) -> Result<Measured<CipherVec>> {
    let n = p.check()?;
    measure(ctx, || {
        let xors = p
            .a
            .iter()
            .zip(&p.b)
            .map(|(a, b)| ctx.square(&ctx.sub(a, b)?))
            .collect::<Result<Vec<_>>>()?;
        let s = sum_all(ctx, &xors)?;
        Ok((zero_test(ctx, &s, n as u64, zt_iters)?, n as u64 + zt_iters as u64))
    })
}

/// Complex-packed equality: `s = sum_i d[i] conj(d[i])` over the `n/2` packed
/// differences, then the zero test over `[0, n]`.
pub fn bitvec_equal_complex(
    ctx: &HeContext,
    a: &[CipherVec],
    b: &[CipherVec],
    zt_iters: u32,
) -> Result<Measured<CipherVec>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(HeError::ShapeMismatch(format!("packed widths {} and {}", a.len(), b.len())));
    }
    let n = 2 * a.len() as u64;
    measure(ctx, || {
        let norms = a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let d = ctx.sub(x, y)?;
                ctx.mul(&d, &ctx.conjugate(&d)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let s = sum_all(ctx, &norms)?;
        Ok((zero_test(ctx, &s, n, zt_iters)?, n / 2 + zt_iters as u64))
    })
}

/// A ciphertext together with the slot that holds the answer.
#[derive(Debug, Clone, Serialize)]
pub struct SlotRef {
    #[serde(skip)]
    pub ct: CipherVec,
    pub slot: usize,
}

impl Depth for SlotRef {
    fn depths(&self) -> (u32, u32) {
        self.ct.depths()
    }
}

#[derive(Debug, Clone, Copy)]
pub enum GeOperand<'a> {
    Plain(usize),
    /// One-hot map of `b` over the same `n` slots as the greater map.
    Cipher(&'a CipherVec),
}

/// `1` iff `b > a`, given the greater map `g_a` over `n` slots.
pub fn ge_via_maps(ctx: &HeContext, g_a: &CipherVec, b: GeOperand<'_>, n: usize) -> Result<Measured<SlotRef>> {
    if n == 0 || n > ctx.slot_count() {
        return Err(HeError::InvalidParameter(format!("map length {n} does not fit the context")));
    }
    measure(ctx, || match b {
        GeOperand::Plain(b) => {
            if b >= n {
                return Err(HeError::OutOfRange { value: b, n });
            }
            Ok((SlotRef { ct: g_a.clone(), slot: b }, 0))
        }
        GeOperand::Cipher(o_b) => {
            let prod = ctx.mul(g_a, o_b)?;
            let ct = ctx.rotate_and_sum(&prod, n.next_power_of_two())?;
            Ok((SlotRef { ct, slot: 0 }, n as u64))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangePath {
    /// `(value >= a) * (value <= b)`, each a masked dot product.
    MapProduct,
    /// One dot product with the indicator of `[a, b]`.
    IntervalMask,
}

fn masked_sum(ctx: &HeContext, m: &CipherVec, n: usize, pred: impl Fn(usize) -> bool) -> Result<CipherVec> {
    let mask = PlainVec::from_ints((0..n).map(|i| i64::from(pred(i)))).padded(ctx.slot_count());
    let prod = ctx.pt_mul(&mask, m)?;
    ctx.rotate_and_sum(&prod, n.next_power_of_two())
}

/// `1` in slot 0 iff the one-hot `m` encodes a value in `[a, b]`.
pub fn range_check(
    ctx: &HeContext,
    m: &CipherVec,
    a: usize,
    b: usize,
    n: usize,
    path: RangePath,
) -> Result<Measured<CipherVec>> {
    if a > b {
        return Err(HeError::InvalidParameter(format!("empty range [{a}, {b}]")));
    }
    if b >= n {
        return Err(HeError::OutOfRange { value: b, n });
    }
    if n > ctx.slot_count() {
        return Err(HeError::SlotCountMismatch { expected: n, got: ctx.slot_count() });
    }
    measure(ctx, || match path {
        RangePath::MapProduct => {
            let ge = masked_sum(ctx, m, n, |i| i >= a)?;
            let le = masked_sum(ctx, m, n, |i| i <= b)?;
            Ok((ctx.mul(&ge, &le)?, 2 * n as u64 + 1))
        }
        RangePath::IntervalMask => Ok((masked_sum(ctx, m, n, |i| (a..=b).contains(&i))?, n as u64)),
    })
}
