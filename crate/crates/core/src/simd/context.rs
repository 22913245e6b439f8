use std::cell::RefCell;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ledger::CostLedger;
use super::profile::ArithmeticProfile;
use super::slots::{exact_abs_upper, exact_from_c64, ExactComplex, FixedComplex, Slots};
use crate::error::{HeError, Result};

static NEXT_CONTEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Context parameters as read from a JSON configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContextParams {
    pub slot_count: usize,
    pub profile: ArithmeticProfile,
    pub depth_budget: Option<u32>,
    pub auto_bootstrap: bool,
    pub seed: u64,
}

impl Default for ContextParams {
    fn default() -> Self {
        ContextParams {
            slot_count: 1 << 15,
            profile: ArithmeticProfile::Exact,
            depth_budget: None,
            auto_bootstrap: false,
            seed: 0,
        }
    }
}

impl ContextParams {
    pub fn new(slot_count: usize, profile: ArithmeticProfile) -> Self {
        ContextParams { slot_count, profile, ..Default::default() }
    }

    pub fn with_depth_budget(mut self, budget: u32, auto_bootstrap: bool) -> Self {
        self.depth_budget = Some(budget);
        self.auto_bootstrap = auto_bootstrap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Plaintext operand: exact complex values, encoded into the context's
/// arithmetic only when used.
#[derive(Debug, Clone, PartialEq)]
pub struct PlainVec {
    slots: Vec<ExactComplex>,
}

impl PlainVec {
    pub fn from_exact(slots: Vec<ExactComplex>) -> Self {
        PlainVec { slots }
    }

    pub fn from_rationals(values: impl IntoIterator<Item = BigRational>) -> Self {
        PlainVec { slots: values.into_iter().map(|r| Complex::new(r, BigRational::zero())).collect() }
    }

    pub fn from_ints(values: impl IntoIterator<Item = i64>) -> Self {
        Self::from_rationals(values.into_iter().map(|v| BigRational::from_integer(BigInt::from(v))))
    }

    pub fn from_reals(values: &[f64]) -> Self {
        Self::from_complex(&values.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn from_complex(values: &[Complex64]) -> Self {
        PlainVec { slots: values.iter().map(|&z| exact_from_c64(z)).collect() }
    }

    /// Same value in every one of `slot_count` slots.
    pub fn broadcast(value: BigRational, slot_count: usize) -> Self {
        PlainVec { slots: vec![Complex::new(value, BigRational::zero()); slot_count] }
    }

    /// Pads with zeros (or truncates) to `slot_count` slots.
    pub fn padded(mut self, slot_count: usize) -> Self {
        self.slots.resize(slot_count, Complex::new(BigRational::zero(), BigRational::zero()));
        self
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[ExactComplex] {
        &self.slots
    }

    pub fn max_abs(&self) -> f64 {
        self.slots.iter().map(exact_abs_upper).fold(0.0, f64::max)
    }
}

/// A simulated ciphertext.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherVec {
    ctx_id: u64,
    slots: Slots,
    depth: u32,
    pt_free_depth: u32,
    magnitude_bound: f64,
}

impl CipherVec {
    /// Multiplicative depth, counting plaintext multiplications.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Depth counting only ciphertext-ciphertext multiplications.
    pub fn pt_free_depth(&self) -> u32 {
        self.pt_free_depth
    }

    pub fn magnitude_bound(&self) -> f64 {
        self.magnitude_bound
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }
}

/// Simulation context: slot count, arithmetic profile, depth budget and the
/// cost ledger. Confined to one thread; operations take `&self` and record
/// their cost through interior mutability.
#[derive(Debug)]
pub struct HeContext {
    id: u64,
    params: ContextParams,
    ledger: RefCell<CostLedger>,
    rng: RefCell<ChaCha8Rng>,
}

impl HeContext {
    pub fn new(params: ContextParams) -> Result<Self> {
        if !params.slot_count.is_power_of_two() {
            return Err(HeError::NotPowerOfTwo(params.slot_count));
        }
        params.profile.validate()?;
        Ok(HeContext {
            id: NEXT_CONTEXT_ID.fetch_add(1, Ordering::Relaxed),
            rng: RefCell::new(ChaCha8Rng::seed_from_u64(params.seed)),
            ledger: RefCell::new(CostLedger::default()),
            params,
        })
    }

    pub fn exact(slot_count: usize) -> Result<Self> {
        Self::new(ContextParams::new(slot_count, ArithmeticProfile::Exact))
    }

    pub fn with_profile(slot_count: usize, profile: ArithmeticProfile) -> Result<Self> {
        Self::new(ContextParams::new(slot_count, profile))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::new(serde_json::from_str(json)?)
    }

    pub fn params(&self) -> &ContextParams {
        &self.params
    }

    pub fn slot_count(&self) -> usize {
        self.params.slot_count
    }

    pub fn profile(&self) -> ArithmeticProfile {
        self.params.profile
    }

    pub fn ledger(&self) -> CostLedger {
        *self.ledger.borrow()
    }

    pub fn reset_ledger(&self) -> CostLedger {
        self.ledger.replace(CostLedger::default())
    }

    fn frac_bits(&self) -> u32 {
        match self.params.profile {
            ArithmeticProfile::FixedPoint { frac_bits, .. } => frac_bits,
            _ => 0,
        }
    }

    fn int_limit(&self) -> Option<(f64, u32)> {
        match self.params.profile {
            ArithmeticProfile::FixedPoint { int_bits, .. } => Some(((int_bits as f64).exp2(), int_bits)),
            _ => None,
        }
    }

    fn check(&self, a: &CipherVec) -> Result<()> {
        if a.ctx_id != self.id {
            return Err(HeError::ContextMismatch);
        }
        Ok(())
    }

    fn check_plain(&self, p: &PlainVec) -> Result<()> {
        if p.len() != self.slot_count() {
            return Err(HeError::SlotCountMismatch { expected: self.slot_count(), got: p.len() });
        }
        Ok(())
    }

    fn encode_exact(&self, values: Vec<ExactComplex>) -> Result<Slots> {
        Ok(match self.params.profile {
            ArithmeticProfile::Exact => Slots::Exact(values),
            ArithmeticProfile::FixedPoint { frac_bits, .. } => {
                let limit = self.int_limit().expect("fixed profile");
                let mut out = Vec::with_capacity(values.len());
                for z in &values {
                    let m = exact_abs_upper(z);
                    if m > limit.0 {
                        return Err(HeError::Overflow { magnitude: m, int_bits: limit.1 });
                    }
                    out.push(FixedComplex::from_exact(z, frac_bits)?);
                }
                Slots::Fixed(out)
            }
            ArithmeticProfile::Noisy { .. } => {
                Slots::Float(values.iter().map(super::slots::exact_to_c64).collect())
            }
        })
    }

    fn add_noise(&self, slots: Slots) -> Slots {
        match (self.params.profile, slots) {
            (ArithmeticProfile::Noisy { noise_sigma }, Slots::Float(mut v)) if noise_sigma > 0.0 => {
                let normal = Normal::new(0.0, noise_sigma).expect("validated sigma");
                let mut rng = self.rng.borrow_mut();
                for z in v.iter_mut() {
                    z.re += normal.sample(&mut *rng);
                    z.im += normal.sample(&mut *rng);
                }
                Slots::Float(v)
            }
            (_, s) => s,
        }
    }

    /// Overflow check, bound bookkeeping and depth observation for a result.
    fn finish(&self, slots: Slots, depth: u32, pt_free_depth: u32, propagated: f64, noisy: bool) -> Result<CipherVec> {
        let slots = if noisy { self.add_noise(slots) } else { slots };
        let observed = slots.max_abs(self.frac_bits());
        if let Some((limit, int_bits)) = self.int_limit() {
            if observed > limit {
                return Err(HeError::Overflow { magnitude: observed, int_bits });
            }
        }
        self.ledger.borrow_mut().observe_depth(depth, pt_free_depth);
        Ok(CipherVec {
            ctx_id: self.id,
            slots,
            depth,
            pt_free_depth,
            magnitude_bound: propagated.max(observed),
        })
    }

    // ---- encryption ---------------------------------------------------------

    pub fn encrypt_exact(&self, mut values: Vec<ExactComplex>) -> Result<CipherVec> {
        let s = self.slot_count();
        if values.len() > s {
            return Err(HeError::SlotCountMismatch { expected: s, got: values.len() });
        }
        values.resize(s, Complex::new(BigRational::zero(), BigRational::zero()));
        let slots = self.encode_exact(values)?;
        self.finish(slots, 0, 0, 0.0, true)
    }

    pub fn encrypt(&self, values: &[Complex64]) -> Result<CipherVec> {
        let s = self.slot_count();
        if values.len() > s {
            return Err(HeError::SlotCountMismatch { expected: s, got: values.len() });
        }
        let frac_bits = self.frac_bits();
        let mut padded = values.to_vec();
        padded.resize(s, Complex64::new(0.0, 0.0));
        let slots = match self.params.profile {
            ArithmeticProfile::Exact => Slots::Exact(padded.into_iter().map(exact_from_c64).collect()),
            ArithmeticProfile::FixedPoint { .. } => Slots::Fixed(
                padded
                    .into_iter()
                    .map(|z| FixedComplex::from_c64(z, frac_bits))
                    .collect::<Result<_>>()?,
            ),
            ArithmeticProfile::Noisy { .. } => Slots::Float(padded),
        };
        self.finish(slots, 0, 0, 0.0, true)
    }

    pub fn encrypt_real(&self, values: &[f64]) -> Result<CipherVec> {
        self.encrypt(&values.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn encrypt_ints(&self, values: &[i64]) -> Result<CipherVec> {
        self.encrypt_exact(
            values
                .iter()
                .map(|&v| Complex::new(BigRational::from_integer(v.into()), BigRational::zero()))
                .collect(),
        )
    }

    pub fn decrypt(&self, a: &CipherVec) -> Vec<Complex64> {
        a.slots.to_c64(self.frac_bits())
    }

    pub fn decrypt_real(&self, a: &CipherVec) -> Vec<f64> {
        self.decrypt(a).into_iter().map(|z| z.re).collect()
    }

    /// Exact slot values; only available under the `Exact` profile.
    pub fn decrypt_exact(&self, a: &CipherVec) -> Option<Vec<ExactComplex>> {
        match &a.slots {
            Slots::Exact(v) => Some(v.clone()),
            _ => None,
        }
    }

    // ---- arithmetic ---------------------------------------------------------

    pub fn add(&self, a: &CipherVec, b: &CipherVec) -> Result<CipherVec> {
        self.check(a)?;
        self.check(b)?;
        let slots = a.slots.zip_with(&b.slots, |x, y| x + y, |x, y| x.add(y), |x, y| x + y)?;
        self.ledger.borrow_mut().adds += 1;
        self.finish(
            slots,
            a.depth.max(b.depth),
            a.pt_free_depth.max(b.pt_free_depth),
            a.magnitude_bound + b.magnitude_bound,
            true,
        )
    }

    pub fn sub(&self, a: &CipherVec, b: &CipherVec) -> Result<CipherVec> {
        self.check(a)?;
        self.check(b)?;
        let slots = a.slots.zip_with(&b.slots, |x, y| x - y, |x, y| x.sub(y), |x, y| x - y)?;
        self.ledger.borrow_mut().adds += 1;
        self.finish(
            slots,
            a.depth.max(b.depth),
            a.pt_free_depth.max(b.pt_free_depth),
            a.magnitude_bound + b.magnitude_bound,
            true,
        )
    }

    pub fn add_plain(&self, a: &CipherVec, p: &PlainVec) -> Result<CipherVec> {
        self.check(a)?;
        self.check_plain(p)?;
        let enc = self.encode_exact(p.slots.clone())?;
        let slots = a.slots.zip_with(&enc, |x, y| x + y, |x, y| x.add(y), |x, y| x + y)?;
        self.ledger.borrow_mut().adds += 1;
        self.finish(slots, a.depth, a.pt_free_depth, a.magnitude_bound + p.max_abs(), false)
    }

    pub fn sub_plain(&self, a: &CipherVec, p: &PlainVec) -> Result<CipherVec> {
        self.check(a)?;
        self.check_plain(p)?;
        let enc = self.encode_exact(p.slots.clone())?;
        let slots = a.slots.zip_with(&enc, |x, y| x - y, |x, y| x.sub(y), |x, y| x - y)?;
        self.ledger.borrow_mut().adds += 1;
        self.finish(slots, a.depth, a.pt_free_depth, a.magnitude_bound + p.max_abs(), false)
    }

    /// `p - a`.
    pub fn plain_sub(&self, p: &PlainVec, a: &CipherVec) -> Result<CipherVec> {
        self.check(a)?;
        self.check_plain(p)?;
        let enc = self.encode_exact(p.slots.clone())?;
        let slots = enc.zip_with(&a.slots, |x, y| x - y, |x, y| x.sub(y), |x, y| x - y)?;
        self.ledger.borrow_mut().adds += 1;
        self.finish(slots, a.depth, a.pt_free_depth, a.magnitude_bound + p.max_abs(), false)
    }

    pub fn add_scalar(&self, a: &CipherVec, c: &BigRational) -> Result<CipherVec> {
        self.add_plain(a, &PlainVec::broadcast(c.clone(), self.slot_count()))
    }

    /// `c - a`, the usual way of forming complements such as `1 - x`.
    pub fn scalar_sub(&self, c: &BigRational, a: &CipherVec) -> Result<CipherVec> {
        self.plain_sub(&PlainVec::broadcast(c.clone(), self.slot_count()), a)
    }

    /// Bootstraps operands as needed so that a multiplication fits the budget.
    fn fit_budget(&self, a: &CipherVec, b: Option<&CipherVec>) -> Result<(CipherVec, Option<CipherVec>)> {
        let mut a = a.clone();
        let mut b = b.cloned();
        let Some(budget) = self.params.depth_budget else {
            return Ok((a, b));
        };
        let next = a.depth.max(b.as_ref().map_or(0, |b| b.depth)) + 1;
        if next <= budget {
            return Ok((a, b));
        }
        if !self.params.auto_bootstrap || budget == 0 {
            return Err(HeError::DepthBudgetExceeded { depth: next, budget });
        }
        if a.depth + 1 > budget {
            a = self.bootstrap(&a)?;
        }
        if let Some(bb) = b.as_ref() {
            if bb.depth + 1 > budget {
                b = Some(self.bootstrap(bb)?);
            }
        }
        Ok((a, b))
    }

    /// Resets depth to zero without touching the values.
    pub fn bootstrap(&self, a: &CipherVec) -> Result<CipherVec> {
        self.check(a)?;
        self.ledger.borrow_mut().bootstraps += 1;
        Ok(CipherVec { depth: 0, pt_free_depth: 0, ..a.clone() })
    }

    pub fn mul(&self, a: &CipherVec, b: &CipherVec) -> Result<CipherVec> {
        self.check(a)?;
        self.check(b)?;
        let (a, b) = self.fit_budget(a, Some(b))?;
        let b = b.expect("second operand");
        let frac_bits = self.frac_bits();
        let slots = a.slots.zip_with(&b.slots, |x, y| x * y, |x, y| x.mul(y, frac_bits), |x, y| x * y)?;
        self.ledger.borrow_mut().ct_mults += 1;
        self.finish(
            slots,
            a.depth.max(b.depth) + 1,
            a.pt_free_depth.max(b.pt_free_depth) + 1,
            a.magnitude_bound * b.magnitude_bound,
            true,
        )
    }

    pub fn square(&self, a: &CipherVec) -> Result<CipherVec> {
        self.mul(a, a)
    }

    pub fn pt_mul(&self, p: &PlainVec, a: &CipherVec) -> Result<CipherVec> {
        self.check(a)?;
        self.check_plain(p)?;
        let (a, _) = self.fit_budget(a, None)?;
        let enc = self.encode_exact(p.slots.clone())?;
        let frac_bits = self.frac_bits();
        let slots = a.slots.zip_with(&enc, |x, y| x * y, |x, y| x.mul(y, frac_bits), |x, y| x * y)?;
        self.ledger.borrow_mut().pt_mults += 1;
        self.finish(slots, a.depth + 1, a.pt_free_depth, a.magnitude_bound * p.max_abs(), false)
    }

    pub fn mul_scalar(&self, a: &CipherVec, c: &BigRational) -> Result<CipherVec> {
        self.pt_mul(&PlainVec::broadcast(c.clone(), self.slot_count()), a)
    }

    /// Cyclic left rotation by `k` (negative `k` rotates right).
    pub fn rotate(&self, a: &CipherVec, k: i64) -> Result<CipherVec> {
        self.check(a)?;
        let s = self.slot_count() as i64;
        let shift = k.rem_euclid(s) as usize;
        self.ledger.borrow_mut().rotations += 1;
        Ok(CipherVec { slots: a.slots.rotate_left(shift), ..a.clone() })
    }

    pub fn conjugate(&self, a: &CipherVec) -> Result<CipherVec> {
        self.check(a)?;
        self.ledger.borrow_mut().conjugations += 1;
        Ok(CipherVec { slots: a.slots.conj(), ..a.clone() })
    }

    /// Sliding-window sum: slot `i` receives `a[i] + … + a[i + len - 1]`
    /// (indices mod the slot count), so the first slot of each aligned block
    /// holds the block sum and, when `len` equals the slot count, every slot
    /// holds the total. Costs `log2(len)` rotations and additions.
    pub fn rotate_and_sum(&self, a: &CipherVec, len: usize) -> Result<CipherVec> {
        self.check(a)?;
        if !len.is_power_of_two() {
            return Err(HeError::NotPowerOfTwo(len));
        }
        if len > self.slot_count() {
            return Err(HeError::InvalidParameter(format!(
                "rotate_and_sum length {len} exceeds slot count {}",
                self.slot_count()
            )));
        }
        let mut acc = a.clone();
        let mut step = 1;
        while step < len {
            let r = self.rotate(&acc, step as i64)?;
            acc = self.add(&acc, &r)?;
            step <<= 1;
        }
        Ok(acc)
    }
}
