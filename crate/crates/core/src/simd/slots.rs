use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{HeError, Result};

/// Complex slot value over exact rationals.
pub type ExactComplex = Complex<BigRational>;

/// A complex slot value stored as two integers scaled by `2^frac_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FixedComplex {
    pub re: i128,
    pub im: i128,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Slots {
    Exact(Vec<ExactComplex>),
    Fixed(Vec<FixedComplex>),
    Float(Vec<Complex64>),
}

fn wide() -> HeError {
    HeError::Overflow { magnitude: f64::INFINITY, int_bits: 0 }
}

fn round_shift(v: i128, frac_bits: u32) -> i128 {
    // round half up
    (v + (1i128 << (frac_bits - 1))) >> frac_bits
}

impl FixedComplex {
    pub(crate) fn add(self, o: Self) -> Result<Self> {
        Ok(FixedComplex {
            re: self.re.checked_add(o.re).ok_or_else(wide)?,
            im: self.im.checked_add(o.im).ok_or_else(wide)?,
        })
    }

    pub(crate) fn sub(self, o: Self) -> Result<Self> {
        Ok(FixedComplex {
            re: self.re.checked_sub(o.re).ok_or_else(wide)?,
            im: self.im.checked_sub(o.im).ok_or_else(wide)?,
        })
    }

    pub(crate) fn mul(self, o: Self, frac_bits: u32) -> Result<Self> {
        let m = |a: i128, b: i128| a.checked_mul(b).ok_or_else(wide);
        let re = m(self.re, o.re)?.checked_sub(m(self.im, o.im)?).ok_or_else(wide)?;
        let im = m(self.re, o.im)?.checked_add(m(self.im, o.re)?).ok_or_else(wide)?;
        Ok(FixedComplex { re: round_shift(re, frac_bits), im: round_shift(im, frac_bits) })
    }

    pub(crate) fn to_c64(self, frac_bits: u32) -> Complex64 {
        let scale = (frac_bits as f64).exp2();
        Complex64::new(self.re as f64 / scale, self.im as f64 / scale)
    }

    pub(crate) fn from_c64(z: Complex64, frac_bits: u32) -> Result<Self> {
        let scale = (frac_bits as f64).exp2();
        let cv = |x: f64| {
            let r = (x * scale).round();
            if r.is_finite() && r.abs() < 1.0e37 {
                Ok(r as i128)
            } else {
                Err(wide())
            }
        };
        Ok(FixedComplex { re: cv(z.re)?, im: cv(z.im)? })
    }

    pub(crate) fn from_exact(z: &ExactComplex, frac_bits: u32) -> Result<Self> {
        Ok(FixedComplex {
            re: rational_to_fixed(&z.re, frac_bits)?,
            im: rational_to_fixed(&z.im, frac_bits)?,
        })
    }
}

/// Rounds `r * 2^frac_bits` to the nearest integer.
pub(crate) fn rational_to_fixed(r: &BigRational, frac_bits: u32) -> Result<i128> {
    let scaled = r.numer() * (BigInt::one() << frac_bits as usize);
    let two = BigInt::from(2);
    let d = r.denom();
    let q = (scaled * &two + d).div_floor(&(d * &two));
    q.to_i128().ok_or_else(wide)
}

pub(crate) fn exact_to_c64(z: &ExactComplex) -> Complex64 {
    Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

pub(crate) fn exact_from_c64(z: Complex64) -> ExactComplex {
    let conv = |x: f64| BigRational::from_float(x).expect("finite slot value");
    Complex::new(conv(z.re), conv(z.im))
}

pub(crate) fn exact_abs_upper(z: &ExactComplex) -> f64 {
    if z.im.is_zero() {
        return z.re.abs().to_f64().unwrap_or(f64::INFINITY) * (1.0 + 1e-12);
    }
    exact_to_c64(z).norm() * (1.0 + 1e-12)
}

impl Slots {
    pub(crate) fn len(&self) -> usize {
        match self {
            Slots::Exact(v) => v.len(),
            Slots::Fixed(v) => v.len(),
            Slots::Float(v) => v.len(),
        }
    }

    pub(crate) fn to_c64(&self, frac_bits: u32) -> Vec<Complex64> {
        match self {
            Slots::Exact(v) => v.iter().map(exact_to_c64).collect(),
            Slots::Fixed(v) => v.iter().map(|z| z.to_c64(frac_bits)).collect(),
            Slots::Float(v) => v.clone(),
        }
    }

    /// Largest slot magnitude, rounded upward.
    pub(crate) fn max_abs(&self, frac_bits: u32) -> f64 {
        match self {
            Slots::Exact(v) => v.iter().map(exact_abs_upper).fold(0.0, f64::max),
            Slots::Fixed(v) => v
                .iter()
                .map(|z| z.to_c64(frac_bits).norm() * (1.0 + 1e-12))
                .fold(0.0, f64::max),
            Slots::Float(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    pub(crate) fn rotate_left(&self, k: usize) -> Slots {
        fn rot<T: Clone>(v: &[T], k: usize) -> Vec<T> {
            let mut out = v.to_vec();
            out.rotate_left(k);
            out
        }
        match self {
            Slots::Exact(v) => Slots::Exact(rot(v, k)),
            Slots::Fixed(v) => Slots::Fixed(rot(v, k)),
            Slots::Float(v) => Slots::Float(rot(v, k)),
        }
    }

    pub(crate) fn conj(&self) -> Slots {
        match self {
            Slots::Exact(v) => Slots::Exact(v.iter().map(|z| z.conj()).collect()),
            Slots::Fixed(v) => Slots::Fixed(
                v.iter().map(|z| FixedComplex { re: z.re, im: -z.im }).collect(),
            ),
            Slots::Float(v) => Slots::Float(v.iter().map(|z| z.conj()).collect()),
        }
    }

    pub(crate) fn zip_with(
        &self,
        other: &Slots,
        exact: impl Fn(&ExactComplex, &ExactComplex) -> ExactComplex,
        fixed: impl Fn(FixedComplex, FixedComplex) -> Result<FixedComplex>,
        float: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Slots> {
        Ok(match (self, other) {
            (Slots::Exact(a), Slots::Exact(b)) => {
                Slots::Exact(a.iter().zip(b).map(|(x, y)| exact(x, y)).collect())
            }
            (Slots::Fixed(a), Slots::Fixed(b)) => Slots::Fixed(
                a.iter().zip(b).map(|(x, y)| fixed(*x, *y)).collect::<Result<_>>()?,
            ),
            (Slots::Float(a), Slots::Float(b)) => {
                Slots::Float(a.iter().zip(b).map(|(x, y)| float(*x, *y)).collect())
            }
            _ => return Err(HeError::ContextMismatch),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fx(x: f64) -> FixedComplex {
        FixedComplex::from_c64(Complex64::new(x, 0.0), 20).unwrap()
    }

    #[test]
    fn fixed_mul_rounds_to_grid() {
        let p = fx(1.5).mul(fx(-2.25), 20).unwrap();
        assert_eq!(p.to_c64(20).re, -3.375);
        let third = FixedComplex::from_exact(
            &Complex::new(BigRational::new(1.into(), 3.into()), BigRational::zero()),
            20,
        )
        .unwrap();
        let err = (third.to_c64(20).re - 1.0 / 3.0).abs();
        assert!(err <= 0.5 / (1u64 << 20) as f64);
    }

    #[test]
    fn fixed_arithmetic_never_wraps() {
        let big = FixedComplex { re: i128::MAX / 2 + 1, im: 0 };
        assert!(big.add(big).is_err());
        assert!(big.mul(big, 20).is_err());
    }

    #[test]
    fn rational_rounding_is_nearest() {
        let r = BigRational::new((-7).into(), 2.into());
        assert_eq!(rational_to_fixed(&r, 1).unwrap(), -7);
        let r = BigRational::new(1.into(), 3.into());
        assert_eq!(rational_to_fixed(&r, 2).unwrap(), 1);
    }
}
