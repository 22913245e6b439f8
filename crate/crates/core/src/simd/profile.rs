use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HeError, Result};

pub const DEFAULT_FRAC_BITS: u32 = 42;
pub const DEFAULT_INT_BITS: u32 = 18;

/// Arithmetic fidelity of the simulator.
///
/// `Exact` evaluates over Gaussian rationals and is the correctness oracle.
/// `FixedPoint` stores every slot as a scaled 128-bit integer pair, rounds each
/// result to `frac_bits` fractional bits and fails when a magnitude leaves the
/// `int_bits` integer range. `Noisy` runs in `f64` and adds Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
#[derive(Default)]
pub enum ArithmeticProfile {
    #[default]
    Exact,
    FixedPoint {
        #[serde(default = "default_frac_bits")]
        frac_bits: u32,
        #[serde(default = "default_int_bits")]
        int_bits: u32,
    },
    Noisy {
        #[serde(default)]
        noise_sigma: f64,
    },
}

fn default_frac_bits() -> u32 {
    DEFAULT_FRAC_BITS
}

fn default_int_bits() -> u32 {
    DEFAULT_INT_BITS
}


impl ArithmeticProfile {
    pub fn fixed(frac_bits: u32, int_bits: u32) -> Self {
        ArithmeticProfile::FixedPoint { frac_bits, int_bits }
    }

    pub fn noisy(noise_sigma: f64) -> Self {
        ArithmeticProfile::Noisy { noise_sigma }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ArithmeticProfile::Exact => Ok(()),
            ArithmeticProfile::FixedPoint { frac_bits, int_bits } => {
                if frac_bits == 0 || int_bits == 0 {
                    return Err(HeError::InvalidParameter(
                        "fixed-point frac_bits and int_bits must be positive".into(),
                    ));
                }
                // raw values need int + frac + sign bits, products twice that
                if 2 * (frac_bits + int_bits) + 2 > 126 {
                    return Err(HeError::InvalidParameter(format!(
                        "fixed-point width {} + {} does not fit 128-bit products",
                        int_bits, frac_bits
                    )));
                }
                Ok(())
            }
            ArithmeticProfile::Noisy { noise_sigma } => {
                if noise_sigma.is_nan() || noise_sigma < 0.0 {
                    return Err(HeError::InvalidParameter(
                        "noise_sigma must be non-negative".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ArithmeticProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithmeticProfile::Exact => write!(f, "exact"),
            ArithmeticProfile::FixedPoint { frac_bits, int_bits } => {
                write!(f, "fixed:{frac_bits}:{int_bits}")
            }
            ArithmeticProfile::Noisy { noise_sigma } => write!(f, "noisy:{noise_sigma}"),
        }
    }
}

impl FromStr for ArithmeticProfile {
    type Err = HeError;

    /// Parses `exact`, `fixed:<frac>:<int>` or `noisy:<sigma>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || HeError::InvalidParameter(format!("unrecognised profile '{s}'"));
        let mut parts = s.trim().split(':');
        let profile = match parts.next().ok_or_else(bad)? {
            "exact" => ArithmeticProfile::Exact,
            "fixed" => {
                let frac_bits = match parts.next() {
                    Some(p) => p.parse().map_err(|_| bad())?,
                    None => DEFAULT_FRAC_BITS,
                };
                let int_bits = match parts.next() {
                    Some(p) => p.parse().map_err(|_| bad())?,
                    None => DEFAULT_INT_BITS,
                };
                ArithmeticProfile::FixedPoint { frac_bits, int_bits }
            }
            "noisy" => {
                let noise_sigma = match parts.next() {
                    Some(p) => p.parse().map_err(|_| bad())?,
                    None => 0.0,
                };
                ArithmeticProfile::Noisy { noise_sigma }
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        profile.validate()?;
        Ok(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["exact", "fixed:42:16", "noisy:0.001"] {
            let p: ArithmeticProfile = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!(
            "fixed".parse::<ArithmeticProfile>().unwrap(),
            ArithmeticProfile::fixed(42, 18)
        );
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!("fixed:0:16".parse::<ArithmeticProfile>().is_err());
        assert!("noisy:-1".parse::<ArithmeticProfile>().is_err());
        assert!("fixed:80:60".parse::<ArithmeticProfile>().is_err());
        assert!("bogus".parse::<ArithmeticProfile>().is_err());
    }

    #[test]
    fn json_shape() {
        let p: ArithmeticProfile =
            serde_json::from_str(r#"{"mode":"fixed_point","frac_bits":42}"#).unwrap();
        assert_eq!(p, ArithmeticProfile::fixed(42, 18));
    }
}
