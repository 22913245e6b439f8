use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};

use crate::comparators::EqConfig;
use crate::error::{HeError, Result};
use crate::representations::{BasisStrategy, RepKind};
use crate::simd::ArithmeticProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Tradeoff,
    Num2onehot,
    ShadowBounds,
    ComparatorSuite,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = HeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(HeError::InvalidParameter(format!("unknown format '{s}'"))),
        }
    }
}

/// Weights of the synthetic cost: `ct + pt * pt_mult + other * (adds + rotations + conjugations)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostWeights {
    pub ct_mult: f64,
    pub pt_mult: f64,
    pub add: f64,
    pub rotation: f64,
    pub conjugation: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights { ct_mult: 1.0, pt_mult: 0.1, add: 0.05, rotation: 0.05, conjugation: 0.05 }
    }
}

/// Accepts either `"fixed:42:16"` or the tagged object form.
fn profile_de<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<ArithmeticProfile>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Text(String),
        Full(ArithmeticProfile),
    }
    match Option::<Either>::deserialize(d)? {
        None => Ok(None),
        Some(Either::Full(p)) => Ok(Some(p)),
        Some(Either::Text(s)) => s.parse().map(Some).map_err(serde::de::Error::custom),
    }
}

/// One experiment. Unset fields take per-experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    #[serde(default)]
    pub n: Option<Vec<u64>>,
    #[serde(default)]
    pub representations: Option<Vec<RepKind>>,
    #[serde(default)]
    pub shape: Option<String>,
    #[serde(default, deserialize_with = "profile_de")]
    pub profile: Option<ArithmeticProfile>,
    /// Slots per ciphertext; the batch size `m` equals it.
    #[serde(default)]
    pub slots: Option<usize>,
    /// Samples evaluated per cell in the sample-major layout.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Overrides the per-domain equality defaults (`domain_bound` is set per n).
    #[serde(default)]
    pub eq: Option<EqConfig>,
    #[serde(default)]
    pub zt_iters: Option<u32>,
    #[serde(default)]
    pub hier_levels: Option<u32>,
    #[serde(default)]
    pub crt_strategy: Option<BasisStrategy>,
    #[serde(default)]
    pub max_level: Option<usize>,
    #[serde(default)]
    pub weights: CostWeights,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentSpec {
            experiment,
            n: None,
            representations: None,
            shape: None,
            profile: None,
            slots: None,
            samples: None,
            eq: None,
            zt_iters: None,
            hier_levels: None,
            crt_strategy: None,
            max_level: None,
            weights: CostWeights::default(),
            seed: 0,
            out: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(ns) = &self.n {
            if ns.is_empty() || ns.contains(&0) {
                return Err(HeError::InvalidParameter("n values must be positive".into()));
            }
        }
        if let Some(p) = &self.profile {
            p.validate()?;
        }
        if let Some(s) = self.slots {
            if !s.is_power_of_two() {
                return Err(HeError::NotPowerOfTwo(s));
            }
        }
        if self.samples == Some(0) {
            return Err(HeError::InvalidParameter("samples must be positive".into()));
        }
        if let Some(eq) = &self.eq {
            eq.validate()?;
        }
        if let Some(l) = self.max_level {
            if !(2..=8).contains(&l) {
                return Err(HeError::InvalidParameter(format!("max_level must be in 2..=8, got {l}")));
            }
        }
        if let Some(reps) = &self.representations {
            if reps.is_empty() {
                return Err(HeError::InvalidParameter("representation list is empty".into()));
            }
        }
        Ok(())
    }

    pub fn n_values(&self) -> Vec<u64> {
        self.n.clone().unwrap_or_else(|| match self.experiment {
            Experiment::Tradeoff => vec![100, 500, 1000, 5000, 10000],
            Experiment::Num2onehot => vec![4, 8, 16, 32, 64],
            Experiment::ComparatorSuite => vec![2, 4, 8],
            Experiment::ShadowBounds => vec![],
        })
    }

    pub fn representations(&self) -> Vec<RepKind> {
        self.representations.clone().unwrap_or_else(|| {
            vec![RepKind::Numeric, RepKind::Binary, RepKind::HierCrt, RepKind::Crt, RepKind::OneHot]
        })
    }

    pub fn shape(&self) -> &str {
        self.shape.as_deref().unwrap_or("[n/1,m/s]")
    }

    pub fn profile(&self) -> ArithmeticProfile {
        self.profile.unwrap_or(match self.experiment {
            Experiment::Num2onehot => ArithmeticProfile::fixed(42, 16),
            _ => ArithmeticProfile::fixed(42, 18),
        })
    }

    pub fn slots(&self) -> usize {
        self.slots.unwrap_or(64)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(4)
    }

    pub fn eq_for(&self, domain: u64) -> EqConfig {
        let mut cfg = self.eq.unwrap_or_default();
        cfg.domain_bound = domain;
        cfg
    }

    pub fn crt_strategy(&self) -> BasisStrategy {
        self.crt_strategy.unwrap_or_default()
    }

    pub fn max_level(&self) -> usize {
        self.max_level.unwrap_or(8)
    }
}
