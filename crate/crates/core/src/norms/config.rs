//! JSON configuration: `{"source": {"lp": 2}, "phi": [0, 1, 2], "nu": {"lp": 0.5}}`.
//!
//! Exponents are numbers or the literals `"inf"` / `"+inf"`; `phi` entries are
//! numbers or `"+inf"`. Every field is optional.

use serde::{Deserialize, Serialize};

use super::lp::{Normalization, SourceNorm};
use super::phi::PhiSpec;
use crate::error::{Error, Result};
use crate::numerics::ExtReal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpConfig {
    pub lp: ExtReal,
}

impl LpConfig {
    pub fn exponent(&self) -> Result<f64> {
        match self.lp {
            ExtReal::NegInf => Err(Error::NonpositiveExponent(f64::NEG_INFINITY)),
            v => Ok(v.to_f64()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<LpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<LpConfig>,
}

impl NormConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn source_norm(&self) -> Result<Option<SourceNorm>> {
        self.source
            .map(|c| c.exponent().and_then(SourceNorm::lp))
            .transpose()
    }

    pub fn normalization(&self) -> Result<Option<Normalization>> {
        self.nu
            .map(|c| c.exponent().and_then(Normalization::lp))
            .transpose()
    }
}
