//! Extended real line `[-∞, +∞]` with Moreau lower and upper additions.
//!
//! Infinities are explicit variants, so every case of `(+∞) + (-∞)` is
//! decided by a branch rather than by IEEE rounding. The lower addition `⊞`
//! resolves the ambiguous sum to `-∞`, the upper addition `⊕` to `+∞`; both
//! agree with ordinary addition as soon as one operand is finite.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

pub use ExtReal::{NegInf, PosInf};

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Wraps an `f64`, mapping IEEE infinities onto the infinite variants.
    ///
    /// Panics on NaN: no extended-real value corresponds to it.
    pub fn new(v: f64) -> Self {
        assert!(!v.is_nan(), "NaN is not an extended real");
        if v == f64::INFINITY {
            PosInf
        } else if v == f64::NEG_INFINITY {
            NegInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// IEEE view: infinities become `±f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            PosInf => f64::INFINITY,
        }
    }

    /// Moreau lower addition `a ⊞ b`.
    pub fn low_add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::new(a + b),
        }
    }

    /// Moreau upper addition `a ⊕ b`.
    pub fn upp_add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::new(a + b),
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `|a - b|` for finite pairs, 0 for equal infinities and `+∞` otherwise.
    pub fn distance(self, other: ExtReal) -> f64 {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs(),
            (a, b) if a == b => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// Free-function form of [`ExtReal::low_add`].
pub fn low_add(a: ExtReal, b: ExtReal) -> ExtReal {
    a.low_add(b)
}

/// Free-function form of [`ExtReal::upp_add`].
pub fn upp_add(a: ExtReal, b: ExtReal) -> ExtReal {
    a.upp_add(b)
}

impl std::ops::Neg for ExtReal {
    type Output = ExtReal;

    fn neg(self) -> ExtReal {
        match self {
            NegInf => PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
            PosInf => NegInf,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a
                .partial_cmp(b)
                .expect("finite extended reals are never NaN"),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("-inf"),
            PosInf => f.write_str("+inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+inf" | "inf" | "+Inf" | "Inf" => Ok(PosInf),
            "-inf" | "-Inf" => Ok(NegInf),
            t => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("not an extended real: {t:?}")))?;
                if v.is_nan() {
                    return Err(Error::Parse("NaN is not an extended real".into()));
                }
                Ok(ExtReal::new(v))
            }
        }
    }
}

// Finite values are JSON numbers; infinities use the "+inf" / "-inf" literals.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => serializer.serialize_f64(*v),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(ExtReal::new(v)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
