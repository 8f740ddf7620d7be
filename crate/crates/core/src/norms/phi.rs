use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::coordinate::dual_coordinate_k_norm;
use super::lp::{conjugate_exponent, lp_unchecked, PointFn, SourceNorm};
use crate::error::{Error, Result};
use crate::numerics::ExtReal;
use crate::oracle;

/// Weights `φ : {0, …, d} → [0, +∞]` on sparsity levels, with `φ(0) = 0`,
/// `φ(l) > 0` for `l ≥ 1` and at least one finite `φ(l)`, `l ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ExtReal>", into = "Vec<ExtReal>")]
pub struct PhiSpec {
    values: Vec<ExtReal>,
}

impl PhiSpec {
    pub fn new(values: Vec<ExtReal>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidPhi(
                "need values for levels 0..=d with d >= 1".into(),
            ));
        }
        if values[0] != ExtReal::ZERO {
            return Err(Error::InvalidPhi(format!(
                "phi(0) must be 0, got {}",
                values[0]
            )));
        }
        for (l, v) in values.iter().enumerate().skip(1) {
            if *v <= ExtReal::ZERO {
                return Err(Error::InvalidPhi(format!(
                    "phi({l}) must be positive, got {v}"
                )));
            }
        }
        if !values[1..].iter().any(|v| v.is_finite()) {
            return Err(Error::InvalidPhi(
                "phi(l) must be finite for at least one l >= 1".into(),
            ));
        }
        Ok(PhiSpec { values })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidPhi("NaN entry".into()));
        }
        PhiSpec::new(values.iter().map(|&v| ExtReal::new(v)).collect())
    }

    /// `φ(l) = l`, so that `φ ∘ ℓ0 = ℓ0`.
    pub fn identity(dim: usize) -> Self {
        PhiSpec::scaled_identity(dim, 1.0)
    }

    /// `φ(l) = c · l` for `c > 0`.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        assert!(dim >= 1 && c > 0.0 && c.is_finite());
        PhiSpec {
            values: (0..=dim).map(|l| ExtReal::Finite(c * l as f64)).collect(),
        }
    }

    /// The dimension `d` (the largest level).
    pub fn dim(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, level: usize) -> ExtReal {
        self.values[level]
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::InvalidPhi(format!(
                "phi is defined on levels 0..={} but the point has dimension {d}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Smallest `φ(l)` over `l ≥ 1`.
    pub fn min_positive_level(&self) -> f64 {
        self.values[1..]
            .iter()
            .filter_map(|v| v.finite())
            .fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<Vec<ExtReal>> for PhiSpec {
    type Error = Error;

    fn try_from(values: Vec<ExtReal>) -> Result<Self> {
        PhiSpec::new(values)
    }
}

impl From<PhiSpec> for Vec<ExtReal> {
    fn from(phi: PhiSpec) -> Self {
        phi.values
    }
}

/// Gauge of the dual unit ball `∩_l φ(l) B^{(l)}_★`, i.e.
/// `sup_l |||y|||^{(l)}_★ / φ(l)`. Levels with `φ(l) = +∞` contribute 0
/// (`+∞ · B = R^d`).
pub fn phi_dual_gauge(y: &[f64], phi: &PhiSpec, source: &SourceNorm) -> Result<f64> {
    phi.check_dim(y.len())?;
    let mut best = 0.0_f64;
    for l in 1..=phi.dim() {
        if let ExtReal::Finite(w) = phi.at(l) {
            best = best.max(dual_coordinate_k_norm(y, source, l)? / w);
        }
    }
    Ok(best)
}

/// Whether `l ↦ φ(l)^q / l` is nondecreasing on `{1, …, d}` (for `p > 1`,
/// `1/p + 1/q = 1`), or `φ` itself is nondecreasing (for `p = 1`). Under
/// this condition the tightest norm below `φ ∘ ℓ0` on the `ℓp` ball is
/// `φ(1) ‖·‖₁`.
///
/// Comparisons allow a relative slack of `1e-12`, so that e.g.
/// `φ(l) = sqrt(l)` passes at `p = 2` despite rounding.
pub fn monotone_ratio_check(phi: &PhiSpec, p: f64) -> bool {
    let Ok(q) = conjugate_exponent(p) else {
        return false;
    };
    let ratio = |l: usize| -> f64 {
        let v = phi.at(l).to_f64();
        if q == f64::INFINITY {
            v
        } else {
            v.powf(q) / l as f64
        }
    };
    (1..phi.dim()).all(|l| {
        let (a, b) = (ratio(l), ratio(l + 1));
        b == f64::INFINITY || (a.is_finite() && b >= a * (1.0 - 1e-12))
    })
}

/// A norm together with its dual norm, both as evaluators.
#[derive(Clone)]
pub struct NormObject {
    primal: PointFn,
    dual: PointFn,
    closed_form: Option<String>,
}

impl fmt::Debug for NormObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormObject")
            .field("closed_form", &self.closed_form)
            .finish_non_exhaustive()
    }
}

impl NormObject {
    pub fn new(primal: PointFn, dual: PointFn, closed_form: Option<String>) -> Self {
        NormObject {
            primal,
            dual,
            closed_form,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.primal)(x)
    }

    pub fn dual(&self, y: &[f64]) -> f64 {
        (self.dual)(y)
    }

    /// Description of the closed form when the primal is evaluated exactly,
    /// `None` when it is a numerical support-function estimate.
    pub fn closed_form(&self) -> Option<&str> {
        self.closed_form.as_deref()
    }
}

/// Direction budget used when the best norm has no closed form.
pub const BEST_NORM_DIRECTIONS: usize = 4096;

/// The norm `|||·|||_φ` whose dual unit ball is `∩_l φ(l) B^{(l)}_★`: the
/// tightest norm below `φ ∘ ℓ0` on the source unit ball.
///
/// The primal is exact for `ℓp` sources when `p = 1` (`min_l φ(l) ‖·‖₁`) or
/// when [`monotone_ratio_check`] holds (`φ(1) ‖·‖₁`). Otherwise it is the
/// support function of the dual ball, estimated by radial search.
pub fn best_norm_object(phi: &PhiSpec, source: &SourceNorm) -> Result<NormObject> {
    let d = phi.dim();
    let dual: PointFn = {
        let (phi, source) = (phi.clone(), source.clone());
        Arc::new(move |y: &[f64]| phi_dual_gauge(y, &phi, &source).expect("dimension checked"))
    };
    let l1_multiple = match source.exponent() {
        Some(p) if p == 1.0 => Some(phi.min_positive_level()),
        Some(p) if monotone_ratio_check(phi, p) => Some(phi.at(1).to_f64()),
        _ => None,
    };
    if let Some(c) = l1_multiple.filter(|c| c.is_finite()) {
        let primal: PointFn = Arc::new(move |x: &[f64]| c * lp_unchecked(x, 1.0));
        return Ok(NormObject::new(primal, dual, Some(format!("{c} * l1"))));
    }
    let dirs = Arc::new(oracle::direction_cloud(
        d,
        BEST_NORM_DIRECTIONS,
        oracle::SEED,
    ));
    let gauge = dual.clone();
    let primal: PointFn = Arc::new(move |x: &[f64]| {
        let g = |u: &[f64]| gauge(u);
        oracle::radial_support(x, &g, &dirs)
    });
    Ok(NormObject::new(primal, dual, None))
}
