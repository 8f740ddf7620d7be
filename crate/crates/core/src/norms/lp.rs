use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default tolerance on `|ν(x) - 1|` for sphere membership.
pub const SPHERE_TOL: f64 = 1e-9;

/// `(Σ |x_i|^p)^{1/p}` for finite `p > 0`, `max |x_i|` for `p = ∞`.
///
/// For `p < 1` this is only a quasi-norm, but still absolutely 1-homogeneous.
pub fn lp_value(x: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::NonpositiveExponent(p));
    }
    Ok(lp_unchecked(x, p))
}

pub(crate) fn lp_unchecked(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0_f64, |m, &c| m.max(c.abs()));
    if p == f64::INFINITY || m == 0.0 || m.is_infinite() {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|c| c.abs()).sum();
    }
    if p == 2.0 {
        // scaled to avoid overflow
        let s: f64 = x.iter().map(|c| (c / m) * (c / m)).sum();
        return m * s.sqrt();
    }
    let s: f64 = x.iter().map(|c| (c.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Hölder conjugate `q` with `1/p + 1/q = 1`, for `p ∈ [1, ∞]`.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::UnsupportedExponent(p, "[1, inf]"));
    }
    Ok(if p == 1.0 {
        f64::INFINITY
    } else if p == f64::INFINITY {
        1.0
    } else {
        p / (p - 1.0)
    })
}

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A normalization function `ν`: nonnegative, absolutely 1-homogeneous and
/// vanishing only at the origin. Subadditivity is not required, so `ℓp` with
/// `p ∈ (0, 1)` qualifies.
#[derive(Clone)]
pub enum Normalization {
    Lp(f64),
    Custom(PointFn),
}

impl fmt::Debug for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalization::Lp(p) => write!(f, "Lp({p})"),
            Normalization::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Normalization {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::NonpositiveExponent(p));
        }
        Ok(Normalization::Lp(p))
    }

    pub fn custom<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Normalization::Custom(Arc::new(f))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Normalization::Lp(p) => lp_unchecked(x, *p),
            Normalization::Custom(f) => f(x),
        }
    }

    /// The exponent when `ν` is an `ℓp` norm with `p ≥ 1`.
    pub fn norm_exponent(&self) -> Option<f64> {
        match self {
            Normalization::Lp(p) if *p >= 1.0 => Some(*p),
            _ => None,
        }
    }

    /// `x / ν(x)` for `x ≠ 0`, the origin otherwise.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        let n = self.value(x);
        if n == 0.0 {
            vec![0.0; x.len()]
        } else {
            x.iter().map(|c| c / n).collect()
        }
    }

    /// `ν(x) ≤ 1`, with the sphere tolerance as slack so that sphere points
    /// computed in floating point are inside.
    pub fn ball_contains(&self, x: &[f64]) -> bool {
        self.ball_contains_tol(x, SPHERE_TOL)
    }

    pub fn ball_contains_tol(&self, x: &[f64], tol: f64) -> bool {
        self.value(x) <= 1.0 + tol
    }

    pub fn sphere_contains(&self, x: &[f64]) -> bool {
        self.sphere_contains_tol(x, SPHERE_TOL)
    }

    pub fn sphere_contains_tol(&self, x: &[f64], tol: f64) -> bool {
        (self.value(x) - 1.0).abs() <= tol
    }

    /// Radius `r` such that the unit ball lies in `[-r, r]^d`.
    ///
    /// Exact for `ℓp`; for custom functions it is estimated from the
    /// coordinate directions and a deterministic direction cloud.
    pub fn bounding_radius(&self, dim: usize) -> f64 {
        match self {
            Normalization::Lp(_) => 1.0,
            Normalization::Custom(_) => {
                let dirs = crate::oracle::direction_cloud(dim, 4096, crate::oracle::SEED);
                dirs.iter()
                    .map(|u| {
                        let n = self.value(u);
                        u.iter().fold(0.0_f64, |m, c| m.max(c.abs())) / n
                    })
                    .fold(0.0_f64, f64::max)
            }
        }
    }

    /// Spot-checks `ν(x) > 0` and `ν(ρx) = |ρ| ν(x)` on the given points.
    pub fn check(&self, points: &[Vec<f64>], rhos: &[f64], rel_tol: f64) -> Result<()> {
        for x in points {
            let v = self.value(x);
            let zero = x.iter().all(|&c| c == 0.0);
            if zero != (v == 0.0) || v < 0.0 || !v.is_finite() {
                return Err(Error::Parse(format!(
                    "not a normalization function at {x:?}"
                )));
            }
            for &rho in rhos {
                let scaled: Vec<f64> = x.iter().map(|c| rho * c).collect();
                let lhs = self.value(&scaled);
                if (lhs - rho.abs() * v).abs() > rel_tol * (1.0 + rho.abs() * v) {
                    return Err(Error::Parse(format!(
                        "normalization function is not absolutely 1-homogeneous at {x:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The source norm `|||·|||` from which coordinate-k norms are generated.
#[derive(Clone)]
pub enum SourceNorm {
    /// `ℓp` with `p ∈ [1, ∞]`.
    Lp(f64),
    /// An arbitrary norm; restricted dual norms are obtained by sampling the
    /// dual ball through `directions` rays per coordinate subspace.
    Custom { norm: PointFn, directions: usize },
}

impl fmt::Debug for SourceNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceNorm::Lp(p) => write!(f, "Lp({p})"),
            SourceNorm::Custom { directions, .. } => {
                write!(f, "Custom {{ directions: {directions} }}")
            }
        }
    }
}

impl SourceNorm {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::UnsupportedExponent(p, "[1, inf]"));
        }
        Ok(SourceNorm::Lp(p))
    }

    pub fn custom<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F, directions: usize) -> Self {
        SourceNorm::Custom {
            norm: Arc::new(f),
            directions: directions.max(16),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            SourceNorm::Lp(p) => lp_unchecked(x, *p),
            SourceNorm::Custom { norm, .. } => norm(x),
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            SourceNorm::Lp(p) => Some(*p),
            SourceNorm::Custom { .. } => None,
        }
    }

    /// The source norm seen as a normalization function (for the coupling).
    pub fn as_normalization(&self) -> Normalization {
        match self {
            SourceNorm::Lp(p) => Normalization::Lp(*p),
            SourceNorm::Custom { norm, .. } => Normalization::Custom(norm.clone()),
        }
    }

    /// Checks `|||x + y||| ≤ |||x||| + |||y|||` on the given pairs.
    pub fn check_subadditive(&self, pairs: &[(Vec<f64>, Vec<f64>)], tol: f64) -> bool {
        pairs.iter().all(|(x, y)| {
            let s: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            self.value(&s) <= self.value(x) + self.value(y) + tol
        })
    }
}
