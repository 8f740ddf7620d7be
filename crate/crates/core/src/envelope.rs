//! Tightest convex, positively 1-homogeneous and norm lower approximations of
//! 0-homogeneous functions on balls, and of grid functions on subsets.
//!
//! The ball envelope of a 0-homogeneous `f` is the Fenchel conjugate of its
//! Capra conjugate, restricted to `B_ν`. Here the Capra conjugate is tabulated
//! on a dual grid and then transformed back pointwise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conjugacy::{
    fenchel_biconjugate, CapraConjugator, Coupling, PreparedSample, SphereSample, ZeroHomFn,
    ANALYTIC_TOL, DEFAULT_SPHERE_POINTS,
};
use crate::error::{Error, Result};
use crate::norms::{best_norm_object, NormObject, Normalization, PhiSpec, SourceNorm};
use crate::numerics::{ExtReal, FunctionSample, Grid};
use crate::oracle::support_function_bruteforce;

pub use crate::norms::monotone_ratio_check;

/// Largest number of dual-grid nodes chosen by [`default_dual_grid`].
pub const DUAL_NODE_BUDGET: usize = 60_000;

/// Default dual grid for the ball envelope of `f` under `ν`.
///
/// A cube `[-R, R]^d` with integer `R` and step `1/m`, so that integer and
/// half-integer slopes are nodes. `R` grows with the largest finite value of
/// `f` on the sphere divided by the smallest `ℓ∞` radius of `S_ν`, which
/// bounds the slopes needed to reach `f` at sphere points.
pub fn default_dual_grid(f: &ZeroHomFn, nu: &Normalization, dim: usize) -> Result<Grid> {
    let probe = SphereSample::new(nu, dim, 2_000)?;
    let mut fmax = 0.0_f64;
    let mut inner = f64::INFINITY;
    for s in probe
        .points()
        .iter()
        .filter(|s| s.iter().any(|&c| c != 0.0))
    {
        if let ExtReal::Finite(v) = f.eval(s) {
            fmax = fmax.max(v.abs());
        }
        inner = inner.min(s.iter().fold(0.0_f64, |m, c| m.max(c.abs())));
    }
    let radius = (1.25 * fmax / inner).ceil().max(2.0);
    let per_axis = ((DUAL_NODE_BUDGET as f64).powf(1.0 / dim as f64).floor() as usize).max(5);
    let m = ((per_axis - 1) as f64 / (2.0 * radius)).floor().max(1.0);
    let count = (2.0 * radius * m) as usize + 1;
    Grid::cube(dim, radius, count)
}

/// Evaluation grid for ball envelopes: the bounding box of `B_ν` inflated by
/// one cell, `count` nodes per axis, so that sphere nodes are interior.
pub fn ball_eval_grid(nu: &Normalization, dim: usize, count: usize) -> Result<Grid> {
    if count < 4 {
        return Err(Error::InvalidBounds {
            axis: 0,
            reason: format!("need at least 4 points, got {count}"),
        });
    }
    let r = nu.bounding_radius(dim);
    let b = r * (count - 1) as f64 / (count - 3) as f64;
    Grid::cube(dim, b, count)
}

/// The tightest closed convex function below `f` on `B_ν`, ready for
/// pointwise evaluation.
pub struct BallEnvelope {
    f: ZeroHomFn,
    nu: Normalization,
    conjugator: CapraConjugator,
    conjugate: FunctionSample,
    prepared: PreparedSample,
}

impl BallEnvelope {
    /// Tabulates the Capra conjugate on [`default_dual_grid`].
    pub fn new(f: ZeroHomFn, nu: Normalization, dim: usize) -> Result<Self> {
        let dual = default_dual_grid(&f, &nu, dim)?;
        Self::with_dual_grid(f, nu, &dual)
    }

    pub fn with_dual_grid(f: ZeroHomFn, nu: Normalization, dual_grid: &Grid) -> Result<Self> {
        let conjugator = CapraConjugator::new(
            f.clone(),
            Coupling::new(nu.clone()),
            dual_grid.dim(),
            DEFAULT_SPHERE_POINTS,
        )?;
        Self::from_conjugator(conjugator, dual_grid)
    }

    pub fn from_conjugator(conjugator: CapraConjugator, dual_grid: &Grid) -> Result<Self> {
        let conjugate = conjugator.on_grid(dual_grid)?;
        let prepared = PreparedSample::new(&conjugate);
        Ok(BallEnvelope {
            f: conjugator.function().clone(),
            nu: conjugator.coupling().normalization().clone(),
            conjugator,
            conjugate,
            prepared,
        })
    }

    pub fn dim(&self) -> usize {
        self.prepared.dim()
    }

    pub fn conjugator(&self) -> &CapraConjugator {
        &self.conjugator
    }

    /// The tabulated Capra conjugate.
    pub fn conjugate(&self) -> &FunctionSample {
        &self.conjugate
    }

    /// Envelope value at `x`; `+∞` outside `B_ν`.
    ///
    /// Values above `f(x)` by no more than rounding (relative `1e-12`) are
    /// snapped to `f(x)`.
    pub fn value_at(&self, x: &[f64]) -> ExtReal {
        if !self.nu.ball_contains(x) {
            return ExtReal::PosInf;
        }
        let v = self.prepared.conjugate_at(x);
        match (v, self.f.eval(x)) {
            (ExtReal::Finite(a), ExtReal::Finite(b))
                if a > b && a - b <= 1e-12 * (1.0 + b.abs()) =>
            {
                ExtReal::Finite(b)
            }
            _ => v,
        }
    }

    /// Envelope on every node of `eval_grid`, in parallel.
    pub fn sample(&self, eval_grid: &Grid) -> Result<FunctionSample> {
        if eval_grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: eval_grid.dim(),
            });
        }
        let values = (0..eval_grid.len())
            .into_par_iter()
            .map(|i| self.value_at(&eval_grid.node(i)))
            .collect();
        FunctionSample::new(eval_grid.clone(), values)
    }
}

/// Tightest closed convex function below `f` on `B_ν`, sampled on `eval_grid`.
///
/// Uses the closed-form Capra conjugate when available (`φ ∘ ℓ0` or zero with
/// an `ℓp` normalization, `p ≥ 1`) and a sphere sample otherwise.
pub fn tightest_convex_on_ball(
    f: &ZeroHomFn,
    nu: &Normalization,
    eval_grid: &Grid,
) -> Result<FunctionSample> {
    BallEnvelope::new(f.clone(), nu.clone(), eval_grid.dim())?.sample(eval_grid)
}

/// Envelope of `ℓ0` on `B_∞`: `‖x‖₁` inside the ball, `+∞` outside.
pub fn l0_envelope_linf(x: &[f64]) -> ExtReal {
    if x.iter().any(|c| c.abs() > 1.0) {
        return ExtReal::PosInf;
    }
    ExtReal::Finite(x.iter().map(|c| c.abs()).sum())
}

/// Envelope of `φ ∘ ℓ0` on `B_∞`. Closed form `c ‖x‖₁` when `φ(l) = c l`,
/// otherwise evaluated through a [`BallEnvelope`].
pub fn l0_envelope_linf_phi(x: &[f64], phi: &PhiSpec) -> Result<ExtReal> {
    phi.check_dim(x.len())?;
    let c = phi.at(1);
    let linear = (1..=phi.dim()).all(|l| match (phi.at(l), c) {
        (ExtReal::Finite(v), ExtReal::Finite(c)) => v == c * l as f64,
        _ => false,
    });
    if linear {
        return Ok(match l0_envelope_linf(x) {
            ExtReal::Finite(v) => ExtReal::Finite(c.to_f64() * v),
            other => other,
        });
    }
    let env = BallEnvelope::new(
        ZeroHomFn::L0Composite(phi.clone()),
        Normalization::Lp(f64::INFINITY),
        x.len(),
    )?;
    Ok(env.value_at(x))
}

/// Tightest closed convex positively 1-homogeneous function below `f` on
/// `B_ν`, at `x`: the support function of the candidates accepted in
/// `∂_¢ f(0)`. A lower estimate that is exact when the extreme points of the
/// subdifferential are among the candidates.
pub fn tightest_pos_hom_on_ball(
    f: &ZeroHomFn,
    nu: &Normalization,
    x: &[f64],
    dual_candidates: &[Vec<f64>],
) -> Result<f64> {
    let conj = CapraConjugator::new(
        f.clone(),
        Coupling::new(nu.clone()),
        x.len(),
        DEFAULT_SPHERE_POINTS,
    )?;
    let accepted = conj.subdiff_at_zero(dual_candidates)?;
    support_function_bruteforce(x, |_| true, &accepted)
}

/// The tightest norm below `φ ∘ ℓ0` on the unit ball of `source`.
pub fn tightest_norm_below_phi_l0(phi: &PhiSpec, source: &SourceNorm) -> Result<NormObject> {
    best_norm_object(phi, source)
}

/// Biconjugate of `f ⊕ δ_U` through `dual_grid`: the best closed convex
/// lower approximation of `f` on the nodes of `U`.
pub fn best_cvx_on_subset<U>(
    f: &FunctionSample,
    subset: U,
    dual_grid: &Grid,
) -> Result<FunctionSample>
where
    U: Fn(&[f64]) -> bool,
{
    if !f.grid().nodes().any(|x| subset(&x)) {
        return Err(Error::EmptySubset);
    }
    fenchel_biconjugate(&f.restrict(subset), dual_grid)
}

/// Support function at `x` of `∂(f ⊕ δ_U)(0)`, restricted to the candidates
/// `y` with `(f ⊕ δ_U)*(y) ≤ 0`.
pub fn best_pos_hom_on_subset<U>(
    f: &FunctionSample,
    subset: U,
    x: &[f64],
    dual_candidates: &[Vec<f64>],
) -> Result<f64>
where
    U: Fn(&[f64]) -> bool,
{
    let grid = f.grid();
    let origin = vec![0.0; grid.dim()];
    let zero = grid
        .find(&origin, 0.0)
        .filter(|_| subset(&origin))
        .ok_or(Error::ZeroNotInSubset)?;
    if f.value(zero) != ExtReal::ZERO {
        return Err(Error::NonzeroAtOrigin(f.value(zero).to_string()));
    }
    let prepared = PreparedSample::new(&f.restrict(subset));
    let accepted: Vec<Vec<f64>> = dual_candidates
        .iter()
        .filter(|y| prepared.conjugate_at(y) <= ExtReal::Finite(ANALYTIC_TOL))
        .cloned()
        .collect();
    support_function_bruteforce(x, |_| true, &accepted)
}

/// A pinned envelope value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub x: Vec<f64>,
    pub v: ExtReal,
}

/// JSON summary of an exported surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub values_at: Vec<Checkpoint>,
}

impl SurfaceSummary {
    /// Range of the finite values of `surface` plus the envelope at `points`.
    pub fn new(surface: &FunctionSample, envelope: &BallEnvelope, points: &[Vec<f64>]) -> Self {
        let range = surface.finite_range();
        SurfaceSummary {
            min: range.map(|r| r.0),
            max: range.map(|r| r.1),
            values_at: points
                .iter()
                .map(|x| Checkpoint {
                    x: x.clone(),
                    v: envelope.value_at(x),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
