//! The Capra coupling `¢(x, y) = ⟨x, y⟩ / ν(x)` (0 at `x = 0`) and its
//! conjugacy for 0-homogeneous functions.
//!
//! For a 0-homogeneous `f`, the Capra conjugate coincides with the Fenchel
//! conjugate of `f ⊕ δ_{B_ν}` and with that of `f ⊕ δ_{S_ν ∪ {0}}`. Three
//! routes are provided and tested against each other:
//!
//! * coupling route: the definition, a sup of `¢(x,y) ⊞ -f(x)` over a grid;
//! * ball route: Fenchel conjugate of `f` restricted to the grid nodes in `B_ν`;
//! * sphere route: sup over a sample of `S_ν ∪ {0}`.
//!
//! For `φ ∘ ℓ0` with an `ℓp` normalization (`p ≥ 1`) there is also the
//! closed form `sup_l [top-(q,l)(y) - φ(l)]`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::norms::{conjugate_exponent, lp_unchecked, Normalization, PhiSpec};
use crate::numerics::{dot, l0, ExtReal, FunctionSample, Grid};

/// Tolerance for subdifferential tests when the conjugate is exact.
pub const ANALYTIC_TOL: f64 = 1e-9;

/// Default number of sphere points for the sphere route.
pub const DEFAULT_SPHERE_POINTS: usize = 10_000;

/// The Capra coupling generated by a normalization function.
#[derive(Debug, Clone)]
pub struct Coupling {
    nu: Normalization,
}

impl Coupling {
    pub fn new(nu: Normalization) -> Self {
        Coupling { nu }
    }

    pub fn normalization(&self) -> &Normalization {
        &self.nu
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.nu.value(x);
        if n == 0.0 {
            0.0
        } else {
            dot(x, y) / n
        }
    }
}

/// Free-function form of [`Coupling::value`].
pub fn capra_coupling(x: &[f64], y: &[f64], c: &Coupling) -> f64 {
    c.value(x, y)
}

pub type ExtFn = Arc<dyn Fn(&[f64]) -> ExtReal + Send + Sync>;

/// A 0-homogeneous function: `f(ρx) = f(x)` for every `ρ ≠ 0`.
#[derive(Clone)]
pub enum ZeroHomFn {
    /// `φ ∘ ℓ0`.
    L0Composite(PhiSpec),
    /// The constant 0.
    Zero,
    /// Any other 0-homogeneous function; see [`ZeroHomFn::check_homogeneity`].
    Custom(ExtFn),
}

impl fmt::Debug for ZeroHomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroHomFn::L0Composite(phi) => write!(f, "L0Composite({:?})", phi.values()),
            ZeroHomFn::Zero => f.write_str("Zero"),
            ZeroHomFn::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl ZeroHomFn {
    /// `ℓ0` itself in dimension `d`.
    pub fn l0(dim: usize) -> Self {
        ZeroHomFn::L0Composite(PhiSpec::identity(dim))
    }

    pub fn custom<F: Fn(&[f64]) -> ExtReal + Send + Sync + 'static>(f: F) -> Self {
        ZeroHomFn::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64]) -> ExtReal {
        match self {
            ZeroHomFn::L0Composite(phi) => phi.at(l0(x)),
            ZeroHomFn::Zero => ExtReal::ZERO,
            ZeroHomFn::Custom(f) => f(x),
        }
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            ZeroHomFn::L0Composite(phi) => phi.check_dim(d),
            _ => Ok(()),
        }
    }

    /// Checks `f(ρx) = f(x)` for `ρ ∈ {-2, -1, 0.5, 3}` at the given points.
    pub fn check_homogeneity(&self, points: &[Vec<f64>], tol: f64) -> Result<()> {
        for x in points {
            let fx = self.eval(x);
            for rho in [-2.0, -1.0, 0.5, 3.0] {
                let scaled: Vec<f64> = x.iter().map(|c| rho * c).collect();
                if self.eval(&scaled).distance(fx) > tol {
                    return Err(Error::NotZeroHomogeneous {
                        point: x.clone(),
                        rho,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Points of `S_ν ∪ {0}` used by the sphere route.
///
/// Directions are stratified by support: for every nonempty coordinate set
/// `K` the sample holds directions whose nonzero pattern is exactly `K`, so
/// functions of the sparsity pattern (like `ℓ0`) are seen at every level.
/// Within a support the directions are low-discrepancy (equispaced angles in
/// 2-D, a Halton sequence above), then mapped onto the sphere by `x / ν(x)`.
#[derive(Debug, Clone)]
pub struct SphereSample {
    dim: usize,
    points: Vec<Vec<f64>>,
    resolution: f64,
}

/// Largest dimension for support-stratified sampling.
pub const MAX_SPHERE_DIM: usize = 12;

/// Size of the off-support coordinates of lifted sphere directions.
const LIFT: f64 = 1e-9;

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while index > 0 {
        out += (index % b) as f64 * inv;
        index /= b;
        inv /= base as f64;
    }
    out
}

/// Surface area of the unit sphere in `R^m`.
fn sphere_area(m: usize) -> f64 {
    // Γ(m/2) by the half-integer recursion
    let mut gamma = if m % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut x = if m % 2 == 0 { 1.0 } else { 0.5 };
    while x + 1e-9 < m as f64 / 2.0 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(m as f64 / 2.0) / gamma
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl SphereSample {
    /// About `count` sphere points plus the origin.
    ///
    /// The budget is split between supports so that every support of size
    /// `m ≥ 2` gets the same angular spacing `θ`, i.e. about
    /// `area(S^{m-1}) / θ^{m-1}` directions; `θ` is reported as
    /// [`SphereSample::resolution`]. Signed coordinate vectors are always
    /// included, and so are the sign vectors of every support while they fit
    /// in half the budget. Directions are then lifted off their support by
    /// `±1e-9` in the remaining coordinates, so the result may hold up to
    /// `3 * count` points.
    pub fn new(nu: &Normalization, dim: usize, count: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptySample);
        }
        if dim > MAX_SPHERE_DIM {
            return Err(Error::DimensionTooLarge {
                d: dim,
                max: MAX_SPHERE_DIM,
                what: "support-stratified sphere sampling",
            });
        }
        // directions grouped by support bitmask
        let full = 1usize << dim;
        let mut by_support: Vec<Vec<Vec<f64>>> = vec![Vec::new(); full];
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[i] = s;
                by_support[1 << i].push(e);
            }
        }
        let support_of = |mask: usize| -> Vec<usize> { (0..dim).filter(|i| mask >> i & 1 == 1).collect() };
        let multi: Vec<usize> = (1..full).filter(|m| m.count_ones() >= 2).collect();
        if 3f64.powi(dim as i32) <= count as f64 / 2.0 {
            for &mask in &multi {
                let support = support_of(mask);
                for signs in 0u32..(1 << support.len()) {
                    let mut v = vec![0.0; dim];
                    for (j, &i) in support.iter().enumerate() {
                        v[i] = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
                    }
                    by_support[mask].push(v);
                }
            }
        }
        let mut resolution = 0.0;
        if dim >= 2 {
            let fixed: usize = by_support.iter().map(Vec::len).sum();
            let budget = count.saturating_sub(fixed).max(8 * multi.len()) as f64;
            let demand = |theta: f64| -> f64 {
                (2..=dim)
                    .map(|m| binomial(dim, m) * sphere_area(m) / theta.powi(m as i32 - 1))
                    .sum()
            };
            let (mut lo, mut hi) = (1e-9_f64, 10.0_f64);
            for _ in 0..200 {
                let mid = (lo * hi).sqrt();
                if demand(mid) > budget {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            resolution = hi;
            for &mask in &multi {
                let support = support_of(mask);
                let m = support.len();
                let n = (sphere_area(m) / hi.powi(m as i32 - 1)).floor().max(8.0) as usize;
                for u in Self::support_directions(m, n) {
                    let mut v = vec![0.0; dim];
                    for (&i, c) in support.iter().zip(u) {
                        v[i] = c;
                    }
                    by_support[mask].push(v);
                }
            }
        }
        let mut raw: Vec<Vec<f64>> = by_support.iter().flatten().cloned().collect();
        // Lifts: every direction on a support J, plus ±LIFT on each coordinate
        // set outside J, lands on a larger support next to the face of J.
        // Sups of functions that jump on faces are approached through these.
        // Smaller supports first, while the total stays within 3 * count.
        let mut order: Vec<usize> = (1..full - 1).collect();
        order.sort_by_key(|m| m.count_ones());
        for mask in order {
            let rest = (full - 1) & !mask;
            let extra = 3f64.powi(rest.count_ones() as i32) - 1.0;
            if raw.len() as f64 + extra * by_support[mask].len() as f64 > 3.0 * count.max(1) as f64 {
                break;
            }
            let outside = support_of(rest);
            for u in &by_support[mask] {
                // each outside coordinate is 0, +LIFT or -LIFT, not all 0
                for code in 1..3usize.pow(outside.len() as u32) {
                    let mut v = u.clone();
                    let mut c = code;
                    for &i in &outside {
                        v[i] = [0.0, LIFT, -LIFT][c % 3];
                        c /= 3;
                    }
                    raw.push(v);
                }
            }
        }
        let mut points: Vec<Vec<f64>> = raw.iter().map(|u| nu.normalize(u)).collect();
        points.push(vec![0.0; dim]);
        Ok(SphereSample {
            dim,
            points,
            resolution,
        })
    }

    /// `count` directions in `R^m` with every coordinate nonzero: equispaced
    /// angles for `m = 2`, a Fibonacci lattice for `m = 3`, a Halton sequence
    /// in the cube above.
    fn support_directions(m: usize, count: usize) -> Vec<Vec<f64>> {
        use std::f64::consts::PI;
        match m {
            2 => (0..count)
                .map(|j| {
                    let t = 2.0 * PI * (j as f64 + 0.5) / count as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
            3 => {
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..count)
                    .map(|j| {
                        let z = 1.0 - (2.0 * j as f64 + 1.0) / count as f64;
                        let r = (1.0 - z * z).sqrt();
                        let t = golden * j as f64;
                        vec![r * t.cos(), r * t.sin(), z]
                    })
                    .filter(|u| u.iter().all(|&c| c != 0.0))
                    .collect()
            }
            _ => {
                let mut out = Vec::with_capacity(count);
                let mut index = 1u64;
                while out.len() < count {
                    let u: Vec<f64> = (0..m)
                        .map(|a| 2.0 * radical_inverse(index, PRIMES[a]) - 1.0)
                        .collect();
                    index += 1;
                    if u.iter().all(|&c| c != 0.0) {
                        out.push(u);
                    }
                }
                out
            }
        }
    }

    /// Wraps user-supplied points; they are assumed to lie in `S_ν ∪ {0}`.
    pub fn from_points(points: Vec<Vec<f64>>, resolution: f64) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptySample)?.len();
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Ok(SphereSample {
            dim,
            points,
            resolution,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Heuristic spacing between neighboring directions.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }
}

/// Sphere route: `sup_{s ∈ sample} ⟨s, y⟩ ⊞ (-f(s))`.
pub fn capra_conjugate(f: &ZeroHomFn, y: &[f64], sphere: &SphereSample) -> Result<ExtReal> {
    if sphere.is_empty() {
        return Err(Error::EmptySample);
    }
    if sphere.dim() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: sphere.dim(),
            got: y.len(),
        });
    }
    Ok(sphere
        .points()
        .iter()
        .map(|s| ExtReal::Finite(dot(s, y)).low_add(-f.eval(s)))
        .fold(ExtReal::NegInf, ExtReal::max))
}

/// Coupling route: the definition `sup_x ¢(x, y) ⊞ (-f(x))` over grid nodes.
pub fn capra_conjugate_by_coupling(f: &ZeroHomFn, c: &Coupling, y: &[f64], grid: &Grid) -> ExtReal {
    grid.nodes()
        .map(|x| ExtReal::Finite(c.value(&x, y)).low_add(-f.eval(&x)))
        .fold(ExtReal::NegInf, ExtReal::max)
}

/// Ball route: Fenchel conjugate of `f ⊕ δ_{B_ν}` over grid nodes.
pub fn capra_conjugate_ball_route(f: &ZeroHomFn, c: &Coupling, y: &[f64], grid: &Grid) -> ExtReal {
    let nu = c.normalization();
    grid.nodes()
        .filter(|x| nu.ball_contains(x))
        .map(|x| ExtReal::Finite(dot(&x, y)).low_add(-f.eval(&x)))
        .fold(ExtReal::NegInf, ExtReal::max)
}

/// Closed form for `φ ∘ ℓ0` with an `ℓp` source, `p ∈ [1, ∞]`:
/// `sup_{l ∈ 0..=d} [top-(q,l)(y) - φ(l)]`, the `l = 0` term being 0 and
/// levels with `φ(l) = +∞` dropping out.
pub fn capra_conjugate_l0_analytic(y: &[f64], phi: &PhiSpec, p: f64) -> Result<ExtReal> {
    phi.check_dim(y.len())?;
    let q = conjugate_exponent(p)?;
    let z = crate::norms::sorted_magnitudes(y);
    let mut best = 0.0_f64;
    for l in 1..=phi.dim() {
        if let ExtReal::Finite(w) = phi.at(l) {
            best = best.max(lp_unchecked(&z[..l], q) - w);
        }
    }
    Ok(ExtReal::Finite(best))
}

/// How a [`CapraConjugator`] evaluates `f^¢`.
#[derive(Debug, Clone)]
pub enum Route {
    /// Closed form; exact.
    Analytic { p: f64 },
    /// Sphere sample; a lower estimate converging with sample density.
    Sphere(Arc<SphereSample>),
}

/// Evaluates the Capra conjugate of a fixed 0-homogeneous function.
#[derive(Debug, Clone)]
pub struct CapraConjugator {
    f: ZeroHomFn,
    coupling: Coupling,
    route: Route,
}

impl CapraConjugator {
    /// Uses the closed form when `f` is `φ ∘ ℓ0` or zero and `ν` is `ℓp` with
    /// `p ≥ 1`; otherwise a sphere sample of about `sphere_points` points.
    pub fn new(f: ZeroHomFn, coupling: Coupling, dim: usize, sphere_points: usize) -> Result<Self> {
        f.check_dim(dim)?;
        let analytic = match (&f, coupling.normalization().norm_exponent()) {
            (ZeroHomFn::L0Composite(_) | ZeroHomFn::Zero, Some(p)) => Some(p),
            _ => None,
        };
        let route = match analytic {
            Some(p) => Route::Analytic { p },
            None => Route::Sphere(Arc::new(SphereSample::new(
                coupling.normalization(),
                dim,
                sphere_points,
            )?)),
        };
        Ok(CapraConjugator { f, coupling, route })
    }

    /// Forces the sphere route with the given sample.
    pub fn with_sphere(f: ZeroHomFn, coupling: Coupling, sphere: SphereSample) -> Result<Self> {
        f.check_dim(sphere.dim())?;
        Ok(CapraConjugator {
            f,
            coupling,
            route: Route::Sphere(Arc::new(sphere)),
        })
    }

    pub fn function(&self) -> &ZeroHomFn {
        &self.f
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn route(&self) -> &Route {
        &self.route
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.route, Route::Analytic { .. })
    }

    pub fn value(&self, y: &[f64]) -> Result<ExtReal> {
        match (&self.route, &self.f) {
            (Route::Analytic { p }, ZeroHomFn::L0Composite(phi)) => {
                capra_conjugate_l0_analytic(y, phi, *p)
            }
            (Route::Analytic { p }, ZeroHomFn::Zero) => {
                Ok(ExtReal::Finite(lp_unchecked(y, conjugate_exponent(*p)?)))
            }
            (Route::Analytic { .. }, ZeroHomFn::Custom(_)) => {
                unreachable!("custom functions use the sphere route")
            }
            (Route::Sphere(sample), f) => capra_conjugate(f, y, sample),
        }
    }

    /// Membership tolerance at `y`: [`ANALYTIC_TOL`] for the closed form,
    /// `5 h (1 + ‖y‖₂)` for a sphere sample of resolution `h`.
    pub fn tolerance(&self, y: &[f64]) -> f64 {
        match &self.route {
            Route::Analytic { .. } => ANALYTIC_TOL,
            Route::Sphere(s) => 5.0 * s.resolution() * (1.0 + lp_unchecked(y, 2.0)),
        }
    }

    /// Conjugate on every node of `dual_grid`, in parallel.
    pub fn on_grid(&self, dual_grid: &Grid) -> Result<FunctionSample> {
        let values = (0..dual_grid.len())
            .into_par_iter()
            .map(|i| self.value(&dual_grid.node(i)))
            .collect::<Result<Vec<_>>>()?;
        FunctionSample::new(dual_grid.clone(), values)
    }

    /// `y ∈ ∂_¢ f(x)`: `f^¢(y) = ¢(x,y) ⊞ (-f(x))` within tolerance.
    pub fn subdiff_contains(&self, y: &[f64], x: &[f64]) -> Result<bool> {
        let fx = self.f.eval(x);
        if !fx.is_finite() {
            return Err(Error::InfiniteValueAt);
        }
        let rhs = ExtReal::Finite(self.coupling.value(x, y)).low_add(-fx);
        let lhs = self.value(y)?;
        Ok(lhs.distance(rhs) <= self.tolerance(y))
    }

    /// Candidates in `∂_¢ f(0)`, i.e. with `f^¢(y) ≤ 0` (within tolerance).
    pub fn subdiff_at_zero(&self, candidates: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let dim = candidates.first().map_or(0, Vec::len);
        let f0 = self.f.eval(&vec![0.0; dim]);
        if f0 != ExtReal::ZERO {
            return Err(Error::NonzeroAtOrigin(f0.to_string()));
        }
        let mut accepted = Vec::new();
        for y in candidates {
            if self.value(y)? <= ExtReal::Finite(self.tolerance(y)) {
                accepted.push(y.clone());
            }
        }
        Ok(accepted)
    }
}

/// `y ∈ ∂_¢ f(x)` with the default conjugator for `f` and `c`.
pub fn capra_subdiff_contains(y: &[f64], x: &[f64], f: &ZeroHomFn, c: &Coupling) -> Result<bool> {
    CapraConjugator::new(f.clone(), c.clone(), y.len(), DEFAULT_SPHERE_POINTS)?
        .subdiff_contains(y, x)
}

/// Candidates in `∂_¢ f(0)` with the default conjugator for `f` and `c`.
pub fn capra_subdiff_at_zero(
    f: &ZeroHomFn,
    c: &Coupling,
    candidates: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    let dim = candidates.first().ok_or(Error::EmptySample)?.len();
    CapraConjugator::new(f.clone(), c.clone(), dim, DEFAULT_SPHERE_POINTS)?
        .subdiff_at_zero(candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const INF: f64 = f64::INFINITY;

    fn coupling(p: f64) -> Coupling {
        Coupling::new(Normalization::lp(p).unwrap())
    }

    #[test]
    fn coupling_examples() {
        let c = coupling(2.0);
        assert_eq!(c.value(&[0.0, 0.0], &[5.0, -1.0]), 0.0);
        assert_abs_diff_eq!(c.value(&[3.0, 4.0], &[1.0, 0.0]), 0.6, epsilon = 1e-15);
        let y = [0.3, -2.0];
        assert_abs_diff_eq!(
            c.value(&[2.0, 1.0], &y),
            c.value(&[4.0, 2.0], &y),
            epsilon = 1e-15
        );
    }

    #[test]
    fn one_dimensional_l0_linf() {
        // S = {-1, 1} in 1-D: f^¢(y) = max(0, |y| - 1)
        let f = ZeroHomFn::l0(1);
        let sphere = SphereSample::new(&Normalization::Lp(INF), 1, 10).unwrap();
        assert_eq!(sphere.len(), 3);
        for y in [-3.0, -1.0, -0.2, 0.0, 0.5, 2.0] {
            let expect = (y as f64).abs() - 1.0;
            let v = capra_conjugate(&f, &[y], &sphere).unwrap();
            assert_eq!(v, ExtReal::Finite(expect.max(0.0)));
            let a = capra_conjugate_l0_analytic(&[y], &PhiSpec::identity(1), INF).unwrap();
            assert_eq!(a, v);
        }
    }

    #[test]
    fn zero_function_gives_dual_norm() {
        let sphere = SphereSample::new(&Normalization::Lp(2.0), 2, 10_000).unwrap();
        for y in [[3.0, 4.0], [-1.0, 0.5], [0.0, 0.0]] {
            let v = capra_conjugate(&ZeroHomFn::Zero, &y, &sphere)
                .unwrap()
                .to_f64();
            let exact = lp_unchecked(&y, 2.0);
            assert!(v <= exact + 1e-12 && exact - v < 1e-6, "{v} vs {exact}");
        }
    }

    #[test]
    fn conjugate_at_zero_vanishes() {
        let phi = PhiSpec::from_f64(&[0.0, 0.5, INF, 3.0]).unwrap();
        assert_eq!(
            capra_conjugate_l0_analytic(&[0.0; 3], &phi, 2.0).unwrap(),
            ExtReal::ZERO
        );
        let f = ZeroHomFn::L0Composite(phi);
        let sphere = SphereSample::new(&Normalization::Lp(1.5), 3, 2_000).unwrap();
        assert_eq!(
            capra_conjugate(&f, &[0.0; 3], &sphere).unwrap(),
            ExtReal::ZERO
        );
    }

    #[test]
    fn analytic_enumeration_example() {
        // max(0, 3 - 1, 3 - 2) over l = 0, 1, 2
        let v = capra_conjugate_l0_analytic(&[3.0, 0.0], &PhiSpec::identity(2), 2.0).unwrap();
        assert_eq!(v, ExtReal::Finite(2.0));
        assert!(capra_conjugate_l0_analytic(&[3.0], &PhiSpec::identity(2), 2.0).is_err());
        assert!(capra_conjugate_l0_analytic(&[3.0, 1.0], &PhiSpec::identity(2), 0.5).is_err());
    }

    #[test]
    fn linf_ball_closed_form() {
        // sup_l [top-(1,l)(y) - l] = Σ_i (|y_i| - 1)_+
        let phi = PhiSpec::identity(4);
        for y in [
            [1.5, -2.0, 3.0, 1.0],
            [0.2, -0.9, 4.0, -1.1],
            [0.0, 0.0, 0.0, 0.0],
        ] {
            let expect: f64 = y.iter().map(|c: &f64| (c.abs() - 1.0).max(0.0)).sum();
            let v = capra_conjugate_l0_analytic(&y, &phi, INF).unwrap().to_f64();
            assert_abs_diff_eq!(v, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn subdiff_membership_examples() {
        let f = ZeroHomFn::l0(1);
        let c = coupling(INF);
        assert!(capra_subdiff_contains(&[0.5], &[0.0], &f, &c).unwrap());
        assert!(!capra_subdiff_contains(&[2.0], &[0.0], &f, &c).unwrap());
        assert!(capra_subdiff_contains(&[0.0], &[0.0], &ZeroHomFn::Zero, &c).unwrap());
        let inf_f = ZeroHomFn::custom(|_| ExtReal::PosInf);
        assert_eq!(
            capra_subdiff_contains(&[0.0], &[1.0], &inf_f, &c),
            Err(Error::InfiniteValueAt)
        );
    }

    #[test]
    fn subdiff_at_zero_examples() {
        let c = coupling(INF);
        let candidates: Vec<Vec<f64>> = (0..=60).map(|i| vec![-3.0 + 0.1 * i as f64]).collect();
        let acc = capra_subdiff_at_zero(&ZeroHomFn::l0(1), &c, &candidates).unwrap();
        assert!(acc.iter().all(|y| y[0].abs() <= 1.0 + 1e-9));
        assert_eq!(acc.len(), 21);

        let c2 = coupling(2.0);
        let cands = vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![0.0, -0.1]];
        let acc = capra_subdiff_at_zero(&ZeroHomFn::Zero, &c2, &cands).unwrap();
        assert_eq!(acc, vec![vec![0.0, 0.0]]);

        let shifted = ZeroHomFn::custom(|_| ExtReal::Finite(1.0));
        assert!(matches!(
            capra_subdiff_at_zero(&shifted, &c2, &cands),
            Err(Error::NonzeroAtOrigin(_))
        ));
    }

    #[test]
    fn homogeneity_check() {
        let pts = vec![vec![1.0, 0.0], vec![0.3, -2.0]];
        assert!(ZeroHomFn::l0(2).check_homogeneity(&pts, 0.0).is_ok());
        let not_hom = ZeroHomFn::custom(|x| ExtReal::Finite(x[0].abs()));
        assert!(not_hom.check_homogeneity(&pts, 1e-12).is_err());
    }

    #[test]
    fn sphere_sample_layout() {
        let nu = Normalization::Lp(0.5);
        let s = SphereSample::new(&nu, 3, 3_000).unwrap();
        let zero = s
            .points()
            .iter()
            .filter(|p| p.iter().all(|&c| c == 0.0))
            .count();
        assert_eq!(zero, 1);
        for p in s.points().iter().filter(|p| p.iter().any(|&c| c != 0.0)) {
            assert!(nu.sphere_contains(p), "{p:?}");
        }
        for level in 1..=3 {
            assert!(s.points().iter().any(|p| l0(p) == level));
        }
        assert!(s.len() <= 3 * 3_000 + 1);
        assert!(SphereSample::new(&nu, 13, 100).is_err());
        assert!(SphereSample::from_points(vec![], 0.1).is_err());
    }

    #[test]
    fn lifted_directions_reach_sups_on_faces() {
        // φ(1) = +∞: the level-2 value 1.2 - 0.2 is only approached near ±e_2
        let phi = PhiSpec::from_f64(&[0.0, INF, 0.2, 5.0]).unwrap();
        let y = [0.0, -1.2, 0.0];
        let exact = capra_conjugate_l0_analytic(&y, &phi, 1.0).unwrap().to_f64();
        assert_abs_diff_eq!(exact, 1.0, epsilon = 1e-15);
        let sphere = SphereSample::new(&Normalization::Lp(1.0), 3, 10_000).unwrap();
        let v = capra_conjugate(&ZeroHomFn::L0Composite(phi), &y, &sphere).unwrap().to_f64();
        assert!(v <= exact && exact - v < 1e-8, "{v}");
    }
}
