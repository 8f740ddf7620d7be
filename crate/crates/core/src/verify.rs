//! Self-check suites behind `capra verify`, plus the oracle entry points used
//! to regenerate reference values.
//!
//! Reports are deterministic for a given suite and seed: no timings, fixed
//! iteration order, seeded randomness only.

use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conjugacy::{
    capra_conjugate, capra_conjugate_ball_route, capra_conjugate_l0_analytic, fenchel_conjugate,
    CapraConjugator, Coupling, SphereSample, ZeroHomFn, DEFAULT_SPHERE_POINTS,
};
use crate::envelope::{ball_eval_grid, best_cvx_on_subset, tightest_pos_hom_on_ball, BallEnvelope};
use crate::error::{Error, Result};
use crate::norms::{
    best_norm_object, k_support_norm, lp_value, phi_dual_gauge, top_k_norm, Normalization, PhiSpec,
    SourceNorm,
};
use crate::numerics::{l0, sample, ExtReal, FunctionSample, Grid};
use crate::oracle::{convex_envelope_2d, direction_cloud, k_support_bruteforce, naive_conjugate};

const INF: f64 = f64::INFINITY;

/// One named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub observed_error: ExtReal,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, tolerance: f64, observed: f64) -> Self {
        let observed_error = if observed.is_nan() {
            ExtReal::PosInf
        } else {
            ExtReal::new(observed)
        };
        Check {
            name: name.to_string(),
            tolerance,
            observed_error,
            passed: observed_error <= ExtReal::Finite(tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Conjugacy,
    Norms,
    Envelope,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conjugacy" => Ok(Suite::Conjugacy),
            "norms" => Ok(Suite::Norms),
            "envelope" => Ok(Suite::Envelope),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!(
                "unknown suite {other:?}; expected conjugacy, norms, envelope or all"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Conjugacy => "conjugacy",
            Suite::Norms => "norms",
            Suite::Envelope => "envelope",
            Suite::All => "all",
        })
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Report> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Norms | Suite::All) {
        checks.extend(norms_suite(seed)?);
    }
    if matches!(suite, Suite::Conjugacy | Suite::All) {
        checks.extend(conjugacy_suite(seed)?);
    }
    if matches!(suite, Suite::Envelope | Suite::All) {
        checks.extend(envelope_suite()?);
    }
    Ok(Report {
        suite,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Random vector in `[-3, 3]^d` with roughly a quarter of the entries zero
/// and occasional ties in magnitude.
pub fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..d)
        .map(|_| {
            if rng.random_bool(0.25) {
                0.0
            } else {
                rng.random_range(-3.0..3.0)
            }
        })
        .collect();
    if d >= 2 && rng.random_bool(0.1) {
        v[1] = -v[0];
    }
    v
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|c| c.abs()).sum()
}

fn norms_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errs = [0.0_f64; 6];
    for _ in 0..1000 {
        let d = rng.random_range(1..=8usize);
        let x = random_vector(&mut rng, d);
        let (n1, ninf) = (l1(&x), max_abs(&x));
        for k in 1..=d {
            errs[0] = errs[0].max((top_k_norm(&x, INF, k)? - ninf).abs());
            errs[1] = errs[1].max((k_support_norm(&x, 1.0, k)? - n1).abs());
            let formula = (n1 / k as f64).max(ninf);
            errs[2] = errs[2].max((k_support_norm(&x, INF, k)? - formula).abs());
        }
        for p in [1.0, 2.0, INF] {
            errs[3] = errs[3].max((k_support_norm(&x, p, 1)? - n1).abs());
            let q = crate::norms::conjugate_exponent(p)?;
            errs[4] = errs[4].max((top_k_norm(&x, q, 1)? - ninf).abs());
            if d <= 6 {
                let g = phi_dual_gauge(&x, &PhiSpec::identity(d), &SourceNorm::Lp(p))?;
                errs[5] = errs[5].max((g - ninf).abs());
            }
        }
    }
    let mut checks = vec![
        Check::new("top-(inf,k) equals linf", 1e-12, errs[0]),
        Check::new("sp-(1,k) equals l1", 1e-12, errs[1]),
        Check::new("sp-(inf,k) equals max(l1/k, linf)", 1e-12, errs[2]),
        Check::new("sp-(p,1) equals l1", 1e-12, errs[3]),
        Check::new("top-(q,1) equals linf", 1e-12, errs[4]),
        Check::new("identity gauge equals linf", 1e-12, errs[5]),
    ];

    let mut best_err = 0.0_f64;
    for p in [1.0, 2.0, INF] {
        for d in 1..=6 {
            let n = best_norm_object(&PhiSpec::identity(d), &SourceNorm::Lp(p))?;
            for _ in 0..20 {
                let x = random_vector(&mut rng, d);
                best_err = best_err.max((n.eval(&x) - l1(&x)).abs());
            }
        }
    }
    checks.push(Check::new(
        "best norm for identity phi equals l1",
        1e-9,
        best_err,
    ));

    let mut brute_err = 0.0_f64;
    let mut excess = 0.0_f64;
    let dirs = direction_cloud(3, 20_000, seed);
    for _ in 0..10 {
        let x = random_vector(&mut rng, 3);
        for (p, k) in [(2.0, 2), (INF, 2), (2.0, 1)] {
            let exact = k_support_norm(&x, p, k)?;
            let brute = k_support_bruteforce(&x, p, k, &dirs)?;
            brute_err = brute_err.max((exact - brute) / (1.0 + l1(&x)));
            excess = excess.max(brute - exact);
        }
    }
    checks.push(Check::new(
        "k-support closed form vs brute force, per (1+|x|_1)",
        1e-3,
        brute_err,
    ));
    checks.push(Check::new(
        "k-support brute force never exceeds closed form",
        1e-12,
        excess,
    ));
    Ok(checks)
}

fn random_sample(rng: &mut ChaCha8Rng, grid: &Grid) -> FunctionSample {
    let values = (0..grid.len())
        .map(|_| ExtReal::Finite(rng.random_range(-1.0..2.0)))
        .collect();
    FunctionSample::new(grid.clone(), values).expect("length matches grid")
}

/// Largest violation of the discrete midpoint inequality along each axis.
pub fn midpoint_violation(s: &FunctionSample) -> f64 {
    let grid = s.grid();
    let mut worst = 0.0_f64;
    for i in 0..grid.len() {
        let idx = grid.multi_index(i);
        for a in 0..grid.dim() {
            if idx[a] == 0 || idx[a] + 1 == grid.axes()[a].count {
                continue;
            }
            let mut lo = idx.clone();
            let mut hi = idx.clone();
            lo[a] -= 1;
            hi[a] += 1;
            let (l, c, h) = (
                s.value(grid.flat_index(&lo)),
                s.value(i),
                s.value(grid.flat_index(&hi)),
            );
            if let (ExtReal::Finite(l), ExtReal::Finite(c), ExtReal::Finite(h)) = (l, c, h) {
                worst = worst.max(2.0 * c - l - h);
            } else if l.is_finite() && h.is_finite() && c == ExtReal::PosInf {
                worst = INF;
            }
        }
    }
    worst
}

fn conjugacy_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0);
    let mut checks = Vec::new();
    let g2 = Grid::cube(2, 1.0, 21)?;
    let dual2 = Grid::cube(2, 2.0, 21)?;

    let mut mismatches = 0usize;
    let mut below = 0.0_f64;
    let mut triple = 0.0_f64;
    let mut convex = 0.0_f64;
    let mut funcs: Vec<FunctionSample> = (0..3).map(|_| random_sample(&mut rng, &g2)).collect();
    funcs
        .push(sample(|x| ExtReal::Finite(l0(x) as f64), &g2).restrict(|x| x[0].hypot(x[1]) <= 1.0));
    funcs.push(sample(
        |x| ExtReal::Finite(x[0].abs() + 0.5 * x[1] * x[1]),
        &g2,
    ));
    for f in &funcs {
        let fast = fenchel_conjugate(f, &dual2)?;
        let slow = naive_conjugate(f, &dual2)?;
        mismatches += fast
            .values()
            .iter()
            .zip(slow.values())
            .filter(|(a, b)| a.to_f64().to_bits() != b.to_f64().to_bits())
            .count();
        let bi = fenchel_conjugate(&fast, f.grid())?;
        for (a, b) in bi.values().iter().zip(f.values()) {
            if let (ExtReal::Finite(a), ExtReal::Finite(b)) = (a, b) {
                below = below.max(a - b);
            } else if *a > *b {
                below = INF;
            }
        }
        let third = fenchel_conjugate(&bi, &dual2)?;
        for (a, b) in third.values().iter().zip(fast.values()) {
            triple = triple.max(a.distance(*b));
        }
        convex = convex.max(midpoint_violation(&fast));
    }
    checks.push(Check::new(
        "fast conjugate bit-identical to naive",
        0.0,
        mismatches as f64,
    ));
    checks.push(Check::new(
        "biconjugate below f, up to rounding",
        1e-12,
        below,
    ));
    checks.push(Check::new(
        "triple conjugate equals conjugate",
        1e-10,
        triple,
    ));
    checks.push(Check::new("conjugate midpoint convexity", 1e-10, convex));

    let g1 = Grid::cube(1, 1.0, 41)?;
    let d1 = Grid::cube(1, 3.0, 61)?;
    let mut reversal = 0.0_f64;
    for _ in 0..100 {
        let f = random_sample(&mut rng, &g1);
        let g = FunctionSample::new(
            g1.clone(),
            f.values()
                .iter()
                .map(|v| ExtReal::Finite(v.to_f64() + rng.random_range(0.0..1.0)))
                .collect(),
        )?;
        let (fc, gc) = (fenchel_conjugate(&f, &d1)?, fenchel_conjugate(&g, &d1)?);
        for (a, b) in fc.values().iter().zip(gc.values()) {
            reversal = reversal.max(b.to_f64() - a.to_f64());
        }
    }
    checks.push(Check::new("conjugate reverses order", 0.0, reversal));

    let primal = Grid::cube(2, 1.0, 101)?;
    let h = primal.step();
    let mut route = 0.0_f64;
    let mut analytic = 0.0_f64;
    for nu in [
        Normalization::Lp(1.0),
        Normalization::Lp(2.0),
        Normalization::Lp(INF),
        Normalization::Lp(0.5),
    ] {
        let sphere = SphereSample::new(&nu, 2, DEFAULT_SPHERE_POINTS)?;
        let c = Coupling::new(nu.clone());
        for scale in [1.0, 2.0] {
            let f = ZeroHomFn::L0Composite(PhiSpec::scaled_identity(2, scale));
            for _ in 0..10 {
                let y = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
                let ball = capra_conjugate_ball_route(&f, &c, &y, &primal).to_f64();
                let sph = capra_conjugate(&f, &y, &sphere)?.to_f64();
                route = route.max((ball - sph).abs() / (1.0 + y[0].hypot(y[1])));
                if let (Some(p), ZeroHomFn::L0Composite(phi)) = (nu.norm_exponent(), &f) {
                    let exact = capra_conjugate_l0_analytic(&y, phi, p)?.to_f64();
                    analytic = analytic.max((exact - sph).abs());
                }
            }
        }
    }
    checks.push(Check::new(
        "ball route vs sphere route, per (1+|y|)",
        5.0 * h,
        route,
    ));
    checks.push(Check::new(
        "closed-form Capra conjugate vs sphere route",
        1e-3,
        analytic,
    ));

    let cands: Vec<Vec<f64>> = Grid::cube(2, 2.0, 41)?.nodes().collect();
    let mut wrong = 0usize;
    for p in [1.0, 2.0, INF] {
        let conj = CapraConjugator::new(
            ZeroHomFn::l0(2),
            Coupling::new(Normalization::Lp(p)),
            2,
            DEFAULT_SPHERE_POINTS,
        )?;
        let accepted = conj.subdiff_at_zero(&cands)?;
        let expected = cands.iter().filter(|y| max_abs(y) <= 1.0 + 1e-12).count();
        wrong += accepted.len().abs_diff(expected);
        wrong += accepted.iter().filter(|y| max_abs(y) > 1.0 + 1e-12).count();
    }
    checks.push(Check::new(
        "Capra subdifferential at zero is the linf unit ball",
        0.0,
        wrong as f64,
    ));
    Ok(checks)
}

fn envelope_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let linf = Normalization::Lp(INF);
    let grid = ball_eval_grid(&linf, 2, 101)?;
    let h = grid.step();
    let env = BallEnvelope::new(ZeroHomFn::l0(2), linf.clone(), 2)?.sample(&grid)?;
    let mut err = 0.0_f64;
    for (i, x) in grid.nodes().enumerate() {
        let v = env.value(i);
        if linf.ball_contains(&x) {
            err = err.max((v.to_f64() - l1(&x)).abs());
        } else if v != ExtReal::PosInf {
            err = INF;
        }
    }
    checks.push(Check::new(
        "l0 envelope on the linf ball is l1",
        2.0 * h,
        err,
    ));

    let l2 = BallEnvelope::new(ZeroHomFn::l0(2), Normalization::Lp(2.0), 2)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    checks.push(Check::new(
        "l2 envelope at (1,0)",
        2.0 * h,
        (l2.value_at(&[1.0, 0.0]).to_f64() - 1.0).abs(),
    ));
    let diag = l2.value_at(&[s, s]).to_f64();
    let diag_err = if diag > 2.0 { INF } else { 2.0 - diag };
    checks.push(Check::new(
        "l2 envelope at the diagonal sphere point",
        4.0 * h,
        diag_err,
    ));
    checks.push(Check::new(
        "l2 envelope at 0",
        0.0,
        l2.value_at(&[0.0, 0.0]).to_f64().abs(),
    ));

    let g1 = Grid::cube(1, 2.0, 401)?;
    let abs = sample(|x| ExtReal::Finite(x[0].abs()), &g1);
    let split = best_cvx_on_subset(&abs, |x| x[0].abs() >= 1.0, &g1)?;
    let hull = best_cvx_on_subset(&abs, |_| true, &g1)?;
    let (mut e_split, mut e_hull) = (0.0_f64, 0.0_f64);
    for (i, x) in g1.nodes().enumerate() {
        e_split = e_split.max((split.value(i).to_f64() - x[0].abs().max(1.0)).abs());
        e_hull = e_hull.max((hull.value(i).to_f64() - x[0].abs()).abs());
    }
    checks.push(Check::new(
        "subset envelope of |x| is max(1,|x|)",
        1e-9,
        e_split,
    ));
    checks.push(Check::new("hull envelope of |x| is |x|", 1e-9, e_hull));

    let cands: Vec<Vec<f64>> = Grid::cube(2, 3.0, 61)?.nodes().collect();
    let v = tightest_pos_hom_on_ball(&ZeroHomFn::l0(2), &linf, &[1.0, -1.0], &cands)?;
    checks.push(Check::new(
        "tightest 1-homogeneous minorant at (1,-1)",
        1e-12,
        (v - 2.0).abs(),
    ));
    Ok(checks)
}

/// Oracle entry points, for regenerating reference values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// `naive_conjugate` of `f ⊕ δ_{B_ν}` on a cube grid, at one dual point.
    NaiveConjugate,
    /// `convex_envelope_2d` of `f ⊕ δ_{B_ν}` on a cube grid, at one point.
    ConvexEnvelope,
    /// `support_function_bruteforce` of the dual ball of the best norm.
    SupportFunction,
    /// `k_support_bruteforce`.
    KSupport,
}

impl FromStr for OracleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive-conjugate" => Ok(OracleKind::NaiveConjugate),
            "convex-envelope" => Ok(OracleKind::ConvexEnvelope),
            "support-function" => Ok(OracleKind::SupportFunction),
            "k-support" => Ok(OracleKind::KSupport),
            other => Err(Error::Parse(format!(
                "unknown oracle {other:?}; expected naive-conjugate, convex-envelope, support-function or k-support"
            ))),
        }
    }
}

/// `f ⊕ δ_{B_ν}` sampled on the cube `[-r, r]^d` with `count` nodes per axis,
/// `r` the bounding radius of the ball.
pub fn restricted_sample(
    f: &ZeroHomFn,
    nu: &Normalization,
    dim: usize,
    count: usize,
) -> Result<FunctionSample> {
    let grid = Grid::cube(dim, nu.bounding_radius(dim), count)?;
    Ok(sample(|x| f.eval(x), &grid).restrict(|x| nu.ball_contains(x)))
}

/// `(f ⊕ δ_{B_ν})*(y)` by the naive double loop.
pub fn oracle_naive_conjugate(
    f: &ZeroHomFn,
    nu: &Normalization,
    y: &[f64],
    count: usize,
) -> Result<ExtReal> {
    let s = restricted_sample(f, nu, y.len(), count)?;
    let at = Grid::new(
        &y.iter().map(|&c| (c, c + 1.0)).collect::<Vec<_>>(),
        &vec![2; y.len()],
    )?;
    Ok(naive_conjugate(&s, &at)?.value(0))
}

/// Grid envelope of `f ⊕ δ_{B_ν}` at the node nearest `x`; the dual grid is
/// `[-R, R]^d` with `dual_count` nodes per axis. Returns the node and the value.
pub fn oracle_convex_envelope(
    f: &ZeroHomFn,
    nu: &Normalization,
    x: &[f64],
    count: usize,
    dual_radius: f64,
    dual_count: usize,
) -> Result<(Vec<f64>, ExtReal)> {
    let s = restricted_sample(f, nu, x.len(), count)?;
    let dual = Grid::cube(x.len(), dual_radius, dual_count)?;
    let env = convex_envelope_2d(&s, &dual)?;
    let i = s.grid().nearest(x).ok_or(Error::NoMemberFound)?;
    Ok((s.grid().node(i), env.value(i)))
}

/// Lower estimate of the best norm for `φ` and an `ℓp` source at `x`:
/// support function of `{y : gauge(y) ≤ 1}` over a direction cloud scaled
/// onto the gauge boundary.
pub fn oracle_support_function(
    x: &[f64],
    phi: &PhiSpec,
    p: f64,
    directions: usize,
    seed: u64,
) -> Result<f64> {
    let source = SourceNorm::lp(p)?;
    let mut cands = Vec::with_capacity(directions);
    for u in direction_cloud(x.len(), directions, seed) {
        let g = phi_dual_gauge(&u, phi, &source)?;
        cands.push(u.iter().map(|c| c / g).collect::<Vec<f64>>());
    }
    let gauge = |y: &[f64]| phi_dual_gauge(y, phi, &source).map_or(false, |g| g <= 1.0 + 1e-12);
    crate::oracle::support_function_bruteforce(x, gauge, &cands)
}

pub fn oracle_k_support(x: &[f64], p: f64, k: usize, directions: usize, seed: u64) -> Result<f64> {
    lp_value(x, p)?;
    k_support_bruteforce(x, p, k, &direction_cloud(x.len(), directions, seed))
}
