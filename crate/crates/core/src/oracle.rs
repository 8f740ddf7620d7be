//! Brute-force reference implementations.
//!
//! Everything here favors transparency over speed: plain double loops over
//! grids and candidate clouds, no shortcuts from closed forms. Analytic and
//! optimized paths elsewhere in the crate are tested against these.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::norms::{conjugate_exponent, top_k_norm};
use crate::numerics::{dot, ExtReal, FunctionSample, Grid};

/// Seed for every pseudo-random direction set.
pub const SEED: u64 = 0x5EED;

/// Largest dimension accepted by [`k_support_bruteforce`].
pub const MAX_BRUTEFORCE_DIM: usize = 6;

/// Fenchel conjugate by the defining double loop,
/// `f*(y) = sup_x ⟨x, y⟩ ⊞ (-f(x))`, in extended arithmetic throughout.
pub fn naive_conjugate(f: &FunctionSample, dual_grid: &Grid) -> Result<FunctionSample> {
    let primal = f.grid();
    if primal.dim() != dual_grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: primal.dim(),
            got: dual_grid.dim(),
        });
    }
    let xs: Vec<Vec<f64>> = primal.nodes().collect();
    let values = dual_grid
        .nodes()
        .map(|y| {
            let mut best = ExtReal::NegInf;
            for (x, &fx) in xs.iter().zip(f.values()) {
                let candidate = ExtReal::Finite(dot(x, &y)).low_add(-fx);
                if candidate > best {
                    best = candidate;
                }
            }
            best
        })
        .collect();
    FunctionSample::new(dual_grid.clone(), values)
}

/// Grid-restricted closed convex envelope: [`naive_conjugate`] onto
/// `dual_grid`, then back onto the grid of `f`.
pub fn convex_envelope_2d(f: &FunctionSample, dual_grid: &Grid) -> Result<FunctionSample> {
    let d = f.grid().dim();
    if d > 2 {
        return Err(Error::DimensionTooLarge {
            d,
            max: 2,
            what: "the grid envelope oracle",
        });
    }
    let conj = naive_conjugate(f, dual_grid)?;
    naive_conjugate(&conj, f.grid())
}

/// `max ⟨x, y⟩` over the candidates accepted by `membership`.
pub fn support_function_bruteforce<M>(
    x: &[f64],
    membership: M,
    candidates: &[Vec<f64>],
) -> Result<f64>
where
    M: Fn(&[f64]) -> bool,
{
    if candidates.is_empty() {
        return Err(Error::EmptySample);
    }
    candidates
        .iter()
        .filter(|y| membership(y))
        .map(|y| dot(x, y))
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        })
        .ok_or(Error::NoMemberFound)
}

/// (p,k)-support norm as the support function of the top-(q,k) unit ball:
/// each direction is scaled onto the ball boundary, `y ← y / top(y)`, and the
/// best one is polished by [`radial_support`]. Always a lower estimate.
pub fn k_support_bruteforce(x: &[f64], p: f64, k: usize, directions: &[Vec<f64>]) -> Result<f64> {
    let d = x.len();
    if d > MAX_BRUTEFORCE_DIM {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_BRUTEFORCE_DIM,
            what: "k-support brute force",
        });
    }
    let q = conjugate_exponent(p)?;
    top_k_norm(x, q, k)?;
    let gauge = |u: &[f64]| top_k_norm(u, q, k).expect("k checked");
    Ok(radial_support(x, &gauge, directions))
}

/// Deterministic direction set in `R^dim`: the signed coordinate vectors,
/// the sign vectors (while they fit in half the budget), then Gaussian
/// directions from a ChaCha stream seeded with `seed`.
pub fn direction_cloud(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count.max(2 * dim));
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            out.push(e);
        }
    }
    if dim < 20 && (1usize << dim) <= count / 2 {
        for mask in 0..(1usize << dim) {
            out.push(
                (0..dim)
                    .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                    .collect(),
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        if u.iter().any(|&c| c != 0.0) {
            out.push(u);
        }
    }
    out
}

/// Support function of `{u : gauge(u) ≤ 1}` at `x`, i.e.
/// `sup_u ⟨x, u⟩ / gauge(u)`.
///
/// Scans `directions` (each radially scaled onto the boundary), then polishes
/// the best few by compass search on the sphere with steps halving down to
/// `1e-13`. Only boundary points are ever evaluated, so the result never
/// exceeds the true value beyond rounding.
pub fn radial_support(x: &[f64], gauge: &dyn Fn(&[f64]) -> f64, directions: &[Vec<f64>]) -> f64 {
    let ratio = |u: &[f64]| -> Option<f64> {
        let g = gauge(u);
        (g > 0.0 && g.is_finite()).then(|| dot(x, u) / g)
    };
    if x.iter().all(|&c| c == 0.0) {
        return 0.0;
    }
    let mut scored: Vec<(f64, &Vec<f64>)> = directions
        .iter()
        .filter_map(|u| ratio(u).map(|r| (r, u)))
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite ratios"));
    let mut best = 0.0_f64;
    for (r0, u0) in scored.iter().take(4) {
        best = best.max(*r0);
        best = best.max(compass_polish(u0, *r0, &ratio));
    }
    best
}

fn compass_polish(start: &[f64], start_value: f64, ratio: &dyn Fn(&[f64]) -> Option<f64>) -> f64 {
    let d = start.len();
    let unit = |v: &mut Vec<f64>| {
        let n = dot(v, v).sqrt();
        v.iter_mut().for_each(|c| *c /= n);
    };
    let mut moves: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            moves.push(e);
        }
        for j in i + 1..d {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut e = vec![0.0; d];
                e[i] = si * std::f64::consts::FRAC_1_SQRT_2;
                e[j] = sj * std::f64::consts::FRAC_1_SQRT_2;
                moves.push(e);
            }
        }
    }
    let mut u = start.to_vec();
    unit(&mut u);
    let mut value = start_value;
    let mut step = 0.25;
    let mut budget = 20_000 * d;
    let mut cand = vec![0.0; d];
    while step > 1e-13 && budget > 0 {
        let mut moved = false;
        for m in &moves {
            budget = budget.saturating_sub(1);
            for ((c, a), b) in cand.iter_mut().zip(&u).zip(m) {
                *c = a + step * b;
            }
            if let Some(v) = ratio(&cand) {
                if v > value {
                    value = v;
                    u.copy_from_slice(&cand);
                    unit(&mut u);
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{k_support_norm, lp_value};
    use crate::numerics::sample;
    use approx::assert_abs_diff_eq;

    #[test]
    fn conjugate_of_origin_indicator_is_zero() {
        let g = Grid::cube(1, 1.0, 3).unwrap();
        let delta = sample(
            |x| {
                if x[0] == 0.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                }
            },
            &g,
        );
        let conj = naive_conjugate(&delta, &g).unwrap();
        assert!(conj.values().iter().all(|&v| v == ExtReal::ZERO));
    }

    #[test]
    fn conjugate_of_linear_peaks_at_slope() {
        let g = Grid::cube(2, 1.0, 21).unwrap();
        let a = [0.5, -0.3];
        let f = sample(|x| ExtReal::Finite(dot(&a, x)), &g);
        let dual = Grid::cube(2, 1.0, 11).unwrap();
        let conj = naive_conjugate(&f, &dual).unwrap();
        for (i, y) in dual.nodes().enumerate() {
            let v = conj.value(i).finite().unwrap();
            if (y[0] - a[0]).abs() < 1e-12 && (y[1] - a[1]).abs() < 1e-12 {
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
            } else {
                assert!(v > 0.0);
            }
        }
    }

    #[test]
    fn envelope_of_single_point_is_indicator() {
        let g = Grid::cube(2, 1.0, 5).unwrap();
        let f = sample(
            |x| {
                if x.iter().all(|&c| c == 0.0) {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                }
            },
            &g,
        );
        let env = convex_envelope_2d(&f, &Grid::cube(2, 50.0, 11).unwrap()).unwrap();
        for (i, x) in g.nodes().enumerate() {
            let v = env.value(i).finite().unwrap();
            if x.iter().all(|&c| c == 0.0) {
                assert_eq!(v, 0.0);
            } else {
                // bounded dual box: grows like 50·|x|_1, the discrete stand-in for +∞
                assert!(v >= 25.0);
            }
        }
        assert!(convex_envelope_2d(
            &sample(|_| ExtReal::ZERO, &Grid::cube(3, 1.0, 2).unwrap()),
            &Grid::cube(3, 1.0, 2).unwrap()
        )
        .is_err());
    }

    #[test]
    fn envelope_fixes_convex_samples() {
        let g = Grid::cube(1, 3.0, 61).unwrap();
        let f = sample(|x| ExtReal::Finite(0.5 * x[0] * x[0]), &g);
        let env = convex_envelope_2d(&f, &Grid::cube(1, 3.0, 61).unwrap()).unwrap();
        for (a, b) in env.values().iter().zip(f.values()) {
            assert!(a.distance(*b) <= 0.1 * 0.1, "{a} vs {b}");
        }
        let again = convex_envelope_2d(&env, &Grid::cube(1, 3.0, 61).unwrap()).unwrap();
        for (a, b) in again.values().iter().zip(env.values()) {
            assert!(a.distance(*b) <= 1e-12);
        }
    }

    #[test]
    fn support_function_examples() {
        let dirs = direction_cloud(2, 20_000, SEED);
        let ball: Vec<Vec<f64>> = dirs
            .iter()
            .map(|u| {
                let n = lp_value(u, 2.0).unwrap();
                u.iter().map(|c| c / n).collect()
            })
            .collect();
        let v = support_function_bruteforce(&[1.0, 0.0], |_| true, &ball).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        assert_eq!(
            support_function_bruteforce(&[0.0, 0.0], |_| true, &ball).unwrap(),
            0.0
        );
        assert_eq!(
            support_function_bruteforce(&[1.0, 0.0], |_| false, &ball),
            Err(Error::NoMemberFound)
        );
        assert_eq!(
            support_function_bruteforce(&[1.0], |_| true, &[]),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn k_support_bruteforce_examples() {
        let dirs3 = direction_cloud(3, 100_000, SEED);
        for k in 1..=3 {
            let v = k_support_bruteforce(&[0.2, -1.0, 0.7], 1.0, k, &dirs3).unwrap();
            assert_abs_diff_eq!(v, 1.9, epsilon = 1e-6);
        }
        let v = k_support_bruteforce(&[1.0, 1.0, 1.0], f64::INFINITY, 2, &dirs3).unwrap();
        assert_abs_diff_eq!(v, 1.5, epsilon = 1e-3);
        let dirs2 = direction_cloud(2, 10_000, SEED);
        let v = k_support_bruteforce(&[3.0, 4.0], 2.0, 1, &dirs2).unwrap();
        assert_abs_diff_eq!(v, 7.0, epsilon = 1e-3);
        assert!(k_support_bruteforce(&[1.0; 7], 2.0, 1, &dirs2).is_err());
    }

    #[test]
    fn k_support_bruteforce_never_exceeds_closed_form() {
        let dirs = direction_cloud(4, 5_000, SEED);
        let xs = [
            [0.3, -1.1, 2.0, 0.05],
            [1.0, 1.0, 1.0, 1.0],
            [0.0, 0.0, -3.0, 0.5],
        ];
        for x in xs {
            for p in [1.0, 2.0, f64::INFINITY] {
                for k in 1..=4 {
                    let exact = k_support_norm(&x, p, k).unwrap();
                    let brute = k_support_bruteforce(&x, p, k, &dirs).unwrap();
                    assert!(brute <= exact * (1.0 + 1e-12) + 1e-12, "p={p} k={k}");
                    assert!(
                        exact - brute <= 1e-6 * (1.0 + exact),
                        "p={p} k={k}: {exact} vs {brute}"
                    );
                }
            }
        }
    }

    #[test]
    fn direction_cloud_is_deterministic() {
        assert_eq!(direction_cloud(3, 50, SEED), direction_cloud(3, 50, SEED));
        assert_ne!(direction_cloud(3, 50, SEED), direction_cloud(3, 50, 1));
        assert_eq!(direction_cloud(3, 50, SEED).len(), 50);
    }
}
