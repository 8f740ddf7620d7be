use capra_core::conjugacy::{CapraConjugator, Coupling, SphereSample, ZeroHomFn};
use capra_core::envelope::{
    ball_eval_grid, best_cvx_on_subset, default_dual_grid, tightest_convex_on_ball,
    tightest_pos_hom_on_ball, BallEnvelope,
};
use capra_core::norms::{Normalization, PhiSpec};
use capra_core::numerics::{l0, sample, ExtReal, Grid};
use capra_core::oracle::convex_envelope_2d;

const INF: f64 = f64::INFINITY;

fn normalizations() -> Vec<Normalization> {
    vec![
        Normalization::Lp(1.0),
        Normalization::Lp(2.0),
        Normalization::Lp(INF),
        Normalization::Lp(0.5),
    ]
}

#[test]
fn ball_envelope_matches_subset_envelope_of_restriction() {
    for dim in [1, 2] {
        let count = if dim == 1 { 401 } else { 101 };
        for nu in normalizations() {
            for f in [
                ZeroHomFn::l0(dim),
                ZeroHomFn::L0Composite(PhiSpec::scaled_identity(dim, 2.0)),
            ] {
                let grid = ball_eval_grid(&nu, dim, count).unwrap();
                let h = grid.step();
                let env = BallEnvelope::new(f.clone(), nu.clone(), dim).unwrap();
                let surface = env.sample(&grid).unwrap();
                let raw = sample(|x| f.eval(x), &grid);
                let dual = default_dual_grid(&f, &nu, dim).unwrap();
                let oracle = best_cvx_on_subset(&raw, |x| nu.ball_contains(x), &dual).unwrap();
                for (i, x) in grid.nodes().enumerate() {
                    let (a, b) = (surface.value(i), oracle.value(i));
                    if nu.ball_contains(&x) {
                        assert!(a.distance(b) <= 2.0 * h, "{nu:?} {f:?} at {x:?}: {a} vs {b}");
                    } else {
                        assert_eq!(a, ExtReal::PosInf);
                    }
                }
            }
        }
    }
}

#[test]
fn l2_reference_point_against_naive_oracle() {
    // reference: the double naive conjugate of ℓ0 ⊕ δ_{B_2} on a grid
    let nu = Normalization::Lp(2.0);
    let f = ZeroHomFn::l0(2);
    let grid = Grid::cube(2, 1.0, 101).unwrap();
    let h = grid.step();
    let restricted = sample(|x| f.eval(x), &grid).restrict(|x| nu.ball_contains(x));
    let oracle = convex_envelope_2d(&restricted, &Grid::cube(2, 4.0, 161).unwrap()).unwrap();
    let env = BallEnvelope::new(f, nu, 2).unwrap();
    let i = grid.find(&[0.4, 0.3], 1e-12).unwrap();
    let reference = oracle.value(i).to_f64();
    // capra verify --oracle convex-envelope --at 0.4,0.3 --grid 101 --dual-radius 4 --dual-count 161
    assert!((reference - 0.7).abs() <= 1e-12, "{reference}");
    let v = env.value_at(&[0.4, 0.3]).to_f64();
    assert!((v - reference).abs() <= 2.0 * h, "{v} vs {reference}");
    // the 1-homogeneous minorant ℓ1 bounds the envelope from below
    assert!(v >= 0.7 - 1e-12, "{v}");
}

#[test]
fn envelope_is_a_minorant_and_above_pos_hom_minorant() {
    let cands: Vec<Vec<f64>> = Grid::cube(2, 3.0, 61).unwrap().nodes().collect();
    for nu in normalizations() {
        let f = ZeroHomFn::l0(2);
        let grid = ball_eval_grid(&nu, 2, 41).unwrap();
        let env = tightest_convex_on_ball(&f, &nu, &grid).unwrap();
        for (i, x) in grid.nodes().enumerate() {
            if !nu.ball_contains(&x) {
                continue;
            }
            assert!(env.value(i) <= f.eval(&x), "{nu:?} at {x:?}");
            if i % 7 == 0 {
                let ph = tightest_pos_hom_on_ball(&f, &nu, &x, &cands).unwrap();
                assert!(ExtReal::Finite(ph) <= env.value(i).upp_add(ExtReal::Finite(1e-12)));
            }
        }
    }
}

#[test]
fn linf_envelope_is_l1_in_one_and_three_dimensions() {
    let nu = Normalization::Lp(INF);
    for (dim, count) in [(1, 201), (3, 21)] {
        let grid = ball_eval_grid(&nu, dim, count).unwrap();
        let env = tightest_convex_on_ball(&ZeroHomFn::l0(dim), &nu, &grid).unwrap();
        for (i, x) in grid.nodes().enumerate() {
            if nu.ball_contains(&x) {
                let l1: f64 = x.iter().map(|c| c.abs()).sum();
                assert!((env.value(i).to_f64() - l1).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn custom_zero_homogeneous_function_through_sphere_route() {
    // f(x) = x_1^2 / |x|^2 on the ℓ2 ball; convex envelope of a 0-homogeneous
    // function must vanish where f does and stay below f
    let f = ZeroHomFn::custom(|x| {
        let n2 = x[0] * x[0] + x[1] * x[1];
        ExtReal::Finite(if n2 == 0.0 { 0.0 } else { x[0] * x[0] / n2 })
    });
    let pts = vec![vec![1.0, 0.3], vec![-0.2, 0.5], vec![0.0, 1.0]];
    f.check_homogeneity(&pts, 1e-12).unwrap();
    let nu = Normalization::Lp(2.0);
    let conj = CapraConjugator::new(f.clone(), Coupling::new(nu.clone()), 2, 10_000).unwrap();
    assert!(!conj.is_exact());
    let env = BallEnvelope::from_conjugator(conj, &Grid::cube(2, 3.0, 121).unwrap()).unwrap();
    for x in [[0.0, 0.5], [0.0, 1.0], [0.0, -0.3]] {
        assert!(env.value_at(&x).to_f64().abs() <= 1e-9);
    }
    let grid = ball_eval_grid(&nu, 2, 31).unwrap();
    let s = env.sample(&grid).unwrap();
    for (i, x) in grid.nodes().enumerate() {
        if nu.ball_contains(&x) {
            assert!(s.value(i).to_f64() <= f.eval(&x).to_f64() + 1e-9, "at {x:?}");
        }
    }
    // x_1^2 / |x|^2 <= |x_1| on the ball gives a convex majorant of the envelope
    for x in [[0.5, 0.5], [1.0, 0.0], [0.3, -0.1]] {
        assert!(env.value_at(&x).to_f64() <= x[0].abs() + 1e-9);
    }
}

#[test]
fn sphere_route_agrees_with_closed_form_envelope() {
    let nu = Normalization::Lp(2.0);
    let f = ZeroHomFn::l0(2);
    let dual = default_dual_grid(&f, &nu, 2).unwrap();
    let exact = BallEnvelope::with_dual_grid(f.clone(), nu.clone(), &dual).unwrap();
    let sphere = SphereSample::new(&nu, 2, 10_000).unwrap();
    let conj = CapraConjugator::with_sphere(f, Coupling::new(nu.clone()), sphere).unwrap();
    let sampled = BallEnvelope::from_conjugator(conj, &dual).unwrap();
    let grid = ball_eval_grid(&nu, 2, 41).unwrap();
    let h = grid.step();
    for x in grid.nodes().filter(|x| nu.ball_contains(x)) {
        let (a, b) = (exact.value_at(&x), sampled.value_at(&x));
        assert!(a <= b.upp_add(ExtReal::Finite(1e-12)));
        assert!(a.distance(b) <= h, "{x:?}: {a} vs {b}");
    }
    assert_eq!(l0(&[0.0, 1.0]), 1);
}
