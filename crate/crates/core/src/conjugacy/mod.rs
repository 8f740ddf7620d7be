//! Fenchel conjugacy on grids and Capra conjugacy for 0-homogeneous functions.

mod capra;
mod fenchel;

pub use capra::{
    capra_conjugate, capra_conjugate_ball_route, capra_conjugate_by_coupling,
    capra_conjugate_l0_analytic, capra_coupling, capra_subdiff_at_zero, capra_subdiff_contains,
    CapraConjugator, Coupling, ExtFn, Route, SphereSample, ZeroHomFn, ANALYTIC_TOL,
    DEFAULT_SPHERE_POINTS, MAX_SPHERE_DIM,
};
pub use fenchel::{fenchel_biconjugate, fenchel_conjugate, PreparedSample};
