//! `ℓp` family, normalization functions and the coordinate-k norm zoo.

mod config;
mod coordinate;
mod lp;
mod phi;

pub use config::{LpConfig, NormConfig};
pub use coordinate::{
    dual_coordinate_k_norm, dual_coordinate_k_norm_by_subsets, k_support_norm,
    restricted_dual_norm, top_k_norm, MAX_ENUMERATION_DIM,
};
pub use lp::{conjugate_exponent, lp_value, Normalization, PointFn, SourceNorm, SPHERE_TOL};
pub use phi::{
    best_norm_object, monotone_ratio_check, phi_dual_gauge, NormObject, PhiSpec,
    BEST_NORM_DIRECTIONS,
};

pub(crate) use coordinate::sorted_magnitudes;
pub(crate) use lp::lp_unchecked;
