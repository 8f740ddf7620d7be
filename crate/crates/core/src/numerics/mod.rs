//! Extended reals and sample grids shared by every transform.

mod ext_real;
mod grid;

pub use ext_real::{low_add, upp_add, ExtReal};
pub use grid::{build_grid, sample, Axis, FunctionSample, Grid};

/// Euclidean inner product. Every transform goes through this one function so
/// that optimized and brute-force paths round identically.
#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

/// Number of nonzero components.
pub fn l0(x: &[f64]) -> usize {
    x.iter().filter(|&&c| c != 0.0).count()
}
