use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{dot, ExtReal, FunctionSample, Grid};

/// A sample reduced to its finite nodes, ready for repeated sup queries.
///
/// Nodes with `f = +∞` contribute `⟨x,y⟩ ⊞ (-∞) = -∞` and are dropped; a
/// single node with `f = -∞` makes every conjugate value `+∞`.
pub struct PreparedSample {
    dim: usize,
    coords: Vec<f64>,
    values: Vec<f64>,
    has_neg_inf: bool,
}

impl PreparedSample {
    pub fn new(f: &FunctionSample) -> Self {
        let grid = f.grid();
        let dim = grid.dim();
        let mut coords = Vec::new();
        let mut values = Vec::new();
        let mut has_neg_inf = false;
        let mut x = vec![0.0; dim];
        for (i, v) in f.values().iter().enumerate() {
            match *v {
                ExtReal::Finite(fx) => {
                    grid.node_into(i, &mut x);
                    coords.extend_from_slice(&x);
                    values.push(fx);
                }
                ExtReal::NegInf => has_neg_inf = true,
                ExtReal::PosInf => {}
            }
        }
        PreparedSample {
            dim,
            coords,
            values,
            has_neg_inf,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `sup_x ⟨x, y⟩ ⊞ (-f(x))` over the sampled nodes.
    pub fn conjugate_at(&self, y: &[f64]) -> ExtReal {
        if self.has_neg_inf {
            return ExtReal::PosInf;
        }
        let mut best = f64::NEG_INFINITY;
        for (x, &fx) in self.coords.chunks_exact(self.dim).zip(&self.values) {
            let candidate = dot(x, y) + (-fx);
            if candidate > best {
                best = candidate;
            }
        }
        ExtReal::new(best)
    }

    /// Conjugate at every node of `target`, evaluated in parallel.
    pub fn conjugate_on(&self, target: &Grid) -> Result<FunctionSample> {
        if target.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: target.dim(),
            });
        }
        let values: Vec<ExtReal> = (0..target.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; self.dim],
                |y, i| {
                    target.node_into(i, y);
                    self.conjugate_at(y)
                },
            )
            .collect();
        FunctionSample::new(target.clone(), values)
    }
}

/// Fenchel conjugate of a grid function, evaluated on `dual_grid`.
///
/// Gives bit-for-bit the same values as [`crate::oracle::naive_conjugate`]:
/// the same inner products in the same order, with infinite nodes resolved
/// up front instead of inside the loop.
pub fn fenchel_conjugate(f: &FunctionSample, dual_grid: &Grid) -> Result<FunctionSample> {
    PreparedSample::new(f).conjugate_on(dual_grid)
}

/// `f**` on the grid of `f`, through `dual_grid`. Never exceeds `f`.
pub fn fenchel_biconjugate(f: &FunctionSample, dual_grid: &Grid) -> Result<FunctionSample> {
    let conj = fenchel_conjugate(f, dual_grid)?;
    fenchel_conjugate(&conj, f.grid())
}
