use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ext_real::ExtReal;
use crate::error::{Error, Result};

/// One axis of a uniform grid: `count` equispaced samples of `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

impl Axis {
    pub fn step(&self) -> f64 {
        (self.upper - self.lower) / (self.count - 1) as f64
    }

    /// Coordinate of the `i`-th sample, `(lower (n-1-i) + upper i) / (n-1)`.
    /// With integer bounds this is the correctly rounded lattice point, so
    /// integer and simple rational nodes are exact and symmetric grids are
    /// symmetric.
    pub fn coord(&self, i: usize) -> f64 {
        let n = (self.count - 1) as f64;
        let i = i as f64;
        (self.lower * (n - i) + self.upper * i) / n
    }
}

/// Axis-aligned uniform lattice over a box in `R^d`.
///
/// Nodes are enumerated in row-major order: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
    coords: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(bounds: &[(f64, f64)], counts: &[usize]) -> Result<Self> {
        if bounds.is_empty() || bounds.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: bounds.len().max(1),
                got: counts.len(),
            });
        }
        let mut axes = Vec::with_capacity(bounds.len());
        for (axis, (&(lower, upper), &count)) in bounds.iter().zip(counts).enumerate() {
            if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
                return Err(Error::InvalidBounds {
                    axis,
                    reason: format!("need finite lower < upper, got [{lower}, {upper}]"),
                });
            }
            if count < 2 {
                return Err(Error::InvalidBounds {
                    axis,
                    reason: format!("need at least 2 points, got {count}"),
                });
            }
            axes.push(Axis {
                lower,
                upper,
                count,
            });
        }
        let coords = axes
            .iter()
            .map(|a| (0..a.count).map(|i| a.coord(i)).collect())
            .collect();
        Ok(Grid { axes, coords })
    }

    /// The cube `[-radius, radius]^d` with `count` points per axis.
    pub fn cube(dim: usize, radius: f64, count: usize) -> Result<Self> {
        Grid::new(&vec![(-radius, radius); dim], &vec![count; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis_coords(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest per-axis step.
    pub fn step(&self) -> f64 {
        self.axes.iter().map(Axis::step).fold(0.0, f64::max)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (slot, axis) in idx.iter_mut().zip(&self.axes).rev() {
            *slot = flat % axis.count;
            flat /= axis.count;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, axis)| acc * axis.count + i)
    }

    pub fn node_into(&self, flat: usize, out: &mut [f64]) {
        let mut rest = flat;
        for a in (0..self.dim()).rev() {
            let n = self.axes[a].count;
            out[a] = self.coords[a][rest % n];
            rest /= n;
        }
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.node_into(flat, &mut out);
        out
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// All node coordinates, flattened with stride `dim`.
    pub fn flat_nodes(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; self.len() * d];
        for (i, chunk) in out.chunks_exact_mut(d).enumerate() {
            self.node_into(i, chunk);
        }
        out
    }

    /// Index of the node closest to `x` (per-axis rounding), if `x` lies in the box.
    pub fn nearest(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.dim());
        for (a, &xi) in self.axes.iter().zip(x) {
            let h = a.step();
            if xi < a.lower - 0.5 * h || xi > a.upper + 0.5 * h {
                return None;
            }
            let i = ((xi - a.lower) / h)
                .round()
                .clamp(0.0, (a.count - 1) as f64);
            idx.push(i as usize);
        }
        Some(self.flat_index(&idx))
    }

    /// Index of the node equal to `x` up to `tol` per coordinate.
    pub fn find(&self, x: &[f64], tol: f64) -> Option<usize> {
        let i = self.nearest(x)?;
        let node = self.node(i);
        node.iter()
            .zip(x)
            .all(|(a, b)| (a - b).abs() <= tol)
            .then_some(i)
    }
}

/// Free-function form of [`Grid::new`].
pub fn build_grid(bounds: &[(f64, f64)], counts: &[usize]) -> Result<Grid> {
    Grid::new(bounds, counts)
}

/// Extended-real values of a function at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSample {
    grid: Grid,
    values: Vec<ExtReal>,
}

impl FunctionSample {
    pub fn new(grid: Grid, values: Vec<ExtReal>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(FunctionSample { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, flat: usize) -> ExtReal {
        self.values[flat]
    }

    pub fn into_values(self) -> Vec<ExtReal> {
        self.values
    }

    /// `self ⊕ δ_U`: values at nodes outside `U` become `+∞`.
    pub fn restrict<U: Fn(&[f64]) -> bool>(&self, subset: U) -> FunctionSample {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if subset(&self.grid.node(i)) {
                    v
                } else {
                    v.upp_add(ExtReal::PosInf)
                }
            })
            .collect();
        FunctionSample {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Smallest and largest finite value, if any.
    pub fn finite_range(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .filter_map(|v| v.finite())
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    /// Writes one row per node: `x_1,…,x_d,value`, infinities as `+inf`/`-inf`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.grid.dim()).map(|i| format!("x_{i}")).collect();
        header.push("value".into());
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(self.grid.dim() + 1);
        for (i, v) in self.values.iter().enumerate() {
            record.clear();
            record.extend(self.grid.node(i).iter().map(|c| c.to_string()));
            record.push(v.to_string());
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads values back from CSV produced by [`write_csv`](Self::write_csv)
    /// against a known grid. Row coordinates must match the grid nodes.
    pub fn read_csv<R: Read>(grid: Grid, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let d = grid.dim();
        let mut values = Vec::with_capacity(grid.len());
        for (i, row) in r.records().enumerate() {
            let row = row?;
            if row.len() != d + 1 {
                return Err(Error::Parse(format!("row {i}: expected {} columns", d + 1)));
            }
            if i >= grid.len() {
                return Err(Error::Parse("more rows than grid nodes".into()));
            }
            let node = grid.node(i);
            for (a, c) in node.iter().enumerate() {
                let x: f64 = row[a]
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {i}: bad coordinate")))?;
                if x != *c {
                    return Err(Error::Parse(format!(
                        "row {i}: coordinate does not match grid"
                    )));
                }
            }
            values.push(row[d].parse()?);
        }
        FunctionSample::new(grid, values)
    }
}

/// Evaluates `f` at every node of `grid`.
pub fn sample<F: Fn(&[f64]) -> ExtReal>(f: F, grid: &Grid) -> FunctionSample {
    let mut x = vec![0.0; grid.dim()];
    let values = (0..grid.len())
        .map(|i| {
            grid.node_into(i, &mut x);
            f(&x)
        })
        .collect();
    FunctionSample {
        grid: grid.clone(),
        values,
    }
}
