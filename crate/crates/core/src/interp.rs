//! Multilinear interpolation weights on the Cartesian grid.
//!
//! Weights are the tensor-product linear basis functions of the 2^d cell
//! vertices: non-negative, summing to one, and exact for multilinear
//! functions — the properties the monotone scheme relies on.

use crate::error::{Error, Result};
use crate::grid::{Grid, BOUNDARY_TOL};

/// Weights below this threshold are dropped and the remainder renormalised;
/// keeps matrix sparsity tight without changing results beyond round-off.
const DROP_TOL: f64 = 1e-14;

/// Sparse interpolation stencil: `(node_index, weight)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpStencil {
    pub entries: Vec<(usize, f64)>,
}

impl InterpStencil {
    /// Evaluates the interpolant given nodal `values`.
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.entries.iter().map(|&(j, w)| w * values[j]).sum()
    }
}

/// Multilinear interpolation weights at `x`, which must lie in the closed
/// domain.
pub fn interp_weights(grid: &Grid, x: &[f64]) -> Result<InterpStencil> {
    let mut entries = Vec::with_capacity(1 << grid.dim());
    interp_weights_into(grid, x, &mut entries)?;
    Ok(InterpStencil { entries })
}

/// Allocation-free variant of [`interp_weights`]: clears `entries` and fills
/// it with the stencil. Used in assembly inner loops.
pub fn interp_weights_into(
    grid: &Grid,
    x: &[f64],
    entries: &mut Vec<(usize, f64)>,
) -> Result<()> {
    entries.clear();
    let dim = grid.dim();
    debug_assert_eq!(x.len(), dim);
    debug_assert!(dim <= 16);

    // Inline cell location to avoid allocating through `Grid::locate`.
    let mut cell = [0usize; 16];
    let mut local = [0.0f64; 16];
    for d in 0..dim {
        let (lo, hi, h, n) = (grid.lo()[d], grid.hi()[d], grid.dx()[d], grid.nodes_per_dim()[d]);
        let tol = BOUNDARY_TOL * h;
        if x[d] < lo - tol || x[d] > hi + tol {
            return Err(Error::PointOutsideDomain);
        }
        let c = (((x[d] - lo) / h).floor() as isize).clamp(0, n as isize - 2) as usize;
        cell[d] = c;
        local[d] = ((x[d] - (lo + c as f64 * h)) / h).clamp(0.0, 1.0);
    }

    let mut sum = 0.0;
    for corner in 0..(1usize << dim) {
        let mut w = 1.0;
        let mut flat = 0;
        for d in (0..dim).rev() {
            let bit = (corner >> d) & 1;
            w *= if bit == 1 { local[d] } else { 1.0 - local[d] };
            flat = flat * grid.nodes_per_dim()[d] + cell[d] + bit;
        }
        if w >= DROP_TOL {
            entries.push((flat, w));
            sum += w;
        }
    }
    // Renormalise what survived the drop tolerance.
    if (sum - 1.0).abs() > f64::EPSILON {
        for e in entries.iter_mut() {
            e.1 /= sum;
        }
    }
    Ok(())
}
