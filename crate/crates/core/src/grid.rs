//! Uniform Cartesian meshes on rectangular domains.
//!
//! Nodes are indexed lexicographically with the first coordinate fastest,
//! so matrix structure is reproducible bit-for-bit across runs.

use crate::error::{Error, Result};

/// Relative tolerance (in units of `dx`) used to classify points that land
/// on the boundary only approximately, e.g. endpoints of truncated rays.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Uniform Cartesian mesh covering the rectangular domain `[lo, hi]` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: Vec<usize>,
    dx: Vec<f64>,
}

/// Result of locating a point with respect to the mesh.
///
/// For points in the closed domain the containing cell is reported as the
/// multi-index of its lower corner together with local coordinates in
/// `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum Location {
    Inside { cell: Vec<usize>, local: Vec<f64> },
    OnBoundary { cell: Vec<usize>, local: Vec<f64> },
    Outside,
}

impl Grid {
    /// Builds a mesh with `n[d]` equispaced nodes along dimension `d`.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>) -> Result<Grid> {
        assert_eq!(lo.len(), hi.len());
        assert_eq!(lo.len(), n.len());
        if lo.is_empty() || lo.iter().zip(&hi).any(|(a, b)| b <= a) {
            return Err(Error::DegenerateDomain);
        }
        if n.iter().any(|&k| k < 2) {
            return Err(Error::TooFewNodes);
        }
        let dx = lo
            .iter()
            .zip(&hi)
            .zip(&n)
            .map(|((a, b), &k)| (b - a) / (k - 1) as f64)
            .collect();
        Ok(Grid { lo, hi, n, dx })
    }

    /// Square mesh helper: `nodes` nodes per dimension on `[lo, hi]^dim`.
    pub fn square(lo: f64, hi: f64, nodes: usize, dim: usize) -> Result<Grid> {
        Grid::new(vec![lo; dim], vec![hi; dim], vec![nodes; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn nodes_per_dim(&self) -> &[usize] {
        &self.n
    }

    pub fn dx(&self) -> &[f64] {
        &self.dx
    }

    /// Mesh width for isotropic meshes; errors if widths differ between
    /// dimensions (the semi-Lagrangian stencil uses a scalar Δx).
    pub fn dx_scalar(&self) -> Result<f64> {
        let h = self.dx[0];
        if self.dx.iter().any(|&d| (d - h).abs() > 1e-12 * h) {
            return Err(Error::AnisotropicMesh);
        }
        Ok(h)
    }

    /// Total number of mesh nodes.
    pub fn num_nodes(&self) -> usize {
        self.n.iter().product()
    }

    /// Flat index of a multi-index (first coordinate fastest).
    #[inline]
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for d in (0..self.dim()).rev() {
            debug_assert!(multi[d] < self.n[d]);
            idx = idx * self.n[d] + multi[d];
        }
        idx
    }

    /// Inverse of [`Grid::flat_index`].
    #[inline]
    pub fn multi_index_into(&self, flat: usize, out: &mut [usize]) {
        let mut rest = flat;
        for d in 0..self.dim() {
            out[d] = rest % self.n[d];
            rest /= self.n[d];
        }
        debug_assert_eq!(rest, 0);
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        self.multi_index_into(flat, &mut out);
        out
    }

    /// Coordinates of node `flat`, written into `out`.
    #[inline]
    pub fn node_into(&self, flat: usize, out: &mut [f64]) {
        let mut rest = flat;
        for d in 0..self.dim() {
            let k = rest % self.n[d];
            rest /= self.n[d];
            out[d] = self.lo[d] + k as f64 * self.dx[d];
        }
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.node_into(flat, &mut out);
        out
    }

    /// Boundary nodes are exactly those with some multi-index component at
    /// `0` or `n - 1`.
    #[inline]
    pub fn is_boundary(&self, flat: usize) -> bool {
        let mut rest = flat;
        for d in 0..self.dim() {
            let k = rest % self.n[d];
            rest /= self.n[d];
            if k == 0 || k == self.n[d] - 1 {
                return true;
            }
        }
        false
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(move |&j| !self.is_boundary(j))
    }

    /// Whether `x` lies in the closed domain, up to the boundary tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        !matches!(self.locate(x), Location::Outside)
    }

    /// Locates a point: containing cell plus local coordinates, boundary,
    /// or outside. Total function; boundary classification uses an absolute
    /// tolerance of `BOUNDARY_TOL * dx` per coordinate.
    pub fn locate(&self, x: &[f64]) -> Location {
        debug_assert_eq!(x.len(), self.dim());
        let mut cell = vec![0usize; self.dim()];
        let mut local = vec![0.0; self.dim()];
        let mut on_boundary = false;
        for d in 0..self.dim() {
            let tol = BOUNDARY_TOL * self.dx[d];
            if x[d] < self.lo[d] - tol || x[d] > self.hi[d] + tol {
                return Location::Outside;
            }
            if x[d] - self.lo[d] <= tol || self.hi[d] - x[d] <= tol {
                on_boundary = true;
            }
            let c = (((x[d] - self.lo[d]) / self.dx[d]).floor() as isize)
                .clamp(0, self.n[d] as isize - 2) as usize;
            cell[d] = c;
            let node = self.lo[d] + c as f64 * self.dx[d];
            local[d] = ((x[d] - node) / self.dx[d]).clamp(0.0, 1.0);
        }
        if on_boundary {
            Location::OnBoundary { cell, local }
        } else {
            Location::Inside { cell, local }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn problem_a_grid_41() {
        let g = Grid::square(-PI, PI, 41, 2).unwrap();
        assert_eq!(g.num_nodes(), 1681);
        let h = 2.0 * PI / 40.0;
        assert!((g.dx()[0] - h).abs() < 1e-15 && (g.dx()[1] - h).abs() < 1e-15);
        assert_eq!(g.dx_scalar().unwrap(), g.dx()[0]);
    }

    #[test]
    fn smallest_mesh_is_all_boundary() {
        let g = Grid::new(vec![0.0], vec![1.0], vec![2]).unwrap();
        assert_eq!(g.dx()[0], 1.0);
        assert_eq!(g.node(0), vec![0.0]);
        assert_eq!(g.node(1), vec![1.0]);
        assert!(g.is_boundary(0) && g.is_boundary(1));
        assert_eq!(g.interior_nodes().count(), 0);
    }

    #[test]
    fn shifted_domain_spacing() {
        let g = Grid::square(-PI / 8.0, 15.0 * PI / 8.0, 81, 2).unwrap();
        assert!((g.dx()[0] - 2.0 * PI / 80.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert_eq!(
            Grid::new(vec![1.0], vec![1.0], vec![4]).unwrap_err(),
            Error::DegenerateDomain
        );
        assert_eq!(
            Grid::new(vec![0.0], vec![1.0], vec![1]).unwrap_err(),
            Error::TooFewNodes
        );
    }

    #[test]
    fn flat_and_multi_index_roundtrip() {
        let g = Grid::new(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0], vec![3, 4, 5]).unwrap();
        for flat in 0..g.num_nodes() {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
        }
        // first coordinate fastest
        assert_eq!(g.multi_index(1), vec![1, 0, 0]);
        assert_eq!(g.multi_index(3), vec![0, 1, 0]);
    }

    #[test]
    fn locate_recovers_every_node() {
        let g = Grid::new(vec![-1.0, 2.0], vec![1.0, 5.0], vec![5, 7]).unwrap();
        for flat in 0..g.num_nodes() {
            let x = g.node(flat);
            let mi = g.multi_index(flat);
            match g.locate(&x) {
                Location::Inside { cell, local } | Location::OnBoundary { cell, local } => {
                    for d in 0..2 {
                        let rec = g.lo()[d] + (cell[d] as f64 + local[d]) * g.dx()[d];
                        assert!((rec - x[d]).abs() <= 1e-12 * g.dx()[d]);
                        assert!(local[d] == 0.0 || local[d] == 1.0);
                    }
                    let on_b = mi.iter().zip(g.nodes_per_dim()) .any(|(&k, &n)| k == 0 || k == n - 1);
                    assert_eq!(on_b, g.is_boundary(flat));
                }
                Location::Outside => panic!("node classified outside"),
            }
        }
    }

    #[test]
    fn locate_midpoint_and_outside() {
        let g = Grid::new(vec![0.0], vec![4.0], vec![5]).unwrap();
        match g.locate(&[1.5]) {
            Location::Inside { cell, local } => {
                assert_eq!(cell, vec![1]);
                assert!((local[0] - 0.5).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(g.locate(&[5.0]), Location::Outside);
        assert_eq!(g.locate(&[-0.1]), Location::Outside);
    }

    #[test]
    fn interior_and_boundary_partition() {
        let g = Grid::square(0.0, 1.0, 6, 2).unwrap();
        let interior = g.interior_nodes().count();
        let boundary = (0..g.num_nodes()).filter(|&j| g.is_boundary(j)).count();
        assert_eq!(interior + boundary, g.num_nodes());
        assert_eq!(interior, 16);
    }
}
