//! Geometric and aggregation-based multigrid.
//!
//! Geometric hierarchies use bilinear interpolation between nested node
//! grids (sizes `2^ℓ + 1` per dimension), restriction as its transpose and
//! Galerkin coarse operators; they act on Dirichlet-eliminated interior
//! unknowns. Aggregation hierarchies use double pairwise matching on the
//! strongest negative symmetrised couplings (aggregates of size ≤ 4) with
//! piecewise-constant transfers, and are driven either as plain V/W cycles
//! or as the K-cycle, where each coarse residual equation is approximated
//! by two flexible GCR iterations preconditioned one level down.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linsolve::dense::LuFactors;
use crate::linsolve::krylov::{Preconditioner, SolveReport};
use crate::linsolve::smoother::{gauss_seidel, SweepDirection};
use crate::sparse::{dot, norm2, CsrBuilder, CsrMatrix};

/// Largest coarsest-level size we are willing to factor densely.
const MAX_COARSE_DIRECT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HierarchyKind {
    Geometric,
    Aggregation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmootherConfig {
    pub pre: usize,
    pub post: usize,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig { pre: 1, post: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cycle {
    /// V(ν₁, ν₂).
    V(usize, usize),
    /// W(ν₁, ν₂).
    W(usize, usize),
    /// K-cycle with the hierarchy's smoother config and two inner flexible
    /// GCR iterations per coarse level.
    K,
}

/// A multigrid hierarchy: level operators, transfers between consecutive
/// levels, and a dense factorisation of the coarsest operator.
pub struct MgHierarchy {
    pub kind: HierarchyKind,
    /// Level operators, finest first.
    pub ops: Vec<CsrMatrix>,
    /// `prolongations[k]` maps level `k+1` (coarse) to level `k` (fine).
    pub prolongations: Vec<CsrMatrix>,
    /// `restrictions[k] = prolongations[k]ᵀ`.
    pub restrictions: Vec<CsrMatrix>,
    pub smoother: SmootherConfig,
    /// Node-grid extents per level for geometric hierarchies.
    pub grid_dims: Option<Vec<Vec<usize>>>,
    coarse_lu: LuFactors,
}

impl MgHierarchy {
    pub fn depth(&self) -> usize {
        self.ops.len()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.ops.iter().map(|a| a.n_rows()).collect()
    }
}

/// Grid and algebraic complexity: `c_G = Σ N_ℓ / N₁`,
/// `c_A = Σ nnz(A_ℓ) / nnz(A₁)`.
pub fn complexity_metrics(h: &MgHierarchy) -> (f64, f64) {
    let n1 = h.ops[0].n_rows() as f64;
    let nnz1 = h.ops[0].nnz() as f64;
    let c_g = h.ops.iter().map(|a| a.n_rows() as f64).sum::<f64>() / n1;
    let c_a = h.ops.iter().map(|a| a.nnz() as f64).sum::<f64>() / nnz1;
    (c_g, c_a)
}

fn validate_diagonals(ops: &[CsrMatrix]) -> Result<()> {
    for a in ops {
        for (i, d) in a.diagonal().iter().enumerate() {
            if *d == 0.0 {
                return Err(Error::ZeroDiagonal(i));
            }
        }
    }
    Ok(())
}

fn finish_hierarchy(
    kind: HierarchyKind,
    ops: Vec<CsrMatrix>,
    prolongations: Vec<CsrMatrix>,
    restrictions: Vec<CsrMatrix>,
    smoother: SmootherConfig,
    grid_dims: Option<Vec<Vec<usize>>>,
) -> Result<MgHierarchy> {
    let coarsest = ops.last().expect("non-empty hierarchy");
    if coarsest.n_rows() > MAX_COARSE_DIRECT {
        return Err(Error::NotCoarsenable(format!(
            "coarsest level has {} unknowns, too large for a direct solve",
            coarsest.n_rows()
        )));
    }
    validate_diagonals(&ops)?;
    let coarse_lu = LuFactors::factor_csr(coarsest)?;
    Ok(MgHierarchy { kind, ops, prolongations, restrictions, smoother, grid_dims, coarse_lu })
}

// ---------------------------------------------------------------------------
// Geometric hierarchy
// ---------------------------------------------------------------------------

/// Builds a geometric hierarchy for a matrix over the *interior* nodes of
/// `grid`. Every dimension must hold `2^k + 1` nodes with `k ≥ n_levels − 1`;
/// coarsening halves the node count per dimension and level, prolongation is
/// bilinear (tensor-product linear) interpolation, restriction its transpose
/// and coarse operators Galerkin products.
pub fn build_gmg(grid: &Grid, fine: &CsrMatrix, n_levels: usize) -> Result<MgHierarchy> {
    assert!(n_levels >= 1);
    let dims: Vec<usize> = grid.nodes_per_dim().to_vec();
    for &n_d in &dims {
        let cells = n_d - 1;
        if !cells.is_power_of_two() {
            return Err(Error::NotCoarsenable(format!("{n_d} nodes per dim is not 2^k + 1")));
        }
        if cells >> (n_levels - 1) < 2 {
            return Err(Error::NotCoarsenable(format!(
                "{n_d} nodes per dim cannot support {n_levels} levels"
            )));
        }
    }
    let interior: usize = dims.iter().map(|&n| n - 2).product();
    if fine.n_rows() != interior || fine.n_cols() != interior {
        return Err(Error::NotCoarsenable(format!(
            "matrix size {} does not match {} interior nodes",
            fine.n_rows(),
            interior
        )));
    }

    let mut ops = vec![fine.clone()];
    let mut prolongations = Vec::new();
    let mut restrictions = Vec::new();
    let mut grid_dims = vec![dims.clone()];
    let mut cur = dims;
    for _ in 1..n_levels {
        let coarse: Vec<usize> = cur.iter().map(|&n| (n - 1) / 2 + 1).collect();
        let p = bilinear_interior_prolongation(&cur, &coarse);
        let r = p.transpose();
        let a_coarse = r.matmul(&ops.last().unwrap().matmul(&p));
        ops.push(a_coarse);
        prolongations.push(p);
        restrictions.push(r);
        grid_dims.push(coarse.clone());
        cur = coarse;
    }
    finish_hierarchy(
        HierarchyKind::Geometric,
        ops,
        prolongations,
        restrictions,
        SmootherConfig::default(),
        Some(grid_dims),
    )
}

/// Tensor-product linear interpolation from coarse interior nodes to fine
/// interior nodes (homogeneous Dirichlet: boundary contributions dropped).
fn bilinear_interior_prolongation(fine_dims: &[usize], coarse_dims: &[usize]) -> CsrMatrix {
    let dim = fine_dims.len();
    let fine_int: Vec<usize> = fine_dims.iter().map(|&n| n - 2).collect();
    let coarse_int: Vec<usize> = coarse_dims.iter().map(|&n| n - 2).collect();
    let n_fine: usize = fine_int.iter().product();
    let n_coarse: usize = coarse_int.iter().product();

    let mut builder = CsrBuilder::new(n_coarse, 0.0);
    let mut fine_multi = vec![0usize; dim];
    let mut entries: Vec<(usize, f64)> = Vec::new();
    // per-dim (coarse interior index, weight) options, ≤ 2 each
    let mut per_dim: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    for flat in 0..n_fine {
        let mut rest = flat;
        for d in 0..dim {
            fine_multi[d] = rest % fine_int[d];
            rest /= fine_int[d];
        }
        for d in 0..dim {
            per_dim[d].clear();
            let v = fine_multi[d] + 1; // node index within 0..fine_dims[d]-1
            if v % 2 == 0 {
                per_dim[d].push((v / 2 - 1, 1.0));
            } else {
                let left = (v - 1) / 2;
                let right = (v + 1) / 2;
                if left >= 1 {
                    per_dim[d].push((left - 1, 0.5));
                }
                if right <= coarse_int[d] {
                    per_dim[d].push((right - 1, 0.5));
                }
            }
        }
        entries.clear();
        // tensor product over dimensions
        let mut combos: Vec<(usize, f64, usize)> = vec![(0, 1.0, 0)]; // (coarse flat, weight, stride factor base) built dim by dim
        let mut stride = 1usize;
        for d in 0..dim {
            let mut next = Vec::with_capacity(combos.len() * per_dim[d].len());
            for &(cflat, w, _) in &combos {
                for &(ci, cw) in &per_dim[d] {
                    next.push((cflat + ci * stride, w * cw, 0));
                }
            }
            stride *= coarse_int[d];
            combos = next;
        }
        for &(c, w, _) in &combos {
            entries.push((c, w));
        }
        builder.push_row(&mut entries);
    }
    builder.finish()
}

// ---------------------------------------------------------------------------
// Aggregation hierarchy
// ---------------------------------------------------------------------------

/// One pairwise matching pass on the strongest negative symmetrised
/// couplings. Deterministic: edges are processed in descending magnitude,
/// ties by lower node index; isolated nodes stay singletons. Returns the
/// node → aggregate map and the number of aggregates.
fn pairwise_aggregates(a: &CsrMatrix) -> (Vec<usize>, usize) {
    let n = a.n_rows();
    let at = a.transpose();
    // candidate edges (strength, i, j) with i < j from (A + Aᵀ)/2 < 0
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j > i {
                // at_entry(at, i, j) = A[j][i]
                let coupling = 0.5 * (v + at_entry(&at, i, j));
                if coupling < 0.0 {
                    edges.push((-coupling, i, j));
                }
            }
        }
        // pairs present only in Aᵀ's row pattern (A[j][i] ≠ 0, A[i][j] = 0)
        let (tcols, tvals) = at.row(i);
        for (&j, &v) in tcols.iter().zip(tvals) {
            if j > i && a.get(i, j) == 0.0 {
                let coupling = 0.5 * v;
                if coupling < 0.0 {
                    edges.push((-coupling, i, j));
                }
            }
        }
    }
    edges.sort_unstable_by(|x, y| {
        y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2))
    });
    let mut partner: Vec<usize> = vec![usize::MAX; n];
    for &(_, i, j) in &edges {
        if partner[i] == usize::MAX && partner[j] == usize::MAX {
            partner[i] = j;
            partner[j] = i;
        }
    }
    let mut agg = vec![usize::MAX; n];
    let mut next = 0usize;
    for v in 0..n {
        if agg[v] == usize::MAX {
            agg[v] = next;
            if partner[v] != usize::MAX {
                agg[partner[v]] = next;
            }
            next += 1;
        }
    }
    (agg, next)
}

fn at_entry(at: &CsrMatrix, i: usize, j: usize) -> f64 {
    // A[j][i] stored at Aᵀ[i][j]
    at.get(i, j)
}

fn indicator(agg: &[usize], n_coarse: usize) -> CsrMatrix {
    let mut builder = CsrBuilder::new(n_coarse, 0.0);
    let mut entries = Vec::with_capacity(1);
    for &a in agg {
        entries.clear();
        entries.push((a, 1.0));
        builder.push_row(&mut entries);
    }
    builder.finish()
}

/// Builds an aggregation hierarchy by double pairwise matching per level
/// (aggregate size ≤ 4, coarsening factor ≈ 4). Coarsening stops when the
/// level size drops below `max(stop_threshold, ⌈N₁^{1/3}⌉)`, or when a pass
/// stops making progress (e.g. a diagonal matrix stays all-singleton and the
/// hierarchy keeps depth 1).
pub fn build_aggregation(fine: &CsrMatrix, stop_threshold: usize) -> Result<MgHierarchy> {
    let n1 = fine.n_rows();
    let target = stop_threshold.max((n1 as f64).cbrt().ceil() as usize).max(1);
    let mut ops = vec![fine.clone()];
    let mut prolongations = Vec::new();
    let mut restrictions = Vec::new();
    for _ in 0..40 {
        let a = ops.last().unwrap();
        let n = a.n_rows();
        if n <= target {
            break;
        }
        // double pairwise: match, form the intermediate Galerkin operator,
        // match again, and compose the two maps into one level transfer.
        let (agg1, n1_coarse) = pairwise_aggregates(a);
        let p1 = indicator(&agg1, n1_coarse);
        let a1 = p1.transpose().matmul(&a.matmul(&p1));
        let (agg2, n2_coarse) = pairwise_aggregates(&a1);
        let composed: Vec<usize> = agg1.iter().map(|&g| agg2[g]).collect();
        if n2_coarse >= n || n2_coarse == 0 {
            break; // no progress
        }
        let p = indicator(&composed, n2_coarse);
        let p2 = indicator(&agg2, n2_coarse);
        let a_coarse = p2.transpose().matmul(&a1.matmul(&p2));
        ops.push(a_coarse);
        restrictions.push(p.transpose());
        prolongations.push(p);
        if n2_coarse as f64 > 0.9 * n as f64 {
            break; // stalled
        }
    }
    finish_hierarchy(
        HierarchyKind::Aggregation,
        ops,
        prolongations,
        restrictions,
        SmootherConfig::default(),
        None,
    )
}

// ---------------------------------------------------------------------------
// Cycles
// ---------------------------------------------------------------------------

/// One multigrid cycle on `u` (updated in place) for the residual equation
/// with right-hand side `rhs`. A depth-1 hierarchy degenerates to the exact
/// coarsest solve.
pub fn mg_cycle(h: &MgHierarchy, rhs: &[f64], u: &mut [f64], cycle: Cycle) {
    cycle_level(h, 0, rhs, u, cycle);
}

fn smooth(h: &MgHierarchy, level: usize, b: &[f64], u: &mut [f64], sweeps: usize, dir: SweepDirection) {
    gauss_seidel(&h.ops[level], b, u, sweeps, dir).expect("diagonals validated at build");
}

fn cycle_level(h: &MgHierarchy, level: usize, b: &[f64], u: &mut [f64], cycle: Cycle) {
    if level + 1 == h.depth() {
        let e = h.coarse_lu.solve(b);
        u.copy_from_slice(&e);
        return;
    }
    let (pre, post) = match cycle {
        Cycle::V(p, q) | Cycle::W(p, q) => (p, q),
        Cycle::K => (h.smoother.pre, h.smoother.post),
    };
    let a = &h.ops[level];
    smooth(h, level, b, u, pre, SweepDirection::Forward);

    let mut r = vec![0.0; a.n_rows()];
    a.residual(b, u, &mut r);
    let rc = h.restrictions[level].matvec_alloc(&r);
    let mut ec = vec![0.0; rc.len()];
    match cycle {
        Cycle::V(_, _) => cycle_level(h, level + 1, &rc, &mut ec, cycle),
        Cycle::W(_, _) => {
            cycle_level(h, level + 1, &rc, &mut ec, cycle);
            cycle_level(h, level + 1, &rc, &mut ec, cycle);
        }
        Cycle::K => {
            if level + 2 == h.depth() {
                cycle_level(h, level + 1, &rc, &mut ec, cycle);
            } else {
                kcycle_inner_gcr(h, level + 1, &rc, &mut ec);
            }
        }
    }
    let correction = h.prolongations[level].matvec_alloc(&ec);
    for i in 0..u.len() {
        u[i] += correction[i];
    }
    smooth(h, level, b, u, post, SweepDirection::Backward);
}

/// Two flexible GCR iterations on the coarse residual equation, each
/// preconditioned by one K-cycle at the same level. `u` enters as zero.
fn kcycle_inner_gcr(h: &MgHierarchy, level: usize, b: &[f64], u: &mut [f64]) {
    let a = &h.ops[level];
    let n = a.n_rows();
    let mut r = b.to_vec();
    let mut dirs: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    for _ in 0..2 {
        let mut z = vec![0.0; n];
        cycle_level(h, level, &r, &mut z, Cycle::K);
        let mut q = vec![0.0; n];
        a.matvec(&z, &mut q);
        for (zi, qi, qq) in &dirs {
            let beta = dot(qi, &q) / qq;
            for i in 0..n {
                q[i] -= beta * qi[i];
                z[i] -= beta * zi[i];
            }
        }
        let qq = dot(&q, &q);
        if qq <= 0.0 {
            break;
        }
        let alpha = dot(&q, &r) / qq;
        for i in 0..n {
            u[i] += alpha * z[i];
            r[i] -= alpha * q[i];
        }
        dirs.push((z, q, qq));
    }
}

/// Runs `cycle` as a stand-alone iteration until the relative residual drops
/// below `tol`.
pub fn mg_solve(
    h: &MgHierarchy,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_cycles: usize,
    cycle: Cycle,
) -> Result<(Vec<f64>, SolveReport)> {
    let a = &h.ops[0];
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; a.n_rows()], SolveReport::new(vec![0.0], true)));
    }
    let mut u = x0.to_vec();
    let mut r = vec![0.0; a.n_rows()];
    a.residual(b, &u, &mut r);
    let mut history = vec![norm2(&r)];
    for _ in 0..max_cycles {
        if history.last().unwrap() / b_norm <= tol {
            break;
        }
        mg_cycle(h, b, &mut u, cycle);
        a.residual(b, &u, &mut r);
        let rn = norm2(&r);
        history.push(rn);
        if !rn.is_finite() || rn > 1e12 * history[0] {
            return Ok((u, SolveReport::new(history, false)));
        }
    }
    let converged = history.last().unwrap() / b_norm <= tol;
    Ok((u, SolveReport::new(history, converged)))
}

/// Multigrid as a preconditioner: one cycle applied to the residual with a
/// zero initial guess.
pub struct MgPreconditioner<'h> {
    pub hierarchy: &'h MgHierarchy,
    pub cycle: Cycle,
}

impl Preconditioner for MgPreconditioner<'_> {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        z.fill(0.0);
        mg_cycle(self.hierarchy, r, z, self.cycle);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsolve::krylov::gcr;
    use crate::sparse::norm_inf;

    fn laplace_2d_interior(nodes_per_dim: usize) -> CsrMatrix {
        let m = nodes_per_dim - 2;
        let n = m * m;
        let idx = |i: usize, j: usize| i + m * j;
        let mut t = Vec::new();
        for j in 0..m {
            for i in 0..m {
                let k = idx(i, j);
                t.push((k, k, 4.0));
                if i > 0 {
                    t.push((k, idx(i - 1, j), -1.0));
                }
                if i + 1 < m {
                    t.push((k, idx(i + 1, j), -1.0));
                }
                if j > 0 {
                    t.push((k, idx(i, j - 1), -1.0));
                }
                if j + 1 < m {
                    t.push((k, idx(i, j + 1), -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, t, 0.0)
    }

    fn tridiag(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, t, 0.0)
    }

    fn seeded_rhs(n: usize) -> Vec<f64> {
        (0..n).map(|i| ((i * 2654435761 % 1000) as f64) / 1000.0 - 0.5).collect()
    }

    #[test]
    fn gmg_level_counts_and_galerkin_identity() {
        let g = Grid::square(0.0, 1.0, 17, 2).unwrap();
        let a = laplace_2d_interior(17);
        let h = build_gmg(&g, &a, 3).unwrap();
        assert_eq!(h.depth(), 3);
        assert_eq!(h.grid_dims.as_ref().unwrap()[2], vec![5, 5]);
        assert_eq!(h.level_sizes(), vec![225, 49, 9]);
        // Galerkin identity against an explicit dense triple product.
        for k in 0..2 {
            let (p, r, a_f, a_c) = (&h.prolongations[k], &h.restrictions[k], &h.ops[k], &h.ops[k + 1]);
            let dense_rap = r.matmul(&a_f.matmul(p)).to_dense();
            let got = a_c.to_dense();
            for i in 0..a_c.n_rows() {
                for j in 0..a_c.n_cols() {
                    assert!((dense_rap[i][j] - got[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gmg_rejects_bad_sizes() {
        let g = Grid::square(0.0, 1.0, 12, 2).unwrap();
        let a = CsrMatrix::identity(100);
        assert!(matches!(build_gmg(&g, &a, 2), Err(Error::NotCoarsenable(_))));
        let g = Grid::square(0.0, 1.0, 5, 2).unwrap();
        // 5 nodes → 2 cells halvable once only
        let a = laplace_2d_interior(5);
        assert!(matches!(build_gmg(&g, &a, 3), Err(Error::NotCoarsenable(_))));
    }

    #[test]
    fn v_cycle_contracts_on_5point_laplacian() {
        // Classical benchmark: V(1,1) with Gauss-Seidel contracts the
        // 5-point Laplacian residual by about an order of magnitude/cycle.
        let g = Grid::square(0.0, 1.0, 65, 2).unwrap();
        let a = laplace_2d_interior(65);
        let h = build_gmg(&g, &a, 4).unwrap();
        let b = seeded_rhs(a.n_rows());
        let (u, rep) = mg_solve(&h, &b, &vec![0.0; a.n_rows()], 1e-8, 60, Cycle::V(1, 1)).unwrap();
        assert!(rep.converged);
        assert!(rep.rho <= 0.2, "V(1,1) rho = {}", rep.rho);
        let mut r = vec![0.0; a.n_rows()];
        a.residual(&b, &u, &mut r);
        assert!(norm2(&r) / norm2(&b) <= 1e-8);
    }

    #[test]
    fn one_level_hierarchy_solves_exactly() {
        let h = build_aggregation(&CsrMatrix::identity(12), 4).unwrap();
        assert_eq!(h.depth(), 1);
        // the cycle degenerates to a direct solve
        let b = seeded_rhs(12);
        let mut u = vec![0.0; 12];
        mg_cycle(&h, &b, &mut u, Cycle::V(1, 1));
        for i in 0..12 {
            assert!((u[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn aggregation_on_diagonal_matrix_is_depth_one() {
        let h = build_aggregation(&CsrMatrix::identity(100), 2).unwrap();
        assert_eq!(h.depth(), 1);
        let (c_g, c_a) = complexity_metrics(&h);
        assert_eq!((c_g, c_a), (1.0, 1.0));
    }

    #[test]
    fn aggregation_pairs_consecutive_nodes_on_tridiagonal() {
        let a = tridiag(16);
        let (agg, n_coarse) = pairwise_aggregates(&a);
        // uniform couplings: ties resolve to lowest indices, giving pairs
        // (0,1), (2,3), …
        assert_eq!(n_coarse, 8);
        for k in 0..8 {
            assert_eq!(agg[2 * k], k);
            assert_eq!(agg[2 * k + 1], k);
        }
        // Galerkin coarse operator stays tridiagonal-patterned.
        let h = build_aggregation(&a, 4).unwrap();
        assert!(h.depth() >= 2);
        let a1 = &h.ops[1];
        for i in 0..a1.n_rows() {
            let (cols, _) = a1.row(i);
            for &c in cols {
                assert!((c as isize - i as isize).abs() <= 1);
            }
        }
        // dense triple-product oracle for the first level
        let p = &h.prolongations[0];
        let rap = p.transpose().matmul(&a.matmul(p)).to_dense();
        let got = h.ops[1].to_dense();
        for i in 0..got.len() {
            for j in 0..got.len() {
                assert!((rap[i][j] - got[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kcycle_preconditioned_gcr_on_laplacian() {
        let a = laplace_2d_interior(65);
        let n = a.n_rows();
        let h = build_aggregation(&a, 10).unwrap();
        assert!(h.depth() >= 3);
        let b = seeded_rhs(n);
        let mut pc = MgPreconditioner { hierarchy: &h, cycle: Cycle::K };
        let (u, rep) = gcr(&a, &b, &mut pc, &vec![0.0; n], 1e-6, 200, 50).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations < 40, "iters {}", rep.iterations);
        let mut r = vec![0.0; n];
        a.residual(&b, &u, &mut r);
        assert!(norm2(&r) / norm2(&b) <= 1e-6);
        // complexity of the aggregation hierarchy stays modest
        let (c_g, c_a) = complexity_metrics(&h);
        assert!(c_g < 1.7, "c_G = {c_g}");
        assert!(c_a < 2.5, "c_A = {c_a}");
    }

    #[test]
    fn w_cycle_no_worse_than_v() {
        let g = Grid::square(0.0, 1.0, 33, 2).unwrap();
        let a = laplace_2d_interior(33);
        let h = build_gmg(&g, &a, 3).unwrap();
        let b = seeded_rhs(a.n_rows());
        let (_, rep_v) = mg_solve(&h, &b, &vec![0.0; a.n_rows()], 1e-8, 60, Cycle::V(1, 1)).unwrap();
        let (_, rep_w) = mg_solve(&h, &b, &vec![0.0; a.n_rows()], 1e-8, 60, Cycle::W(1, 1)).unwrap();
        assert!(rep_v.converged && rep_w.converged);
        assert!(rep_w.iterations <= rep_v.iterations + 1);
        let _ = norm_inf(&b);
    }
}
