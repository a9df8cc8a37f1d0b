//! Linear-solver stack: Gauss-Seidel, ILU(0), BiCGSTAB, flexible GCR,
//! geometric multigrid and aggregation-based multigrid preconditioning,
//! plus a dense-LU direct baseline.

pub mod dense;
pub mod ilu;
pub mod krylov;
pub mod mg;
pub mod smoother;

pub use dense::{lu_solve, sym_eigen, LuFactors};
pub use ilu::{ilu0, Ilu0};
pub use krylov::{bicgstab, gcr, IdentityPrecond, Preconditioner, SolveReport};
pub use mg::{
    build_aggregation, build_gmg, complexity_metrics, mg_cycle, mg_solve, Cycle, HierarchyKind,
    MgHierarchy, MgPreconditioner, SmootherConfig,
};
pub use smoother::{gauss_seidel, SweepDirection};

use crate::error::Result;
use crate::sparse::CsrMatrix;
use serde::{Deserialize, Serialize};

/// Relative linear tolerance used across the solver stack by default.
pub const DEFAULT_LINEAR_TOL: f64 = 1e-6;

/// A configured linear solver for policy-evaluation systems.
pub trait LinearSolver {
    fn solve(&mut self, a: &CsrMatrix, b: &[f64], x0: &[f64]) -> Result<(Vec<f64>, SolveReport)>;
    fn name(&self) -> &'static str;
    /// Relative tolerance this solver targets (direct solvers report 0).
    fn tol(&self) -> f64 {
        0.0
    }
    /// Tightens the relative tolerance, where meaningful.
    fn set_tol(&mut self, _tol: f64) {}
}

/// Solver selection for configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SolverChoice {
    /// Dense LU (desk scale only).
    Direct,
    Bicgstab,
    BicgstabIlu,
    /// Flexible GCR preconditioned by one aggregation K-cycle.
    GcrAgmg,
    /// Stand-alone geometric V-cycle iteration (grids of 2^k + 1 nodes).
    GmgV { nu1: usize, nu2: usize },
    /// Stand-alone geometric W-cycle iteration.
    GmgW { nu1: usize, nu2: usize },
}

impl SolverChoice {
    pub fn instantiate(self, tol: f64, max_iters: usize) -> Box<dyn LinearSolver> {
        match self {
            SolverChoice::Direct => Box::new(DirectSolver),
            SolverChoice::Bicgstab => Box::new(BicgstabSolver { ilu: false, tol, max_iters }),
            SolverChoice::BicgstabIlu => Box::new(BicgstabSolver { ilu: true, tol, max_iters }),
            SolverChoice::GcrAgmg => Box::new(AgmgGcrSolver {
                tol,
                max_iters,
                restart: 50,
                stop_threshold: 8,
            }),
            SolverChoice::GmgV { .. } | SolverChoice::GmgW { .. } => {
                panic!("geometric multigrid needs a grid; drive it through `mg_solve`")
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SolverChoice::Direct => "direct".into(),
            SolverChoice::Bicgstab => "bicgstab".into(),
            SolverChoice::BicgstabIlu => "bicgstab+ilu0".into(),
            SolverChoice::GcrAgmg => "gcr+agmg".into(),
            SolverChoice::GmgV { nu1, nu2 } => format!("gmg-v({nu1},{nu2})"),
            SolverChoice::GmgW { nu1, nu2 } => format!("gmg-w({nu1},{nu2})"),
        }
    }
}

pub struct DirectSolver;

impl LinearSolver for DirectSolver {
    fn solve(&mut self, a: &CsrMatrix, b: &[f64], _x0: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let x = lu_solve(a, b)?;
        let mut r = vec![0.0; b.len()];
        a.residual(b, &x, &mut r);
        Ok((x, SolveReport::new(vec![crate::sparse::norm2(&r)], true)))
    }

    fn name(&self) -> &'static str {
        "direct"
    }
}

pub struct BicgstabSolver {
    pub ilu: bool,
    pub tol: f64,
    pub max_iters: usize,
}

impl LinearSolver for BicgstabSolver {
    fn solve(&mut self, a: &CsrMatrix, b: &[f64], x0: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        if self.ilu {
            let mut pc = ilu0(a)?;
            bicgstab(a, b, &mut pc, x0, self.tol, self.max_iters)
        } else {
            bicgstab(a, b, &mut IdentityPrecond, x0, self.tol, self.max_iters)
        }
    }

    fn name(&self) -> &'static str {
        if self.ilu {
            "bicgstab+ilu0"
        } else {
            "bicgstab"
        }
    }

    fn tol(&self) -> f64 {
        self.tol
    }

    fn set_tol(&mut self, tol: f64) {
        self.tol = tol;
    }
}

pub struct AgmgGcrSolver {
    pub tol: f64,
    pub max_iters: usize,
    pub restart: usize,
    pub stop_threshold: usize,
}

impl LinearSolver for AgmgGcrSolver {
    fn solve(&mut self, a: &CsrMatrix, b: &[f64], x0: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let h = build_aggregation(a, self.stop_threshold)?;
        let mut pc = MgPreconditioner { hierarchy: &h, cycle: Cycle::K };
        gcr(a, b, &mut pc, x0, self.tol, self.max_iters, self.restart)
    }

    fn name(&self) -> &'static str {
        "gcr+agmg"
    }

    fn tol(&self) -> f64 {
        self.tol
    }

    fn set_tol(&mut self, tol: f64) {
        self.tol = tol;
    }
}

/// Wraps a solver and keeps a copy of every system it is asked to solve;
/// used to cross-check policy-evaluation systems against the dense oracle.
pub struct RecordingSolver {
    pub inner: Box<dyn LinearSolver>,
    pub systems: Vec<(CsrMatrix, Vec<f64>)>,
}

impl RecordingSolver {
    pub fn new(inner: Box<dyn LinearSolver>) -> RecordingSolver {
        RecordingSolver { inner, systems: Vec::new() }
    }
}

impl LinearSolver for RecordingSolver {
    fn solve(&mut self, a: &CsrMatrix, b: &[f64], x0: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        self.systems.push((a.clone(), b.to_vec()));
        self.inner.solve(a, b, x0)
    }

    fn name(&self) -> &'static str {
        "recording"
    }

    fn tol(&self) -> f64 {
        self.inner.tol()
    }

    fn set_tol(&mut self, tol: f64) {
        self.inner.set_tol(tol)
    }
}
