//! Monotone wide-stencil (semi-Lagrangian) solvers for Hamilton-Jacobi-Bellman
//! equations on rectangular domains.
//!
//! The crate is organised around the pipeline used by the experiment harness:
//!
//! * [`grid`] / [`interp`] — uniform Cartesian meshes and multilinear
//!   interpolation weights;
//! * [`stencil`] — semi-Lagrangian step generation and the boundary
//!   truncation with consistency-restoring weights;
//! * [`problems`] — control-problem definitions (coefficients, Dirichlet and
//!   initial data, discrete control sets) with the benchmark problems built in;
//! * [`assembly`] — positive-type system assembly for a fixed control vector,
//!   with M-matrix diagnostics;
//! * [`hjb`] — θ-scheme time marching and policy (Howard) iteration;
//! * [`linsolve`] — Gauss-Seidel, ILU(0), BiCGSTAB, flexible GCR, geometric
//!   and aggregation-based multigrid;
//! * [`analysis`] — local Fourier analysis of smoothers and spectra of 1-D
//!   wide-stencil Laplacians;
//! * [`harness`] — experiment configurations, convergence/stability studies,
//!   solver benchmarks and table emission.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod grid;
pub mod harness;
pub mod hjb;
pub mod interp;
pub mod linsolve;
pub mod problems;
pub mod sparse;
pub mod stencil;

pub use error::{Error, Result};
