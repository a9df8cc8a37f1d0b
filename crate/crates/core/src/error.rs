//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Domain corners do not satisfy `hi > lo` componentwise.
    DegenerateDomain,
    /// Fewer than two mesh nodes requested along some dimension.
    TooFewNodes,
    /// Interpolation point lies outside the closed domain.
    PointOutsideDomain,
    /// A zero step vector was passed where a direction is required.
    ZeroStep,
    /// Truncation parameter must lie in (0, 1].
    InvalidTruncationFraction(f64),
    /// Stencil generation would produce an empty operator (P = 0, b = 0).
    EmptyOperator,
    /// A truncated stencil was requested for a scheme that does not admit
    /// a consistent truncation (only Scheme 2 does).
    InconsistentTruncation,
    /// Two-sided overstepping combined with interpolation at the boundary.
    TwoSidedInterpolated,
    /// Unknown built-in problem name.
    UnknownProblem(String),
    /// Control index out of range.
    InvalidControl(usize),
    /// Zero or structurally missing diagonal entry at the given row.
    ZeroDiagonal(usize),
    /// Zero pivot encountered at the given row during factorisation.
    ZeroPivot(usize),
    /// Krylov method broke down (contains a short reason).
    Breakdown(String),
    /// Iterative solver exhausted its iteration budget.
    MaxIterations { iters: usize, residual: f64 },
    /// Grid cannot be coarsened to the requested multigrid depth.
    NotCoarsenable(String),
    /// Closed-form spectrum is only available without interpolation (γ = 1).
    NoClosedFormSpectrum,
    /// Smoother symbol (nearly) vanished at a sample point.
    SymbolSingularity { theta: (f64, f64) },
    /// Invalid experiment configuration.
    Config(String),
    /// Mesh widths differ between dimensions where an isotropic mesh is required.
    AnisotropicMesh,
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateDomain => write!(f, "domain corners must satisfy hi > lo"),
            Error::TooFewNodes => write!(f, "need at least 2 nodes per dimension"),
            Error::PointOutsideDomain => write!(f, "point lies outside the closed domain"),
            Error::ZeroStep => write!(f, "zero step vector"),
            Error::InvalidTruncationFraction(m) => {
                write!(f, "truncation fraction {m} outside (0, 1]")
            }
            Error::EmptyOperator => write!(f, "no diffusion columns and zero drift"),
            Error::InconsistentTruncation => {
                write!(f, "stencil oversteps but the scheme has no consistent truncation")
            }
            Error::TwoSidedInterpolated => write!(
                f,
                "two-sided overstepping requires exact boundary values, not interpolation"
            ),
            Error::UnknownProblem(name) => write!(f, "unknown problem `{name}`"),
            Error::InvalidControl(i) => write!(f, "control index {i} out of range"),
            Error::ZeroDiagonal(i) => write!(f, "zero diagonal entry in row {i}"),
            Error::ZeroPivot(i) => write!(f, "zero pivot in row {i}"),
            Error::Breakdown(what) => write!(f, "solver breakdown: {what}"),
            Error::MaxIterations { iters, residual } => {
                write!(f, "no convergence in {iters} iterations (residual {residual:.3e})")
            }
            Error::NotCoarsenable(why) => write!(f, "grid not coarsenable: {why}"),
            Error::NoClosedFormSpectrum => {
                write!(f, "no closed-form spectrum with interpolation (γ < 1)")
            }
            Error::SymbolSingularity { theta } => {
                write!(f, "smoother symbol vanishes near θ = ({}, {})", theta.0, theta.1)
            }
            Error::Config(why) => write!(f, "invalid configuration: {why}"),
            Error::AnisotropicMesh => write!(f, "operation requires equal mesh width per dimension"),
            Error::Io(why) => write!(f, "i/o error: {why}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
