//! Semi-Lagrangian step generation (Schemes 1–3) and boundary truncation.
//!
//! Diffusion steps `±√Δx·σ_p` and drift steps `Δx·b` make the stencil wide:
//! its extent in mesh cells grows like `1/√Δx` under refinement, so near the
//! boundary steps leave the domain. Overstepping rays are shortened to their
//! exact intersection with the (rectangular) boundary and the finite
//! difference weights are re-derived so the scheme stays consistent and of
//! positive type — which is possible for Scheme 2 only.
//!
//! σ matrices are passed as column-major slices of length `dim · P`.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// The three step-vector layouts for a diffusion matrix with `P` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeId {
    /// `y_p^± = ±√Δx σ_p + (Δx/P) b`, `M = P`.
    Scheme1,
    /// `y_p^± = ±√Δx σ_p` for `p ≤ P` plus a drift step `Δx·b`, `M = P + 1`.
    Scheme2,
    /// Drift folded into the last diffusion pair, `M = P`.
    Scheme3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Second-order step built from diffusion column `p`.
    Diffusion(usize),
    /// First-order (drift) step; both endpoints coincide.
    Drift,
}

/// One `(y⁺, y⁻)` pair before truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPair {
    pub kind: StepKind,
    pub y_plus: Vec<f64>,
    pub y_minus: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overstep {
    None,
    OneSidedPlus,
    OneSidedMinus,
    TwoSided,
}

/// How the sample value at a stencil endpoint enters the discrete operator.
#[derive(Debug, Clone, PartialEq)]
pub enum EndpointTreatment {
    /// Multilinear interpolation at the endpoint.
    Interpolate,
    /// Exact Dirichlet value at the endpoint (which lies on ∂Ω); routed to
    /// the right-hand side during assembly.
    ExactBoundary,
    /// Linear extrapolation along the ray: value = 2ψ(endpoint) − u(reflect),
    /// where `reflect` is the interior mirror of the full step through the
    /// boundary intersection.
    LinearExtrapolate { reflect: Vec<f64> },
}

/// A step pair after boundary handling, with consistency-restoring weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedStep {
    pub kind: StepKind,
    pub y_hat_plus: Vec<f64>,
    pub y_hat_minus: Vec<f64>,
    pub mu_plus: f64,
    pub mu_minus: f64,
    /// Weight on the `+` endpoint.
    pub a: f64,
    /// Weight on the `−` endpoint.
    pub b: f64,
    pub overstep: Overstep,
    pub plus_treatment: EndpointTreatment,
    pub minus_treatment: EndpointTreatment,
}

impl TruncatedStep {
    fn placeholder(dim: usize) -> TruncatedStep {
        TruncatedStep {
            kind: StepKind::Drift,
            y_hat_plus: vec![0.0; dim],
            y_hat_minus: vec![0.0; dim],
            mu_plus: 1.0,
            mu_minus: 1.0,
            a: 1.0,
            b: 1.0,
            overstep: Overstep::None,
            plus_treatment: EndpointTreatment::Interpolate,
            minus_treatment: EndpointTreatment::Interpolate,
        }
    }
}

/// Boundary handling mode for overstepping stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryTreatment {
    /// Truncate the ray to ∂Ω, re-derive weights, and use the exact Dirichlet
    /// value at the intersection (right-hand-side routing).
    #[default]
    TruncateExact,
    /// Truncate and interpolate the boundary value from boundary mesh nodes.
    /// Rejected for two-sided diffusion overstepping, which is inconsistent
    /// under interpolation.
    TruncateInterp,
    /// Keep untruncated weights; sample the boundary value at the ray-boundary
    /// intersection (constant extrapolation along the step).
    ConstExtrapolate,
    /// Keep untruncated weights; extrapolate linearly along the ray from the
    /// boundary value and the last interior point.
    LinearExtrapolate,
}

fn is_zero(v: &[f64]) -> bool {
    v.iter().all(|&c| c == 0.0)
}

/// Generates the step pairs of the chosen scheme for one `(t, x, α)`.
///
/// `sigma` holds the `P` diffusion columns (column-major, `dim` entries
/// each). A zero drift contributes nothing to the operator and its step is
/// omitted entirely.
pub fn lisl_steps(
    scheme: SchemeId,
    sigma: &[f64],
    dim: usize,
    b: &[f64],
    dx: f64,
) -> Result<Vec<StepPair>> {
    let mut out = Vec::new();
    lisl_steps_into(scheme, sigma, dim, b, dx, &mut out)?;
    Ok(out)
}

/// Buffer-reusing variant of [`lisl_steps`].
pub fn lisl_steps_into(
    scheme: SchemeId,
    sigma: &[f64],
    dim: usize,
    b: &[f64],
    dx: f64,
    out: &mut Vec<StepPair>,
) -> Result<()> {
    assert!(dx > 0.0);
    assert_eq!(sigma.len() % dim, 0);
    let p_cols = sigma.len() / dim;
    let drift = !is_zero(b);
    if p_cols == 0 && !drift {
        return Err(Error::EmptyOperator);
    }
    let needed = p_cols + (drift && scheme == SchemeId::Scheme2) as usize;
    out.truncate(needed);
    while out.len() < needed {
        let mut pair = StepPair { kind: StepKind::Drift, y_plus: Vec::new(), y_minus: Vec::new() };
        pair.y_plus.resize(dim, 0.0);
        pair.y_minus.resize(dim, 0.0);
        out.push(pair);
    }

    let k = dx.sqrt();
    for p in 0..p_cols {
        let col = &sigma[p * dim..(p + 1) * dim];
        let pair = &mut out[p];
        pair.kind = StepKind::Diffusion(p);
        pair.y_plus.resize(dim, 0.0);
        pair.y_minus.resize(dim, 0.0);
        for d in 0..dim {
            let shift = match scheme {
                SchemeId::Scheme1 if drift => dx * b[d] / p_cols as f64,
                SchemeId::Scheme3 if drift && p == p_cols - 1 => dx * b[d],
                _ => 0.0,
            };
            pair.y_plus[d] = k * col[d] + shift;
            pair.y_minus[d] = -k * col[d] + shift;
        }
    }
    if drift && scheme == SchemeId::Scheme2 {
        let pair = &mut out[p_cols];
        pair.kind = StepKind::Drift;
        pair.y_plus.resize(dim, 0.0);
        pair.y_minus.resize(dim, 0.0);
        for d in 0..dim {
            pair.y_plus[d] = dx * b[d];
            pair.y_minus[d] = dx * b[d];
        }
    }
    Ok(())
}

/// Exit fraction of the ray `x + μ y` through the rectangular boundary:
/// the smallest positive face-intersection parameter, capped at 1.
/// Ties (edges/corners) resolve to the first face in coordinate order;
/// the intersection point is identical either way.
fn exit_fraction(grid: &Grid, x: &[f64], y: &[f64]) -> f64 {
    let mut mu = f64::INFINITY;
    for d in 0..grid.dim() {
        if y[d] > 0.0 {
            mu = mu.min((grid.hi()[d] - x[d]) / y[d]);
        } else if y[d] < 0.0 {
            mu = mu.min((grid.lo()[d] - x[d]) / y[d]);
        }
    }
    mu.min(1.0)
}

/// Truncates a single ray: returns `(μ, ŷ = μ·y)` with `μ = 1` when
/// `x + y` stays in the closed domain, and the exact ray-box intersection
/// parameter otherwise.
pub fn truncate_step(grid: &Grid, x: &[f64], y: &[f64]) -> Result<(f64, Vec<f64>)> {
    if is_zero(y) {
        return Err(Error::ZeroStep);
    }
    let mu = exit_fraction(grid, x, y);
    debug_assert!(mu > 0.0, "truncate_step called with x on or outside the boundary");
    Ok((mu, y.iter().map(|&c| mu * c).collect()))
}

/// Consistency-restoring weights for a truncated step.
///
/// Diffusion: `A = 2 / (μ⁺² + μ⁺μ⁻)`, `B = 2 / (μ⁻² + μ⁻μ⁺)`; drift:
/// `A = B = 1/μ`. Both reduce to 1 without truncation and are ≥ 1 always.
pub fn truncation_weights(kind: StepKind, mu_plus: f64, mu_minus: f64) -> Result<(f64, f64)> {
    for &m in &[mu_plus, mu_minus] {
        if !(m > 0.0 && m <= 1.0) {
            return Err(Error::InvalidTruncationFraction(m));
        }
    }
    match kind {
        StepKind::Diffusion(_) => {
            let a = 2.0 / (mu_plus * (mu_plus + mu_minus));
            let b = 2.0 / (mu_minus * (mu_minus + mu_plus));
            Ok((a, b))
        }
        StepKind::Drift => {
            debug_assert!((mu_plus - mu_minus).abs() <= 1e-14 * mu_plus.max(mu_minus));
            let w = 1.0 / mu_plus;
            Ok((w, w))
        }
    }
}

/// Builds the truncated stencil of one node for one control value.
///
/// `x` must be an interior node. Oversteps under Schemes 1/3 are rejected
/// (their truncation is generally not consistent); two-sided diffusion
/// overstepping is rejected under [`BoundaryTreatment::TruncateInterp`].
pub fn build_node_stencil(
    grid: &Grid,
    x: &[f64],
    scheme: SchemeId,
    sigma: &[f64],
    b: &[f64],
    mode: BoundaryTreatment,
) -> Result<Vec<TruncatedStep>> {
    let dx = grid.dx_scalar()?;
    let mut pairs = Vec::new();
    lisl_steps_into(scheme, sigma, grid.dim(), b, dx, &mut pairs)?;
    let mut out = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        let mut step = TruncatedStep::placeholder(grid.dim());
        truncate_pair_into(grid, x, pair, scheme, mode, &mut step)?;
        out.push(step);
    }
    Ok(out)
}

/// Truncation of one step pair, written into `out` (buffers reused).
/// Shared by [`build_node_stencil`] and the assembly inner loops.
pub fn truncate_pair_into(
    grid: &Grid,
    x: &[f64],
    pair: &StepPair,
    scheme: SchemeId,
    mode: BoundaryTreatment,
    out: &mut TruncatedStep,
) -> Result<()> {
    let mu_plus = exit_fraction(grid, x, &pair.y_plus);
    let mu_minus = match pair.kind {
        StepKind::Drift => mu_plus,
        StepKind::Diffusion(_) => exit_fraction(grid, x, &pair.y_minus),
    };
    let overstep = match (mu_plus < 1.0, mu_minus < 1.0) {
        (false, false) => Overstep::None,
        (true, false) => Overstep::OneSidedPlus,
        (false, true) => Overstep::OneSidedMinus,
        // A truncated drift ray is a single direction; report it one-sided.
        (true, true) if pair.kind == StepKind::Drift => Overstep::OneSidedPlus,
        (true, true) => Overstep::TwoSided,
    };

    out.kind = pair.kind;
    out.overstep = overstep;
    out.mu_plus = mu_plus;
    out.mu_minus = mu_minus;
    let dim = x.len();
    let scale_into = |dst: &mut Vec<f64>, y: &[f64], m: f64| {
        dst.resize(dim, 0.0);
        for d in 0..dim {
            dst[d] = m * y[d];
        }
    };

    if overstep == Overstep::None {
        scale_into(&mut out.y_hat_plus, &pair.y_plus, 1.0);
        scale_into(&mut out.y_hat_minus, &pair.y_minus, 1.0);
        out.a = 1.0;
        out.b = 1.0;
        out.plus_treatment = EndpointTreatment::Interpolate;
        out.minus_treatment = EndpointTreatment::Interpolate;
        return Ok(());
    }
    if scheme != SchemeId::Scheme2 {
        return Err(Error::InconsistentTruncation);
    }

    scale_into(&mut out.y_hat_plus, &pair.y_plus, mu_plus);
    scale_into(&mut out.y_hat_minus, &pair.y_minus, mu_minus);
    match mode {
        BoundaryTreatment::TruncateExact | BoundaryTreatment::TruncateInterp => {
            if mode == BoundaryTreatment::TruncateInterp
                && overstep == Overstep::TwoSided
                && matches!(pair.kind, StepKind::Diffusion(_))
            {
                return Err(Error::TwoSidedInterpolated);
            }
            let (a, b) = truncation_weights(pair.kind, mu_plus, mu_minus)?;
            out.a = a;
            out.b = b;
            let exact = mode == BoundaryTreatment::TruncateExact;
            let side = |truncated: bool| {
                if truncated && exact {
                    EndpointTreatment::ExactBoundary
                } else {
                    EndpointTreatment::Interpolate
                }
            };
            out.plus_treatment = side(mu_plus < 1.0);
            out.minus_treatment = side(mu_minus < 1.0);
        }
        BoundaryTreatment::ConstExtrapolate => {
            // Untruncated weights; the out-of-domain value is frozen at the
            // boundary intersection.
            out.a = 1.0;
            out.b = 1.0;
            let side = |mu: f64| {
                if mu < 1.0 {
                    EndpointTreatment::ExactBoundary
                } else {
                    EndpointTreatment::Interpolate
                }
            };
            out.plus_treatment = side(mu_plus);
            out.minus_treatment = side(mu_minus);
        }
        BoundaryTreatment::LinearExtrapolate => {
            // Untruncated weights; the out-of-domain value is extrapolated
            // through the boundary intersection from the interior mirror
            // point x + max(0, 2μ−1)·y.
            out.a = 1.0;
            out.b = 1.0;
            let side = |mu: f64, y: &[f64]| {
                if mu < 1.0 {
                    let t0 = (2.0 * mu - 1.0).max(0.0);
                    let reflect = x.iter().zip(y).map(|(&xi, &yi)| xi + t0 * yi).collect();
                    EndpointTreatment::LinearExtrapolate { reflect }
                } else {
                    EndpointTreatment::Interpolate
                }
            };
            out.plus_treatment = side(mu_plus, &pair.y_plus);
            out.minus_treatment = side(mu_minus, &pair.y_minus);
        }
    }
    Ok(())
}
