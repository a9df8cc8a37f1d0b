//! Local Fourier analysis of Gauss-Seidel smoothing for wide stencils, and
//! spectra of one-dimensional wide-stencil Laplacian matrices.
//!
//! The 1-D discretization of `−½σ²∂²/∂x²` at stencil length
//! `m = ⌊σ/√Δx⌋` and interpolation weight `γ = (m+1) − σ/√Δx` is the banded
//! matrix `L = γ L^m + (1−γ) L^{m+1}`, where `L^m` carries `2` on the
//! diagonal and `−1` at offsets `±m` (out-of-range entries dropped —
//! Dirichlet truncation). For `γ = 1` the matrix decouples into `m`
//! independent classical chains, which yields a closed-form spectrum.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sparse::CsrMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// 1-D wide-stencil parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LislStencil1D {
    /// Matrix dimension (number of unknowns).
    pub n: usize,
    /// Stencil length in mesh cells.
    pub m: usize,
    /// Interpolation weight in (0, 1]; 1 means no interpolation.
    pub gamma: f64,
}

impl LislStencil1D {
    /// Derives `(m, γ)` from a diffusion coefficient and mesh width.
    pub fn from_sigma(n: usize, sigma: f64, dx: f64) -> LislStencil1D {
        let ratio = sigma.abs() / dx.sqrt();
        let m = ratio.floor() as usize;
        let gamma = (m + 1) as f64 - ratio;
        LislStencil1D { n, m, gamma }
    }
}

/// Builds `γ L^m + (1−γ) L^{m+1}` (diagonal 2, bands −γ at ±m and −(1−γ) at
/// ±(m+1), out-of-range entries dropped).
///
/// `m = 0` is allowed for completeness: the γ band would land on the
/// diagonal, so it is placed adjacent instead and the matrix reduces to the
/// classical `L_N` for every γ.
pub fn build_lisl_matrix(n: usize, m: usize, gamma: f64) -> Result<CsrMatrix> {
    assert!(n >= 1);
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidTruncationFraction(gamma));
    }
    let m_eff = m.max(1);
    let mut triplets = Vec::with_capacity(5 * n);
    for i in 0..n {
        triplets.push((i, i, 2.0));
        for (off, w) in [(m_eff, gamma), (m + 1, 1.0 - gamma)] {
            if w == 0.0 {
                continue;
            }
            if i >= off {
                triplets.push((i, i - off, -w));
            }
            if i + off < n {
                triplets.push((i, i + off, -w));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(n, n, triplets, 0.0))
}

/// Closed-form eigenpairs of `L^m_N` (γ = 1).
///
/// The matrix decouples into `m` chains `{s, s+m, s+2m, …}`; chain `s` is a
/// classical Laplacian of length `⌈N/m⌉` for `s < N mod m` and `⌊N/m⌋`
/// otherwise, so the spectrum is assembled from `λ(L_{⌈N/m⌉})` and
/// `λ(L_{⌊N/m⌋})` with sine eigenvectors supported on each chain.
pub fn kronecker_eigen(n: usize, m: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    if m == 0 {
        return Err(Error::InvalidTruncationFraction(0.0));
    }
    let mut pairs = Vec::with_capacity(n);
    for s in 0..m.min(n) {
        let chain_len = (n - 1 - s) / m + 1;
        for k in 1..=chain_len {
            let lam = 2.0 - 2.0 * (k as f64 * PI / (chain_len as f64 + 1.0)).cos();
            let mut v = vec![0.0; n];
            for t in 0..chain_len {
                v[s + t * m] = ((t + 1) as f64 * k as f64 * PI / (chain_len as f64 + 1.0)).sin();
            }
            pairs.push((lam, v));
        }
    }
    debug_assert_eq!(pairs.len(), n);
    Ok(pairs)
}

/// Eigenpairs of a 1-D LISL stencil; only the γ = 1 case has a closed form.
pub fn spectrum(stencil: &LislStencil1D) -> Result<Vec<(f64, Vec<f64>)>> {
    if stencil.gamma < 1.0 {
        return Err(Error::NoClosedFormSpectrum);
    }
    kronecker_eigen(stencil.n, stencil.m)
}

// ---------------------------------------------------------------------------
// Model Laplacians for solver benchmarks
// ---------------------------------------------------------------------------

/// 1-D model system on `[0, 1]` at refinement level `ell` (`2^ell + 1`
/// nodes, Dirichlet-eliminated interior unknowns).
pub fn lisl_laplacian_1d(ell: u32, sigma: f64) -> Result<CsrMatrix> {
    let dx = 0.5f64.powi(ell as i32);
    let n = (1usize << ell) - 1;
    let st = LislStencil1D::from_sigma(n, sigma, dx);
    build_lisl_matrix(st.n, st.m, st.gamma)
}

/// 2-D model system on `[0, 1]²` at refinement level `ell` with diagonal
/// diffusion `σ·I`: the Kronecker sum of the 1-D operator with itself.
/// Returns the interior-unknown matrix and the node grid (for geometric
/// multigrid).
pub fn lisl_laplacian_2d(ell: u32, sigma: f64) -> Result<(CsrMatrix, Grid)> {
    let nodes = (1usize << ell) + 1;
    let grid = Grid::square(0.0, 1.0, nodes, 2)?;
    let m = nodes - 2;
    let l1 = lisl_laplacian_1d(ell, sigma)?;
    let n = m * m;
    let mut triplets = Vec::with_capacity(5 * n);
    for j in 0..m {
        for i in 0..m {
            let row = i + m * j;
            // x-direction couplings: L1 row i
            let (cols, vals) = l1.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                triplets.push((row, c + m * j, v));
            }
            // y-direction couplings: L1 row j
            let (cols, vals) = l1.row(j);
            for (&c, &v) in cols.iter().zip(vals) {
                triplets.push((row, i + m * c, v));
            }
        }
    }
    Ok((CsrMatrix::from_triplets(n, n, triplets, 0.0), grid))
}

// ---------------------------------------------------------------------------
// Local Fourier analysis
// ---------------------------------------------------------------------------

/// Diffusion layout for the smoother symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolMode {
    /// Diagonal σ: independent stencils along each axis.
    AxisAligned,
    /// One diffusion direction `(σ₁, σ₂)` with equal signs.
    GeneralSameSign,
    /// One diffusion direction with opposite signs.
    GeneralOppositeSign,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherSymbolConfig {
    pub m1: usize,
    pub m2: usize,
    pub gamma1: f64,
    pub gamma2: f64,
    pub mode: SymbolMode,
}

impl SmootherSymbolConfig {
    pub fn axis_aligned(m1: usize, m2: usize, gamma1: f64, gamma2: f64) -> Self {
        SmootherSymbolConfig { m1, m2, gamma1, gamma2, mode: SymbolMode::AxisAligned }
    }
}

/// `g(θ, γ, m) = γ e^{imθ} + (1−γ) e^{i(m+1)θ}`.
pub fn band_symbol(theta: f64, gamma: f64, m: usize) -> Complex64 {
    gamma * Complex64::new(0.0, m as f64 * theta).exp()
        + (1.0 - gamma) * Complex64::new(0.0, (m + 1) as f64 * theta).exp()
}

/// Gauss-Seidel splitting symbols `(L̃⁻, L̃⁺)` at frequency `θ` (the 1/Δx
/// scale cancels in the ratio and is omitted).
pub fn smoother_symbols(cfg: &SmootherSymbolConfig, theta: [f64; 2]) -> (Complex64, Complex64) {
    let g1 = band_symbol(theta[0], cfg.gamma1, cfg.m1);
    let g2 = band_symbol(theta[1], cfg.gamma2, cfg.m2);
    match cfg.mode {
        SymbolMode::AxisAligned => (-(g1 + g2), Complex64::new(4.0, 0.0) - g1.conj() - g2.conj()),
        SymbolMode::GeneralSameSign => {
            (-(g1 * g2), Complex64::new(2.0, 0.0) - g1.conj() * g2.conj())
        }
        SymbolMode::GeneralOppositeSign => {
            (-(g1.conj() * g2), Complex64::new(2.0, 0.0) - g1 * g2.conj())
        }
    }
}

fn in_high_range(theta: [f64; 2]) -> bool {
    let low = |t: f64| (-PI / 2.0..PI / 2.0).contains(&t);
    !(low(theta[0]) && low(theta[1]))
}

fn wrap_to_base(t: f64) -> f64 {
    let mut w = (t + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        w -= 2.0 * PI;
    }
    w
}

fn amplification(cfg: &SmootherSymbolConfig, theta: [f64; 2]) -> Result<f64> {
    let (l_minus, l_plus) = smoother_symbols(cfg, theta);
    if l_plus.norm() < 1e-14 {
        return Err(Error::SymbolSingularity { theta: (theta[0], theta[1]) });
    }
    Ok(l_minus.norm() / l_plus.norm())
}

/// Smoothing factor `μ_loc = sup |L̃⁻/L̃⁺|` over the high-frequency range
/// `[−π, π)² \ [−π/2, π/2)²`, sampled on a uniform `resolution²` grid (which
/// contains the range boundary lines) followed by one local refinement pass
/// on a factor-8 finer grid around the coarse maximiser.
pub fn smoothing_factor(cfg: &SmootherSymbolConfig, sample_resolution: usize) -> Result<f64> {
    assert!(sample_resolution >= 64);
    let r = sample_resolution;
    let h = 2.0 * PI / r as f64;
    let mut best = 0.0f64;
    let mut best_theta = [PI, PI];
    for k1 in 0..r {
        let t1 = -PI + k1 as f64 * h;
        for k2 in 0..r {
            let t2 = -PI + k2 as f64 * h;
            if !in_high_range([t1, t2]) {
                continue;
            }
            let s = amplification(cfg, [t1, t2])?;
            if s > best {
                best = s;
                best_theta = [t1, t2];
            }
        }
    }
    // refinement pass around the coarse maximiser
    let fine = h / 8.0;
    for k1 in -8i32..=8 {
        for k2 in -8i32..=8 {
            let t = [
                wrap_to_base(best_theta[0] + k1 as f64 * fine),
                wrap_to_base(best_theta[1] + k2 as f64 * fine),
            ];
            if !in_high_range(t) {
                continue;
            }
            let s = amplification(cfg, t)?;
            if s > best {
                best = s;
            }
        }
    }
    Ok(best)
}

/// Samples `|S̃(θ)|` over the high-frequency range for heatmap emission:
/// rows of `(θ₁, θ₂, |S̃|)`.
pub fn smoothing_heatmap(
    cfg: &SmootherSymbolConfig,
    resolution: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    let h = 2.0 * PI / resolution as f64;
    let mut rows = Vec::new();
    for k1 in 0..resolution {
        let t1 = -PI + k1 as f64 * h;
        for k2 in 0..resolution {
            let t2 = -PI + k2 as f64 * h;
            if !in_high_range([t1, t2]) {
                continue;
            }
            rows.push((t1, t2, amplification(cfg, [t1, t2])?));
        }
    }
    Ok(rows)
}
