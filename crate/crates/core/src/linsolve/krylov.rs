//! Krylov methods: right-preconditioned BiCGSTAB and flexible GCR.
//!
//! Both stop on the relative residual `‖b − A u‖₂ / ‖b‖₂ ≤ tol`. GCR is
//! flexible: the preconditioner may change between iterations, which the
//! K-cycle aggregation preconditioner requires.

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix};

/// Convergence record of one linear solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    /// Residual reduction factor `(r_k/r_0)^{1/k}`.
    pub rho: f64,
    pub converged: bool,
}

impl SolveReport {
    pub fn new(history: Vec<f64>, converged: bool) -> SolveReport {
        let iterations = history.len().saturating_sub(1);
        let rho = if iterations == 0 || history[0] == 0.0 {
            0.0
        } else {
            (history[iterations] / history[0]).powf(1.0 / iterations as f64)
        };
        SolveReport { iterations, residual_history: history, rho, converged }
    }
}

/// Preconditioner application `z ← M⁻¹ r`. Mutable to allow internal scratch.
pub trait Preconditioner {
    fn apply(&mut self, r: &[f64], z: &mut [f64]);
}

/// No preconditioning.
pub struct IdentityPrecond;

impl Preconditioner for IdentityPrecond {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

impl Preconditioner for super::ilu::Ilu0 {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        Ilu0::apply(self, r, z)
    }
}

use super::ilu::Ilu0;

const BREAKDOWN_EPS: f64 = 1e-300;

/// Right-preconditioned BiCGSTAB.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    m: &mut dyn Preconditioner,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    assert!(tol > 0.0);
    let n = a.n_rows();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], SolveReport::new(vec![0.0], true)));
    }
    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    a.residual(b, &x, &mut r);
    let mut history = vec![norm2(&r)];
    if history[0] / b_norm <= tol {
        return Ok((x, SolveReport::new(history, true)));
    }

    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];

    for _ in 0..max_iters {
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < BREAKDOWN_EPS {
            return Err(Error::Breakdown("bicgstab: rho ~ 0".into()));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        m.apply(&p, &mut p_hat);
        a.matvec(&p_hat, &mut v);
        let denom = dot(&r_hat, &v);
        if denom.abs() < BREAKDOWN_EPS {
            return Err(Error::Breakdown("bicgstab: r̂·v ~ 0".into()));
        }
        alpha = rho_new / denom;
        // s = r − α v (reuse r)
        for i in 0..n {
            r[i] -= alpha * v[i];
        }
        if norm2(&r) / b_norm <= tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            history.push(norm2(&r));
            return Ok((x, SolveReport::new(history, true)));
        }
        m.apply(&r, &mut s_hat);
        a.matvec(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt < BREAKDOWN_EPS {
            return Err(Error::Breakdown("bicgstab: t·t ~ 0".into()));
        }
        omega = dot(&t, &r) / tt;
        if omega.abs() < BREAKDOWN_EPS {
            return Err(Error::Breakdown("bicgstab: omega ~ 0".into()));
        }
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] -= omega * t[i];
        }
        let rn = norm2(&r);
        history.push(rn);
        if rn / b_norm <= tol {
            return Ok((x, SolveReport::new(history, true)));
        }
        rho = rho_new;
    }
    Ok((x, SolveReport::new(history, false)))
}

/// Flexible GCR with restart.
pub fn gcr(
    a: &CsrMatrix,
    b: &[f64],
    m: &mut dyn Preconditioner,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
    restart: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    assert!(tol > 0.0);
    assert!(restart >= 1);
    let n = a.n_rows();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], SolveReport::new(vec![0.0], true)));
    }
    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    a.residual(b, &x, &mut r);
    let mut history = vec![norm2(&r)];
    if history[0] / b_norm <= tol {
        return Ok((x, SolveReport::new(history, true)));
    }

    let mut dirs: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new(); // (z, q = Az, q·q)
    let mut iters = 0;
    while iters < max_iters {
        if dirs.len() >= restart {
            dirs.clear();
        }
        let mut z = vec![0.0; n];
        m.apply(&r, &mut z);
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
        if qq < BREAKDOWN_EPS {
            return Err(Error::Breakdown("gcr: search direction vanished".into()));
        }
        let alpha = dot(&q, &r) / qq;
        for i in 0..n {
            x[i] += alpha * z[i];
            r[i] -= alpha * q[i];
        }
        iters += 1;
        let rn = norm2(&r);
        history.push(rn);
        if rn / b_norm <= tol {
            return Ok((x, SolveReport::new(history, true)));
        }
        dirs.push((z, q, qq));
    }
    Ok((x, SolveReport::new(history, false)))
}
