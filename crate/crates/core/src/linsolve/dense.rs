//! Dense kernels: LU with partial pivoting (coarsest-level and "Direct"
//! baseline solves, desk-scale oracle) and a cyclic Jacobi eigensolver for
//! symmetric matrices (spectrum oracle).

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// LU factors of a dense matrix with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor_dense(a: &[Vec<f64>]) -> Result<LuFactors> {
        let n = a.len();
        let mut lu = vec![0.0; n * n];
        for (i, row) in a.iter().enumerate() {
            lu[i * n..(i + 1) * n].copy_from_slice(row);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[perm[k] * n + k].abs();
            for i in k + 1..n {
                let v = lu[perm[i] * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Err(Error::ZeroPivot(k));
            }
            perm.swap(k, piv);
            let pk = perm[k] * n;
            for i in k + 1..n {
                let pi = perm[i] * n;
                let factor = lu[pi + k] / lu[pk + k];
                lu[pi + k] = factor;
                for j in k + 1..n {
                    lu[pi + j] -= factor * lu[pk + j];
                }
            }
        }
        Ok(LuFactors { n, lu, perm })
    }

    pub fn factor_csr(a: &CsrMatrix) -> Result<LuFactors> {
        LuFactors::factor_dense(&a.to_dense())
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let pi = self.perm[i] * n;
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.lu[pi + j] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let pi = self.perm[i] * n;
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[pi + j] * y[j];
            }
            y[i] = acc / self.lu[pi + i];
        }
        y
    }
}

/// Direct dense solve of a sparse system; desk scale only.
pub fn lu_solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(LuFactors::factor_csr(a)?.solve(b))
}

/// Eigenvalues and eigenvectors of a symmetric dense matrix by cyclic
/// Jacobi rotations; returns pairs sorted by ascending eigenvalue.
/// Independent of any closed-form spectrum construction.
pub fn sym_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = a[i][j];
        }
    }
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-14 * frob.max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[p * n + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].partial_cmp(&m[j * n + j]).unwrap());
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    (values, vectors)
}
