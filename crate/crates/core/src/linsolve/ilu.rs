//! Incomplete LU factorisation with zero fill-in.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// ILU(0): incomplete factors confined to the sparsity pattern of `A`,
/// stored in one CSR-like layout (unit lower diagonal implied).
#[derive(Debug, Clone)]
pub struct Ilu0 {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<usize>,
}

/// Factors `A ≈ L·U` on the pattern of `A`.
pub fn ilu0(a: &CsrMatrix) -> Result<Ilu0> {
    let n = a.n_rows();
    let row_ptr = a.row_ptr().to_vec();
    let cols = a.col_indices().to_vec();
    let mut vals = a.values().to_vec();
    // positions of the diagonal entries
    let mut diag = vec![usize::MAX; n];
    for i in 0..n {
        for k in row_ptr[i]..row_ptr[i + 1] {
            if cols[k] == i {
                diag[i] = k;
            }
        }
        if diag[i] == usize::MAX {
            return Err(Error::ZeroDiagonal(i));
        }
    }

    for i in 0..n {
        // eliminate with pivots k < i present in row i
        let (start, end) = (row_ptr[i], row_ptr[i + 1]);
        let mut kk = start;
        while kk < end && cols[kk] < i {
            let k = cols[kk];
            let ukk = vals[diag[k]];
            if ukk == 0.0 {
                return Err(Error::ZeroPivot(k));
            }
            let factor = vals[kk] / ukk;
            vals[kk] = factor;
            // subtract factor × (row k restricted to columns > k ∩ pattern of row i)
            let mut p = diag[k] + 1;
            let mut q = kk + 1;
            while p < row_ptr[k + 1] && q < end {
                match cols[p].cmp(&cols[q]) {
                    std::cmp::Ordering::Less => p += 1,
                    std::cmp::Ordering::Greater => q += 1,
                    std::cmp::Ordering::Equal => {
                        vals[q] -= factor * vals[p];
                        p += 1;
                        q += 1;
                    }
                }
            }
            kk += 1;
        }
        if vals[diag[i]] == 0.0 {
            return Err(Error::ZeroPivot(i));
        }
    }
    Ok(Ilu0 { n, row_ptr, cols, vals, diag })
}

impl Ilu0 {
    /// z = (LU)⁻¹ r
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        debug_assert_eq!(r.len(), self.n);
        // forward solve L z = r (unit diagonal)
        for i in 0..self.n {
            let mut acc = r[i];
            for k in self.row_ptr[i]..self.diag[i] {
                acc -= self.vals[k] * z[self.cols[k]];
            }
            z[i] = acc;
        }
        // backward solve U z = z
        for i in (0..self.n).rev() {
            let mut acc = z[i];
            for k in self.diag[i] + 1..self.row_ptr[i + 1] {
                acc -= self.vals[k] * z[self.cols[k]];
            }
            z[i] = acc / self.vals[self.diag[i]];
        }
    }
}
