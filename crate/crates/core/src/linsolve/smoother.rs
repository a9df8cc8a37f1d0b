//! Lexicographic Gauss-Seidel sweeps.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    Forward,
    Backward,
    /// Forward then backward per sweep.
    Symmetric,
}

/// In-place Gauss-Seidel relaxation of `A u = b`. Deterministic: rows are
/// visited in index order (reversed for backward sweeps).
pub fn gauss_seidel(
    a: &CsrMatrix,
    b: &[f64],
    u: &mut [f64],
    sweeps: usize,
    direction: SweepDirection,
) -> Result<()> {
    for _ in 0..sweeps {
        match direction {
            SweepDirection::Forward => sweep(a, b, u, false)?,
            SweepDirection::Backward => sweep(a, b, u, true)?,
            SweepDirection::Symmetric => {
                sweep(a, b, u, false)?;
                sweep(a, b, u, true)?;
            }
        }
    }
    Ok(())
}

fn sweep(a: &CsrMatrix, b: &[f64], u: &mut [f64], backward: bool) -> Result<()> {
    let n = a.n_rows();
    let mut order: Box<dyn Iterator<Item = usize>> = if backward {
        Box::new((0..n).rev())
    } else {
        Box::new(0..n)
    };
    order.try_for_each(|i| {
        let (cols, vals) = a.row(i);
        let mut acc = b[i];
        let mut diag = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            if c == i {
                diag = v;
            } else {
                acc -= v * u[c];
            }
        }
        if diag == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
        u[i] = acc / diag;
        Ok(())
    })
}
