//! Row-compressed sparse matrices and the handful of kernels the solver
//! stack needs: mat-vec, transpose, sparse products, Matrix Market I/O.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};

/// CSR matrix with sorted, deduplicated column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> CsrMatrix {
        CsrMatrix { n_rows, n_cols, row_ptr: vec![0; n_rows + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> CsrMatrix {
        CsrMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![1.0; n],
        }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// results with |value| < `drop_tol` are dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
        drop_tol: f64,
    ) -> CsrMatrix {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        let mut it = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = it.next() {
            while let Some(&(r2, c2, v2)) = it.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    it.next();
                } else {
                    break;
                }
            }
            if v.abs() >= drop_tol {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n_rows, n_cols, row_ptr, cols, vals }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[s..e], &self.vals[s..e])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[i] = acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.matvec(x, &mut y);
        y
    }

    /// r = b - A x
    pub fn residual(&self, b: &[f64], x: &[f64], r: &mut [f64]) {
        self.matvec(x, r);
        for i in 0..self.n_rows {
            r[i] = b[i] - r[i];
        }
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut row_ptr = vec![0usize; self.n_cols + 1];
        for &c in &self.cols {
            row_ptr[c + 1] += 1;
        }
        for i in 0..self.n_cols {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut cols = vec![0usize; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        let mut next = row_ptr.clone();
        for i in 0..self.n_rows {
            let (rc, rv) = self.row(i);
            for (&c, &v) in rc.iter().zip(rv) {
                let dst = next[c];
                cols[dst] = i;
                vals[dst] = v;
                next[c] += 1;
            }
        }
        CsrMatrix { n_rows: self.n_cols, n_cols: self.n_rows, row_ptr, cols, vals }
    }

    /// Sparse product `self * other` (Gustavson with a dense accumulator).
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n_cols, other.n_rows);
        let n = other.n_cols;
        let mut acc = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        row_ptr.push(0usize);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..self.n_rows {
            touched.clear();
            let (ac, av) = self.row(i);
            for (&k, &aik) in ac.iter().zip(av) {
                let (bc, bv) = other.row(k);
                for (&j, &bkj) in bc.iter().zip(bv) {
                    if acc[j] == 0.0 && !touched.contains(&j) {
                        touched.push(j);
                    }
                    acc[j] += aik * bkj;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                cols.push(j);
                vals.push(acc[j]);
                acc[j] = 0.0;
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n_rows: self.n_rows, n_cols: n, row_ptr, cols, vals }
    }

    /// Dense copy for small oracles and coarsest-level factorisation.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n_cols]; self.n_rows];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out[i][c] = v;
            }
        }
        out
    }

    /// Writes the matrix in Matrix Market coordinate format (1-based).
    pub fn write_matrix_market<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.17e}", i + 1, c + 1, v)?;
            }
        }
        Ok(())
    }

    /// Reads a Matrix Market coordinate file (real, general).
    pub fn read_matrix_market<R: BufRead>(r: &mut R) -> Result<CsrMatrix> {
        let mut lines = r.lines();
        let header = loop {
            match lines.next() {
                Some(line) => {
                    let line = line?;
                    if !line.starts_with('%') && !line.trim().is_empty() {
                        break line;
                    }
                }
                None => return Err(Error::Io("empty matrix market file".into())),
            }
        };
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Io(format!("bad size line: {header}"))))
            .collect::<Result<_>>()?;
        if dims.len() != 3 {
            return Err(Error::Io("expected `rows cols nnz`".into()));
        }
        let mut triplets = Vec::with_capacity(dims[2]);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let i: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| Error::Io(format!("bad entry: {line}")))?;
            let j: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| Error::Io(format!("bad entry: {line}")))?;
            let v: f64 = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| Error::Io(format!("bad entry: {line}")))?;
            triplets.push((i - 1, j - 1, v));
        }
        Ok(CsrMatrix::from_triplets(dims[0], dims[1], triplets, 0.0))
    }
}

/// Incremental row-by-row CSR builder; rows must be pushed in order.
pub struct CsrBuilder {
    n_cols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    drop_tol: f64,
}

impl CsrBuilder {
    pub fn new(n_cols: usize, drop_tol: f64) -> CsrBuilder {
        CsrBuilder { n_cols, row_ptr: vec![0], cols: Vec::new(), vals: Vec::new(), drop_tol }
    }

    /// Appends a row; `entries` is sorted in place, duplicate columns summed,
    /// entries below the drop tolerance discarded.
    pub fn push_row(&mut self, entries: &mut Vec<(usize, f64)>) {
        entries.sort_unstable_by_key(|e| e.0);
        let mut k = 0;
        while k < entries.len() {
            let (c, mut v) = entries[k];
            let mut k2 = k + 1;
            while k2 < entries.len() && entries[k2].0 == c {
                v += entries[k2].1;
                k2 += 1;
            }
            if v.abs() >= self.drop_tol {
                self.cols.push(c);
                self.vals.push(v);
            }
            k = k2;
        }
        self.row_ptr.push(self.cols.len());
    }

    pub fn finish(self) -> CsrMatrix {
        CsrMatrix {
            n_rows: self.row_ptr.len() - 1,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr,
            cols: self.cols,
            vals: self.vals,
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, &x| m.max(x.abs()))
}
