//! Dense brute-force reference products. These define ground truth for the
//! accelerator and deliberately share no code with it.

use super::{CsrMatrix, Result, SparseError, SparseVector};

/// `C = A·B` by scattering `B` to a dense array and dotting each row of `A`
/// in ascending column order. Exact zeros are omitted from `C`.
pub fn oracle_spmspv(a: &CsrMatrix, b: &SparseVector) -> Result<SparseVector> {
    if a.n_cols() != b.len() {
        return Err(SparseError::DimensionMismatch(format!(
            "matrix has {} columns but vector has length {}",
            a.n_cols(),
            b.len()
        )));
    }
    let dense_b = b.to_dense();
    let mut entries = Vec::new();
    for j in 0..a.n_rows() {
        let (cols, vals) = a.row(j);
        let mut sum = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            sum += v * dense_b[c];
        }
        if sum != 0.0 {
            entries.push((j, sum));
        }
    }
    SparseVector::new(a.n_rows(), entries)
}

/// `C = A·B` via the dense triple loop, inner index ascending.
pub fn oracle_spmspm(a: &CsrMatrix, b: &CsrMatrix) -> Result<CsrMatrix> {
    if a.n_cols() != b.n_rows() {
        return Err(SparseError::DimensionMismatch(format!(
            "left operand has {} columns but right operand has {} rows",
            a.n_cols(),
            b.n_rows()
        )));
    }
    let (n, inner, m) = (a.n_rows(), a.n_cols(), b.n_cols());
    let to_dense = |x: &CsrMatrix| {
        let mut d = vec![0.0; x.n_rows() * x.n_cols()];
        for j in 0..x.n_rows() {
            let (cols, vals) = x.row(j);
            for (&c, &v) in cols.iter().zip(vals) {
                d[j * x.n_cols() + c] = v;
            }
        }
        d
    };
    let da = to_dense(a);
    let db = to_dense(b);
    let mut rows = Vec::with_capacity(n);
    let mut dense_row = vec![0.0; m];
    for i in 0..n {
        for (j, out) in dense_row.iter_mut().enumerate() {
            let mut sum = 0.0;
            for p in 0..inner {
                sum += da[i * inner + p] * db[p * m + j];
            }
            *out = sum;
        }
        rows.push(SparseVector::from_dense(&dense_row));
    }
    CsrMatrix::from_rows(m, &rows)
}
