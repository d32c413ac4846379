//! Sparse data structures shared by the accelerator model and its oracles.
//!
//! Everything here is immutable after construction. Constructors validate
//! the structural invariants, so a `CsrMatrix` or `SparseVector` obtained
//! through the public API is always well-formed.

mod gen;
mod mtx;
mod oracle;

pub use gen::{gen_random_csr, gen_random_csr_with, gen_random_vector, ValueDist};
pub use mtx::{parse_matrix_market, read_matrix_market, write_matrix_market, MmField, MmSymmetry};
pub use oracle::{oracle_spmspm, oracle_spmspv};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SparseError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("entry ({row}, {col}) outside a {n_rows}x{n_cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("row {row} out of range for a matrix with {n_rows} rows")]
    RowOutOfRange { row: usize, n_rows: usize },
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, SparseError>;

/// Coordinate-list matrix, the interchange form produced by the Matrix Market reader.
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        CooMatrix {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Checks bounds and rejects duplicate coordinates.
    pub fn validate(&self) -> Result<()> {
        let mut coords = Vec::with_capacity(self.entries.len());
        for &(row, col, _) in &self.entries {
            if row >= self.n_rows || col >= self.n_cols {
                return Err(SparseError::OutOfRange {
                    row,
                    col,
                    n_rows: self.n_rows,
                    n_cols: self.n_cols,
                });
            }
            coords.push((row, col));
        }
        coords.sort_unstable();
        if let Some(w) = coords.windows(2).find(|w| w[0] == w[1]) {
            return Err(SparseError::Duplicate {
                row: w[0].0,
                col: w[0].1,
            });
        }
        Ok(())
    }
}

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_start: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a CSR matrix from raw arrays, validating every invariant.
    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        row_start: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let m = CsrMatrix {
            n_rows,
            n_cols,
            row_start,
            col_idx,
            values,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CsrMatrix {
            n_rows,
            n_cols,
            row_start: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            n_rows: n,
            n_cols: n,
            row_start: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from rows given as sparse vectors of length `n_cols`.
    pub fn from_rows(n_cols: usize, rows: &[SparseVector]) -> Result<Self> {
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for (j, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(SparseError::DimensionMismatch(format!(
                    "row {j} has length {} but the matrix has {n_cols} columns",
                    r.len()
                )));
            }
            for &(i, v) in r.entries() {
                col_idx.push(i);
                values.push(v);
            }
            row_start.push(col_idx.len());
        }
        CsrMatrix::from_parts(rows.len(), n_cols, row_start, col_idx, values)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SparseError::Invalid(msg));
        if self.row_start.len() != self.n_rows + 1 {
            return bad(format!(
                "row_start has {} offsets, expected {}",
                self.row_start.len(),
                self.n_rows + 1
            ));
        }
        if self.row_start[0] != 0 {
            return bad("row_start[0] must be 0".into());
        }
        if self.row_start.windows(2).any(|w| w[0] > w[1]) {
            return bad("row_start must be non-decreasing".into());
        }
        let nnz = self.row_start[self.n_rows];
        if nnz != self.col_idx.len() || nnz != self.values.len() {
            return bad(format!(
                "row_start ends at {nnz} but there are {} indices and {} values",
                self.col_idx.len(),
                self.values.len()
            ));
        }
        for j in 0..self.n_rows {
            let cols = &self.col_idx[self.row_start[j]..self.row_start[j + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("row {j}: column indices not strictly increasing"));
            }
            if let Some(&c) = cols.last() {
                if c >= self.n_cols {
                    return Err(SparseError::OutOfRange {
                        row: j,
                        col: c,
                        n_rows: self.n_rows,
                        n_cols: self.n_cols,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_start(&self) -> &[usize] {
        &self.row_start
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of stored entries in row `j`.
    pub fn row_nnz(&self, j: usize) -> usize {
        self.row_start[j + 1] - self.row_start[j]
    }

    /// Column indices and values of row `j`.
    pub fn row(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.row_start[j]..self.row_start[j + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn extract_row(&self, j: usize) -> Result<SparseVector> {
        if j >= self.n_rows {
            return Err(SparseError::RowOutOfRange {
                row: j,
                n_rows: self.n_rows,
            });
        }
        let (cols, vals) = self.row(j);
        // Stored entries may be explicit zeros only if built via from_parts.
        let entries = cols
            .iter()
            .zip(vals)
            .filter(|(_, &v)| v != 0.0)
            .map(|(&c, &v)| (c, v))
            .collect();
        Ok(SparseVector {
            length: self.n_cols,
            entries,
        })
    }

    pub fn to_coo(&self) -> CooMatrix {
        let mut coo = CooMatrix::new(self.n_rows, self.n_cols);
        for j in 0..self.n_rows {
            let (cols, vals) = self.row(j);
            for (&c, &v) in cols.iter().zip(vals) {
                coo.push(j, c, v);
            }
        }
        coo
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.n_cols {
            counts[i + 1] += counts[i];
        }
        let row_start = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Visiting source rows in order keeps each output row sorted.
        for j in 0..self.n_rows {
            let (cols, vals) = self.row(j);
            for (&c, &v) in cols.iter().zip(vals) {
                let dst = next[c];
                col_idx[dst] = j;
                values[dst] = v;
                next[c] += 1;
            }
        }
        CsrMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_start,
            col_idx,
            values,
        }
    }

    /// Largest and mean number of entries per row.
    pub fn row_stats(&self) -> (usize, f64) {
        let max = (0..self.n_rows).map(|j| self.row_nnz(j)).max().unwrap_or(0);
        let mean = if self.n_rows == 0 {
            0.0
        } else {
            self.nnz() as f64 / self.n_rows as f64
        };
        (max, mean)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (cols, vals) = self.row(row);
        match cols.binary_search(&col) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }
}

/// Converts a validated COO matrix to CSR, sorting each row by column.
pub fn coo_to_csr(m: &CooMatrix) -> Result<CsrMatrix> {
    m.validate()?;
    let mut order: Vec<usize> = (0..m.entries.len()).collect();
    order.sort_unstable_by_key(|&e| (m.entries[e].0, m.entries[e].1));
    let mut row_start = vec![0usize; m.n_rows + 1];
    for &(r, _, _) in &m.entries {
        row_start[r + 1] += 1;
    }
    for j in 0..m.n_rows {
        row_start[j + 1] += row_start[j];
    }
    let col_idx = order.iter().map(|&e| m.entries[e].1).collect();
    let values = order.iter().map(|&e| m.entries[e].2).collect();
    Ok(CsrMatrix {
        n_rows: m.n_rows,
        n_cols: m.n_cols,
        row_start,
        col_idx,
        values,
    })
}

/// Sparse vector of logical length `N` holding sorted, nonzero entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseVector {
    length: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new(length: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        let v = SparseVector { length, entries };
        v.validate()?;
        Ok(v)
    }

    pub fn empty(length: usize) -> Self {
        SparseVector {
            length,
            entries: Vec::new(),
        }
    }

    /// Builds a vector from a dense slice, keeping only nonzero entries.
    pub fn from_dense(dense: &[f64]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        SparseVector {
            length: dense.len(),
            entries,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(SparseError::Invalid(
                "vector indices not strictly increasing".into(),
            ));
        }
        if let Some(&(i, _)) = self.entries.last() {
            if i >= self.length {
                return Err(SparseError::Invalid(format!(
                    "vector index {i} outside length {}",
                    self.length
                )));
            }
        }
        if self.entries.iter().any(|&(_, v)| v == 0.0) {
            return Err(SparseError::Invalid("vector stores an exact zero".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(p) => self.entries[p].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.length];
        for &(i, v) in &self.entries {
            d[i] = v;
        }
        d
    }
}
