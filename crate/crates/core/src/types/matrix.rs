use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Anything that can hand out the rows of a non-negative matrix one at a
/// time. The engine only ever sees matrices through this trait, so family
/// generators can stream rows without materialising the full matrix.
pub trait RowSource: Sync {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    /// Writes `a_{j,1..n}` (0-based `j`) into `row`, which has length `n_cols`.
    fn fill_row(&self, j: usize, row: &mut [f64]);
}

/// Dense, row-major `m x n` matrix with finite non-negative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegativeMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl NonNegativeMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) = {} is not a finite non-negative number",
                idx / cols + 1,
                idx % cols + 1,
                data[idx]
            )));
        }
        Ok(NonNegativeMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(j) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "ragged input: row {} has {} entries, row 1 has {n}",
                j + 1,
                rows[j].len()
            )));
        }
        Self::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::new(n, n, data)
    }

    /// Builds a matrix by draining a row source.
    pub fn from_source<S: RowSource + ?Sized>(src: &S) -> Result<Self> {
        let (m, n) = (src.n_rows(), src.n_cols());
        let mut data = vec![0.0; m * n];
        for (j, row) in data.chunks_mut(n.max(1)).enumerate().take(m) {
            src.fill_row(j, row);
        }
        Self::new(m, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `a_{j,k}` with 1-based indices, as in the usual notation.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        assert!((1..=self.rows).contains(&j) && (1..=self.cols).contains(&k));
        self.data[(j - 1) * self.cols + (k - 1)]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `c * A` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * c).collect(),
        )
    }

    /// Reorders rows so that new row `i` is old row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.rows];
        if perm.len() != self.rows || perm.iter().any(|&i| i >= self.rows || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidParameter("not a row permutation".into()));
        }
        let data = perm.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Self::new(self.rows, self.cols, data)
    }

    /// `A x` for a vector of length `cols`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok(self
            .data
            .chunks(self.cols)
            .map(|row| crate::sum::sum(row.iter().zip(x).map(|(a, b)| a * b)))
            .collect())
    }

    /// Parses the CSV ingestion format: one row per line, comma-separated
    /// decimal entries, no header. Ragged rows and negative entries are errors.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(None)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (j, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::InvalidMatrix(format!("line {}: {e}", j + 1)))?;
            if rec.len() == 1 && rec[0].is_empty() {
                continue;
            }
            let row = rec
                .iter()
                .enumerate()
                .map(|(k, field)| {
                    field.parse::<f64>().map_err(|_| {
                        Error::InvalidMatrix(format!(
                            "line {}, column {}: `{field}` is not a decimal number",
                            j + 1,
                            k + 1
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::InvalidMatrix("empty matrix file".into()));
        }
        Self::from_rows(rows)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }
}

impl RowSource for NonNegativeMatrix {
    fn n_rows(&self) -> usize {
        self.rows
    }

    fn n_cols(&self) -> usize {
        self.cols
    }

    fn fill_row(&self, j: usize, row: &mut [f64]) {
        row.copy_from_slice(self.row(j));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_nonfinite() {
        assert!(NonNegativeMatrix::new(1, 2, vec![1.0, -1.0]).is_err());
        assert!(NonNegativeMatrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
        assert!(NonNegativeMatrix::new(0, 2, vec![]).is_err());
        assert!(NonNegativeMatrix::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn zero_rows_and_columns_are_legal() {
        let a = NonNegativeMatrix::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(a.get(2, 1), 1.0);
    }

    #[test]
    fn csv_ingestion() {
        let a = NonNegativeMatrix::from_csv_reader("1,0\n0.5, 0.5\n".as_bytes()).unwrap();
        assert_eq!(a.rows(), 2);
        assert_eq!(a.get(2, 2), 0.5);

        let ragged = NonNegativeMatrix::from_csv_reader("1,0\n0.5\n".as_bytes());
        assert!(matches!(ragged, Err(Error::InvalidMatrix(m)) if m.contains("ragged")));

        let negative = NonNegativeMatrix::from_csv_reader("1,-2\n".as_bytes());
        assert!(negative.is_err());

        let junk = NonNegativeMatrix::from_csv_reader("1,abc\n".as_bytes());
        assert!(junk.is_err());

        assert!(NonNegativeMatrix::from_csv_reader("".as_bytes()).is_err());
    }

    #[test]
    fn apply_and_permute() {
        let a = NonNegativeMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(a.apply(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        let b = a.permute_rows(&[1, 0]).unwrap();
        assert_eq!(b.row(0), &[0.5, 0.5]);
        assert!(a.permute_rows(&[0, 0]).is_err());
    }
}
