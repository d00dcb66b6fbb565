//! Small dense row-major matrices, sized for regression instances with a few
//! dozen rows.

use std::path::Path;

use crate::scalar::RealScalar;

use super::RegressError;

/// Dense matrix with finite entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F: RealScalar> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: RealScalar> Matrix<F> {
    /// Zero matrix.
    ///
    /// Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Builds a matrix from row slices, validating shape and finiteness.
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self, RegressError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(RegressError::Dimension("matrix must be nonempty".into()));
        }
        let cols = rows[0].len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(RegressError::Dimension(format!(
                    "row {} has {} entries, expected {}",
                    r,
                    row.len(),
                    cols
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(RegressError::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> F {
        debug_assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: F) {
        debug_assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c] = value;
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix<F> {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Matrix product; the inner sum runs in ascending index order, so
    /// algebraically transposed inputs produce bitwise transposed outputs.
    ///
    /// Panics on an inner-dimension mismatch.
    pub fn matmul(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimension mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |r, c| {
            let mut acc = F::zero();
            for k in 0..self.cols {
                acc = acc + self.get(r, k) * rhs.get(k, c);
            }
            acc
        })
    }

    /// Entrywise sum. Panics on shape mismatch.
    pub fn add(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        Matrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + rhs.get(r, c))
    }

    /// Entrywise difference. Panics on shape mismatch.
    pub fn sub(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        Matrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - rhs.get(r, c))
    }

    pub fn scale(&self, factor: F) -> Matrix<F> {
        Matrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) * factor)
    }

    pub fn frobenius_norm(&self) -> F {
        self.data
            .iter()
            .fold(F::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    pub fn max_abs(&self) -> F {
        self.data.iter().fold(F::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Largest entrywise absolute difference. Panics on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Matrix<F>) -> F {
        self.sub(rhs).max_abs()
    }

    /// (M + Mᵀ)/2, forcing exact symmetry before an eigendecomposition.
    ///
    /// Panics if the matrix is not square.
    pub fn symmetrized(&self) -> Matrix<F> {
        assert_eq!(self.rows, self.cols, "symmetrized needs a square matrix");
        let half = F::from(0.5).expect("0.5 is representable");
        Matrix::from_fn(self.rows, self.cols, |r, c| {
            (self.get(r, c) + self.get(c, r)) * half
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Renders a matrix as CSV: one row per line, comma-separated decimals, no
/// header. Entries use the shortest decimal form that parses back exactly.
pub fn matrix_to_csv_string<F: RealScalar>(matrix: &Matrix<F>) -> String {
    let mut out = String::new();
    for r in 0..matrix.rows() {
        for c in 0..matrix.cols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&matrix.get(r, c).to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses the CSV matrix format produced by [`matrix_to_csv_string`].
pub fn parse_matrix_csv(text: &str) -> Result<Matrix<f64>, RegressError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (number, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, RegressError> = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| RegressError::Csv {
                    line: number + 1,
                    message: format!("{e}: {field:?}"),
                })
            })
            .collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(RegressError::Csv {
            line: 0,
            message: "no rows".into(),
        });
    }
    Matrix::from_rows(&rows)
}

/// Reads a matrix from a CSV file.
pub fn read_matrix_csv(path: &Path) -> Result<Matrix<f64>, RegressError> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

/// Writes a matrix to a CSV file.
pub fn write_matrix_csv<F: RealScalar>(
    path: &Path,
    matrix: &Matrix<F>,
) -> Result<(), RegressError> {
    std::fs::write(path, matrix_to_csv_string(matrix))?;
    Ok(())
}
