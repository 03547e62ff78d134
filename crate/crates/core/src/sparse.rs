//! Compressed sparse row matrices over `i64` and `f64`.
//!
//! The incidence-type operators (boundary, coboundary, trace, dual
//! derivatives) are stored with integer entries so that their algebraic
//! identities can be tested with exact equality; they are lifted to real
//! matrices only when composed with Hodge stars or material coefficients.

use crate::{Error, Result};

/// Scalar types a [`Csr`] matrix can hold.
pub trait Scalar:
    Copy
    + PartialEq
    + std::ops::Add<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::fmt::Display
{
    fn zero() -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for i64 {
    fn zero() -> i64 {
        0
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn to_f64(self) -> f64 {
        self
    }
}

/// Sparse matrix in CSR form. Rows with no entries are allowed; explicit
/// zeros are dropped during construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr<T: Scalar> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

pub type IntCsr = Csr<i64>;
pub type RealCsr = Csr<f64>;

impl<T: Scalar> Csr<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Csr {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut per_row: Vec<Vec<(usize, T)>> = vec![Vec::new(); rows];
        for &(r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet out of bounds");
            per_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut acc = T::zero();
                while i < row.len() && row[i].0 == c {
                    acc = acc + row[i].1;
                    i += 1;
                }
                if acc != T::zero() {
                    col_idx.push(c);
                    values.push(acc);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Csr {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self
    where
        T: From<i8>,
    {
        let triplets: Vec<(usize, usize, T)> = (0..n).map(|i| (i, i, T::from(1i8))).collect();
        Csr::from_triplets(n, n, &triplets)
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let triplets: Vec<(usize, usize, T)> =
            diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Csr::from_triplets(diag.len(), diag.len(), &triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(&c, &v)| (c, v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r)
            .find(|&(cc, _)| cc == c)
            .map(|(_, v)| v)
            .unwrap_or_else(T::zero)
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<(usize, usize, T)> = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        Csr::from_triplets(self.cols, self.rows, &triplets)
    }

    pub fn neg(&self) -> Self {
        let triplets: Vec<(usize, usize, T)> = self.iter().map(|(r, c, v)| (r, c, -v)).collect();
        Csr::from_triplets(self.rows, self.cols, &triplets)
    }

    pub fn scale(&self, s: T) -> Self {
        let triplets: Vec<(usize, usize, T)> = self.iter().map(|(r, c, v)| (r, c, v * s)).collect();
        Csr::from_triplets(self.rows, self.cols, &triplets)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut triplets: Vec<(usize, usize, T)> = self.iter().collect();
        triplets.extend(other.iter());
        Ok(Csr::from_triplets(self.rows, self.cols, &triplets))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut triplets = Vec::new();
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        Ok(Csr::from_triplets(self.rows, other.cols, &triplets))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension");
        let mut y = vec![0.0; self.rows];
        for r in 0..self.rows {
            let mut acc = 0.0;
            for (c, v) in self.row(r) {
                acc += v.to_f64() * x[c];
            }
            y[r] = acc;
        }
        y
    }

    /// y = A^T x without materializing the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_transpose dimension");
        let mut y = vec![0.0; self.cols];
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                y[c] += v.to_f64() * x[r];
            }
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Count of entries off the main diagonal.
    pub fn off_diagonal_nnz(&self) -> usize {
        self.iter().filter(|&(r, c, _)| r != c).count()
    }

    pub fn to_dense(&self) -> crate::linalg::DMat {
        let mut m = crate::linalg::DMat::zeros(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v.to_f64();
        }
        m
    }

    /// MatrixMarket coordinate text (1-based indices).
    pub fn to_matrix_market(&self) -> String {
        let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
        out.push_str(&format!("{} {} {}\n", self.rows, self.cols, self.nnz()));
        for (r, c, v) in self.iter() {
            out.push_str(&format!("{} {} {}\n", r + 1, c + 1, v));
        }
        out
    }
}

impl IntCsr {
    pub fn to_real(&self) -> RealCsr {
        let triplets: Vec<(usize, usize, f64)> =
            self.iter().map(|(r, c, v)| (r, c, v as f64)).collect();
        Csr::from_triplets(self.rows, self.cols, &triplets)
    }
}

/// Assemble a block matrix from an r x c grid of optional sparse blocks.
/// `None` blocks are zero; block sizes are taken from `row_dims`/`col_dims`.
pub fn block_matrix<T: Scalar>(
    row_dims: &[usize],
    col_dims: &[usize],
    blocks: &[Vec<Option<&Csr<T>>>],
) -> Csr<T> {
    assert_eq!(blocks.len(), row_dims.len());
    let row_off: Vec<usize> = std::iter::once(0)
        .chain(row_dims.iter().scan(0, |s, d| {
            *s += d;
            Some(*s)
        }))
        .collect();
    let col_off: Vec<usize> = std::iter::once(0)
        .chain(col_dims.iter().scan(0, |s, d| {
            *s += d;
            Some(*s)
        }))
        .collect();
    let mut triplets = Vec::new();
    for (bi, row) in blocks.iter().enumerate() {
        assert_eq!(row.len(), col_dims.len());
        for (bj, blk) in row.iter().enumerate() {
            if let Some(m) = blk {
                assert_eq!(m.rows(), row_dims[bi], "block ({bi},{bj}) row dim");
                assert_eq!(m.cols(), col_dims[bj], "block ({bi},{bj}) col dim");
                for (r, c, v) in m.iter() {
                    triplets.push((row_off[bi] + r, col_off[bj] + c, v));
                }
            }
        }
    }
    Csr::from_triplets(
        *row_off.last().unwrap(),
        *col_off.last().unwrap(),
        &triplets,
    )
}
