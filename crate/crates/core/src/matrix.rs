//! Dense windows of bi-infinite matrices, indexed by their global row and
//! column ranges.

use nalgebra::DMatrix;

use crate::error::{FsaError, Result};
use crate::scalar::{C64, ONE, ZERO};

/// Inclusive integer range `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(FsaError::EmptyInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The symmetric window `−n..n`.
    pub fn centered(n: u64) -> Self {
        let n = n as i64;
        Self { lo: -n, hi: n }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn translate(&self, k: i64) -> Self {
        Self { lo: self.lo + k, hi: self.hi + k }
    }
}

/// A dense block `(A_{ij})_{i∈rows, j∈cols}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMatrix {
    rows: Interval,
    cols: Interval,
    data: DMatrix<C64>,
}

impl FiniteMatrix {
    pub fn new(rows: Interval, cols: Interval, data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != rows.len() || data.ncols() != cols.len() {
            return Err(FsaError::ShapeMismatch(format!(
                "{}x{} data for {}x{} window",
                data.nrows(),
                data.ncols(),
                rows.len(),
                cols.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn<F: FnMut(i64, i64) -> C64>(rows: Interval, cols: Interval, mut f: F) -> Self {
        let data = DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
            f(rows.lo + r as i64, cols.lo + c as i64)
        });
        Self { rows, cols, data }
    }

    pub fn zeros(rows: Interval, cols: Interval) -> Self {
        Self { rows, cols, data: DMatrix::from_element(rows.len(), cols.len(), ZERO) }
    }

    pub fn identity(range: Interval) -> Self {
        Self::from_fn(range, range, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn rows(&self) -> Interval {
        self.rows
    }

    pub fn cols(&self) -> Interval {
        self.cols
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry at global indices; zero outside the window.
    pub fn get(&self, i: i64, j: i64) -> C64 {
        if self.rows.contains(i) && self.cols.contains(j) {
            self.data[((i - self.rows.lo) as usize, (j - self.cols.lo) as usize)]
        } else {
            ZERO
        }
    }

    pub fn adjoint(&self) -> Self {
        Self { rows: self.cols, cols: self.rows, data: self.data.adjoint() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(FsaError::ShapeMismatch(format!(
                "columns {:?} against rows {:?}",
                self.cols, other.rows
            )));
        }
        Ok(Self { rows: self.rows, cols: other.cols, data: &self.data * &other.data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FsaError::ShapeMismatch("sum of differently indexed windows".into()));
        }
        Ok(Self { rows: self.rows, cols: self.cols, data: &self.data + &other.data })
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.map(|z| alpha * z) }
    }

    /// `self − λ·I`, where `I` is the identity on the common index set.
    pub fn shift_diagonal(&self, lambda: C64) -> Self {
        let mut out = self.clone();
        for i in self.rows.iter().filter(|&i| self.cols.contains(i)) {
            let r = (i - self.rows.lo) as usize;
            let c = (i - self.cols.lo) as usize;
            out.data[(r, c)] -= lambda;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(other.data.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}
