//! Row-major matrix and labelled dataset used by every learner.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct Matrix<S> {
    data: Vec<S>,
    rows: usize,
    cols: usize,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(data: Vec<S>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CoreError::InvalidDataset(format!(
                "{} values cannot fill a {rows} x {cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { data, rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { data: vec![S::zero(); rows * cols], rows, cols }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(CoreError::InvalidDataset(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { data, rows: rows.len(), cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    /// Copy of one column.
    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// New matrix keeping only the given columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Matrix<S> {
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(keep.iter().map(|&c| row[c]));
        }
        Matrix { data, rows: self.rows, cols: keep.len() }
    }
}

/// Labelled feature matrix with an optional active-feature mask.
///
/// The mask restricts which columns learners may split on without copying
/// the matrix; split records and importances always use original column
/// indices so they stay aligned with the feature registry.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<S: Scalar> {
    x: Matrix<S>,
    y: Vec<usize>,
    n_classes: usize,
    mask: Option<Vec<usize>>,
}

impl<S: Scalar> Dataset<S> {
    pub fn new(x: Matrix<S>, y: Vec<usize>, n_classes: usize) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(CoreError::InvalidDataset(format!(
                "empty design matrix ({} x {})",
                x.rows(),
                x.cols()
            )));
        }
        if y.len() != x.rows() {
            return Err(CoreError::LengthMismatch(x.rows(), y.len()));
        }
        if n_classes == 0 {
            return Err(CoreError::InvalidDataset("zero classes".into()));
        }
        if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
            return Err(CoreError::InvalidDataset(format!(
                "label {bad} outside [0, {n_classes})"
            )));
        }
        if let Some(i) = x.data.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::InvalidDataset(format!(
                "non-finite value at row {}, column {}",
                i / x.cols(),
                i % x.cols()
            )));
        }
        Ok(Dataset { x, y, n_classes, mask: None })
    }

    pub fn x(&self) -> &Matrix<S> {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn mask(&self) -> Option<&[usize]> {
        self.mask.as_deref()
    }

    /// Restrict learners to the given strictly increasing column set.
    pub fn set_mask(&mut self, mask: Option<Vec<usize>>) -> Result<()> {
        if let Some(m) = &mask {
            if m.is_empty() {
                return Err(CoreError::InvalidDataset("empty feature mask".into()));
            }
            for pair in m.windows(2) {
                if pair[1] <= pair[0] {
                    return Err(CoreError::InvalidDataset(
                        "feature mask must be strictly increasing".into(),
                    ));
                }
            }
            if *m.last().unwrap() >= self.d() {
                return Err(CoreError::InvalidDataset(format!(
                    "mask index {} outside {} columns",
                    m.last().unwrap(),
                    self.d()
                )));
            }
        }
        self.mask = mask;
        Ok(())
    }

    /// Columns learners may use: the mask, or all columns.
    pub fn active_features(&self) -> Vec<usize> {
        match &self.mask {
            Some(m) => m.clone(),
            None => (0..self.d()).collect(),
        }
    }

    /// New dataset keeping only the given rows, in the given order.
    /// The class count and feature mask carry over unchanged.
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset<S>> {
        if rows.is_empty() {
            return Err(CoreError::Empty("row subset".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * self.d());
        let mut y = Vec::with_capacity(rows.len());
        for &r in rows {
            if r >= self.n() {
                return Err(CoreError::InvalidParam(format!(
                    "row {r} outside {} rows",
                    self.n()
                )));
            }
            data.extend_from_slice(self.x.row(r));
            y.push(self.y[r]);
        }
        Ok(Dataset {
            x: Matrix { data, rows: rows.len(), cols: self.d() },
            y,
            n_classes: self.n_classes,
            mask: self.mask.clone(),
        })
    }
}
