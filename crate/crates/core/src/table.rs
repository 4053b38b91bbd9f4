//! Dense nonnegative tables and the basic quantities defined on them:
//! cuts, volumes and densities.
//!
//! Every sum in this module is accumulated left to right in ascending index
//! order, starting from zero. The subset scans in [`crate::discrepancy`]
//! reproduce that order so that a value found by a scan and the same value
//! recomputed from its witness agree bit for bit.

use serde::Serialize;

use crate::error::{Axis, Error, Result};

/// An `m × n` nonnegative array with cached marginals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContingencyTable {
    entries: Vec<f64>,
    m: usize,
    n: usize,
    row_sums: Vec<f64>,
    col_sums: Vec<f64>,
    total: f64,
    /// Grand total of the entries as supplied, before normalization.
    scale: f64,
}

impl ContingencyTable {
    /// Builds a table from rows of entries, optionally dividing every entry
    /// by the grand total.
    pub fn new(rows: &[Vec<f64>], normalize: bool) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::EmptyTable);
        }
        let mut entries = Vec::with_capacity(m * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RaggedRows {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_flat(entries, m, n, normalize)
    }

    /// Builds a table from a row-major buffer of length `m * n`.
    pub fn from_flat(mut entries: Vec<f64>, m: usize, n: usize, normalize: bool) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::EmptyTable);
        }
        if entries.len() != m * n {
            return Err(Error::RaggedRows {
                row: entries.len() / n,
                expected: n,
                found: entries.len() % n,
            });
        }
        for (idx, &v) in entries.iter().enumerate() {
            let (row, col) = (idx / n, idx % n);
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry { row, col });
            }
        }
        let raw_total = entries.iter().fold(0.0, |acc, &v| acc + v);
        if normalize && raw_total > 0.0 {
            for v in &mut entries {
                *v /= raw_total;
            }
        }
        let row_sums: Vec<f64> = (0..m)
            .map(|i| entries[i * n..(i + 1) * n].iter().fold(0.0, |acc, &v| acc + v))
            .collect();
        let col_sums: Vec<f64> = (0..n)
            .map(|j| (0..m).fold(0.0, |acc, i| acc + entries[i * n + j]))
            .collect();
        if let Some(i) = row_sums.iter().position(|&s| s <= 0.0) {
            return Err(Error::ZeroMarginal { axis: Axis::Row, index: i });
        }
        if let Some(j) = col_sums.iter().position(|&s| s <= 0.0) {
            return Err(Error::ZeroMarginal { axis: Axis::Col, index: j });
        }
        let total = row_sums.iter().fold(0.0, |acc, &v| acc + v);
        Ok(Self {
            entries,
            m,
            n,
            row_sums,
            col_sums,
            total,
            scale: raw_total,
        })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[f64] {
        &self.col_sums
    }

    pub fn marginals(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::Row => &self.row_sums,
            Axis::Col => &self.col_sums,
        }
    }

    pub fn len(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.m,
            Axis::Col => self.n,
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Grand total of the entries before any normalization was applied.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Copy of this table divided by its grand total.
    pub fn normalized(&self) -> Self {
        let entries = self.entries.iter().map(|v| v / self.total).collect();
        let mut t = Self::from_flat(entries, self.m, self.n, false)
            .expect("rescaling a valid table keeps it valid");
        t.scale = self.scale;
        t
    }

    /// The transposed table (rows and columns swapped).
    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.m * self.n);
        for j in 0..self.n {
            for i in 0..self.m {
                entries.push(self.get(i, j));
            }
        }
        Self::from_flat(entries, self.n, self.m, false).expect("transpose of a valid table")
    }

    pub(crate) fn check_subset(&self, s: &[usize], axis: Axis) -> Result<()> {
        if s.is_empty() {
            return Err(Error::EmptySubset { axis });
        }
        let len = self.len(axis);
        if let Some(&index) = s.iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { axis, index, len });
        }
        Ok(())
    }

    /// Sum of entries over the rectangle `rows × cols`.
    pub fn cut(&self, rows: &[usize], cols: &[usize]) -> Result<f64> {
        self.check_subset(rows, Axis::Row)?;
        self.check_subset(cols, Axis::Col)?;
        let rows = canonical(rows);
        let cols = canonical(cols);
        Ok(self.cut_sorted(&rows, &cols))
    }

    /// Cut over already sorted, duplicate-free, in-range subsets.
    pub(crate) fn cut_sorted(&self, rows: &[usize], cols: &[usize]) -> f64 {
        cols.iter().fold(0.0, |acc, &j| {
            acc + rows.iter().fold(0.0, |col, &i| col + self.get(i, j))
        })
    }

    /// Sum of the marginals of `s` along `axis`.
    pub fn volume(&self, s: &[usize], axis: Axis) -> Result<f64> {
        self.check_subset(s, axis)?;
        Ok(self.volume_sorted(&canonical(s), axis))
    }

    pub(crate) fn volume_sorted(&self, s: &[usize], axis: Axis) -> f64 {
        let d = self.marginals(axis);
        s.iter().fold(0.0, |acc, &i| acc + d[i])
    }

    /// `cut(X, Y) / (Vol(X) Vol(Y))`.
    pub fn density(&self, rows: &[usize], cols: &[usize]) -> Result<f64> {
        self.check_subset(rows, Axis::Row)?;
        self.check_subset(cols, Axis::Col)?;
        let rows = canonical(rows);
        let cols = canonical(cols);
        Ok(self.density_sorted(&rows, &cols))
    }

    pub(crate) fn density_sorted(&self, rows: &[usize], cols: &[usize]) -> f64 {
        let vx = self.volume_sorted(rows, Axis::Row);
        let vy = self.volume_sorted(cols, Axis::Col);
        self.cut_sorted(rows, cols) / (vx * vy)
    }

    /// `D_row^{-1/2} A D_col^{-1/2}` as a row-major `m × n` matrix.
    pub fn normalized_matrix(&self) -> Vec<Vec<f64>> {
        // Divide by the total first so the result does not depend on scale.
        let rs: Vec<f64> = self.row_sums.iter().map(|d| d / self.total).collect();
        let cs: Vec<f64> = self.col_sums.iter().map(|d| d / self.total).collect();
        (0..self.m)
            .map(|i| {
                (0..self.n)
                    .map(|j| (self.get(i, j) / self.total) / (rs[i] * cs[j]).sqrt())
                    .collect()
            })
            .collect()
    }
}

/// Sorted, deduplicated copy of an index set.
pub(crate) fn canonical(s: &[usize]) -> Vec<usize> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}
