//! Dense matrices over a prime field with exact Gauss-Jordan elimination.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// Row-major dense matrix of canonical field representatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of integers, reducing nothing: every entry
    /// must already lie in `[0, p)`.
    pub fn from_rows<R: AsRef<[u32]>>(field: Field, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    cols
                )));
            }
            for &v in row {
                data.push(field.element(v)?.value());
            }
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from rows of canonical representatives.
    pub fn from_byte_rows(field: Field, cols: usize, rows: &[Vec<u8>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row has {} entries, expected {}",
                    row.len(),
                    cols
                )));
            }
            for &v in row {
                field.element(v as u32)?;
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn element(&self, r: usize, c: usize) -> FieldElement {
        self.field
            .element(self.get(r, c) as u32)
            .expect("entries are canonical")
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        debug_assert!(v < self.field.order());
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u8]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.row_iter().map(<[u8]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    /// Vector-matrix product `x * self`.
    pub fn left_mul(&self, x: &[u8]) -> Vec<u8> {
        assert_eq!(x.len(), self.rows);
        let f = self.field;
        let mut out = vec![0u8; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(xr, g));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = f.inv(m.get(lead, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(lead, j), inv);
                m.set(lead, j, v);
            }
            for r in 0..m.rows {
                let factor = m.get(r, c);
                if r == lead || factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(lead, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        let rank = pivots.len();
        Rref {
            matrix: m,
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Finds some `x` with `self * x = b` (column convention), or `None` when
    /// the system is inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.field, self.rows, self.cols + 1);
        for (r, &rhs) in b.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, rhs);
        }
        let red = aug.rref();
        if red.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u8; self.cols];
        for (row, &pc) in red.pivots.iter().enumerate() {
            x[pc] = red.matrix.get(row, self.cols);
        }
        Some(x)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.row_iter() {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    #[test]
    fn rref_examples() {
        let m = Matrix::from_rows(gf(2), &[[0, 1], [1, 1]]).unwrap();
        let r = m.rref();
        assert_eq!(r.matrix, Matrix::identity(gf(2), 2));
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);

        let z = Matrix::zeros(gf(3), 2, 3);
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);

        let m = Matrix::from_rows(gf(5), &[[2, 4], [1, 2]]).unwrap();
        let r = m.rref();
        assert_eq!(
            r.matrix,
            Matrix::from_rows(gf(5), &[[1, 2], [0, 0]]).unwrap()
        );
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows: Vec<Vec<u32>> = vec![vec![1, 0], vec![1]];
        assert!(Matrix::from_rows(gf(2), &rows).is_err());
        assert!(Matrix::from_rows(gf(2), &[[2, 0]]).is_err());
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = Matrix::from_rows(gf(5), &[[1, 2], [0, 1]]).unwrap();
        let x = a.solve(&[3, 4]).unwrap();
        // 1*x0 + 2*x1 = 3, x1 = 4 → x0 = 3 - 8 = 0
        assert_eq!(x, vec![0, 4]);
        let singular = Matrix::from_rows(gf(2), &[[1, 1], [1, 1]]).unwrap();
        assert!(singular.solve(&[1, 0]).is_none());
        assert_eq!(singular.solve(&[1, 1]), Some(vec![1, 0]));
    }

    #[test]
    fn left_mul_and_transpose() {
        let g = Matrix::from_rows(gf(2), &[[1, 0, 1], [0, 1, 1]]).unwrap();
        assert_eq!(g.left_mul(&[1, 1]), vec![1, 1, 0]);
        assert_eq!(g.transpose().transpose(), g);
        assert_eq!(g.column(2), vec![1, 1]);
    }
}
