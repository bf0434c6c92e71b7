use std::fmt;

use super::{AlgError, Field};

/// Dense matrix over a [`Field`].
#[derive(Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: FieldMatrix,
    pub pivots: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Self, AlgError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(field, cols, rows)
    }

    /// Like [`Self::from_rows`] but with an explicit width, so that a matrix
    /// with zero rows still knows its column count.
    pub fn from_rows_with_cols(field: &Field, cols: usize, rows: &[Vec<u32>]) -> Result<Self, AlgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(AlgError::Dimension(format!("row of length {} in a {cols}-column matrix", r.len())));
            }
            if let Some(&v) = r.iter().find(|&&v| v >= field.size()) {
                return Err(AlgError::Element(format!("{v} is not an element of {field}")));
            }
            data.extend_from_slice(r);
        }
        Ok(FieldMatrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn same_field(&self, other: &FieldMatrix) -> Result<(), AlgError> {
        if self.field != other.field {
            return Err(AlgError::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    fn zip_with(&self, other: &FieldMatrix, f: impl Fn(&Field, u32, u32) -> u32) -> Result<FieldMatrix, AlgError> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(AlgError::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(&self.field, a, b)).collect();
        Ok(FieldMatrix { data, ..self.clone() })
    }

    pub fn add(&self, other: &FieldMatrix) -> Result<FieldMatrix, AlgError> {
        self.zip_with(other, Field::add)
    }

    pub fn sub(&self, other: &FieldMatrix) -> Result<FieldMatrix, AlgError> {
        self.zip_with(other, Field::sub)
    }

    pub fn neg(&self) -> FieldMatrix {
        let data = self.data.iter().map(|&a| self.field.neg(a)).collect();
        FieldMatrix { data, ..self.clone() }
    }

    pub fn scale(&self, s: u32) -> FieldMatrix {
        let data = self.data.iter().map(|&a| self.field.mul(s, a)).collect();
        FieldMatrix { data, ..self.clone() }
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix, AlgError> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(AlgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = FieldMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut t = FieldMatrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &FieldMatrix) -> Result<FieldMatrix, AlgError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(AlgError::Dimension(format!(
                "cannot stack {} columns on {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FieldMatrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `self` to the left of `other`.
    pub fn hstack(&self, other: &FieldMatrix) -> Result<FieldMatrix, AlgError> {
        self.transpose().vstack(&other.transpose()).map(|m| m.transpose())
    }

    /// Columns `start..start+len`.
    pub fn column_block(&self, start: usize, len: usize) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(&self.field, self.rows, len);
        for r in 0..self.rows {
            for c in 0..len {
                m.set(r, c, self.get(r, start + c));
            }
        }
        m
    }

    /// Writes `block` into columns starting at `start`.
    pub fn set_column_block(&mut self, start: usize, block: &FieldMatrix) {
        assert_eq!(block.rows, self.rows);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r, start + c, block.get(r, c));
            }
        }
    }

    /// Gauss–Jordan elimination.
    pub fn echelon(&self) -> Echelon {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in 0..m.cols {
                let v = f.mul(inv, m.get(r, j));
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let factor = m.get(i, c);
                if i == r || factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Nonzero rows of the reduced echelon form.
    pub fn row_basis(&self) -> FieldMatrix {
        let e = self.echelon();
        let rows: Vec<Vec<u32>> = (0..e.pivots.len()).map(|r| e.matrix.row(r).to_vec()).collect();
        FieldMatrix::from_rows_with_cols(&self.field, self.cols, &rows).unwrap()
    }

    /// Whether every row of `candidate` lies in the row space of `self`.
    pub fn rowspace_contains(&self, candidate: &FieldMatrix) -> Result<bool, AlgError> {
        self.same_field(candidate)?;
        if self.cols != candidate.cols {
            return Err(AlgError::Dimension(format!(
                "row space of width {} cannot contain rows of width {}",
                self.cols, candidate.cols
            )));
        }
        let basis = self.echelon();
        let f = &self.field;
        for r in 0..candidate.rows {
            let mut v = candidate.row(r).to_vec();
            for (i, &pc) in basis.pivots.iter().enumerate() {
                let factor = v[pc];
                if factor == 0 {
                    continue;
                }
                for (j, x) in v.iter_mut().enumerate() {
                    *x = f.sub(*x, f.mul(factor, basis.matrix.get(i, j)));
                }
            }
            if v.iter().any(|&x| x != 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Solves `X · self = target` for `X`, if the rows of `target` lie in
    /// the row space of `self`.
    pub fn left_solve(&self, target: &FieldMatrix) -> Result<Option<FieldMatrix>, AlgError> {
        self.same_field(target)?;
        if self.cols != target.cols {
            return Err(AlgError::Dimension("left_solve width mismatch".into()));
        }
        // Row-reduce [selfᵀ | targetᵀ] and read the solution off the pivots.
        let aug = self.transpose().hstack(&target.transpose())?;
        let e = aug.echelon();
        let n = self.rows;
        if e.pivots.iter().any(|&c| c >= n) {
            return Ok(None);
        }
        let mut x = FieldMatrix::zeros(&self.field, target.rows, n);
        for (i, &pc) in e.pivots.iter().enumerate() {
            for t in 0..target.rows {
                x.set(t, pc, e.matrix.get(i, n + t));
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<FieldMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let id = FieldMatrix::identity(&self.field, self.rows);
        let e = self.hstack(&id).ok()?.echelon();
        if e.pivots.len() < self.rows || e.pivots[self.rows - 1] >= self.rows {
            return None;
        }
        Some(e.matrix.column_block(self.rows, self.rows))
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }
}
