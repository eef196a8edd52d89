//! Dense exact linear algebra over a [`Field`].

use num_traits::Zero;

use crate::field::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![vec![Scalar::zero(); cols]; rows] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = field.one();
        }
        m
    }

    pub fn from_rows(cols: usize, data: Vec<Vec<Scalar>>) -> Matrix {
        Matrix { rows: data.len(), cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i][j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|c| c.is_zero()))
    }

    pub fn mul(&self, field: Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if b.is_zero() {
                        continue;
                    }
                    let v = field.add(&out.data[i][j], &field.mul(a, b));
                    out.data[i][j] = v;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j][i] = self.data[i][j].clone();
            }
        }
        out
    }

    pub fn rank(&self, field: Field) -> usize {
        rref(field, &self.data, self.cols).1.len()
    }

    /// Basis of `{v : self * v = 0}` as column vectors.
    pub fn kernel(&self, field: Field) -> Vec<Vec<Scalar>> {
        let (r, piv) = rref(field, &self.data, self.cols);
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = field.one();
                for (row, &pc) in piv.iter().enumerate() {
                    v[pc] = field.neg(&r[row][f]);
                }
                v
            })
            .collect()
    }
}

/// Reduced row echelon form of the row vectors; returns the nonzero rows and
/// their pivot columns.
pub fn rref(field: Field, rows: &[Vec<Scalar>], cols: usize) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = field.inv(&m[r][c]).unwrap();
        for j in c..cols {
            let v = field.mul(&m[r][j], &inv);
            m[r][j] = v;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    if m[r][j].is_zero() {
                        continue;
                    }
                    let v = field.sub(&m[i][j], &field.mul(&f, &m[r][j]));
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// A subspace in reduced echelon form, used to reduce vectors modulo it.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn new(field: Field, gens: &[Vec<Scalar>], cols: usize) -> Echelon {
        let (rows, pivots) = rref(field, gens, cols);
        Echelon { rows, pivots, cols }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn reduce(&self, field: Field, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if out[pc].is_zero() {
                continue;
            }
            let f = out[pc].clone();
            for j in 0..self.cols {
                if !row[j].is_zero() {
                    out[j] = field.sub(&out[j], &field.mul(&f, &row[j]));
                }
            }
        }
        out
    }

    /// Coordinates of `v` modulo the subspace, on the non-pivot columns.
    pub fn quotient_coords(&self, field: Field, v: &[Scalar]) -> Vec<Scalar> {
        let r = self.reduce(field, v);
        (0..self.cols).filter(|c| !self.pivots.contains(c)).map(|c| r[c].clone()).collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|c| !self.pivots.contains(c)).collect()
    }
}
