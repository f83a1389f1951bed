//! Exact dense linear algebra over any supported scalar field, plus a
//! self-normalizing row-echelon accumulator over QQ.
//!
//! Everything is deterministic: pivoting always picks the first nonzero
//! candidate, so bases coming out of rref/nullspace/image are canonical for a
//! given input order.

use crate::error::{CoreError, Result};
use crate::scalars::{invert_scalar, Scalar, ScalarField};
use num::{BigRational, One, Zero};

#[derive(Clone, PartialEq, Debug)]
pub struct Mat {
    field: ScalarField,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(field: &ScalarField, rows: usize, cols: usize) -> Mat {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![Scalar::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &ScalarField, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(field));
        }
        m
    }

    pub fn from_rows(field: &ScalarField, rows: Vec<Vec<Scalar>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for s in row {
                debug_assert_eq!(s.field(), *field);
                data.push(s);
            }
        }
        Mat {
            field: field.clone(),
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_fn(
        field: &ScalarField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Mat {
        let mut m = Mat::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.field, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        Mat::from_fn(&self.field, self.rows, other.cols, |i, j| {
            let mut acc = Scalar::zero(&self.field);
            for k in 0..self.cols {
                let term = self.get(i, k).mul(other.get(k, j)).expect("same field");
                acc = acc.add(&term).expect("same field");
            }
            acc
        })
    }

    pub fn matvec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(&self.field);
                for k in 0..self.cols {
                    let term = self.get(i, k).mul(&v[k]).expect("same field");
                    acc = acc.add(&term).expect("same field");
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).add(other.get(i, j)).expect("same field")
        })
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).sub(other.get(i, j)).expect("same field")
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).mul(c).expect("same field")
        })
    }

    /// Reduced row echelon form; returns (rref, pivot column indices).
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = invert_scalar(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv).expect("same field");
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m
                        .get(i, j)
                        .sub(&factor.mul(m.get(r, j)).expect("same field"))
                        .expect("same field");
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel {v : Av = 0}, one vector per free column,
    /// in ascending free-column order.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let piv_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = Some(row);
            }
            v
        };
        for free in 0..self.cols {
            if piv_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Scalar::zero(&self.field); self.cols];
            vec[free] = Scalar::one(&self.field);
            for (row, &pc) in pivots.iter().enumerate() {
                vec[pc] = r.get(row, free).neg();
            }
            basis.push(vec);
        }
        basis
    }

    /// One solution of Ax = b, or None when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zeros(&self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(&self.field); self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Determinant by fraction-full Gaussian elimination (entries live in a
    /// field, so exact division is always available).
    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let mut det = Scalar::one(&self.field);
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return Scalar::zero(&self.field);
            };
            if p != c {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, c * m.cols + j);
                }
                det = det.neg();
            }
            det = det.mul(m.get(c, c)).expect("same field");
            let inv = invert_scalar(m.get(c, c)).expect("pivot is nonzero");
            for i in c + 1..m.rows {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).mul(&inv).expect("same field");
                for j in c..m.cols {
                    let v = m
                        .get(i, j)
                        .sub(&factor.mul(m.get(c, j)).expect("same field"))
                        .expect("same field");
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Inverse; a singular input reports its (zero) determinant.
    pub fn inverse(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = Mat::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one(&self.field));
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(CoreError::SingularMatrix {
                det: self.det().to_string(),
            });
        }
        Ok(Mat::from_fn(&self.field, n, n, |i, j| {
            r.get(i, n + j).clone()
        }))
    }
}

/// Incrementally built reduced row echelon basis over QQ. Insertion order
/// does not affect the final basis (it is the canonical RREF basis of the
/// span), which keeps closure output deterministic.
#[derive(Clone, Debug)]
pub struct QEchelon {
    width: usize,
    /// Rows in RREF: strictly increasing pivot columns, pivot entries 1,
    /// pivot columns cleared elsewhere.
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl QEchelon {
    pub fn new(width: usize) -> QEchelon {
        QEchelon {
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    fn reduce_in_place(&self, v: &mut [BigRational]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let factor = v[p].clone();
            for j in p..self.width {
                let delta = &factor * &row[j];
                v[j] -= delta;
            }
        }
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        assert_eq!(v.len(), self.width);
        let mut w = v.to_vec();
        self.reduce_in_place(&mut w);
        w.iter().all(|c| c.is_zero())
    }

    /// Adds v to the span. Returns true when the dimension grew.
    pub fn insert(&mut self, v: &[BigRational]) -> bool {
        assert_eq!(v.len(), self.width);
        let mut w = v.to_vec();
        self.reduce_in_place(&mut w);
        let Some(p) = w.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = BigRational::one() / w[p].clone();
        for c in w.iter_mut() {
            *c *= &inv;
        }
        // Clear the new pivot column from the existing rows, then insert in
        // pivot order.
        for (row, _) in self.rows.iter_mut().zip(&self.pivots) {
            if row[p].is_zero() {
                continue;
            }
            let factor = row[p].clone();
            for j in 0..self.width {
                let delta = &factor * &w[j];
                row[j] -= delta;
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        true
    }
}

/// Row echelon accumulator over an arbitrary scalar field; the working horse
/// behind presented-space caches. Same canonical-RREF discipline as QEchelon.
#[derive(Clone, Debug)]
pub struct FieldEchelon {
    field: ScalarField,
    width: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl FieldEchelon {
    pub fn new(field: &ScalarField, width: usize) -> FieldEchelon {
        FieldEchelon {
            field: field.clone(),
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    fn reduce_in_place(&self, v: &mut [Scalar]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let factor = v[p].clone();
            for j in p..self.width {
                let delta = factor.mul(&row[j]).expect("same field");
                v[j] = v[j].sub(&delta).expect("same field");
            }
        }
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.width);
        let mut w = v.to_vec();
        self.reduce_in_place(&mut w);
        w.iter().all(|c| c.is_zero())
    }

    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.width);
        let mut w = v.to_vec();
        self.reduce_in_place(&mut w);
        let Some(p) = w.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = invert_scalar(&w[p]).expect("pivot is nonzero");
        for c in w.iter_mut() {
            *c = c.mul(&inv).expect("same field");
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let factor = row[p].clone();
            for j in 0..self.width {
                let delta = factor.mul(&w[j]).expect("same field");
                row[j] = row[j].sub(&delta).expect("same field");
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        true
    }
}
