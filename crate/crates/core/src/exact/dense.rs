//! Small dense complex matrices for the numerical side of the workbench.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex state vector in the computational basis of whatever
/// representation it belongs to.
pub type StateVector = Vec<Complex64>;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a square matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[StateVector]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |r, c| columns[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, c: usize) -> StateVector {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { left: self.cols, right: other.rows });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> StateVector {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows).map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum()).collect()
    }

    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Frobenius inner product `tr(self† other)`.
    pub fn inner(&self, other: &DenseMatrix) -> Complex64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// `max |(U U†)_{rc} - δ_{rc}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.matmul(&self.adjoint()).expect("square");
        prod.max_abs_diff(&DenseMatrix::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_defect() <= tol
    }

    /// `self · other · self†`.
    pub fn conjugate(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.matmul(other)?.matmul(&self.adjoint())
    }

    pub fn pow(&self, k: u32) -> DenseMatrix {
        let mut acc = DenseMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.matmul(self).expect("square");
        }
        acc
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u|v⟩`, antilinear in the first argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn normalize(v: &mut [Complex64]) {
    let n = norm(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// Modified Gram-Schmidt over `candidates`, keeping vectors whose residual
/// norm exceeds `threshold`.
pub fn orthonormal_basis(candidates: &[StateVector], threshold: f64) -> Vec<StateVector> {
    let mut basis: Vec<StateVector> = Vec::new();
    for cand in candidates {
        let mut w = cand.clone();
        // two passes keep the basis orthonormal to working precision
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        if norm(&w) > threshold {
            normalize(&mut w);
            basis.push(w);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = DenseMatrix::from_fn(2, 2, |r, k| c(r as f64, k as f64));
        let i = DenseMatrix::identity(2);
        assert_eq!(&a * &i, a);
        let aa = a.adjoint();
        assert_eq!(aa[(0, 1)], c(1.0, 0.0));
        assert_eq!(aa[(1, 0)], c(0.0, -1.0));
    }

    #[test]
    fn dimension_mismatch() {
        let a = DenseMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gram_schmidt_drops_dependent() {
        let v1 = vec![c(1.0, 0.0), c(1.0, 0.0)];
        let v2 = vec![c(2.0, 0.0), c(2.0, 0.0)];
        let v3 = vec![c(0.0, 1.0), c(0.0, 0.0)];
        let b = orthonormal_basis(&[v1, v2, v3], 1e-10);
        assert_eq!(b.len(), 2);
        assert!(inner(&b[0], &b[1]).norm() < 1e-15);
    }
}
