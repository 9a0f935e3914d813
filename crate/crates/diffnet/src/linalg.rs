//! Small dense matrices for the filtering kernels.
//!
//! The state dimension here is the number of occupied degree classes
//! (tens, not thousands), so plain row-major storage with direct loops is
//! all that is needed.

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.concat() }
    }

    pub fn from_diag(diag: &[S]) -> Self {
        let mut m = Mat::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat<S> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == S::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, factor: S) -> Mat<S> {
        let data = self.data.iter().map(|&a| a * factor).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    /// (self + self') / 2.
    pub fn symmetrized(&self) -> Mat<S> {
        assert_eq!(self.rows, self.cols);
        let half = S::from_f64_lossy(0.5);
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..i {
                let v = (self[(i, j)] + self[(j, i)]) * half;
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Mat<S>) -> S {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(S::zero(), S::max)
    }

    /// Cholesky factor L with `self = L L'`; `None` if not positive definite.
    pub fn cholesky(&self) -> Option<Mat<S>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum = sum - l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if sum <= S::zero() || !sum.is_finite() {
                        return None;
                    }
                    l[(i, i)] = sum.sqrt();
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Some(l)
    }

    /// Solves `self * X = B` for symmetric positive-definite `self`.
    pub fn spd_solve(&self, b: &Mat<S>) -> Option<Mat<S>> {
        assert_eq!(self.rows, b.rows);
        let l = self.cholesky()?;
        let n = self.rows;
        let mut x = b.clone();
        // forward: L y = b
        for col in 0..b.cols {
            for i in 0..n {
                let mut sum = x[(i, col)];
                for k in 0..i {
                    sum = sum - l[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = sum / l[(i, i)];
            }
            // back: L' x = y
            for i in (0..n).rev() {
                let mut sum = x[(i, col)];
                for k in i + 1..n {
                    sum = sum - l[(k, i)] * x[(k, col)];
                }
                x[(i, col)] = sum / l[(i, i)];
            }
        }
        Some(x)
    }

    /// Eigenvalues and eigenvectors of a symmetric matrix (cyclic Jacobi).
    ///
    /// Returns `(eigenvalues, V)` with `self ≈ V diag(λ) V'`; columns of `V`
    /// are the eigenvectors.
    pub fn symmetric_eigen(&self) -> (Vec<S>, Mat<S>) {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.symmetrized();
        let mut v = Mat::identity(n);
        let eps = S::epsilon() * S::from_count(n.max(1));
        for _sweep in 0..100 {
            let mut off = S::zero();
            for i in 0..n {
                for j in i + 1..n {
                    off = off + a[(i, j)] * a[(i, j)];
                }
            }
            let scale: S = (0..n).map(|i| a[(i, i)].abs()).fold(S::zero(), S::max);
            if off.sqrt() <= eps * (scale + S::one()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == S::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (S::from_f64_lossy(2.0) * apq);
                    let t = {
                        let sign = if theta >= S::zero() { S::one() } else { -S::one() };
                        sign / (theta.abs() + (theta * theta + S::one()).sqrt())
                    };
                    let c = S::one() / (t * t + S::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let eig = (0..n).map(|i| a[(i, i)]).collect();
        (eig, v)
    }

    /// Smallest eigenvalue of a symmetric matrix.
    pub fn min_symmetric_eigenvalue(&self) -> S {
        let (eig, _) = self.symmetric_eigen();
        eig.into_iter().fold(S::infinity(), S::min)
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_transpose() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let ab = a.matmul(&b);
        assert_eq!(ab, Mat::from_rows(&[vec![2.0, 1.0], vec![4.0, 3.0]]));
        assert_eq!(a.transpose()[(0, 1)], 3.0);
    }

    #[test]
    fn cholesky_solve_recovers_identity() {
        let a = Mat::from_rows(&[vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 2.0]]);
        let x = a.spd_solve(&Mat::identity(3)).unwrap();
        let should_be_identity = a.matmul(&x);
        assert!(should_be_identity.max_abs_diff(&Mat::identity(3)) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(a.cholesky().is_none());
    }

    #[test]
    fn jacobi_eigen_reconstructs_matrix() {
        let a = Mat::from_rows(&[
            vec![2.0, 0.5, 0.1],
            vec![0.5, 1.0, -0.3],
            vec![0.1, -0.3, 0.7],
        ]);
        let (eig, v) = a.symmetric_eigen();
        let recon = v.matmul(&Mat::from_diag(&eig)).matmul(&v.transpose());
        assert!(recon.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn min_eigenvalue_of_diag() {
        let a: Mat<f64> = Mat::from_diag(&[3.0, -0.5, 1.0]);
        assert!((a.min_symmetric_eigenvalue() + 0.5).abs() < 1e-14);
    }
}
