//! Small dense matrices: products, rank, characteristic polynomials.

use crate::poly::UniPoly;
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Relative pivot threshold for floating rank decisions.
pub const FLOAT_RANK_TOL: f64 = 1e-10;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).clone() + a.clone() * rhs.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    /// Frobenius norm as a float.
    pub fn norm_f64(&self) -> f64 {
        self.data.iter().map(|a| a.modulus().powi(2)).sum::<f64>().sqrt()
    }

    /// Rank by Gaussian elimination: exact for exact scalars, otherwise with a
    /// pivot threshold of [`FLOAT_RANK_TOL`] relative to the largest entry.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let scale = self.data.iter().map(|a| a.modulus()).fold(0.0, f64::max);
        let tol = if T::EXACT { 0.0 } else { FLOAT_RANK_TOL * scale };
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows)
                .filter(|&r| !m.get(r, col).is_zero())
                .max_by(|&a, &b| m.get(a, col).modulus().total_cmp(&m.get(b, col).modulus()));
            let Some(p) = pivot else { continue };
            if m.get(p, col).modulus() <= tol {
                continue;
            }
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, rank * m.cols + j);
            }
            let inv = T::one() / m.get(rank, col).clone();
            for r in rank + 1..m.rows {
                let f = m.get(r, col).clone() * inv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = m.get(r, j).clone() - f.clone() * m.get(rank, j).clone();
                    m.set(r, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// `det(x I - M)` by Faddeev-LeVerrier. Exact for exact scalars.
    pub fn charpoly(&self) -> UniPoly<T> {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mut c = vec![T::zero(); n + 1];
        c[n] = T::one();
        let mut mk = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&mk);
            for i in 0..n {
                let v = next.get(i, i).clone() + c[n - k + 1].clone();
                next.set(i, i, v);
            }
            let am = self.mul(&next);
            let tr = (0..n).fold(T::zero(), |acc, i| acc + am.get(i, i).clone());
            c[n - k] = -tr / T::from_i64(k as i64);
            mk = next;
        }
        UniPoly::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use num_rational::BigRational;

    type Q = BigRational;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    #[test]
    fn charpoly_of_companion_matrix() {
        // companion of x^2 - x - 1
        let m = qm(&[&[1, 1], &[1, 0]]);
        assert_eq!(m.charpoly().coeffs(), &[int(-1), int(-1), int(1)]);
        let t = qm(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 3]]);
        // (x-2)^2 (x-3) = x^3 - 7x^2 + 16x - 12
        assert_eq!(t.charpoly().coeffs(), &[int(-12), int(16), int(-7), int(1)]);
    }

    #[test]
    fn rank_exact_and_float() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(Matrix::<Q>::identity(4).rank(), 4);
        let f = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-14]]);
        assert_eq!(f.rank(), 1);
        let h = Matrix::from_rows(vec![vec![rat(1, 3), rat(1, 7)], vec![rat(2, 3), rat(2, 7)]]);
        assert_eq!(h.rank(), 1);
    }

    #[test]
    fn products() {
        let a = qm(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.mul(&Matrix::identity(2)), a);
        assert_eq!(a.mul_vec(&[int(1), int(-1)]), vec![int(-1), int(-1)]);
        assert_eq!(a.transpose().get(0, 1), &int(3));
    }
}
