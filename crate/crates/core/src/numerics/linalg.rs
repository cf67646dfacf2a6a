//! Dense matrices, LU factorisation, determinants and the matrix exponential.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{Float, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::scalar::{Real, Scalar};

/// Relative pivot floor used by every LU factorisation.
pub const PIVOT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.concat() }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn column(values: &[T]) -> Self {
        Self { rows: values.len(), cols: 1, data: values.to_vec() }
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
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conjugate())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: T, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&x, &y)| x + a * y).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn norm_inf(&self) -> T::Real {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::Real::zero(), |acc, v| acc + v.modulus()))
            .fold(T::Real::zero(), Float::max)
    }

    pub fn max_abs(&self) -> T::Real {
        self.data.iter().map(|v| v.modulus()).fold(T::Real::zero(), Float::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    /// Extract the block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self)
    }

    /// Plain determinant; zero when the factorisation hits an exactly zero pivot.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        Lu::factor_unchecked(self).det()
    }

    /// Solve `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.lu()?.solve_matrix(rhs)
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn expm(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let norm = self.norm_inf();
        let half = T::Real::of(0.5);
        let mut squarings = 0u32;
        let mut scale = T::Real::one();
        while norm * scale > half {
            scale *= half;
            squarings += 1;
        }
        let a = self.map(|v| v.scale(scale));
        let mut term = Self::identity(n);
        let mut sum = Self::identity(n);
        for k in 1..=18 {
            term = &(&term * &a) * T::from_real(T::Real::one() / T::Real::of_usize(k));
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.add_scaled(T::one(), rhs)
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.add_scaled(-T::one(), rhs)
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl<T: Scalar> Mul<T> for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, s: T) -> Matrix<T> {
        self.scaled(s)
    }
}

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: bool,
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    /// Factor, rejecting pivots below `PIVOT_FLOOR * ‖A‖∞`.
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        let f = Self::factor_unchecked(a);
        f.check_pivots(a.norm_inf())?;
        Ok(f)
    }

    /// Fail with `SingularSystem` if any pivot is below the floor relative to `norm`.
    pub fn check_pivots(&self, norm: T::Real) -> Result<()> {
        let floor = T::Real::of(PIVOT_FLOOR) * norm;
        let n = self.lu.rows;
        let mut smallest = T::Real::infinity();
        for i in 0..n {
            smallest = smallest.min(self.lu[(i, i)].modulus());
        }
        if n > 0 && (self.singular || !(smallest > floor)) {
            return Err(Error::SingularSystem {
                pivot: smallest.to_f64().unwrap_or(0.0),
                floor: floor.to_f64().unwrap_or(0.0),
            });
        }
        Ok(())
    }

    pub fn factor_unchecked(a: &Matrix<T>) -> Self {
        assert!(a.is_square(), "LU of non-square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = false;
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].modulus();
            for i in k + 1..n {
                let v = lu[(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = !sign;
            }
            let pivot = lu[(k, k)];
            if pivot == T::zero() {
                singular = true;
                continue;
            }
            let inv = T::one() / pivot;
            for i in k + 1..n {
                let factor = lu[(i, k)] * inv;
                lu[(i, k)] = factor;
                if factor == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Self { lu, perm, sign, singular }
    }

    pub fn det(&self) -> T {
        if self.singular {
            return T::zero();
        }
        let mut d = T::one();
        for i in 0..self.lu.rows {
            d *= self.lu[(i, i)];
        }
        if self.sign {
            -d
        } else {
            d
        }
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn solve_matrix(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        if b.rows != self.lu.rows {
            return crate::error::config("right-hand side has wrong number of rows");
        }
        let mut out = Matrix::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            let x = self.solve_vec(&b.col(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }
}

/// Square coefficient matrix with one or more right-hand sides.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem<T> {
    pub coefficients: Matrix<T>,
    pub rhs: Matrix<T>,
}

impl<T: Scalar> DenseSystem<T> {
    pub fn new(coefficients: Matrix<T>, rhs: Matrix<T>) -> Result<Self> {
        if !coefficients.is_square() || rhs.rows() != coefficients.rows() {
            return crate::error::config(format!(
                "dense system must be square with matching rhs ({}x{} vs {} rows)",
                coefficients.rows(),
                coefficients.cols(),
                rhs.rows()
            ));
        }
        if !coefficients.is_finite() || !rhs.is_finite() {
            return crate::error::config("dense system has non-finite entries");
        }
        Ok(Self { coefficients, rhs })
    }

    pub fn with_vector(coefficients: Matrix<T>, rhs: &[T]) -> Result<Self> {
        Self::new(coefficients, Matrix::column(rhs))
    }
}

pub fn solve_dense<T: Scalar>(system: &DenseSystem<T>) -> Result<Matrix<T>> {
    system.coefficients.solve(&system.rhs)
}

/// Plain and trace-regularised determinants of `I + A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinants<T> {
    pub plain: T,
    pub regularised: T,
}

/// `det(I + A)` and `det(I + A) * exp(-tr A)` for a weight-scaled kernel `A`.
pub fn det_reg_matrix<T: Scalar>(a: &Matrix<T>) -> Determinants<T> {
    let n = a.rows();
    let shifted = &Matrix::identity(n) + a;
    let plain = shifted.det();
    let regularised = plain * (-a.trace()).exp();
    Determinants { plain, regularised }
}
