//! Small dense matrices over an exact field.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::scalars::Q;

pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Panics on division by zero; callers check first.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Field for RatFun {
    fn zero() -> Self {
        RatFun::zero()
    }
    fn one() -> Self {
        RatFun::one()
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    a: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            a: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> F) -> Self {
        let mut a = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                a.push(f(i, j));
            }
        }
        Matrix { rows, cols, a }
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

    pub fn row(&self, i: usize) -> &[F] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].add(&o[(i, j)]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].sub(&o[(i, j)]))
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        Self::from_fn(self.rows, o.cols, |i, j| {
            (0..self.cols).fold(F::zero(), |acc, k| {
                let x = &self[(i, k)];
                let y = &o[(k, j)];
                if x.is_zero() || y.is_zero() {
                    acc
                } else {
                    acc.add(&x.mul(y))
                }
            })
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(F::zero(), |acc, k| {
                    if self[(i, k)].is_zero() || v[k].is_zero() {
                        acc
                    } else {
                        acc.add(&self[(i, k)].mul(&v[k]))
                    }
                })
            })
            .collect()
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc.add(&self[(i, i)]))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    /// Determinant by Gaussian elimination over the field.
    pub fn det(&self) -> F {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = F::one();
        for k in 0..n {
            let Some(piv) = (k..n).find(|&i| !m[(i, k)].is_zero()) else {
                return F::zero();
            };
            if piv != k {
                m.swap_rows(piv, k);
                det = det.neg();
            }
            let pk = m[(k, k)].clone();
            det = det.mul(&pk);
            for i in k + 1..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let f = m[(i, k)].div(&pk);
                for j in k..n {
                    let t = f.mul(&m[(k, j)]);
                    m[(i, j)] = m[(i, j)].sub(&t);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Solve `self * X = b` for square invertible `self`.
    pub fn solve(&self, b: &Self) -> Result<Self> {
        if !self.is_square() || b.rows != self.rows {
            return Err(Error::Dimension("solve".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut x = b.clone();
        for k in 0..n {
            let piv = (k..n)
                .find(|&i| !m[(i, k)].is_zero())
                .ok_or(Error::SingularSystem)?;
            m.swap_rows(piv, k);
            x.swap_rows(piv, k);
            let pk = m[(k, k)].clone();
            for j in 0..n {
                m[(k, j)] = m[(k, j)].div(&pk);
            }
            for j in 0..x.cols {
                x[(k, j)] = x[(k, j)].div(&pk);
            }
            for i in 0..n {
                if i == k || m[(i, k)].is_zero() {
                    continue;
                }
                let f = m[(i, k)].clone();
                for j in 0..n {
                    let t = f.mul(&m[(k, j)]);
                    m[(i, j)] = m[(i, j)].sub(&t);
                }
                for j in 0..x.cols {
                    let t = f.mul(&x[(k, j)]);
                    x[(i, j)] = x[(i, j)].sub(&t);
                }
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.rows))
    }

    pub fn column_matrix(cols: &[Vec<F>]) -> Self {
        let n = cols.first().map_or(0, |c| c.len());
        Self::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.a[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.a[i * self.cols + j]
    }
}

pub type QMatrix = Matrix<Q>;

fn lcm(a: &Poly, b: &Poly) -> Poly {
    (a * &b.div_rem(&a.gcd(b)).0).monic()
}

/// Bareiss elimination; every division is exact.
fn bareiss_det(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    let mut sign = false;
    let mut prev = Poly::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Poly::zero();
        };
        if piv != k {
            m.swap(piv, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_rem(&prev).0;
            }
        }
        prev = m[k][k].clone();
    }
    if sign {
        -&prev
    } else {
        prev
    }
}

/// A column `v` as `(polys, d)` with `v = polys / d`.
fn clear_column(v: &[RatFun]) -> (Vec<Poly>, Poly) {
    let d = v.iter().fold(Poly::one(), |acc, x| lcm(&acc, x.den()));
    let polys = v.iter().map(|x| x.num() * &d.div_rem(x.den()).0).collect();
    (polys, d)
}

impl RMatrix {
    fn cleared(&self) -> (Vec<Vec<Poly>>, Vec<Poly>) {
        let (cols, ds): (Vec<_>, Vec<_>) = (0..self.cols()).map(|j| clear_column(&self.col(j))).unzip();
        let rows = (0..self.rows()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        (rows, ds)
    }

    /// Determinant with denominators cleared column by column.
    pub fn det_fraction_free(&self) -> RatFun {
        assert!(self.is_square());
        let (m, ds) = self.cleared();
        let den = ds.iter().fold(Poly::one(), |acc, d| &acc * d);
        RatFun::new(bareiss_det(m), den).unwrap()
    }

    /// Cramer's rule on the cleared matrix.
    pub fn solve_fraction_free(&self, b: &[RatFun]) -> Result<Vec<RatFun>> {
        if !self.is_square() || b.len() != self.rows() {
            return Err(Error::Dimension("solve".into()));
        }
        let (m, ds) = self.cleared();
        let det = bareiss_det(m.clone());
        if det.is_zero() {
            return Err(Error::SingularSystem);
        }
        let (bp, db) = clear_column(b);
        (0..self.cols())
            .map(|j| {
                let mut mj = m.clone();
                for (row, x) in mj.iter_mut().zip(&bp) {
                    row[j] = x.clone();
                }
                RatFun::new(&bareiss_det(mj) * &ds[j], &det * &db)
            })
            .collect()
    }
}
pub type RMatrix = Matrix<RatFun>;
