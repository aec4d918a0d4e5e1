//! Dense and banded factorizations used by the determinant engines.
//!
//! Determinants are never formed directly: every routine accumulates
//! `ln |pivot|` so windows with thousands of elements stay in range.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Pivots below this magnitude are treated as exact zeros.
pub const SINGULAR_PIVOT: f64 = 1e-300;

/// Scalar field for the floating-point factorizations.
pub trait Field:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn abs(self) -> f64;
    fn conj(self) -> Self;
    fn from_real(x: f64) -> Self;
    fn real(self) -> f64;
    fn sqrt_real(x: f64) -> Self {
        Self::from_real(x.sqrt())
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn conj(self) -> Self {
        self
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn real(self) -> f64 {
        self
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn real(self) -> f64 {
        self.re
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Domain("ragged matrix rows".into()));
        }
        Ok(DenseMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
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

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Lower and upper bandwidth.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)] != T::zero() {
                    if i > j {
                        kl = kl.max(i - j);
                    } else {
                        ku = ku.max(j - i);
                    }
                }
            }
        }
        (kl, ku)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Square banded matrix: entry `(i, j)` may be nonzero only for
/// `i - kl ≤ j ≤ i + ku`.
#[derive(Clone, Debug)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row `i` holds columns `i - kl ..= i + ku`.
    data: Vec<T>,
}

impl<T: Field> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix {
            n,
            kl,
            ku,
            data: vec![T::zero(); n * (kl + ku + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku || i >= self.n || j >= self.n {
            None
        } else {
            Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Sets an entry; panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let s = self.slot(i, j).expect("entry outside the band");
        self.data[s] = v;
    }

    pub fn is_hermitian(&self) -> bool {
        self.kl == self.ku
            && (0..self.n).all(|i| {
                (i.saturating_sub(self.kl)..=i).all(|j| self.get(i, j) == self.get(j, i).conj())
            })
    }
}

/// `ln |det M|` of a dense square matrix, or `-∞` when singular.
///
/// Hermitian input is first tried with Cholesky; otherwise (or if Cholesky
/// meets a non-positive pivot) LU with partial pivoting is used.
pub fn logabsdet_dense<T: Field>(m: &DenseMatrix<T>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Domain(format!(
            "logabsdet of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if m.is_hermitian() {
        if let Some(v) = cholesky_logdet_dense(m) {
            return Ok(v);
        }
    }
    Ok(DenseLu::factor(m.clone()).logabsdet())
}

pub fn logabsdet_band<T: Field>(m: &BandMatrix<T>) -> f64 {
    if m.is_hermitian() {
        if let Some(v) = cholesky_logdet_band(m) {
            return v;
        }
    }
    BandLu::factor(m).logabsdet()
}

fn cholesky_logdet_dense<T: Field>(m: &DenseMatrix<T>) -> Option<f64> {
    let n = m.rows();
    let mut l = DenseMatrix::<T>::zeros(n, n);
    let mut acc = 0.0;
    for j in 0..n {
        let mut d = m[(j, j)].real();
        for k in 0..j {
            let v = l[(j, k)].abs();
            d -= v * v;
        }
        if d <= SINGULAR_PIVOT || !d.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        acc += ljj.ln();
        l[(j, j)] = T::from_real(ljj);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / T::from_real(ljj);
        }
    }
    Some(2.0 * acc)
}

fn cholesky_logdet_band<T: Field>(m: &BandMatrix<T>) -> Option<f64> {
    let (n, b) = (m.n, m.kl);
    // Row i of L holds columns i - b ..= i.
    let w = b + 1;
    let mut l = vec![T::zero(); n * w];
    let at = |i: usize, j: usize| i * w + (j + b - i);
    let mut acc = 0.0;
    for j in 0..n {
        let lo = j.saturating_sub(b);
        let mut d = m.get(j, j).real();
        for k in lo..j {
            let v = l[at(j, k)].abs();
            d -= v * v;
        }
        if d <= SINGULAR_PIVOT || !d.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        acc += ljj.ln();
        l[at(j, j)] = T::from_real(ljj);
        for i in j + 1..(j + b + 1).min(n) {
            let mut s = m.get(i, j);
            for k in i.saturating_sub(b)..j {
                s = s - l[at(i, k)] * l[at(j, k)].conj();
            }
            l[at(i, j)] = s / T::from_real(ljj);
        }
    }
    Some(2.0 * acc)
}

/// Dense LU with partial pivoting, `PA = LU`.
#[derive(Clone, Debug)]
pub struct DenseLu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
    singular: bool,
}

impl<T: Field> DenseLu<T> {
    pub fn factor(mut a: DenseMatrix<T>) -> Self {
        let n = a.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best < SINGULAR_PIVOT {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let m = a[(i, k)] / pivot;
                a[(i, k)] = m;
                if m != T::zero() {
                    for j in k + 1..n {
                        let v = a[(k, j)];
                        a[(i, j)] = a[(i, j)] - m * v;
                    }
                }
            }
        }
        DenseLu { lu: a, perm, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn logabsdet(&self) -> f64 {
        if self.singular {
            return f64::NEG_INFINITY;
        }
        (0..self.lu.rows()).map(|i| self.lu[(i, i)].abs().ln()).sum()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] = x[i] - self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] = x[i] - self.lu[(i, k)] * x[k];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A* x = b`.
    pub fn solve_adjoint(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i] - self.lu[(k, i)].conj() * y[k];
            }
            y[i] = y[i] / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] = y[i] - self.lu[(k, i)].conj() * y[k];
            }
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// Banded LU with partial pivoting, kept as a sequence of row swaps and
/// elimination steps so the band of `U` only grows to `kl + ku`.
#[derive(Clone, Debug)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    /// Upper bandwidth of `U` (`kl + ku`).
    ub: usize,
    /// Row `i` of `U` holds columns `i ..= i + ub`.
    u: Vec<T>,
    /// `mult[k * kl + (j - 1)]` is the multiplier applied to row `k + j` at step `k`.
    mult: Vec<T>,
    piv: Vec<usize>,
    singular: bool,
}

impl<T: Field> BandLu<T> {
    pub fn factor(a: &BandMatrix<T>) -> Self {
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        let ub = kl + ku;
        // Working rows: row i holds columns i - kl ..= i + ub.
        let w = kl + ub + 1;
        let mut rows = vec![T::zero(); n * w];
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                rows[i * w + (j + kl - i)] = a.get(i, j);
            }
        }
        let idx = |i: usize, j: usize| i * w + (j + kl - i);
        let mut mult = vec![T::zero(); n * kl.max(1)];
        let mut piv: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let (p, best) = (k..=last)
                .map(|i| (i, rows[idx(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            piv[k] = p;
            if best < SINGULAR_PIVOT {
                singular = true;
                continue;
            }
            let hi = (k + ub).min(n - 1);
            if p != k {
                for j in k..=hi {
                    rows.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = rows[idx(k, k)];
            for i in k + 1..=last {
                let m = rows[idx(i, k)] / pivot;
                mult[k * kl + (i - k - 1)] = m;
                rows[idx(i, k)] = T::zero();
                if m != T::zero() {
                    for j in k + 1..=hi {
                        let v = rows[idx(k, j)];
                        let s = idx(i, j);
                        rows[s] = rows[s] - m * v;
                    }
                }
            }
        }
        let mut u = vec![T::zero(); n * (ub + 1)];
        for i in 0..n {
            for j in i..(i + ub + 1).min(n) {
                u[i * (ub + 1) + (j - i)] = rows[idx(i, j)];
            }
        }
        BandLu {
            n,
            kl,
            ub,
            u,
            mult,
            piv,
            singular,
        }
    }

    fn u_at(&self, i: usize, j: usize) -> T {
        self.u[i * (self.ub + 1) + (j - i)]
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn logabsdet(&self) -> f64 {
        if self.singular {
            return f64::NEG_INFINITY;
        }
        (0..self.n).map(|i| self.u_at(i, i).abs().ln()).sum()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let (n, kl) = (self.n, self.kl);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            for i in k + 1..(k + kl + 1).min(n) {
                let m = self.mult[k * kl + (i - k - 1)];
                x[i] = x[i] - m * x[k];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..(i + self.ub + 1).min(n) {
                x[i] = x[i] - self.u_at(i, j) * x[j];
            }
            x[i] = x[i] / self.u_at(i, i);
        }
        x
    }

    pub fn solve_adjoint(&self, b: &[T]) -> Vec<T> {
        let (n, kl) = (self.n, self.kl);
        let mut y = b.to_vec();
        for i in 0..n {
            for k in i.saturating_sub(self.ub)..i {
                y[i] = y[i] - self.u_at(k, i).conj() * y[k];
            }
            y[i] = y[i] / self.u_at(i, i).conj();
        }
        for k in (0..n).rev() {
            for i in k + 1..(k + kl + 1).min(n) {
                let m = self.mult[k * kl + (i - k - 1)];
                y[k] = y[k] - m.conj() * y[i];
            }
            y.swap(k, self.piv[k]);
        }
        y
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_determinant(rows: &[Vec<BigInt>]) -> Result<BigInt> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Domain("determinant of a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(BigInt::from(1));
    }
    let mut a = rows.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign < 0 { -det } else { det })
}

/// Exact rank of an integer matrix (fraction-free elimination).
pub fn exact_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..m {
            if a[i][col].is_zero() {
                continue;
            }
            let (top, here) = (a[rank][col].clone(), a[i][col].clone());
            for j in col..n {
                let v = &a[i][j] * &top - &a[rank][j] * &here;
                a[i][j] = v;
            }
            let g = a[i].iter().fold(BigInt::zero(), |g, x| num_integer::Integer::gcd(&g, x));
            if !g.is_zero() && g.abs() != BigInt::from(1) {
                for x in a[i].iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tridiagonal(n: usize, d: f64, off: f64) -> DenseMatrix<f64> {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = d;
            if i + 1 < n {
                m[(i, i + 1)] = off;
                m[(i + 1, i)] = off;
            }
        }
        m
    }

    fn to_band<T: Field>(m: &DenseMatrix<T>) -> BandMatrix<T> {
        let (kl, ku) = m.bandwidths();
        let mut b = BandMatrix::zeros(m.rows(), kl, ku);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)] != T::zero() {
                    b.set(i, j, m[(i, j)]);
                }
            }
        }
        b
    }

    #[test]
    fn logabsdet_examples() {
        assert_eq!(logabsdet_dense(&DenseMatrix::<f64>::identity(4)).unwrap(), 0.0);
        let d = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_relative_eq!(logabsdet_dense(&d).unwrap(), 6f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(
            logabsdet_dense(&tridiagonal(3, 3.0, 1.0)).unwrap(),
            21f64.ln(),
            epsilon = 1e-14
        );
        let z = DenseMatrix::<f64>::zeros(2, 2);
        assert_eq!(logabsdet_dense(&z).unwrap(), f64::NEG_INFINITY);
        assert!(logabsdet_dense(&DenseMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn large_determinants_do_not_overflow() {
        let m = tridiagonal(3000, 3.0, 1.0);
        let band = to_band(&m);
        let v = logabsdet_band(&band);
        // d_k = 3 d_{k-1} - d_{k-2}; ln d_n ≈ (n+1) ln φ² - ln √5.
        let phi2 = (3.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(v, 3001.0 * phi2.ln() - 5f64.sqrt().ln(), epsilon = 1e-8);
    }

    #[test]
    fn non_hermitian_band_matches_dense() {
        let n = 40;
        let mut m = DenseMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 0.1 * (i as f64).sin();
            if i >= 2 {
                m[(i, i - 2)] = 2.0;
            }
            if i + 1 < n {
                m[(i, i + 1)] = -1.5 + 0.01 * i as f64;
            }
        }
        let band = to_band(&m);
        assert_relative_eq!(
            logabsdet_band(&band),
            logabsdet_dense(&m).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn complex_solves() {
        let m = DenseMatrix::from_rows(&[
            vec![Complex64::new(2.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(-1.0, 0.0)],
        ])
        .unwrap();
        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(2.0, -1.0)];
        let lu = DenseLu::factor(m.clone());
        let x = lu.solve(&b);
        let r = m.mul_vec(&x);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
        let y = lu.solve_adjoint(&b);
        let r = m.conj_transpose().mul_vec(&y);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
        let blu = BandLu::factor(&to_band(&m));
        for (u, v) in blu.solve(&b).iter().zip(&x) {
            assert!((u - v).norm() < 1e-12);
        }
        for (u, v) in blu.solve_adjoint(&b).iter().zip(&y) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn bareiss_examples() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(0), BigInt::from(3)],
        ];
        assert_eq!(bareiss_determinant(&m).unwrap(), BigInt::from(6));
        let s = vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        assert_eq!(bareiss_determinant(&s).unwrap(), BigInt::from(-1));
        assert_eq!(exact_rank(&s), 2);
        let r = vec![
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)],
            vec![BigInt::from(2), BigInt::from(4), BigInt::from(6)],
        ];
        assert_eq!(exact_rank(&r), 1);
    }

    proptest! {
        #[test]
        fn band_and_dense_agree(entries in prop::collection::vec(-3i32..=3, 12 * 12), kl in 0usize..4, ku in 0usize..4) {
            let n = 12;
            let mut m = DenseMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if j + kl >= i && j <= i + ku {
                        m[(i, j)] = entries[i * n + j] as f64;
                    }
                }
            }
            let dense = logabsdet_dense(&m).unwrap();
            let band = logabsdet_band(&to_band(&m));
            if dense.is_finite() && dense > -20.0 {
                prop_assert!((dense - band).abs() < 1e-8, "{dense} vs {band}");
            }
            let exact: Vec<Vec<BigInt>> = (0..n)
                .map(|i| (0..n).map(|j| BigInt::from(m[(i, j)] as i64)).collect())
                .collect();
            let det = bareiss_determinant(&exact).unwrap();
            if !det.is_zero() {
                let ln = num_traits::ToPrimitive::to_f64(&det.abs()).unwrap().ln();
                prop_assert!((ln - dense).abs() < 1e-8 * ln.abs().max(1.0));
            }
        }
    }
}
