//! Small dense complex matrices and a few real helpers.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};
#[allow(unused_imports)]
use num_traits::Float;


use crate::{Error, Result, C64};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, rows, cols });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `selfᵀ v`.
    pub fn tmul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)] * v[i]).sum())
            .collect()
    }

    pub fn real_part(&self) -> RMatrix {
        RMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }

    pub fn imag_part(&self) -> RMatrix {
        RMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].im)
    }

    fn lu(&self) -> Option<(Self, Vec<usize>, f64)> {
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / piv;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn det(&self) -> C64 {
        assert!(self.is_square());
        match self.lu() {
            None => C64::new(0.0, 0.0),
            Some((lu, _, sign)) => {
                let mut d = C64::new(sign, 0.0);
                for i in 0..self.rows {
                    d *= lu[(i, i)];
                }
                d
            }
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let (lu, perm, _) = self.lu()?;
        let mut inv = Self::zeros(n, n);
        for col in 0..n {
            let mut x: Vec<C64> = (0..n)
                .map(|i| if perm[i] == col { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
                .collect();
            for i in 0..n {
                for k in 0..i {
                    let t = lu[(i, k)] * x[k];
                    x[i] -= t;
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let t = lu[(i, k)] * x[k];
                    x[i] -= t;
                }
                x[i] /= lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Some(inv)
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// max |self - other|.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows);
        CMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RMatrix { n_rows: rows, n_cols: cols, data }
    }

    pub fn rows(&self) -> usize {
        self.n_rows
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| (0..self.n_cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Inverse by Gauss-Jordan with partial pivoting.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n_rows;
        let mut a = self.clone();
        let mut inv = RMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 });
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[(x, k)].abs().partial_cmp(&a[(y, k)].abs()).unwrap())?;
            if a[(p, k)] == 0.0 {
                return None;
            }
            for j in 0..n {
                a.data.swap(k * n + j, p * n + j);
                inv.data.swap(k * n + j, p * n + j);
            }
            let piv = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= piv;
                inv[(k, j)] /= piv;
            }
            for i in 0..n {
                if i != k {
                    let f = a[(i, k)];
                    if f != 0.0 {
                        for j in 0..n {
                            let t = a[(k, j)];
                            a[(i, j)] -= f * t;
                            let t = inv[(k, j)];
                            inv[(i, j)] -= f * t;
                        }
                    }
                }
            }
        }
        Some(inv)
    }

    /// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let n = self.n_rows;
        let mut a = self.clone();
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += a[(i, j)] * a[(i, j)];
                    }
                }
            }
            if off < 1e-30 * (1.0 + self.data.iter().map(|x| x * x).sum::<f64>()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let cs = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * cs;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = cs * akp - sn * akq;
                        a[(k, q)] = sn * akp + cs * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = cs * apk - sn * aqk;
                        a[(q, k)] = sn * apk + cs * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ev
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// Neumaier compensated summation of complex numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: C64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Solve the complex linear system `m x = b`.
pub fn solve(m: &CMatrix, b: &[C64]) -> Option<Vec<C64>> {
    Some(m.inverse()?.mul_vec(b))
}
