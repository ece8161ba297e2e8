//! Matrix storage and linear algebra.
//!
//! Operator sections are held in two forms: [`Mat`] stores high-precision
//! entries densely (column major) and [`Banded`] wraps a `Mat` with bandwidth
//! metadata `(lower, upper)` in the convention `entry(i, j) = 0` whenever
//! `i - j > lower` or `j - i > upper`. Products of finite sections of banded
//! infinite matrices corrupt the trailing rows and columns, so builders
//! over-allocate by the total bandwidth and truncate; [`Banded::mul`] skips
//! structural zeros but computes plain finite-section products.
//!
//! The `f64` side ([`DMat`], [`Lu`]) carries the final downcast solves and
//! condition-number estimates.

use crate::{Error, Result};
use rug::Float;

/// Dense column-major matrix of uniform-precision floats.
#[derive(Clone, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    bits: u32,
    data: Vec<Float>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, bits: u32) -> Self {
        let data = vec![Float::with_val(bits, 0); rows * cols];
        Self {
            rows,
            cols,
            bits,
            data,
        }
    }

    pub fn identity(n: usize, bits: u32) -> Self {
        let mut m = Self::zeros(n, n, bits);
        for i in 0..n {
            m.set(i, i, Float::with_val(bits, 1));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Float {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Float) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[j * self.rows + i]
    }

    pub fn col(&self, j: usize) -> &[Float] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Leading `r x c` block.
    pub fn leading(&self, r: usize, c: usize) -> Mat {
        assert!(r <= self.rows && c <= self.cols);
        let mut out = Mat::zeros(r, c, self.bits);
        for j in 0..c {
            for i in 0..r {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn scale(&mut self, s: &Float) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_assign(&mut self, other: &Mat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &Mat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
    }

    /// Plain dense product (used where no band structure is known).
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let bits = self.bits.max(other.bits);
        let mut out = Mat::zeros(self.rows, other.cols, bits);
        for j in 0..other.cols {
            for k in 0..self.cols {
                let bkj = other.get(k, j);
                if bkj.is_zero() {
                    continue;
                }
                for i in 0..self.rows {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    *out.get_mut(i, j) += Float::with_val(bits, a * bkj);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[Float]) -> Vec<Float> {
        assert_eq!(self.cols, x.len());
        let mut out = vec![Float::with_val(self.bits, 0); self.rows];
        for j in 0..self.cols {
            if x[j].is_zero() {
                continue;
            }
            for i in 0..self.rows {
                let a = self.get(i, j);
                if !a.is_zero() {
                    out[i] += Float::with_val(self.bits, a * &x[j]);
                }
            }
        }
        out
    }

    /// Max-abs entry as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.clone().abs().to_f64())
            .fold(0.0, f64::max)
    }

    /// Entrywise max-abs difference against another section.
    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut worst = 0.0f64;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            let d = Float::with_val(self.bits.max(other.bits), a - b)
                .abs()
                .to_f64();
            worst = worst.max(d);
        }
        worst
    }

    /// Downcast to an `f64` matrix, rounding entries to nearest.
    pub fn to_f64(&self) -> DMat {
        let mut out = DMat::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.set(i, j, self.get(i, j).to_f64());
            }
        }
        out
    }
}

/// Back-substitution on the leading `n x n` upper-triangular section of `u`.
///
/// Solves `U y = b` where `b` has length `n`; reports the offending column on
/// a vanishing pivot.
pub fn solve_upper_triangular(u: &Mat, b: &[Float], n: usize, col_id: usize) -> Result<Vec<Float>> {
    assert!(n <= u.rows() && n <= u.cols() && b.len() >= n);
    let bits = u.bits();
    let mut y = vec![Float::with_val(bits, 0); n];
    for ii in (0..n).rev() {
        let mut acc = Float::with_val(bits, &b[ii]);
        for kk in ii + 1..n {
            if !y[kk].is_zero() {
                acc -= Float::with_val(bits, u.get(ii, kk) * &y[kk]);
            }
        }
        let pivot = u.get(ii, ii);
        if pivot.is_zero() {
            return Err(Error::SingularColumn {
                col: col_id,
                pivot: 0.0,
            });
        }
        y[ii] = acc / pivot;
    }
    Ok(y)
}

/// Bandwidth-annotated matrix section.
///
/// `entry(i, j) = 0` whenever `i - j > lower` or `j - i > upper`.
#[derive(Clone, Debug)]
pub struct Banded {
    pub mat: Mat,
    pub lower: usize,
    pub upper: usize,
}

impl Banded {
    pub fn identity(n: usize, bits: u32) -> Self {
        Self {
            mat: Mat::identity(n, bits),
            lower: 0,
            upper: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.mat.rows()
    }

    pub fn cols(&self) -> usize {
        self.mat.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        self.mat.get(i, j)
    }

    /// Band-aware product; bandwidths add.
    pub fn mul(&self, other: &Banded) -> Banded {
        assert_eq!(self.cols(), other.rows());
        let bits = self.mat.bits().max(other.mat.bits());
        let rows = self.rows();
        let cols = other.cols();
        let lower = self.lower + other.lower;
        let upper = self.upper + other.upper;
        let mut out = Mat::zeros(rows, cols, bits);
        for j in 0..cols {
            let i_lo = j.saturating_sub(upper);
            let i_hi = (j + lower).min(rows.saturating_sub(1));
            for i in i_lo..=i_hi {
                let k_lo = i
                    .saturating_sub(self.lower)
                    .max(j.saturating_sub(other.upper));
                let k_hi = (i + self.upper).min(j + other.lower).min(self.cols() - 1);
                if k_lo > k_hi {
                    continue;
                }
                let mut acc = Float::with_val(bits, 0);
                for k in k_lo..=k_hi {
                    acc += Float::with_val(bits, self.get(i, k) * other.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        Banded {
            mat: out,
            lower,
            upper,
        }
    }

    /// Integer power via repeated multiplication.
    pub fn pow(&self, e: usize) -> Banded {
        assert_eq!(self.rows(), self.cols());
        let mut acc = Banded::identity(self.rows(), self.mat.bits());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn add(&self, other: &Banded) -> Banded {
        assert_eq!(self.rows(), other.rows());
        assert_eq!(self.cols(), other.cols());
        let mut mat = self.mat.clone();
        mat.add_assign(&other.mat);
        Banded {
            mat,
            lower: self.lower.max(other.lower),
            upper: self.upper.max(other.upper),
        }
    }

    pub fn sub(&self, other: &Banded) -> Banded {
        assert_eq!(self.rows(), other.rows());
        assert_eq!(self.cols(), other.cols());
        let mut mat = self.mat.clone();
        mat.sub_assign(&other.mat);
        Banded {
            mat,
            lower: self.lower.max(other.lower),
            upper: self.upper.max(other.upper),
        }
    }

    pub fn scale(&mut self, s: &Float) {
        self.mat.scale(s);
    }

    pub fn leading(&self, r: usize, c: usize) -> Banded {
        Banded {
            mat: self.mat.leading(r, c),
            lower: self.lower,
            upper: self.upper,
        }
    }

    /// Checks the structural zero pattern exactly.
    pub fn assert_band_pattern(&self) -> bool {
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                let inside = i <= j + self.lower && j <= i + self.upper;
                if !inside && !self.get(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Dense `f64` matrix, column major.
#[derive(Clone, Debug)]
pub struct DMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for j in 0..self.cols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for i in 0..self.rows {
                out[i] += self.get(i, j) * xj;
            }
        }
        out
    }

    pub fn mul_vec_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for j in 0..self.cols {
            let mut acc = 0.0;
            for i in 0..self.rows {
                acc += self.get(i, j) * x[i];
            }
            out[j] = acc;
        }
        out
    }
}

/// Row-pivoted LU factorization of a square `f64` matrix.
pub struct Lu {
    lu: DMat,
    piv: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &DMat) -> Result<Lu> {
        assert_eq!(a.rows(), a.cols());
        let n = a.rows();
        let mut lu = a.clone();
        let mut piv = Vec::with_capacity(n);
        for k in 0..n {
            let mut p = k;
            let mut best = lu.get(k, k).abs();
            for i in k + 1..n {
                let v = lu.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(format!(
                    "LU pivot {best:e} at step {k} of {n}"
                )));
            }
            piv.push(p);
            if p != k {
                for j in 0..n {
                    let t = lu.get(k, j);
                    lu.set(k, j, lu.get(p, j));
                    lu.set(p, j, t);
                }
            }
            let d = lu.get(k, k);
            for i in k + 1..n {
                let m = lu.get(i, k) / d;
                lu.set(i, k, m);
                if m != 0.0 {
                    for j in k + 1..n {
                        let v = lu.get(i, j) - m * lu.get(k, j);
                        lu.set(i, j, v);
                    }
                }
            }
        }
        Ok(Lu { lu, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            for i in k + 1..n {
                x[i] -= self.lu.get(i, k) * x[k];
            }
        }
        for k in (0..n).rev() {
            x[k] /= self.lu.get(k, k);
            for i in 0..k {
                x[i] -= self.lu.get(i, k) * x[k];
            }
        }
        x
    }

    /// Solves `A^T x = b` using the same factorization.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut x = b.to_vec();
        // A = P L U, A^T = U^T L^T P^T: forward with U^T, back with L^T,
        // then undo the row permutation.
        for k in 0..n {
            for i in 0..k {
                x[k] -= self.lu.get(i, k) * x[i];
            }
            x[k] /= self.lu.get(k, k);
        }
        for k in (0..n).rev() {
            for i in k + 1..n {
                x[k] -= self.lu.get(i, k) * x[i];
            }
        }
        for k in (0..n).rev() {
            x.swap(k, self.piv[k]);
        }
        x
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

fn seed_vector(n: usize) -> Vec<f64> {
    // Deterministic and unlikely to be orthogonal to an extremal vector.
    let mut v: Vec<f64> = (0..n).map(|i| (0.7 + (i as f64) * 1.139).sin()).collect();
    normalize(&mut v);
    v
}

/// Largest singular value by power iteration on `A^T A`.
pub fn sigma_max(a: &DMat, iters: usize) -> f64 {
    let mut v = seed_vector(a.cols());
    let mut s = 0.0;
    for _ in 0..iters {
        let mut w = a.mul_vec_transpose(&a.mul_vec(&v));
        let lambda = normalize(&mut w);
        let s_new = lambda.sqrt();
        let done = s > 0.0 && (s_new - s).abs() <= 1e-12 * s_new;
        s = s_new;
        v = w;
        if done {
            break;
        }
    }
    s
}

/// Smallest singular value by inverse iteration through an LU factorization.
pub fn sigma_min(a: &DMat, iters: usize) -> Result<f64> {
    let lu = Lu::factor(a)?;
    let mut v = seed_vector(a.cols());
    let mut lambda_inv = 0.0;
    for _ in 0..iters {
        // w = (A^T A)^{-1} v = A^{-1} A^{-T} v
        let mut w = lu.solve(&lu.solve_transpose(&v));
        let l = normalize(&mut w);
        let done = lambda_inv > 0.0 && (l - lambda_inv).abs() <= 1e-12 * l;
        lambda_inv = l;
        v = w;
        if done {
            break;
        }
    }
    Ok(1.0 / lambda_inv.sqrt())
}

/// 2-norm condition number estimate of a square matrix.
pub fn cond2_estimate(a: &DMat) -> Result<f64> {
    let smax = sigma_max(a, 400);
    let smin = sigma_min(a, 400)?;
    Ok(smax / smin)
}
