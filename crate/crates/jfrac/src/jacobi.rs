//! Classical Jacobi polynomial machinery.
//!
//! Everything here works on finite sections of the infinite operators acting
//! on the Jacobi quasimatrix `P^(alpha,beta)`: the connection matrix `C` to
//! shifted monomials `(1+x)^k` and its inverse, the Gram matrix `M` of
//! monomials under the Jacobi weight, parameter-raising conversions `R`,
//! weight-lowering conversions `L`, the diagonal weighted differentiation `W`
//! and the tridiagonal multiplication by `(1+x)`.
//!
//! Entry formulas for `R`, `L`, `W` come from the standard Jacobi
//! connection/derivative identities; each operator is certified against
//! evaluation, finite-difference and quadrature oracles in the test suite
//! before anything downstream uses it.

use crate::band::{Banded, Mat};
use crate::precision::PrecisionContext;
use crate::{Error, Result};
use rug::Float;

/// Jacobi weight parameters, `alpha, beta > -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::Domain(format!(
                "Jacobi weight requires alpha, beta > -1, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn legendre() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    fn shift(&self, da: f64, db: f64) -> Self {
        Self {
            alpha: self.alpha + da,
            beta: self.beta + db,
        }
    }
}

/// Three-term recurrence coefficients `(A_n, B_n, C_n)` in
/// `P_{n+1} = (A_n x + B_n) P_n - C_n P_{n-1}`, valid for `n >= 1`.
///
/// The `n = 0` step is degenerate when `alpha + beta = -1`; callers take the
/// degree-one polynomial from its closed form instead.
fn recurrence_coeffs(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> (Float, Float, Float) {
    debug_assert!(n >= 1);
    let a = ctx.from_f64(p.alpha);
    let b = ctx.from_f64(p.beta);
    let nf = ctx.from_u64(n as u64);
    let s = Float::with_val(ctx.bits(), &a + &b);
    let two_n_s = ctx.from_u64(2 * n as u64) + &s;
    let denom = ctx.from_u64(2) * (nf.clone() + 1u32) * (nf.clone() + &s + 1u32);
    let an = (two_n_s.clone() + 1u32) * (two_n_s.clone() + 2u32) / denom.clone();
    let bn =
        (a.clone() * &a - b.clone() * &b) * (two_n_s.clone() + 1u32) / (denom.clone() * &two_n_s);
    let cn = (nf.clone() + &a) * (nf.clone() + &b) * (two_n_s.clone() + 2u32) * ctx.from_u64(2)
        / (denom * &two_n_s);
    (an, bn, cn)
}

/// Degree-one Jacobi polynomial, `P_1 = (alpha - beta)/2 + (alpha + beta + 2) x / 2`.
fn degree_one(p: &JacobiParams, x: &Float, ctx: PrecisionContext) -> Float {
    let half = ctx.from_f64(0.5);
    ctx.from_f64(p.alpha - p.beta) * &half + ctx.from_f64(p.alpha + p.beta + 2.0) * half * x
}

/// Evaluates `P_n^(alpha,beta)(x)` by the three-term recurrence.
pub fn jacobi_eval(p: &JacobiParams, n: usize, x: &Float, ctx: PrecisionContext) -> Float {
    if n == 0 {
        return ctx.one();
    }
    let mut prev = ctx.one();
    let mut cur = degree_one(p, x, ctx);
    for k in 1..n {
        let (ak, bk, ck) = recurrence_coeffs(p, k, ctx);
        let next = (ak * x + bk) * &cur - ck * &prev;
        prev = cur;
        cur = ctx.round(&next);
    }
    cur
}

/// Derivative `d/dx P_n^(alpha,beta)(x) = (n+alpha+beta+1)/2 * P_{n-1}^(alpha+1,beta+1)(x)`.
pub fn jacobi_deriv(p: &JacobiParams, n: usize, x: &Float, ctx: PrecisionContext) -> Float {
    if n == 0 {
        return ctx.zero();
    }
    let raised = p.shift(1.0, 1.0);
    let factor = ctx.from_f64((n as f64 + p.alpha + p.beta + 1.0) / 2.0);
    factor * jacobi_eval(&raised, n - 1, x, ctx)
}

/// Clenshaw summation of a Jacobi series `sum c_k P_k^(alpha,beta)(y)`.
pub fn clenshaw(p: &JacobiParams, coeffs: &[Float], y: &Float, ctx: PrecisionContext) -> Float {
    let m = coeffs.len();
    if m == 0 {
        return ctx.zero();
    }
    if m == 1 {
        return ctx.round(&coeffs[0]);
    }
    let mut b1 = ctx.zero();
    let mut b2 = ctx.zero();
    for k in (1..m).rev() {
        let (ak, bk, _) = recurrence_coeffs(p, k, ctx);
        let (_, _, ck1) = recurrence_coeffs(p, k + 1, ctx);
        let next = Float::with_val(ctx.bits(), &coeffs[k]) + (ak * y + bk) * &b1 - ck1 * &b2;
        b2 = b1;
        b1 = next;
    }
    let (_, _, c1) = recurrence_coeffs(p, 1, ctx);
    Float::with_val(ctx.bits(), &coeffs[0]) + degree_one(p, y, ctx) * b1 - c1 * b2
}

/// `f64` fast path of [`jacobi_eval`] for downcast solution evaluation.
pub fn jacobi_eval_f64(p: &JacobiParams, n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (a, b) = (p.alpha, p.beta);
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for k in 1..n {
        let kf = k as f64;
        let s = a + b;
        let two = 2.0 * kf + s;
        let denom = 2.0 * (kf + 1.0) * (kf + s + 1.0);
        let ak = (two + 1.0) * (two + 2.0) / denom;
        let bk = (a * a - b * b) * (two + 1.0) / (denom * two);
        let ck = 2.0 * (kf + a) * (kf + b) * (two + 2.0) / (denom * two);
        let next = (ak * x + bk) * cur - ck * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `f64` Clenshaw summation of a Jacobi series.
pub fn clenshaw_f64(p: &JacobiParams, coeffs: &[f64], y: f64) -> f64 {
    let m = coeffs.len();
    if m == 0 {
        return 0.0;
    }
    if m == 1 {
        return coeffs[0];
    }
    let (a, b) = (p.alpha, p.beta);
    let rec = |k: usize| {
        let kf = k as f64;
        let s = a + b;
        let two = 2.0 * kf + s;
        let denom = 2.0 * (kf + 1.0) * (kf + s + 1.0);
        let ak = (two + 1.0) * (two + 2.0) / denom;
        let bk = (a * a - b * b) * (two + 1.0) / (denom * two);
        let ck = 2.0 * (kf + a) * (kf + b) * (two + 2.0) / (denom * two);
        (ak, bk, ck)
    };
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (1..m).rev() {
        let (ak, bk, _) = rec(k);
        let (_, _, ck1) = rec(k + 1);
        let next = coeffs[k] + (ak * y + bk) * b1 - ck1 * b2;
        b2 = b1;
        b1 = next;
    }
    let (_, _, c1) = rec(1);
    coeffs[0] + (0.5 * (a - b) + 0.5 * (a + b + 2.0) * y) * b1 - c1 * b2
}

/// Connection matrix `C`: `P^(alpha,beta) = M_0 C` with `M_0` the shifted
/// monomials `(1+x)^k`. Upper triangular, `n x n` section.
///
/// Column `n` starts from `C_{0,n} = (-1)^n (beta+1)_n / n!` and descends the
/// column by the entry ratio, avoiding large factorial intermediates.
pub fn connection_matrix(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Banded {
    let bits = ctx.bits();
    let mut mat = Mat::zeros(n, n, bits);
    for col in 0..n {
        let mut head = ctx.one();
        for i in 0..col {
            head *= ctx.from_f64(p.beta + 1.0 + i as f64);
            head /= ctx.from_u64(i as u64 + 1);
        }
        if col % 2 == 1 {
            head = -head;
        }
        let mut entry = head;
        mat.set(0, col, entry.clone());
        for k in 0..col {
            let num = ctx.from_f64(col as f64 + p.alpha + p.beta + 1.0 + k as f64)
                * ctx.from_u64((col - k) as u64);
            let den = ctx.from_u64(2)
                * ctx.from_f64(k as f64 + p.beta + 1.0)
                * ctx.from_u64(k as u64 + 1);
            entry = -(entry * num / den);
            mat.set(k + 1, col, entry.clone());
        }
    }
    Banded {
        mat,
        lower: 0,
        upper: n,
    }
}

/// Single entry `C_{k,n}` of the connection matrix.
pub fn connection_entry(p: &JacobiParams, k: usize, n: usize, ctx: PrecisionContext) -> Float {
    if k > n {
        return ctx.zero();
    }
    // (-1)^(n-k) (k+beta+1)_{n-k} (n+alpha+beta+1)_k / (2^k (n-k)! k!)
    let mut v = ctx.one();
    for i in 0..(n - k) {
        v *= ctx.from_f64(k as f64 + p.beta + 1.0 + i as f64);
        v /= ctx.from_u64(i as u64 + 1);
    }
    for i in 0..k {
        v *= ctx.from_f64(n as f64 + p.alpha + p.beta + 1.0 + i as f64);
        v /= ctx.from_u64(2 * (i as u64 + 1));
    }
    if (n - k) % 2 == 1 {
        v = -v;
    }
    v
}

/// Gram matrix of shifted monomials under the Jacobi weight:
/// `M_{i,j} = 2^(alpha+beta+i+j+1) B(beta+i+j+1, alpha+1)`.
pub fn gram_matrix(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Result<Mat> {
    let mut m = Mat::zeros(n, n, ctx.bits());
    for j in 0..n {
        for i in 0..=j {
            let s = (i + j) as f64;
            let power = ctx.exp2(&ctx.from_f64(p.alpha + p.beta + s + 1.0));
            let b = ctx.beta(
                &ctx.from_f64(p.beta + s + 1.0),
                &ctx.from_f64(p.alpha + 1.0),
            )?;
            let v = power * b;
            m.set(i, j, v.clone());
            if i != j {
                m.set(j, i, v);
            }
        }
    }
    Ok(m)
}

/// Squared norms of the Jacobi polynomials (diagonal of the quasimatrix Gram
/// matrix), from the classical closed form.
pub fn jacobi_norms(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Result<Vec<Float>> {
    let mut out = Vec::with_capacity(n);
    let pref = ctx.exp2(&ctx.from_f64(p.alpha + p.beta + 1.0));
    for k in 0..n {
        let kf = k as f64;
        let h = if k == 0 {
            // (2n+alpha+beta+1) Gamma(n+alpha+beta+1) degenerates at
            // alpha+beta = -1; the n = 0 norm reduces to a beta function.
            pref.clone()
                * ctx.beta(&ctx.from_f64(p.alpha + 1.0), &ctx.from_f64(p.beta + 1.0))?
        } else {
            let ga = ctx.gamma(&ctx.from_f64(kf + p.alpha + 1.0))?;
            let gb = ctx.gamma(&ctx.from_f64(kf + p.beta + 1.0))?;
            let gs = ctx.gamma(&ctx.from_f64(kf + p.alpha + p.beta + 1.0))?;
            let fact = ctx.gamma(&ctx.from_f64(kf + 1.0))?;
            pref.clone() * ga * gb / (ctx.from_f64(2.0 * kf + p.alpha + p.beta + 1.0) * gs * fact)
        };
        out.push(h);
    }
    Ok(out)
}

/// Inverse connection matrix via `C^{-1} = (||P||^2)^{-1} C^T M`, truncated
/// to an upper-triangular `n x n` section.
pub fn connection_inverse(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Result<Banded> {
    let c = connection_matrix(p, n, ctx);
    let m = gram_matrix(p, n, ctx)?;
    let h = jacobi_norms(p, n, ctx)?;
    let bits = ctx.bits();
    let mut inv = Mat::zeros(n, n, bits);
    for j in 0..n {
        for i in 0..=j {
            let mut acc = Float::with_val(bits, 0);
            for t in 0..=i {
                acc += Float::with_val(bits, c.get(t, i) * m.get(t, j));
            }
            inv.set(i, j, acc / &h[i]);
        }
    }
    Ok(Banded {
        mat: inv,
        lower: 0,
        upper: n,
    })
}

fn r_step_beta(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Banded {
    // P^(a,b) = P^(a,b+1) R, bandwidths (0,1).
    let bits = ctx.bits();
    let mut mat = Mat::zeros(n, n, bits);
    for col in 0..n {
        let cf = col as f64;
        let denom = 2.0 * cf + p.alpha + p.beta + 1.0;
        if col == 0 && denom == 0.0 {
            mat.set(0, 0, ctx.one());
            continue;
        }
        mat.set(
            col,
            col,
            ctx.from_f64(cf + p.alpha + p.beta + 1.0) / ctx.from_f64(denom),
        );
        if col > 0 {
            mat.set(
                col - 1,
                col,
                ctx.from_f64(cf + p.alpha) / ctx.from_f64(denom),
            );
        }
    }
    Banded {
        mat,
        lower: 0,
        upper: 1,
    }
}

fn r_step_alpha(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Banded {
    // P^(a,b) = P^(a+1,b) R, bandwidths (0,1).
    let bits = ctx.bits();
    let mut mat = Mat::zeros(n, n, bits);
    for col in 0..n {
        let cf = col as f64;
        let denom = 2.0 * cf + p.alpha + p.beta + 1.0;
        if col == 0 && denom == 0.0 {
            mat.set(0, 0, ctx.one());
            continue;
        }
        mat.set(
            col,
            col,
            ctx.from_f64(cf + p.alpha + p.beta + 1.0) / ctx.from_f64(denom),
        );
        if col > 0 {
            mat.set(
                col - 1,
                col,
                -ctx.from_f64(cf + p.beta) / ctx.from_f64(denom),
            );
        }
    }
    Banded {
        mat,
        lower: 0,
        upper: 1,
    }
}

fn l_step_beta(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Banded {
    // (1+x) P^(a,b+1) = P^(a,b) L, bandwidths (1,0).
    let bits = ctx.bits();
    let mut mat = Mat::zeros(n, n, bits);
    for col in 0..n {
        let cf = col as f64;
        let denom = ctx.from_f64(2.0 * cf + p.alpha + p.beta + 2.0);
        mat.set(
            col,
            col,
            ctx.from_f64(2.0 * (cf + p.beta + 1.0)) / denom.clone(),
        );
        if col + 1 < n {
            mat.set(col + 1, col, ctx.from_f64(2.0 * (cf + 1.0)) / denom);
        }
    }
    Banded {
        mat,
        lower: 1,
        upper: 0,
    }
}

fn l_step_alpha(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Banded {
    // (1-x) P^(a+1,b) = P^(a,b) L, bandwidths (1,0).
    let bits = ctx.bits();
    let mut mat = Mat::zeros(n, n, bits);
    for col in 0..n {
        let cf = col as f64;
        let denom = ctx.from_f64(2.0 * cf + p.alpha + p.beta + 2.0);
        mat.set(
            col,
            col,
            ctx.from_f64(2.0 * (cf + p.alpha + 1.0)) / denom.clone(),
        );
        if col + 1 < n {
            mat.set(col + 1, col, -ctx.from_f64(2.0 * (cf + 1.0)) / denom);
        }
    }
    Banded {
        mat,
        lower: 1,
        upper: 0,
    }
}

/// Conversion matrix `R`: `P^(alpha,beta) = P^(alpha+k,beta+j) R`, with
/// bandwidths `(0, k+j)`. The leading `n x n` section is exact.
pub fn conversion_r(
    p: &JacobiParams,
    k: usize,
    j: usize,
    n: usize,
    ctx: PrecisionContext,
) -> Banded {
    let mut acc = Banded::identity(n, ctx.bits());
    let mut cur = *p;
    for _ in 0..j {
        acc = r_step_beta(&cur, n, ctx).mul(&acc);
        cur = cur.shift(0.0, 1.0);
    }
    for _ in 0..k {
        acc = r_step_alpha(&cur, n, ctx).mul(&acc);
        cur = cur.shift(1.0, 0.0);
    }
    acc
}

/// Weighted conversion matrix `L`:
/// `(1-x)^k (1+x)^j P^(alpha+k,beta+j) = P^(alpha,beta) L`, bandwidths
/// `(k+j, 0)`. The leading `n x n` section is exact.
pub fn weighted_conversion_l(
    p: &JacobiParams,
    k: usize,
    j: usize,
    n: usize,
    ctx: PrecisionContext,
) -> Banded {
    let mut acc = Banded::identity(n, ctx.bits());
    let mut cur = *p;
    for _ in 0..j {
        acc = acc.mul(&l_step_beta(&cur, n, ctx));
        cur = cur.shift(0.0, 1.0);
    }
    for _ in 0..k {
        acc = acc.mul(&l_step_alpha(&cur, n, ctx));
        cur = cur.shift(1.0, 0.0);
    }
    acc
}

/// Weighted differentiation `W`: with `params = (alpha, beta)`,
/// `D[(1+x)^(beta+1) P^(alpha,beta+1)] = (1+x)^beta P^(alpha+1,beta) W`,
/// where `W` is diagonal with entries `n + beta + 1`.
pub fn weighted_diff_w(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Vec<Float> {
    (0..n)
        .map(|k| ctx.from_f64(k as f64 + p.beta + 1.0))
        .collect()
}

/// Multiplication by `(1+x)` in the `P^(alpha,beta)` basis:
/// `(1+x) P = P * (L R)`, tridiagonal with bandwidths `(1,1)`.
/// The leading `n x n` section is exact.
pub fn mult_one_plus_x(p: &JacobiParams, n: usize, ctx: PrecisionContext) -> Banded {
    let l = l_step_beta(p, n, ctx);
    let r = r_step_beta(p, n, ctx);
    l.mul(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::ulp_distance;
    use proptest::prelude::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256)
    }

    #[test]
    fn eval_degree_zero_and_one() {
        let c = ctx();
        let p = JacobiParams::legendre();
        for x in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let v = jacobi_eval(&p, 0, &c.from_f64(x), c);
            assert_eq!(v.to_f64(), 1.0);
        }
        let v = jacobi_eval(&p, 1, &c.from_f64(0.5), c);
        assert!((v.to_f64() - 0.5).abs() < 1e-70);
    }

    #[test]
    fn eval_at_right_endpoint() {
        // P_n^(a,b)(1) = (a+1)_n / n!; for Legendre this is 1.
        let c = ctx();
        let p = JacobiParams::legendre();
        let v = jacobi_eval(&p, 5, &c.one(), c);
        assert!(ulp_distance(&v, &c.one(), 256) <= 8.0);

        let p2 = JacobiParams::new(1.5, -0.5).unwrap();
        let expect = c.from_f64(2.5 * 3.5 * 4.5 / 6.0);
        let v3 = jacobi_eval(&p2, 3, &c.one(), c);
        assert!(ulp_distance(&v3, &expect, 256) <= 8.0);
    }

    #[test]
    fn chebyshev_case_handles_degenerate_recurrence() {
        // alpha = beta = -1/2: P_n is proportional to cos(n arccos x).
        let c = ctx();
        let p = JacobiParams::new(-0.5, -0.5).unwrap();
        let x = c.from_f64(0.3);
        for n in 0..12usize {
            let v = jacobi_eval(&p, n, &x, c);
            let mut scale = c.one();
            for i in 0..n {
                scale *= c.from_f64(0.5 + i as f64);
                scale /= c.from_u64(i as u64 + 1);
            }
            let t = (c.from_f64(0.3).acos() * c.from_u64(n as u64)).cos();
            let expect = scale * t;
            let d = Float::with_val(256, &v - &expect).abs().to_f64();
            assert!(d < 1e-70, "n = {n}: {} vs {}", v.to_f64(), expect.to_f64());
        }
    }

    #[test]
    fn clenshaw_matches_direct_summation() {
        let c = ctx();
        let p = JacobiParams::new(0.5, -0.25).unwrap();
        let coeffs: Vec<Float> = (0..20)
            .map(|k| c.from_f64(1.0 / (1.0 + k as f64 * k as f64)))
            .collect();
        let y = c.from_f64(-0.37);
        let direct = coeffs
            .iter()
            .enumerate()
            .fold(c.zero(), |acc, (k, ck)| acc + ck * jacobi_eval(&p, k, &y, c));
        let fast = clenshaw(&p, &coeffs, &y, c);
        assert!(ulp_distance(&fast, &direct, 256) <= 32.0);
        let coeffs64: Vec<f64> = coeffs.iter().map(|v| v.to_f64()).collect();
        let f = clenshaw_f64(&p, &coeffs64, -0.37);
        assert!((f - direct.to_f64()).abs() < 1e-13);
    }

    #[test]
    fn connection_first_column_values() {
        let c = ctx();
        let p = JacobiParams::legendre();
        let cm = connection_matrix(&p, 6, c);
        // C_{0,0} = 1 for any parameters; column 1 of Legendre is (-1, 1),
        // reconstructing P_1 = -1 + (1+x) = x.
        assert_eq!(cm.get(0, 0).to_f64(), 1.0);
        assert_eq!(cm.get(0, 1).to_f64(), -1.0);
        assert_eq!(cm.get(1, 1).to_f64(), 1.0);
        assert!(cm.assert_band_pattern());

        let pc = JacobiParams::new(0.75, -0.25).unwrap();
        let cmc = connection_matrix(&pc, 6, c);
        assert_eq!(cmc.get(0, 0).to_f64(), 1.0);
    }

    #[test]
    fn connection_entries_match_closed_form() {
        let c = ctx();
        let p = JacobiParams::new(-0.5, 1.5).unwrap();
        let cm = connection_matrix(&p, 9, c);
        for n in 0..9 {
            for k in 0..=n {
                let direct = connection_entry(&p, k, n, c);
                let d = Float::with_val(256, cm.get(k, n) - &direct).abs().to_f64();
                let scale = direct.to_f64().abs().max(1.0);
                assert!(d <= 1e-70 * scale, "entry ({k},{n})");
            }
        }
    }

    #[test]
    fn connection_reconstructs_polynomial_values() {
        // P_n(x) = sum_k C_{k,n} (1+x)^k at x = 0.3, to <= 10 ulp at 256 bits.
        // The monomial sum cancels ~2^25 of its working magnitude, so the
        // reconstruction carries guard bits before rounding back to 256.
        let c = ctx();
        let guard = PrecisionContext::new(256 + 64);
        for (a, b) in [(0.0, 0.0), (0.5, 0.5), (-0.5, 0.25), (1.0, 2.0)] {
            let p = JacobiParams::new(a, b).unwrap();
            let n = 16;
            let cm = connection_matrix(&p, n + 1, guard);
            let x = guard.from_f64(0.3);
            let one_plus = guard.one() + &x;
            let direct = jacobi_eval(&p, n, &c.from_f64(0.3), c);
            let mut acc = guard.zero();
            let mut power = guard.one();
            for k in 0..=n {
                acc += cm.get(k, n) * &power;
                power *= &one_plus;
            }
            let acc = c.round(&acc);
            if (a, b) == (0.0, 0.0) {
                assert!(
                    ulp_distance(&acc, &direct, 256) <= 10.0,
                    "Legendre: {} vs {}",
                    acc.to_f64(),
                    direct.to_f64()
                );
            } else {
                // Away from Legendre, x = 0.3 can sit near a root of P_16,
                // where relative ulps lose meaning; compare on the O(1)
                // recurrence scale instead.
                let diff = Float::with_val(320, &acc - &direct).abs().to_f64();
                let tol = 32.0 * crate::precision::eps(256).to_f64();
                assert!(diff <= tol, "(a,b) = ({a},{b}): diff {diff:e}");
            }
        }
    }

    #[test]
    fn gram_matrix_legendre_low_entries() {
        let c = ctx();
        let p = JacobiParams::legendre();
        let m = gram_matrix(&p, 4, c).unwrap();
        assert!(ulp_distance(m.get(0, 0), &c.from_u64(2), 256) <= 4.0);
        assert!(ulp_distance(m.get(0, 1), &c.from_u64(2), 256) <= 4.0);
        let expect = c.from_u64(8) / c.from_u64(3);
        assert!(ulp_distance(m.get(1, 1), &expect, 256) <= 4.0);
    }

    #[test]
    fn norms_match_ctmc_diagonalization() {
        // C^T M C is diagonal and equals the closed-form squared norms.
        let c = ctx();
        for (a, b) in [
            (0.0, 0.0),
            (0.5, 0.5),
            (-0.5, -0.5),
            (0.5, -0.5),
            (-0.5, 0.5),
            (1.0, 2.0),
        ] {
            let p = JacobiParams::new(a, b).unwrap();
            let n = 20;
            let cm = connection_matrix(&p, n, c);
            let m = gram_matrix(&p, n, c).unwrap();
            let h = jacobi_norms(&p, n, c).unwrap();
            let mc = m.mul(&cm.mat);
            let mut worst_off = 0.0f64;
            let mut worst_diag = 0.0f64;
            for jj in 0..n {
                for ii in 0..n {
                    let mut acc = Float::with_val(256, 0);
                    for t in 0..n {
                        acc += Float::with_val(256, cm.get(t, ii) * mc.get(t, jj));
                    }
                    if ii == jj {
                        let rel = Float::with_val(256, &acc - &h[ii]).abs() / h[ii].clone();
                        worst_diag = worst_diag.max(rel.to_f64());
                    } else {
                        let rel = acc.clone().abs() / (h[ii].clone() * &h[jj]).sqrt();
                        worst_off = worst_off.max(rel.to_f64());
                    }
                }
            }
            assert!(worst_diag < 1e-25, "(a,b)=({a},{b}): diag {worst_diag:e}");
            assert!(worst_off < 1e-20, "(a,b)=({a},{b}): off {worst_off:e}");
        }
    }

    #[test]
    fn legendre_norms_closed_form() {
        let c = ctx();
        let p = JacobiParams::legendre();
        let h = jacobi_norms(&p, 10, c).unwrap();
        assert!(ulp_distance(&h[0], &c.from_u64(2), 256) <= 4.0);
        for (k, hk) in h.iter().enumerate() {
            let expect = c.from_u64(2) / c.from_u64(2 * k as u64 + 1);
            assert!(ulp_distance(hk, &expect, 256) <= 8.0);
        }
    }

    #[test]
    fn connection_inverse_is_inverse() {
        let c = ctx();
        for (a, b) in [(0.0, 0.0), (-0.5, -0.5), (1.0, 2.0)] {
            let p = JacobiParams::new(a, b).unwrap();
            let n = 20;
            let cm = connection_matrix(&p, n, c);
            let ci = connection_inverse(&p, n, c).unwrap();
            let prod = cm.mul(&ci);
            for jj in 0..n {
                for ii in 0..n {
                    let expect = if ii == jj { 1.0 } else { 0.0 };
                    let d = (prod.get(ii, jj).to_f64() - expect).abs();
                    assert!(d < 1e-20, "(a,b)=({a},{b}) entry ({ii},{jj}): {d:e}");
                }
            }
            assert_eq!(ci.get(0, 0).to_f64(), 1.0);
            for ii in 1..n {
                assert_eq!(ci.get(ii, 0).to_f64(), 0.0);
            }
        }
    }

    #[test]
    fn scaled_inverse_columns_positive_and_below_one() {
        // Columns of the inverse of the 2-scaled connection matrix are the
        // Jacobi coefficients of ((1+x)/2)^n: strictly positive, below one.
        let c = ctx();
        let p = JacobiParams::legendre();
        let n = 16;
        let ci = connection_inverse(&p, n, c).unwrap();
        // Column 0 is e_0 exactly; columns n >= 1 expand ((1+x)/2)^n, whose
        // Jacobi coefficients are strictly inside (0, 1).
        assert_eq!(ci.get(0, 0).to_f64(), 1.0);
        for jj in 1..n {
            for ii in 0..=jj {
                let v = Float::with_val(256, ci.get(ii, jj)) / c.exp2(&c.from_u64(jj as u64));
                let vf = v.to_f64();
                assert!(vf > 0.0, "entry ({ii},{jj}) = {vf}");
                assert!(vf < 1.0, "entry ({ii},{jj}) = {vf}");
            }
        }
    }

    #[test]
    fn conversion_r_identity_case_and_bandwidths() {
        let c = ctx();
        let p = JacobiParams::new(0.25, -0.5).unwrap();
        let r0 = conversion_r(&p, 0, 0, 8, c);
        assert_eq!((r0.lower, r0.upper), (0, 0));
        for i in 0..8 {
            assert_eq!(r0.get(i, i).to_f64(), 1.0);
        }
        let r11 = conversion_r(&p, 1, 1, 8, c);
        assert_eq!((r11.lower, r11.upper), (0, 2));
        assert!(r11.assert_band_pattern());
    }

    #[test]
    fn conversion_r_pointwise_identity() {
        // P^(0,0)_n(x) = sum_m P^(1,0)_m(x) R_{m,n} at x = 0.3, n <= 15.
        let c = ctx();
        let p = JacobiParams::legendre();
        let n = 16;
        let r = conversion_r(&p, 1, 0, n, c);
        let x = c.from_f64(0.3);
        let raised = JacobiParams::new(1.0, 0.0).unwrap();
        for col in 0..n {
            let direct = jacobi_eval(&p, col, &x, c);
            let mut acc = c.zero();
            for m in col.saturating_sub(1)..=col {
                acc += r.get(m, col) * jacobi_eval(&raised, m, &x, c);
            }
            let d = Float::with_val(256, &acc - &direct).abs().to_f64();
            assert!(d < 1e-28, "col {col}: {d:e}");
        }
    }

    #[test]
    fn weighted_conversion_l_pointwise_identity() {
        // (1-x)^k (1+x)^j P^(a+k,b+j)_n(x) = sum_m P^(a,b)_m(x) L_{m,n} at x = -0.4.
        let c = ctx();
        let p = JacobiParams::new(0.5, -0.5).unwrap();
        let n = 18;
        let (k, j) = (1usize, 2usize);
        let l = weighted_conversion_l(&p, k, j, n, c);
        assert_eq!((l.lower, l.upper), (3, 0));
        assert!(l.assert_band_pattern());
        let x = c.from_f64(-0.4);
        let shifted = JacobiParams::new(p.alpha + k as f64, p.beta + j as f64).unwrap();
        let weight = (c.one() - &x).pow(k as u32) * (c.one() + &x).pow(j as u32);
        for col in 0..n - 3 {
            let lhs = weight.clone() * jacobi_eval(&shifted, col, &x, c);
            let mut acc = c.zero();
            for m in col..=(col + k + j).min(n - 1) {
                acc += l.get(m, col) * jacobi_eval(&p, m, &x, c);
            }
            let d = Float::with_val(256, &acc - &lhs).abs().to_f64();
            assert!(d < 1e-28, "col {col}: {d:e}");
        }
    }

    #[test]
    fn weighted_diff_matches_finite_differences() {
        // d/dx [(1+x)^(b+1) P_n^(a,b+1)] = (n+b+1)(1+x)^b P_n^(a+1,b)
        // checked by step-extrapolated central differences at 256 bits.
        let c = ctx();
        let p = JacobiParams::new(0.5, 0.25).unwrap();
        let n = 10;
        let w = weighted_diff_w(&p, n + 1, c);
        let x0 = c.from_f64(0.2);
        let src = JacobiParams::new(p.alpha, p.beta + 1.0).unwrap();
        let tgt = JacobiParams::new(p.alpha + 1.0, p.beta).unwrap();
        let g = |x: &Float| -> Float {
            Float::with_val(256, c.one() + x).pow(&c.from_f64(p.beta + 1.0))
                * jacobi_eval(&src, n, x, c)
        };
        let h1 = c.exp2(&c.from_i64(-40));
        let h2 = c.exp2(&c.from_i64(-41));
        let d_at = |h: &Float| -> Float {
            let up = g(&Float::with_val(256, &x0 + h));
            let dn = g(&Float::with_val(256, &x0 - h));
            (up - dn) / (c.from_u64(2) * h)
        };
        let d1 = d_at(&h1);
        let d2 = d_at(&h2);
        let extrap = (c.from_u64(4) * d2 - d1) / c.from_u64(3);
        let direct = w[n].clone()
            * Float::with_val(256, c.one() + &x0).pow(&c.from_f64(p.beta))
            * jacobi_eval(&tgt, n, &x0, c);
        let rel = Float::with_val(256, &extrap - &direct).abs() / direct.clone().abs();
        assert!(rel.to_f64() < 1e-20, "rel = {:e}", rel.to_f64());
    }

    #[test]
    fn mult_one_plus_x_structure_and_legendre_column() {
        let c = ctx();
        let p = JacobiParams::legendre();
        let n = 16;
        let m = mult_one_plus_x(&p, n, c);
        assert_eq!((m.lower, m.upper), (1, 1));
        assert!(m.assert_band_pattern());
        // (1+x) P_0 = P_0 + P_1.
        assert!(ulp_distance(m.get(0, 0), &c.one(), 256) <= 4.0);
        assert!(ulp_distance(m.get(1, 0), &c.one(), 256) <= 4.0);
    }

    #[test]
    fn mult_one_plus_x_pointwise() {
        // (1+x) P_n(x) equals the banded combination at x = 0.7, n <= 15.
        let c = ctx();
        for (a, b) in [(0.0, 0.0), (-0.5, 0.5), (1.0, 2.0)] {
            let p = JacobiParams::new(a, b).unwrap();
            let n = 17;
            let m = mult_one_plus_x(&p, n, c);
            let x = c.from_f64(0.7);
            for col in 0..n - 1 {
                let lhs = (c.one() + &x) * jacobi_eval(&p, col, &x, c);
                let mut acc = c.zero();
                for row in col.saturating_sub(1)..=(col + 1).min(n - 1) {
                    acc += m.get(row, col) * jacobi_eval(&p, row, &x, c);
                }
                let d = Float::with_val(256, &acc - &lhs).abs().to_f64();
                assert!(d < 1e-25, "col {col}: {d:e}");
            }
        }
    }

    #[test]
    fn mult_twice_matches_composed_weight_two_matrix() {
        // Applying the (1+x) matrix twice equals the (2,2)-banded matrix for
        // (1+x)^2 assembled from L and R with shifted parameters.
        let c = ctx();
        let p = JacobiParams::new(0.5, -0.25).unwrap();
        let n = 20;
        let buf = n + 4;
        let twice = {
            let m = mult_one_plus_x(&p, buf, c);
            m.mul(&m).leading(n, n)
        };
        let composed = {
            let l2 = weighted_conversion_l(&p, 0, 2, buf, c);
            let r2 = conversion_r(&p, 0, 2, buf, c);
            l2.mul(&r2).leading(n, n)
        };
        assert_eq!((composed.lower, composed.upper), (2, 2));
        let d = twice.mat.max_abs_diff(&composed.mat);
        assert!(d < 1e-25, "difference {d:e}");
    }

    #[test]
    fn connection_condition_number_grows_monotonically() {
        // Condition numbers of N x N sections of C are nondecreasing for N >= 5.
        let c = ctx();
        let p = JacobiParams::legendre();
        let cm = connection_matrix(&p, 25, c);
        let mut prev = 0.0f64;
        for n in 5..=25 {
            let sect = cm.leading(n, n).mat.to_f64();
            let cond = crate::band::cond2_estimate(&sect).unwrap();
            assert!(
                cond >= prev * 0.999,
                "cond dropped at N = {n}: {cond:e} < {prev:e}"
            );
            prev = prev.max(cond);
        }
        assert!(prev > 1e6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn recurrence_consistent_with_high_precision(
            n in 2usize..18,
            xq in -1000i32..=1000,
            sel in 0usize..4,
        ) {
            let params = [(0.0, 0.0), (-0.5, -0.5), (0.5, -0.25), (1.0, 2.0)][sel];
            let p = JacobiParams::new(params.0, params.1).unwrap();
            let x = xq as f64 / 1000.0;
            let lo = PrecisionContext::new(160);
            let hi = lo.doubled();
            let v_lo = jacobi_eval(&p, n, &lo.from_f64(x), lo);
            let v_hi = lo.round(&jacobi_eval(&p, n, &hi.from_f64(x), hi));
            // Absolute comparison on the recurrence scale: near a root of
            // P_n the relative error is unbounded for any algorithm.
            let scale = v_hi.clone().abs().to_f64().max(1.0);
            let diff = Float::with_val(200, &v_lo - &v_hi).abs().to_f64();
            prop_assert!(diff <= 64.0 * scale * crate::precision::eps(160).to_f64());
        }
    }
}
