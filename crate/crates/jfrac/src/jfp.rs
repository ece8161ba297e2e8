//! The Jacobi fractional polynomial (JFP) basis.
//!
//! Basis functions are `Q_n(x) = (1+y)^b P_n^(alpha,beta)(y)` under the power
//! map `(1+x)/2 = ((1+y)/2)^p`, which is a bijection of `[-1,1]` onto itself.
//! For integer `p` the basis carries banded multiplication and integration
//! matrices; those are the ingredients of the column recurrence used to build
//! fractional integration matrices.

use crate::band::Banded;
use crate::jacobi::{
    self, conversion_r, jacobi_eval, mult_one_plus_x, weighted_conversion_l, JacobiParams,
};
use crate::precision::PrecisionContext;
use crate::{Error, Result};
use rug::ops::Pow;
use rug::{Float, Rational};

/// The map exponent `p > 0`: exact rational, or a high-precision real for
/// irrational-order problems.
#[derive(Clone, Debug)]
pub enum PValue {
    Rational(Rational),
    /// Carried at the precision the caller computed it; must dominate every
    /// build precision used against it.
    Real(Float),
}

impl PValue {
    pub fn integer(p: usize) -> Self {
        PValue::Rational(Rational::from(p as u64))
    }

    pub fn rational(num: i64, den: u64) -> Self {
        PValue::Rational(Rational::from((num, den)))
    }

    pub fn is_positive(&self) -> bool {
        match self {
            PValue::Rational(r) => *r > 0u32,
            PValue::Real(f) => f.is_sign_positive() && !f.is_zero(),
        }
    }

    /// Integer value, when `p` is a positive integer.
    pub fn as_integer(&self) -> Option<usize> {
        match self {
            PValue::Rational(r) if r.is_integer() && *r > 0u32 => r.numer().to_usize(),
            _ => None,
        }
    }

    pub fn to_float(&self, ctx: PrecisionContext) -> Float {
        match self {
            PValue::Rational(r) => ctx.from_rational(r),
            PValue::Real(f) => {
                debug_assert!(f.prec() >= ctx.bits(), "irrational p carried too coarsely");
                ctx.round(f)
            }
        }
    }

    /// `1/p` at the context precision.
    pub fn recip_float(&self, ctx: PrecisionContext) -> Float {
        ctx.one() / self.to_float(ctx)
    }
}

/// Parameters of a JFP basis `Q^(alpha,beta,b,p)`.
#[derive(Clone, Debug)]
pub struct JfpParams {
    pub jacobi: JacobiParams,
    pub b: f64,
    pub p: PValue,
}

impl JfpParams {
    pub fn new(jacobi: JacobiParams, b: f64, p: PValue) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::Domain("JFP map exponent p must be positive".into()));
        }
        Ok(Self { jacobi, b, p })
    }

    /// Integrability of the basis requires `b > -p`.
    pub fn is_integrable(&self) -> bool {
        let ctx = PrecisionContext::double();
        self.b > -self.p.to_float(ctx).to_f64()
    }
}

/// Forward map `y = 2((1+x)/2)^(1/p) - 1`, a bijection of `[-1,1]`.
pub fn map_to_y(x: &Float, p: &PValue, ctx: PrecisionContext) -> Float {
    let half = (ctx.one() + x) / ctx.from_u64(2);
    let mapped = ctx.pow(&half, &p.recip_float(ctx));
    ctx.from_u64(2) * mapped - ctx.one()
}

/// Inverse map `x = 2((1+y)/2)^p - 1`.
pub fn map_to_x(y: &Float, p: &PValue, ctx: PrecisionContext) -> Float {
    let half = (ctx.one() + y) / ctx.from_u64(2);
    let mapped = ctx.pow(&half, &p.to_float(ctx));
    ctx.from_u64(2) * mapped - ctx.one()
}

/// Evaluates `Q_n(x) = (1+y)^b P_n(y)`.
///
/// For `b < 0` the basis is singular at `x = -1`.
pub fn jfp_eval(params: &JfpParams, n: usize, x: &Float, ctx: PrecisionContext) -> Result<Float> {
    if params.b < 0.0 && (x.clone() + 1u32).is_zero() {
        return Err(Error::Singularity(format!(
            "Q_n with b = {} is singular at x = -1",
            params.b
        )));
    }
    let y = map_to_y(x, &params.p, ctx);
    let poly = jacobi_eval(&params.jacobi, n, &y, ctx);
    if params.b == 0.0 {
        return Ok(poly);
    }
    let weight = ctx.pow(&(ctx.one() + &y), &ctx.from_f64(params.b));
    Ok(weight * poly)
}

/// Clenshaw evaluation of a JFP series `sum c_n Q_n(x)`.
pub fn jfp_series_eval(
    params: &JfpParams,
    coeffs: &[Float],
    x: &Float,
    ctx: PrecisionContext,
) -> Result<Float> {
    if params.b < 0.0 && (x.clone() + 1u32).is_zero() {
        return Err(Error::Singularity(format!(
            "series in a b = {} basis is singular at x = -1",
            params.b
        )));
    }
    let y = map_to_y(x, &params.p, ctx);
    let poly = jacobi::clenshaw(&params.jacobi, coeffs, &y, ctx);
    if params.b == 0.0 {
        return Ok(poly);
    }
    let weight = ctx.pow(&(ctx.one() + &y), &ctx.from_f64(params.b));
    Ok(weight * poly)
}

/// Diagonal scaling `D_{b,p}` with entries `d_n = 2^((b+n)(1-1/p))`, relating
/// the weighted monomials in `y` to fractional monomials in `x`.
pub fn scaling_d(b: f64, p: &PValue, n: usize, ctx: PrecisionContext) -> Vec<Float> {
    let one_minus = ctx.one() - p.recip_float(ctx);
    (0..n)
        .map(|k| ctx.exp2(&((ctx.from_f64(b) + ctx.from_u64(k as u64)) * &one_minus)))
        .collect()
}

/// Multiplication by `x` in the JFP basis, integer `p` only:
/// `X = 2^(1-p) (L R)^p - 1`, bandwidths `(p, p)`.
/// The leading `n x n` section is exact.
pub fn mult_x_matrix(params: &JfpParams, n: usize, ctx: PrecisionContext) -> Result<Banded> {
    let p = params.p.as_integer().ok_or_else(|| {
        Error::ParameterCondition("multiplication matrix requires integer p".into())
    })?;
    let buf = n + p + 1;
    let lr = mult_one_plus_x(&params.jacobi, buf, ctx);
    let mut x = lr.pow(p);
    let scale = ctx.exp2(&ctx.from_i64(1 - p as i64));
    x.scale(&scale);
    let x = x.sub(&Banded::identity(buf, ctx.bits()));
    let mut out = x.leading(n, n);
    out.lower = p;
    out.upper = p;
    Ok(out)
}

/// First-order integration matrix in the JFP basis, from the factorization
/// through weighted conversions and the diagonal weighted differentiation.
/// Requires `p`, `beta - b`, `b + p - 1 - beta` all nonnegative integers;
/// bandwidths `(p, p)`. The leading `n x n` section is exact.
pub fn int_matrix(params: &JfpParams, n: usize, ctx: PrecisionContext) -> Result<Banded> {
    let p = params.p.as_integer().ok_or_else(|| {
        Error::ParameterCondition(format!(
            "integration matrix requires integer p, got {:?}",
            params.p
        ))
    })?;
    let alpha = params.jacobi.alpha;
    let beta = params.jacobi.beta;
    let b = params.b;
    let beta_minus_b = beta - b;
    let co_step = b + p as f64 - 1.0 - beta;
    if beta_minus_b < 0.0 || beta_minus_b.fract() != 0.0 {
        return Err(Error::ParameterCondition(format!(
            "integration matrix requires beta - b to be a nonnegative integer, got {beta_minus_b}"
        )));
    }
    if co_step < 0.0 || co_step.fract() != 0.0 {
        return Err(Error::ParameterCondition(format!(
            "integration matrix requires b + p - 1 - beta to be a nonnegative integer, got {co_step}"
        )));
    }
    let buf = n + p + 1;
    let bits = ctx.bits();

    // L^(alpha,beta)_(alpha,beta+p): bandwidths (p, 0).
    let l = weighted_conversion_l(&params.jacobi, 0, p, buf, ctx);
    // R^(alpha,beta+p)_(alpha-1,b+p): one alpha step and (beta-b) beta steps
    // from the source parameters (alpha-1, b+p). The alpha-1 family enters
    // only through connection coefficients, which continue analytically.
    let src = JacobiParams {
        alpha: alpha - 1.0,
        beta: b + p as f64,
    };
    let r1 = conversion_r(&src, 1, beta_minus_b as usize, buf, ctx);
    // Diagonal W^(alpha,b+p-1)_(alpha-1,b+p) has entries n + b + p.
    let winv: Vec<Float> = (0..buf)
        .map(|k| ctx.one() / ctx.from_f64(k as f64 + b + p as f64))
        .collect();
    // R^(alpha,b+p-1)_(alpha,beta): (b+p-1-beta) beta steps from (alpha,beta).
    let r2 = conversion_r(&params.jacobi, 0, co_step as usize, buf, ctx);

    let mut acc = l.mul(&r1);
    for j in 0..buf {
        for i in j.saturating_sub(acc.upper)..=(j + acc.lower).min(buf - 1) {
            let v = Float::with_val(bits, acc.get(i, j) * &winv[j]);
            acc.mat.set(i, j, v);
        }
    }
    let mut int = acc.mul(&r2);
    let scale = ctx.from_u64(p as u64) * ctx.exp2(&ctx.from_i64(1 - p as i64));
    int.scale(&scale);
    let mut out = int.leading(n, n);
    out.lower = p;
    out.upper = p;
    Ok(out)
}
