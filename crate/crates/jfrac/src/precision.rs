//! Arbitrary-precision arithmetic contract and special functions.
//!
//! Every numerical routine in this crate computes under a [`PrecisionContext`]
//! that fixes the mantissa bit count `q`. "q-bit precision" means the machine
//! epsilon of the arithmetic is `2^(1-q)`; double precision corresponds to
//! `q = 53`. The arithmetic itself is MPFR (via `rug`), which rounds every
//! operation to nearest, so all operations stay within 1 ulp at `q` bits.

use crate::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

/// Machine epsilon of `q`-bit precision arithmetic, `2^(1-q)`.
///
/// The value is a power of two, hence exact at any storage precision.
pub fn eps(q: u32) -> Float {
    assert!(q >= 1, "precision must be at least one bit");
    Float::with_val(53, 1i32 - q as i32).exp2()
}

/// Immutable description of a working precision.
///
/// Contexts are cheap to copy and safe to share between threads; all
/// operations on them are pure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    /// Minimum supported mantissa size.
    pub const MIN_BITS: u32 = 24;

    pub fn new(bits: u32) -> Self {
        assert!(
            bits >= Self::MIN_BITS,
            "precision contexts require at least {} bits, got {bits}",
            Self::MIN_BITS
        );
        Self { bits }
    }

    /// Double precision (q = 53, machine epsilon 2.22e-16).
    pub fn double() -> Self {
        Self::new(53)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Machine epsilon `2^(1-q)` of this context.
    pub fn eps(self) -> Float {
        eps(self.bits)
    }

    /// Context with twice the mantissa bits, for reference recomputation.
    pub fn doubled(self) -> Self {
        Self::new(self.bits * 2)
    }

    pub fn zero(self) -> Float {
        Float::with_val(self.bits, 0)
    }

    pub fn one(self) -> Float {
        Float::with_val(self.bits, 1)
    }

    pub fn from_f64(self, v: f64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn from_u64(self, v: u64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn from_i64(self, v: i64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn from_rational(self, v: &Rational) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn pi(self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// Rounds `v` to this context's precision (to nearest).
    pub fn round(self, v: &Float) -> Float {
        Float::with_val(self.bits, v)
    }

    /// `2^e` for a real exponent.
    pub fn exp2(self, e: &Float) -> Float {
        Float::with_val(self.bits, e).exp2()
    }

    /// Gamma function. Rejects the poles at `0, -1, -2, ...`.
    pub fn gamma(self, x: &Float) -> Result<Float> {
        if *x <= 0u32 && x.is_integer() {
            return Err(Error::GammaPole(x.to_f64()));
        }
        Ok(Float::with_val(self.bits, x).gamma())
    }

    /// Log-gamma for strictly positive arguments.
    pub fn ln_gamma(self, x: &Float) -> Result<Float> {
        if *x <= 0u32 {
            return Err(Error::Domain(format!(
                "ln_gamma requires a positive argument, got {}",
                x.to_f64()
            )));
        }
        Ok(Float::with_val(self.bits, x).ln_gamma())
    }

    /// Beta function `B(a, b) = Gamma(a) Gamma(b) / Gamma(a+b)` for `a, b > 0`.
    pub fn beta(self, a: &Float, b: &Float) -> Result<Float> {
        if *a <= 0u32 || *b <= 0u32 {
            return Err(Error::Domain(format!(
                "beta requires positive arguments, got ({}, {})",
                a.to_f64(),
                b.to_f64()
            )));
        }
        let ga = self.gamma(a)?;
        let gb = self.gamma(b)?;
        let sum = Float::with_val(self.bits, a + b);
        let gab = self.gamma(&sum)?;
        Ok(ga * gb / gab)
    }

    /// Complementary error function.
    ///
    /// Negative arguments go through the reflection `erfc(-x) = 2 - erfc(x)`,
    /// which is free of cancellation since `erfc(x) <= 1` there.
    pub fn erfc(self, x: &Float) -> Float {
        if x.is_sign_negative() && !x.is_zero() {
            let pos = Float::with_val(self.bits, x.clone().abs()).erfc();
            Float::with_val(self.bits, 2u32 - pos)
        } else {
            Float::with_val(self.bits, x).erfc()
        }
    }

    /// Ratio `Gamma(a) / Gamma(a + mu)` for `a, a + mu > 0`.
    ///
    /// For large arguments the ratio is formed as
    /// `exp(ln Gamma(a) - ln Gamma(a + mu))` with guard bits; small arguments
    /// divide the gamma values directly.
    pub fn gamma_ratio(self, a: &Float, mu: &Float) -> Result<Float> {
        let shifted = Float::with_val(self.bits, a + mu);
        if *a <= 0u32 || shifted <= 0u32 {
            return Err(Error::Domain(format!(
                "gamma_ratio requires a > 0 and a + mu > 0, got a = {}, mu = {}",
                a.to_f64(),
                mu.to_f64()
            )));
        }
        if *a > 30u32 {
            // ln Gamma values of nearby large arguments cancel; add guard bits.
            let guard = PrecisionContext::new(self.bits + 64);
            let la = guard.ln_gamma(a)?;
            let ls = guard.ln_gamma(&shifted)?;
            let diff = Float::with_val(guard.bits, la - ls);
            Ok(Float::with_val(self.bits, diff.exp()))
        } else {
            let ga = self.gamma(a)?;
            let gs = self.gamma(&shifted)?;
            Ok(ga / gs)
        }
    }

    /// `x^y` for real exponents, `x > 0` (or `x = 0` with `y > 0`).
    pub fn pow(self, x: &Float, y: &Float) -> Float {
        Float::with_val(self.bits, x).pow(Float::with_val(self.bits, y))
    }
}

/// Distance in units of `reference`-magnitude ulps at `q` bits.
pub fn ulp_distance(a: &Float, b: &Float, q: u32) -> f64 {
    let diff = Float::with_val(q + 16, a - b).abs();
    if diff.is_zero() {
        return 0.0;
    }
    let scale = Float::with_val(q + 16, a).abs();
    if scale.is_zero() {
        return f64::INFINITY;
    }
    let ulp = scale * eps(q);
    Float::with_val(53, diff / ulp).to_f64()
}
