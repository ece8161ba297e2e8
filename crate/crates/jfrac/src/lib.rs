//! Spectral solution of one-sided linear fractional integral equations on
//! `[-1, 1]` in Jacobi fractional polynomial (JFP) bases.
//!
//! The JFP basis functions are weighted Jacobi polynomials in a mapped
//! variable, `Q_n(x) = (1+y)^b P_n^{(alpha,beta)}(y)` with
//! `(1+x)/2 = ((1+y)/2)^p`. Fractional integration acts on this basis through
//! lower-banded matrices whose entries are computed by two algorithms (a
//! triangular-solve route and a banded-Sylvester column recurrence). Both are
//! unstable in fixed precision; the [`fracint`] module selects a working
//! precision from an empirical error-growth simulation so the output matrices
//! meet a prescribed accuracy ("pseudo-stabilization"). The resulting linear
//! systems are well conditioned and are solved in ordinary double precision.
//!
//! Module map:
//! - [`precision`]: arbitrary-precision contexts and special functions,
//! - [`band`]: dense/banded high-precision matrices and `f64` linear algebra,
//! - [`jacobi`]: classical Jacobi polynomial operators (C, M, R, L, W),
//! - [`quad`]: Gauss–Jacobi quadrature at arbitrary precision,
//! - [`jfp`]: the JFP basis, its multiplication and integration matrices,
//! - [`fracint`]: fractional integration matrices and pseudo-stabilization,
//! - [`mittag`]: Mittag–Leffler reference evaluator (validation oracle),
//! - [`solver`]: assembly and solution of general linear FIEs,
//! - [`sumspace`]: interleaved Legendre/weighted-Chebyshev comparison harness,
//! - [`heatwave`]: time-fractional heat/wave equation driver.

pub mod band;
pub mod fracint;
pub mod heatwave;
pub mod jacobi;
pub mod jfp;
pub mod mittag;
pub mod precision;
pub mod quad;
pub mod solver;
pub mod sumspace;

mod error;

pub use error::{Error, Result};
