//! Gauss–Jacobi quadrature at arbitrary precision.
//!
//! Nodes are the roots of `P_n^(alpha,beta)`, located by sign changes on a
//! Chebyshev grid in double precision and polished by Newton iterations at
//! successively doubled precisions. Weights come from the Christoffel
//! function, `w_i = 1 / sum_{m<n} P_m(x_i)^2 / h_m`, which needs no separate
//! normalization constant.

use crate::jacobi::{jacobi_deriv, jacobi_eval, jacobi_eval_f64, jacobi_norms, JacobiParams};
use crate::precision::PrecisionContext;
use crate::Result;
use rug::Float;

/// A Gauss–Jacobi rule: integrates `f(x) (1-x)^alpha (1+x)^beta` over `[-1,1]`
/// exactly for polynomial `f` of degree `<= 2n-1`.
pub struct GaussJacobi {
    pub params: JacobiParams,
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
    bits: u32,
}

fn f64_roots(p: &JacobiParams, n: usize) -> Vec<f64> {
    // Sign changes of P_n on a Chebyshev-distributed grid, then bisection.
    let m = 16 * n.max(4);
    let mut grid: Vec<f64> = (0..=m)
        .map(|i| -(std::f64::consts::PI * i as f64 / m as f64).cos())
        .collect();
    grid[0] = -1.0;
    grid[m] = 1.0;
    let mut roots = Vec::with_capacity(n);
    let mut fa = jacobi_eval_f64(p, n, grid[0]);
    for w in 1..=m {
        let fb = jacobi_eval_f64(p, n, grid[w]);
        if fa == 0.0 {
            roots.push(grid[w - 1]);
        } else if fa * fb < 0.0 {
            let (mut a, mut b) = (grid[w - 1], grid[w]);
            let mut va = fa;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let vm = jacobi_eval_f64(p, n, mid);
                if va * vm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    va = vm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        fa = fb;
    }
    roots
}

/// Builds an `n`-point rule at the context's precision.
pub fn gauss_jacobi(n: usize, params: &JacobiParams, ctx: PrecisionContext) -> Result<GaussJacobi> {
    assert!(n >= 1);
    let seeds = f64_roots(params, n);
    if seeds.len() != n {
        return Err(crate::Error::Internal(format!(
            "root bracketing found {} of {} Gauss-Jacobi nodes",
            seeds.len(),
            n
        )));
    }
    // Newton at doubling precisions: each stage roughly doubles the accurate
    // digits, so reaching `bits` from f64 takes log2(bits/53) + 2 stages.
    let mut nodes: Vec<Float> = seeds.iter().map(|&s| ctx.from_f64(s)).collect();
    let mut stage_bits = 64u32;
    loop {
        stage_bits = (stage_bits * 2).min(ctx.bits() + 32);
        let stage = PrecisionContext::new(stage_bits);
        for x in nodes.iter_mut() {
            let xv = stage.round(x);
            let f = jacobi_eval(params, n, &xv, stage);
            let df = jacobi_deriv(params, n, &xv, stage);
            *x = xv - f / df;
        }
        if stage_bits >= ctx.bits() + 32 {
            // Two polishing sweeps at full precision.
            for _ in 0..2 {
                for x in nodes.iter_mut() {
                    let xv = stage.round(x);
                    let f = jacobi_eval(params, n, &xv, stage);
                    let df = jacobi_deriv(params, n, &xv, stage);
                    *x = xv - f / df;
                }
            }
            break;
        }
    }
    let nodes: Vec<Float> = nodes.iter().map(|x| ctx.round(x)).collect();

    let h = jacobi_norms(params, n, ctx)?;
    let mut weights = Vec::with_capacity(n);
    for x in &nodes {
        let mut acc = ctx.zero();
        for m in 0..n {
            let pm = jacobi_eval(params, m, x, ctx);
            acc += pm.clone() * pm / &h[m];
        }
        weights.push(ctx.one() / acc);
    }
    Ok(GaussJacobi {
        params: *params,
        nodes,
        weights,
        bits: ctx.bits(),
    })
}

impl GaussJacobi {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum w_i f(x_i)`, approximating the weighted integral of `f`.
    pub fn integrate<F: FnMut(&Float) -> Float>(&self, mut f: F) -> Float {
        let mut acc = Float::with_val(self.bits, 0);
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            acc += w * f(x);
        }
        acc
    }
}
