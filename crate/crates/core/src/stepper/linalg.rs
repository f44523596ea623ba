//! Conjugate gradients for the two symmetric systems the stepper solves.

use crate::error::{Error, Result};

/// Outcome of a converged solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final residual norm over right-hand-side norm.
    pub relative_residual: f64,
}

pub(crate) struct CgOptions<'a> {
    /// Inner-product weights; Euclidean when `None`.
    pub weights: Option<&'a [f64]>,
    /// Diagonal preconditioner (the inverse is applied).
    pub diagonal: Option<&'a [f64]>,
    pub tol: f64,
    pub max_iter: usize,
    pub what: &'static str,
}

fn dot(a: &[f64], b: &[f64], w: Option<&[f64]>) -> f64 {
    match w {
        Some(w) => a.iter().zip(b).zip(w).map(|((x, y), w)| w * x * y).sum(),
        None => a.iter().zip(b).map(|(x, y)| x * y).sum(),
    }
}

/// Preconditioned CG for an operator self-adjoint and positive in the
/// chosen inner product. `x` holds the initial guess and the result.
pub(crate) fn cg(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    opt: &CgOptions<'_>,
) -> Result<SolveStats> {
    let n = b.len();
    let w = opt.weights;
    let bnorm = dot(b, b, w).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats { iterations: 0, relative_residual: 0.0 });
    }
    let mut q = vec![0.0; n];
    apply(x, &mut q);
    let mut r: Vec<f64> = b.iter().zip(&q).map(|(b, q)| b - q).collect();
    let precond = |r: &[f64], z: &mut Vec<f64>| {
        z.clear();
        match opt.diagonal {
            Some(d) => z.extend(r.iter().zip(d).map(|(r, d)| r / d)),
            None => z.extend_from_slice(r),
        }
    };
    let mut z = Vec::with_capacity(n);
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z, w);
    let mut res = dot(&r, &r, w).sqrt() / bnorm;
    for it in 0..=opt.max_iter {
        if res <= opt.tol {
            return Ok(SolveStats { iterations: it, relative_residual: res });
        }
        if it == opt.max_iter {
            break;
        }
        apply(&p, &mut q);
        let pq = dot(&p, &q, w);
        if !(pq > 0.0) {
            return Err(Error::Solver(format!("{}: operator not positive (p.Ap = {pq:e})", opt.what)));
        }
        let alpha = rz / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        res = dot(&r, &r, w).sqrt() / bnorm;
        precond(&r, &mut z);
        let rz_new = dot(&r, &z, w);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::Solver(format!(
        "{}: no convergence in {} iterations (relative residual {res:e}, tolerance {:e})",
        opt.what, opt.max_iter, opt.tol
    )))
}
