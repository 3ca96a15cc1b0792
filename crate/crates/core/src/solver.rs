//! Conjugate gradients for the symmetric positive (semi-)definite normal
//! equations used by the gauge and phase solves.

use serde::Serialize;

use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgConfig {
    pub max_iters: usize,
    /// Stop when `|b - A x| <= rel_tol * |b|`.
    pub rel_tol: f64,
    /// Consecutive increases of the quadratic functional that count as divergence.
    pub diverge_window: usize,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig {
            max_iters: 1000,
            rel_tol: 1e-8,
            diverge_window: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CgStatus {
    Converged,
    MaxIters,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `|b - A x| / |b|` at exit (0 when `b = 0`).
    pub residual_rel: f64,
    pub status: CgStatus,
}

/// Preconditioned CG from `x = 0`. `inv_diag`, when given, is a Jacobi
/// preconditioner (elementwise inverse of the operator diagonal).
pub fn conjugate_gradient<A>(
    apply: A,
    b: &[f64],
    inv_diag: Option<&[f64]>,
    cfg: &CgConfig,
) -> CgOutcome
where
    A: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let b_norm = par::dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return CgOutcome {
            x,
            iterations: 0,
            residual_rel: 0.0,
            status: CgStatus::Converged,
        };
    }
    let precondition = |r: &[f64]| -> Vec<f64> {
        match inv_diag {
            Some(d) => par::map_indices(n, |i| d[i] * r[i]),
            None => r.to_vec(),
        }
    };

    let mut r = b.to_vec();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = par::dot(&r, &z);
    let mut functional = 0.0;
    let mut rising = 0;
    let mut iterations = 0;
    let mut residual_rel = 1.0;
    let mut status = CgStatus::MaxIters;

    while iterations < cfg.max_iters {
        let ap = apply(&p);
        let pap = par::dot(&p, &ap);
        if !(pap > 0.0) {
            // Direction in the null space (or breakdown): nothing more to gain.
            status = if pap.is_finite() {
                CgStatus::Converged
            } else {
                CgStatus::Diverged
            };
            break;
        }
        let alpha = rz / pap;
        par::axpy(alpha, &p, &mut x);
        par::axpy(-alpha, &ap, &mut r);
        iterations += 1;

        residual_rel = par::dot(&r, &r).sqrt() / b_norm;
        if !residual_rel.is_finite() {
            status = CgStatus::Diverged;
            break;
        }
        // J(x) = x.A x / 2 - b.x = -(x.r + x.b) / 2
        let next = -0.5 * (par::dot(&x, &r) + par::dot(&x, b));
        if next > functional {
            rising += 1;
            if rising >= cfg.diverge_window {
                status = CgStatus::Diverged;
                break;
            }
        } else {
            rising = 0;
        }
        functional = next;

        if residual_rel <= cfg.rel_tol {
            status = CgStatus::Converged;
            break;
        }
        z = precondition(&r);
        let rz_next = par::dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        par::for_each_indexed(&mut p, |i, pi| *pi = z[i] + beta * *pi);
    }

    CgOutcome {
        x,
        iterations,
        residual_rel,
        status,
    }
}
