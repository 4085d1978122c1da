use super::{axpy, check_dim, dot, norm, KrylovConfig, KrylovStats, LinearOperator};
use crate::error::{Result, SolverError};

/// Conjugate gradients from a zero initial guess.
///
/// Fails with [`SolverError::IndefiniteOperator`] when a search direction
/// with `p . A p <= 0` is met.
pub fn cg_solve(op: &dyn LinearOperator, rhs: &[f64], cfg: &KrylovConfig) -> Result<(Vec<f64>, KrylovStats)> {
    check_dim(op, rhs)?;
    cfg.validate()?;
    let n = rhs.len();
    let mut stats = KrylovStats::default();
    let mut x = vec![0.0; n];
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        stats.converged = true;
        return Ok((x, stats));
    }
    let target = cfg.tol * bnorm;
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    while stats.iterations < cfg.max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(SolverError::IndefiniteOperator(pap).into());
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        stats.iterations += 1;
        let rr_new = dot(&r, &r);
        stats.relative_residual = rr_new.sqrt() / bnorm;
        if rr_new.sqrt() <= target {
            stats.converged = true;
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    Ok((x, stats))
}
