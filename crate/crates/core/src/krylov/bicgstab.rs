use super::{axpy, check_dim, dot, norm, KrylovConfig, KrylovStats, LinearOperator, Preconditioner};
use crate::error::Result;

/// BiCGStab applied to the left-preconditioned system `P^-1 op x = P^-1 rhs`.
///
/// On breakdown of `rho` or `omega` the iteration restarts from the current
/// iterate with a fresh shadow residual.
pub fn bicgstab_solve(op: &dyn LinearOperator, rhs: &[f64], precond: &dyn Preconditioner, cfg: &KrylovConfig) -> Result<(Vec<f64>, KrylovStats)> {
    check_dim(op, rhs)?;
    cfg.validate()?;
    let n = rhs.len();
    let mut stats = KrylovStats::default();
    let mut x = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let apply = |v: &[f64], out: &mut [f64], tmp: &mut [f64]| -> Result<()> {
        op.apply(v, tmp);
        precond.apply(tmp, out)
    };
    let mut r = vec![0.0; n];
    precond.apply(rhs, &mut r)?;
    let bnorm = norm(&r);
    if bnorm == 0.0 {
        stats.converged = true;
        return Ok((x, stats));
    }
    let target = cfg.tol * bnorm;
    let mut restarts = 0;
    'outer: loop {
        // r = P^-1 (b - A x)
        op.apply(&x, &mut tmp);
        for (t, b) in tmp.iter_mut().zip(rhs) {
            *t = b - *t;
        }
        precond.apply(&tmp, &mut r)?;
        stats.relative_residual = norm(&r) / bnorm;
        if norm(&r) <= target {
            stats.converged = true;
            return Ok((x, stats));
        }
        if stats.iterations >= cfg.max_iter || restarts > 10 {
            return Ok((x, stats));
        }
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut s = vec![0.0; n];
        let mut t = vec![0.0; n];
        while stats.iterations < cfg.max_iter {
            let rho_new = dot(&r_hat, &r);
            if rho_new.abs() < 1e-300 || omega == 0.0 {
                stats.breakdown = true;
                restarts += 1;
                continue 'outer;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            apply(&p, &mut v, &mut tmp)?;
            let rv = dot(&r_hat, &v);
            if rv == 0.0 {
                stats.breakdown = true;
                restarts += 1;
                continue 'outer;
            }
            alpha = rho / rv;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            stats.iterations += 1;
            if norm(&s) <= target {
                axpy(alpha, &p, &mut x);
                continue 'outer;
            }
            apply(&s, &mut t, &mut tmp)?;
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..n {
                x[i] += alpha * p[i] + omega * s[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm(&r) <= target {
                continue 'outer;
            }
        }
        continue 'outer;
    }
}
