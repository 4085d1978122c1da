use super::{axpy, check_dim, norm, KrylovConfig, KrylovStats, LinearOperator, Preconditioner};
use crate::error::Result;

/// `z = P^-1 (rhs - op x)`
fn preconditioned_residual(op: &dyn LinearOperator, precond: &dyn Preconditioner, rhs: &[f64], x: &[f64], z: &mut [f64]) -> Result<()> {
    let mut r = vec![0.0; rhs.len()];
    op.apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(rhs) {
        *ri = bi - *ri;
    }
    precond.apply(&r, z)
}

/// Restarted GMRES with left preconditioning and modified Gram-Schmidt.
///
/// Convergence is declared on the true preconditioned residual
/// `||P^-1 (rhs - op x)|| <= tol ||P^-1 rhs||`; otherwise the last iterate is
/// returned with `converged = false`.
pub fn gmres_solve(op: &dyn LinearOperator, rhs: &[f64], precond: &dyn Preconditioner, cfg: &KrylovConfig) -> Result<(Vec<f64>, KrylovStats)> {
    check_dim(op, rhs)?;
    cfg.validate()?;
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let mut stats = KrylovStats::default();
    let mut pb = vec![0.0; n];
    precond.apply(rhs, &mut pb)?;
    let bnorm = norm(&pb);
    if bnorm == 0.0 {
        stats.converged = true;
        return Ok((x, stats));
    }
    let target = cfg.tol * bnorm;
    let m = cfg.restart.min(n.max(1));
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    loop {
        preconditioned_residual(op, precond, rhs, &x, &mut r)?;
        let beta = norm(&r);
        stats.relative_residual = beta / bnorm;
        if beta <= target {
            stats.converged = true;
            return Ok((x, stats));
        }
        if stats.iterations >= cfg.max_iter {
            return Ok((x, stats));
        }
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && stats.iterations < cfg.max_iter {
            op.apply(&v[k], &mut tmp);
            precond.apply(&tmp, &mut w)?;
            for (j, vj) in v.iter().enumerate() {
                h[j][k] = super::dot(&w, vj);
                axpy(-h[j][k], vj, &mut w);
            }
            h[k + 1][k] = norm(&w);
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            let lucky = h[k + 1][k] <= 1e-14 * d.max(f64::MIN_POSITIVE);
            if d == 0.0 {
                stats.breakdown = true;
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            let hk1 = h[k + 1][k];
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            stats.iterations += 1;
            k += 1;
            if g[k].abs() <= target || lucky {
                if lucky {
                    stats.breakdown = true;
                }
                break;
            }
            v.push(w.iter().map(|wi| wi / hk1).collect());
        }
        // back substitution on the k x k upper triangle
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            axpy(*yi, &v[i], &mut x);
        }
        if k == 0 {
            preconditioned_residual(op, precond, rhs, &x, &mut r)?;
            stats.relative_residual = norm(&r) / bnorm;
            stats.converged = norm(&r) <= target;
            return Ok((x, stats));
        }
    }
}
