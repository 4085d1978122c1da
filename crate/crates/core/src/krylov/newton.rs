use super::{norm, solve, KrylovConfig, LinearOperator, Preconditioner};
use crate::error::{Result, SolverError};

/// Nonlinear system `f(W) = 0` with a matrix-free Jacobian.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;
    fn residual(&self, w: &[f64], f: &mut [f64]);
    fn jacobian<'s>(&'s self, w: &[f64]) -> Box<dyn LinearOperator + 's>;
    fn preconditioner<'s>(&'s self, w: &[f64]) -> Result<Box<dyn Preconditioner + 's>>;
}

/// Relative tolerance handed to the linear solver at each Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forcing {
    /// Linear residual reduced by this factor relative to `||f(W_k)||`.
    Relative(f64),
    /// Fixed relative tolerance with a single outer iteration.
    SingleStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Absolute residual target; `None` selects `rel_tol * ||f(W0)||`.
    pub abs_tol: Option<f64>,
    pub rel_tol: f64,
    pub tol_floor: f64,
    pub max_newton: usize,
    pub forcing: Forcing,
    pub max_halvings: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            abs_tol: None,
            rel_tol: 1e-8,
            tol_floor: 1e-12,
            max_newton: 50,
            forcing: Forcing::Relative(1e-2),
            max_halvings: 20,
        }
    }
}

impl NewtonConfig {
    pub fn rusanov() -> Self {
        Self::default()
    }

    pub fn ducros() -> Self {
        Self {
            forcing: Forcing::SingleStep(1e-10),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonStats {
    pub iterations: usize,
    pub krylov_iterations: usize,
    pub halvings: usize,
    pub converged: bool,
    pub tolerance: f64,
    pub initial_residual: f64,
    pub final_residual: f64,
    /// `||f||` after every accepted step, starting with `||f(W0)||`.
    pub residual_history: Vec<f64>,
    /// Step length of every accepted step.
    pub step_lengths: Vec<f64>,
    pub linear_converged: bool,
}

/// Inexact Newton iteration with a halving line search, starting from `w`.
pub fn newton_solve(system: &dyn NonlinearSystem, mut w: Vec<f64>, cfg: &NewtonConfig, krylov: &KrylovConfig) -> Result<(Vec<f64>, NewtonStats)> {
    let n = system.dim();
    if w.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, got: w.len() }.into());
    }
    let mut f = vec![0.0; n];
    system.residual(&w, &mut f);
    let mut fnorm = norm(&f);
    let eps = cfg.abs_tol.unwrap_or((cfg.rel_tol * fnorm).max(cfg.tol_floor));
    let mut stats = NewtonStats {
        tolerance: eps,
        initial_residual: fnorm,
        residual_history: vec![fnorm],
        linear_converged: true,
        ..Default::default()
    };
    let (single, forcing) = match cfg.forcing {
        Forcing::Relative(r) => (false, r),
        Forcing::SingleStep(r) => (true, r),
    };
    let lin_cfg = KrylovConfig { tol: forcing, ..*krylov };
    let mut trial = vec![0.0; n];
    let mut f_trial = vec![0.0; n];
    loop {
        let done = if single { stats.iterations >= 1 } else { fnorm <= eps };
        if done || stats.iterations >= cfg.max_newton {
            break;
        }
        if single && fnorm == 0.0 {
            stats.iterations = 1;
            break;
        }
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let jac = system.jacobian(&w);
        let pre = system.preconditioner(&w)?;
        let (dw, ks) = solve(jac.as_ref(), &rhs, pre.as_ref(), &lin_cfg)?;
        stats.krylov_iterations += ks.iterations;
        stats.linear_converged &= ks.converged;
        stats.iterations += 1;
        let mut delta = 1.0;
        let mut accepted = false;
        for halving in 0..=cfg.max_halvings {
            for i in 0..n {
                trial[i] = w[i] + delta * dw[i];
            }
            system.residual(&trial, &mut f_trial);
            let tn = norm(&f_trial);
            if tn < fnorm {
                stats.halvings += halving;
                accepted = true;
                std::mem::swap(&mut w, &mut trial);
                std::mem::swap(&mut f, &mut f_trial);
                fnorm = tn;
                stats.residual_history.push(fnorm);
                stats.step_lengths.push(delta);
                break;
            }
            delta *= 0.5;
        }
        if !accepted {
            stats.halvings += cfg.max_halvings;
            if fnorm <= eps {
                // already converged to roundoff; keep the current iterate
                break;
            }
            return Err(SolverError::Stagnation {
                iteration: stats.iterations,
                halvings: cfg.max_halvings,
                residual: fnorm,
            }
            .into());
        }
    }
    stats.final_residual = fnorm;
    stats.converged = fnorm <= eps || (single && stats.linear_converged);
    Ok((w, stats))
}
