//! Matrix-free Krylov solvers, the SGS preconditioner and inexact Newton.

pub mod cg;
pub mod bicgstab;
pub mod gmres;
pub mod newton;
pub mod sgs;

pub use bicgstab::bicgstab_solve;
pub use cg::cg_solve;
pub use gmres::gmres_solve;
pub use newton::{newton_solve, Forcing, NewtonConfig, NewtonStats, NonlinearSystem};
pub use sgs::SgsPreconditioner;

use crate::error::{Result, SolverError};

/// Linear map between vectors of equal dimension.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Approximate inverse applied from the left.
pub trait Preconditioner {
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        y.copy_from_slice(x);
        Ok(())
    }
}

/// Operator defined by a closure.
pub struct FnOperator<F: Fn(&[f64], &mut [f64])> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

/// Dense row-major matrix as an operator; used by tests and small systems.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        Self {
            n,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(&self.data[i * self.n..(i + 1) * self.n], x);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrylovMethod {
    Gmres,
    Bicgstab,
    Cg,
}

impl std::str::FromStr for KrylovMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gmres" => Ok(Self::Gmres),
            "bicgstab" => Ok(Self::Bicgstab),
            "cg" => Ok(Self::Cg),
            other => Err(format!("unknown krylov method '{other}' (expected gmres, bicgstab or cg)")),
        }
    }
}

impl std::fmt::Display for KrylovMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Gmres => "gmres",
            Self::Bicgstab => "bicgstab",
            Self::Cg => "cg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    pub method: KrylovMethod,
    /// Relative residual target.
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            method: KrylovMethod::Gmres,
            tol: 1e-10,
            max_iter: 500,
            restart: 30,
        }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.restart == 0 || self.max_iter == 0 {
            return Err(crate::Error::InvalidArgument(format!(
                "krylov settings need tol > 0, restart >= 1, max_iter >= 1 (got {}, {}, {})",
                self.tol, self.restart, self.max_iter
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KrylovStats {
    pub iterations: usize,
    pub converged: bool,
    /// Final relative (preconditioned) residual.
    pub relative_residual: f64,
    pub breakdown: bool,
}

/// Solves `op x = rhs` with the configured method.
pub fn solve(op: &dyn LinearOperator, rhs: &[f64], precond: &dyn Preconditioner, cfg: &KrylovConfig) -> Result<(Vec<f64>, KrylovStats)> {
    match cfg.method {
        KrylovMethod::Gmres => gmres_solve(op, rhs, precond, cfg),
        KrylovMethod::Bicgstab => bicgstab_solve(op, rhs, precond, cfg),
        KrylovMethod::Cg => cg_solve(op, rhs, cfg),
    }
}

pub(crate) fn check_dim(op: &dyn LinearOperator, rhs: &[f64]) -> Result<()> {
    if op.dim() != rhs.len() {
        return Err(SolverError::DimensionMismatch {
            expected: op.dim(),
            got: rhs.len(),
        }
        .into());
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += a x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
