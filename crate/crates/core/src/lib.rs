//! Implicit staggered hybrid finite-volume / finite-element solver for the
//! two-dimensional incompressible Navier-Stokes equations.
//!
//! Momentum lives on a face-type dual mesh (one control volume per primal
//! edge) and is advanced with an implicit finite-volume scheme for convection
//! plus Crouzeix-Raviart elements for viscosity, solved by a matrix-free
//! Newton-Krylov method with a symmetric Gauss-Seidel preconditioner. Pressure
//! lives on the vertices of the primal triangulation and is obtained from a
//! P1 pressure-Poisson projection.
//!
//! Module map:
//! - [`meshcore`]: primal triangulation, dual cells, geometry, cell reordering
//! - [`transport`]: numerical fluxes, reconstruction, residual and Jacobian
//! - [`krylov`]: GMRES, BiCGStab, CG, SGS preconditioner, inexact Newton
//! - [`pressure`]: projection and post-projection stages
//! - [`driver`]: boundary conditions, time step control, time loop
//! - [`bench`]: benchmark cases, exact solutions, error norms
//! - [`io`]: mesh files, run configuration, VTK and CSV writers

pub mod bench;
pub mod driver;
pub mod error;
pub mod io;
pub mod krylov;
pub mod meshcore;
pub mod pressure;
pub mod transport;

pub use error::{Error, MeshError, Result, SolverError};

/// 2D vector used for points, momenta and normals.
pub type Vec2 = nalgebra::Vector2<f64>;
/// 2x2 matrix used for gradients and Jacobian blocks.
pub type Mat2 = nalgebra::Matrix2<f64>;
