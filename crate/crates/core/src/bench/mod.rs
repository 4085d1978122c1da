//! Benchmark cases with exact solutions, error norms and convergence studies.

pub mod cases;
pub mod exact;
pub mod sampling;
pub mod study;
pub mod validation;

pub use cases::{cavity, default_case, initial_fields, poiseuille2d, stokes1, tgv2d, tgv_level, womersley, BenchmarkCase, CaseName, InitialFn, MeshSpec};
pub use exact::{stokes_first_problem, taylor_green, ExactSolution, Poiseuille, Womersley};
pub use sampling::{compare_cavity, ghia_re100, sample_line, sample_momentum, sample_pressure, CavityReference, ProfileDeviation, ReferencePoint};
pub use study::{
    convergence_rate, convergence_study, l2_error, mesh_size, momentum_error, pressure_error, simulation_errors, ErrorReport,
    ErrorRow,
};
pub use validation::{cavity_check, poiseuille_check, stokes_check, womersley_check, CaseRun, ProfileCheck, ProfileRow, WOMERSLEY_TIMES};
