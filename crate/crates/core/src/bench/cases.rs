use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::exact::{ExactSolution, Poiseuille, Womersley};
use crate::driver::{
    constant_vector, BoundaryCondition, BoundaryData, BoundaryMap, ReorderSettings, Simulation, SolverSettings, TimeControls,
    TimeMode,
};
use crate::error::{Error, Result};
use crate::meshcore::{generate_structured_triangulation_with, Diagonals, Meshes, Rectangle, SideTags};
use crate::transport::field::from_cells;
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseName {
    Tgv2d,
    Stokes1,
    Cavity,
    Womersley,
    Poiseuille2d,
}

impl FromStr for CaseName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tgv2d" => Ok(Self::Tgv2d),
            "stokes1" => Ok(Self::Stokes1),
            "cavity" => Ok(Self::Cavity),
            "womersley" => Ok(Self::Womersley),
            "poiseuille2d" => Ok(Self::Poiseuille2d),
            other => Err(Error::Config(format!(
                "unknown case '{other}' (expected tgv2d, stokes1, cavity, womersley or poiseuille2d)"
            ))),
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tgv2d => "tgv2d",
            Self::Stokes1 => "stokes1",
            Self::Cavity => "cavity",
            Self::Womersley => "womersley",
            Self::Poiseuille2d => "poiseuille2d",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSpec {
    pub nx: usize,
    pub ny: usize,
    pub domain: Rectangle,
    pub diagonals: Diagonals,
}

/// Initial velocity and pressure as functions of position.
pub type InitialFn = Arc<dyn Fn(Vec2) -> (Vec2, f64) + Send + Sync>;

/// Physical setup of a benchmark; numerics come from [`SolverSettings`].
#[derive(Clone)]
pub struct BenchmarkCase {
    pub name: CaseName,
    pub mesh: MeshSpec,
    pub bcs: BoundaryMap,
    pub mu: f64,
    pub rho: f64,
    pub controls: TimeControls,
    pub initial: InitialFn,
    pub exact: Option<ExactSolution>,
    pub steady_tol: Option<f64>,
    /// Lower bound applied to the numerical dissipation coefficient.
    pub c_alpha_min: f64,
    /// Preferred reordering sweep direction.
    pub sweep: Vec2,
}

impl fmt::Debug for BenchmarkCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkCase")
            .field("name", &self.name)
            .field("mesh", &self.mesh)
            .field("bcs", &self.bcs)
            .field("mu", &self.mu)
            .field("rho", &self.rho)
            .field("controls", &self.controls)
            .field("exact", &self.exact)
            .field("steady_tol", &self.steady_tol)
            .field("c_alpha_min", &self.c_alpha_min)
            .finish()
    }
}

impl BenchmarkCase {
    pub fn meshes(&self) -> Result<Meshes> {
        let mut m = generate_structured_triangulation_with(self.mesh.nx, self.mesh.ny, self.mesh.domain, SideTags::default(), self.mesh.diagonals)?;
        self.bcs.apply_periodic(&mut m)?;
        Ok(Meshes::build(m)?)
    }

    /// Simulation with the case physics and the given numerics; strong
    /// Dirichlet values are imposed on the initial momentum.
    pub fn simulation(&self, numerics: &SolverSettings) -> Result<Simulation> {
        let meshes = self.meshes()?;
        let mut settings = *numerics;
        settings.flux.mu = self.mu;
        settings.flux.rho = self.rho;
        settings.flux.c_alpha = settings.flux.c_alpha.max(self.c_alpha_min);
        if settings.steady_tol.is_none() {
            settings.steady_tol = self.steady_tol;
        }
        if settings.reorder == ReorderSettings::default() {
            settings.reorder.direction = self.sweep;
        }
        let (w, p) = initial_fields(&meshes, &self.bcs, self.rho, &self.initial)?;
        Simulation::new(meshes, self.bcs.clone(), settings, self.controls, w, p)
    }
}

/// Momentum `rho u_0` at the dual nodes and `p_0` at the pressure dofs, with
/// strong Dirichlet values imposed at `t = 0`.
pub fn initial_fields(meshes: &Meshes, bcs: &BoundaryMap, rho: f64, initial: &InitialFn) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut w = from_cells(meshes.geometry.node_position.iter().map(|&x| rho * initial(x).0));
    let p: Vec<f64> = meshes.geometry.dof_position.iter().map(|&x| initial(x).1).collect();
    BoundaryData::evaluate(bcs, meshes, 0.0, rho)?.impose(&mut w);
    Ok((w, p))
}

fn periodic_x(l: f64) -> [(u32, BoundaryCondition); 2] {
    [
        (4, BoundaryCondition::Periodic { partner: 2, offset: Vec2::new(l, 0.0) }),
        (2, BoundaryCondition::Periodic { partner: 4, offset: Vec2::new(-l, 0.0) }),
    ]
}

fn periodic_y(l: f64) -> [(u32, BoundaryCondition); 2] {
    [
        (1, BoundaryCondition::Periodic { partner: 3, offset: Vec2::new(0.0, l) }),
        (3, BoundaryCondition::Periodic { partner: 1, offset: Vec2::new(0.0, -l) }),
    ]
}

fn map_of(items: impl IntoIterator<Item = (u32, BoundaryCondition)>) -> BoundaryMap {
    items.into_iter().fold(BoundaryMap::new(), |m, (t, bc)| m.with(t, bc))
}

/// Cells per side and step count of convergence level `level` (0 is the coarsest).
pub fn tgv_level(level: usize) -> (usize, usize) {
    (16 << level, 20 << level)
}

/// Inviscid periodic Taylor-Green vortex to `t = 1`.
pub fn tgv2d(level: usize) -> BenchmarkCase {
    let (n, steps) = tgv_level(level);
    let l = 2.0 * PI;
    BenchmarkCase {
        name: CaseName::Tgv2d,
        mesh: MeshSpec { nx: n, ny: n, domain: Rectangle::new(0.0, l, 0.0, l), diagonals: Diagonals::Forward },
        bcs: map_of(periodic_x(l).into_iter().chain(periodic_y(l))),
        mu: 0.0,
        rho: 1.0,
        controls: TimeControls::fixed(1.0 / steps as f64, 1.0),
        initial: Arc::new(super::exact::taylor_green),
        exact: Some(ExactSolution::TaylorGreen),
        steady_tol: None,
        c_alpha_min: 0.0,
        sweep: Vec2::new(1.0, 0.0),
    }
}

/// Shear layer `u_2 = +-0.1` on `[-0.5, 0.5] x [-0.05, 0.05]`, periodic in `x_2`.
pub fn stokes1(mu: f64) -> BenchmarkCase {
    let amp = 0.1;
    let bcs = map_of(
        periodic_y(0.1).into_iter().chain([
            (4, BoundaryCondition::DirichletVelocity(constant_vector(Vec2::new(0.0, -amp)))),
            (2, BoundaryCondition::DirichletVelocity(constant_vector(Vec2::new(0.0, amp)))),
        ]),
    );
    BenchmarkCase {
        name: CaseName::Stokes1,
        mesh: MeshSpec { nx: 100, ny: 10, domain: Rectangle::new(-0.5, 0.5, -0.05, 0.05), diagonals: Diagonals::Forward },
        bcs,
        mu,
        rho: 1.0,
        controls: TimeControls::fixed(0.01, 1.0),
        initial: Arc::new(move |x: Vec2| {
            let s = if x.x > 1e-12 { 1.0 } else if x.x < -1e-12 { -1.0 } else { 0.0 };
            (Vec2::new(0.0, s * amp), 0.0)
        }),
        exact: Some(ExactSolution::Stokes { nu: mu, amplitude: amp }),
        steady_tol: None,
        c_alpha_min: 0.0,
        sweep: Vec2::new(1.0, 0.0),
    }
}

/// Lid-driven cavity on the unit square at `Re = 1 / mu`, CFL-controlled.
pub fn cavity(n: usize, mu: f64, cfl: f64) -> BenchmarkCase {
    let bcs = map_of([
        (1, BoundaryCondition::NoSlip),
        (2, BoundaryCondition::NoSlip),
        (3, BoundaryCondition::DirichletVelocity(constant_vector(Vec2::new(1.0, 0.0)))),
        (4, BoundaryCondition::NoSlip),
    ]);
    BenchmarkCase {
        name: CaseName::Cavity,
        mesh: MeshSpec { nx: n, ny: n, domain: Rectangle::new(0.0, 1.0, 0.0, 1.0), diagonals: Diagonals::UnionJack },
        bcs,
        mu,
        rho: 1.0,
        controls: TimeControls {
            mode: TimeMode::Cfl { cfl, dt_max: 1.0 },
            t_end: 1e4,
            max_steps: 2000,
        },
        initial: Arc::new(|_| (Vec2::zeros(), 1.0)),
        exact: None,
        steady_tol: Some(1e-6),
        c_alpha_min: 0.0,
        sweep: Vec2::new(1.0, 0.0),
    }
}

/// Plates at `x_2 = +-0.2` over `x_1 in [-0.5, 1]`, `Wo = 10`, started from
/// the periodic exact state.
pub fn womersley(ny: usize) -> BenchmarkCase {
    let (x0, x1) = (-0.5, 1.0);
    let flow = Womersley::with_number(10.0, 0.2, 1.0, 1.0, 8.94e-4);
    let p = move |x: Vec2, t: f64| flow.pressure(x.x, t, x1);
    let bcs = map_of([
        (1, BoundaryCondition::NoSlip),
        (3, BoundaryCondition::NoSlip),
        (4, BoundaryCondition::PressureInlet { velocity: None, pressure: Arc::new(p) }),
        (2, BoundaryCondition::PressureOutlet(Arc::new(p))),
    ]);
    let exact = ExactSolution::Womersley { flow, x_ref: x1 };
    BenchmarkCase {
        name: CaseName::Womersley,
        mesh: MeshSpec { nx: 6, ny, domain: Rectangle::new(x0, x1, -0.2, 0.2), diagonals: Diagonals::Forward },
        bcs,
        mu: flow.mu,
        rho: flow.rho,
        controls: TimeControls::fixed(2.5e-3, 2.45),
        initial: Arc::new(move |x| exact.evaluate(x, 0.0).unwrap_or((Vec2::zeros(), 0.0))),
        exact: Some(exact),
        steady_tol: None,
        c_alpha_min: 0.5,
        sweep: Vec2::new(1.0, 0.0),
    }
}

/// Pressure-driven channel `[0, 2] x [-0.5, 0.5]` with centerline speed 1,
/// started from rest.
pub fn poiseuille2d(ny: usize) -> BenchmarkCase {
    let (x0, x1) = (0.0, 2.0);
    let flow = Poiseuille { half_width: 0.5, gradient: 0.8, mu: 0.1 };
    let p = move |x: Vec2, _t: f64| flow.pressure(x.x, x1);
    let bcs = map_of([
        (1, BoundaryCondition::NoSlip),
        (3, BoundaryCondition::NoSlip),
        (4, BoundaryCondition::PressureInlet { velocity: None, pressure: Arc::new(p) }),
        (2, BoundaryCondition::PressureOutlet(Arc::new(p))),
    ]);
    BenchmarkCase {
        name: CaseName::Poiseuille2d,
        mesh: MeshSpec { nx: 2 * ny, ny, domain: Rectangle::new(x0, x1, -0.5, 0.5), diagonals: Diagonals::Forward },
        bcs,
        mu: flow.mu,
        rho: 1.0,
        controls: TimeControls {
            mode: TimeMode::FixedDt(0.1),
            t_end: 1e3,
            max_steps: 5000,
        },
        initial: Arc::new(move |x| (Vec2::zeros(), flow.pressure(x.x, x1))),
        exact: Some(ExactSolution::Poiseuille { flow, x_ref: x1 }),
        steady_tol: Some(1e-6),
        c_alpha_min: 0.0,
        sweep: Vec2::new(1.0, 0.0),
    }
}

/// Default instance of each case.
pub fn default_case(name: CaseName) -> BenchmarkCase {
    match name {
        CaseName::Tgv2d => tgv2d(0),
        CaseName::Stokes1 => stokes1(1e-2),
        CaseName::Cavity => cavity(38, 1e-2, 100.0),
        CaseName::Womersley => womersley(60),
        CaseName::Poiseuille2d => poiseuille2d(20),
    }
}
