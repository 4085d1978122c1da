//! Time loop, boundary conditions and step control.

pub mod bc;

pub use bc::{
    apply_boundary_ghosts, constant_scalar, constant_vector, BoundaryCondition, BoundaryData, BoundaryMap, GhostContext, GhostRule,
    ScalarFn, VectorFn,
};

use crate::error::{Error, Result};
use crate::krylov::{newton_solve, norm, KrylovConfig, KrylovMethod, NewtonConfig};
use crate::meshcore::{default_bin_width, reorder_cells, CellOrdering, Meshes};
use crate::pressure::{
    assemble_projection, divergence_norm, post_projection_update, reimpose, solve_projection, weak_divergence_norm,
};
use crate::transport::field::cell;
use crate::transport::{compute_face_coefficients, kinetic_energy, FluxConfig, FluxVariant, TransportSystem};
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeMode {
    FixedDt(f64),
    Cfl { cfl: f64, dt_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeControls {
    pub mode: TimeMode,
    pub t_end: f64,
    pub max_steps: usize,
}

impl TimeControls {
    pub fn fixed(dt: f64, t_end: f64) -> Self {
        Self {
            mode: TimeMode::FixedDt(dt),
            t_end,
            max_steps: usize::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.mode {
            TimeMode::FixedDt(dt) => dt > 0.0,
            TimeMode::Cfl { cfl, dt_max } => cfl > 0.0 && dt_max > 0.0,
        };
        if !ok || !(self.t_end >= 0.0) {
            return Err(Error::Config(format!("invalid time controls {self:?}")));
        }
        Ok(())
    }
}

/// `cfl * r_min / (zeta_max + c_alpha)`, or `dt_max` when the signal speed vanishes.
pub fn cfl_time_step(r_min: f64, zeta_max: f64, c_alpha: f64, cfl: f64, dt_max: f64) -> f64 {
    let speed = zeta_max + c_alpha;
    if speed > 0.0 {
        cfl * r_min / speed
    } else {
        dt_max
    }
}

/// Largest convective eigenvalue bound `2 |u_ij^n|` over all faces.
pub fn max_signal_speed(w: &[f64], meshes: &Meshes, boundary: &BoundaryData, config: &FluxConfig) -> f64 {
    let c = compute_face_coefficients(w, meshes, boundary, config);
    c.interior.iter().chain(&c.boundary).map(|f| 2.0 * f.u_n.abs()).fold(0.0, f64::max)
}

/// Time step from the controls, clamped so that `t + dt <= t_end`.
pub fn compute_dt(w: &[f64], t: f64, meshes: &Meshes, boundary: &BoundaryData, config: &FluxConfig, controls: &TimeControls) -> f64 {
    let dt = match controls.mode {
        TimeMode::FixedDt(dt) => dt,
        TimeMode::Cfl { cfl, dt_max } => {
            let r_min = meshes.geometry.incircle_radius.iter().cloned().fold(f64::INFINITY, f64::min);
            cfl_time_step(r_min, max_signal_speed(w, meshes, boundary, config), config.c_alpha, cfl, dt_max)
        }
    };
    let remaining = controls.t_end - t;
    if dt >= remaining {
        remaining.max(0.0)
    } else {
        dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReorderSettings {
    pub direction: Vec2,
    pub anchor: Option<Vec2>,
    pub bin_width: Option<f64>,
}

impl Default for ReorderSettings {
    fn default() -> Self {
        Self {
            direction: Vec2::new(1.0, 0.0),
            anchor: None,
            bin_width: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub flux: FluxConfig,
    pub krylov: KrylovConfig,
    /// `None` selects the default for the flux variant.
    pub newton: Option<NewtonConfig>,
    pub pressure: KrylovConfig,
    pub reorder: ReorderSettings,
    /// Relative update rate below which the run counts as steady.
    pub steady_tol: Option<f64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            flux: FluxConfig::default(),
            krylov: KrylovConfig::default(),
            newton: None,
            pressure: KrylovConfig {
                method: KrylovMethod::Cg,
                tol: 1e-12,
                max_iter: 20_000,
                restart: 30,
            },
            reorder: ReorderSettings::default(),
            steady_tol: None,
        }
    }
}

impl SolverSettings {
    pub fn newton_config(&self) -> NewtonConfig {
        self.newton.unwrap_or(match self.flux.variant {
            FluxVariant::Ducros => NewtonConfig::ducros(),
            FluxVariant::Rusanov => NewtonConfig::rusanov(),
        })
    }
}

/// Momentum on dual cells and pressure on pressure dofs at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub w: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
    pub step: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MonitorRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub kinetic_energy: f64,
    pub divergence_norm: f64,
    /// Divergence norm of the intermediate momentum before projection.
    pub divergence_before: f64,
    /// P1-tested divergence norm before and after projection.
    pub weak_divergence_before: f64,
    pub weak_divergence: f64,
    pub newton_iters: usize,
    pub krylov_iters: usize,
    /// Final nonlinear residual norm.
    pub residual: f64,
    pub pressure_iters: usize,
    /// `||W^{n+1} - W^n|| / (dt ||W^{n+1}||)`.
    pub update_rate: f64,
    pub newton_monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub t: f64,
    pub steady: bool,
}

pub struct Simulation {
    pub meshes: Meshes,
    pub bcs: BoundaryMap,
    pub settings: SolverSettings,
    pub controls: TimeControls,
    pub ordering: CellOrdering,
    pub state: FieldState,
    pub history: Vec<MonitorRecord>,
}

impl Simulation {
    /// `w0` on dual cells and `p0` on pressure dofs; periodic pairings must
    /// already be applied to the mesh.
    pub fn new(meshes: Meshes, bcs: BoundaryMap, settings: SolverSettings, controls: TimeControls, w0: Vec<f64>, p0: Vec<f64>) -> Result<Self> {
        settings.flux.validate()?;
        settings.krylov.validate()?;
        controls.validate()?;
        bcs.validate(&meshes.primal)?;
        if w0.len() != 2 * meshes.n_cells() || p0.len() != meshes.dual.n_pressure_dofs {
            return Err(Error::InvalidArgument(format!(
                "initial fields have {} / {} entries, expected {} / {}",
                w0.len(),
                p0.len(),
                2 * meshes.n_cells(),
                meshes.dual.n_pressure_dofs
            )));
        }
        let r = settings.reorder;
        let dir = r.direction.try_normalize(0.0).ok_or_else(|| Error::Config("zero reordering direction".into()))?;
        let anchor = r.anchor.unwrap_or_else(|| {
            meshes.primal.vertices.iter().fold(Vec2::repeat(f64::INFINITY), |m, v| m.inf(v))
        });
        let width = r.bin_width.unwrap_or_else(|| default_bin_width(&meshes.geometry, dir).0);
        let ordering = reorder_cells(&meshes.dual, &meshes.geometry, dir, anchor, width)?;
        Ok(Self {
            meshes,
            bcs,
            settings,
            controls,
            ordering,
            state: FieldState { w: w0, p: p0, t: 0.0, step: 0 },
            history: Vec::new(),
        })
    }

    pub fn boundary_data(&self, t: f64) -> Result<BoundaryData> {
        BoundaryData::evaluate(&self.bcs, &self.meshes, t, self.settings.flux.rho)
    }

    pub fn kinetic_energy(&self) -> f64 {
        kinetic_energy(&self.state.w, &self.meshes.geometry, self.settings.flux.rho)
    }

    pub fn finished(&self) -> bool {
        let s = &self.state;
        s.t >= self.controls.t_end - 1e-12 * self.controls.t_end.abs().max(1.0) || s.step >= self.controls.max_steps
    }

    /// Advances one step; failures carry the step index and time.
    pub fn advance_step(&mut self) -> Result<MonitorRecord> {
        let (step, t) = (self.state.step, self.state.t);
        self.try_advance().map_err(|e| Error::Step {
            step: step + 1,
            time: t,
            source: Box::new(e),
        })
    }

    fn try_advance(&mut self) -> Result<MonitorRecord> {
        let flux = self.settings.flux;
        let old_bd = self.boundary_data(self.state.t)?;
        let dt = compute_dt(&self.state.w, self.state.t, &self.meshes, &old_bd, &flux, &self.controls);
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("non-positive time step {dt}")));
        }
        let t_new = self.state.t + dt;
        let bd = self.boundary_data(t_new)?;

        // transport-diffusion stage
        let wn = self.state.w.clone();
        let system = TransportSystem::new(&self.meshes, flux, dt, &wn, &self.state.p, &bd, &self.ordering);
        let (mut w_star, ns) = newton_solve(&system, system.initial_guess(), &self.settings.newton_config(), &self.settings.krylov)?;
        bd.impose(&mut w_star);
        let divergence_before = divergence_norm(&w_star, &self.meshes, &bd, flux.rho);
        let weak_divergence_before = weak_divergence_norm(&w_star, &self.meshes, &self.bcs, t_new, flux.rho)?;

        // projection stage
        let proj = assemble_projection(&w_star, &self.state.p, &self.meshes, &self.bcs, t_new, dt, flux.rho, Some(0))?;
        let (dp, ps) = solve_projection(&proj, &self.meshes, &self.settings.pressure)?;

        // post-projection stage
        let mut w = post_projection_update(&w_star, &dp, &self.meshes, dt);
        reimpose(&mut w, &bd);
        for (p, d) in self.state.p.iter_mut().zip(&dp) {
            *p += d;
        }
        let change: f64 = w.iter().zip(&wn).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let update_rate = change / (dt * norm(&w).max(f64::MIN_POSITIVE));
        self.state.w = w;
        self.state.t = t_new;
        self.state.step += 1;
        let rec = MonitorRecord {
            step: self.state.step,
            t: t_new,
            dt,
            kinetic_energy: self.kinetic_energy(),
            divergence_norm: divergence_norm(&self.state.w, &self.meshes, &bd, flux.rho),
            divergence_before,
            weak_divergence_before,
            weak_divergence: weak_divergence_norm(&self.state.w, &self.meshes, &self.bcs, t_new, flux.rho)?,
            newton_iters: ns.iterations,
            krylov_iters: ns.krylov_iterations,
            residual: ns.final_residual,
            pressure_iters: ps.iterations,
            update_rate,
            newton_monotone: ns.residual_history.windows(2).all(|p| p[1] < p[0]),
        };
        self.history.push(rec.clone());
        Ok(rec)
    }

    /// Steps until `t_end`, `max_steps` or steady state; `observer` sees
    /// every completed step.
    pub fn run(&mut self, observer: &mut dyn FnMut(&Simulation, &MonitorRecord) -> Result<()>) -> Result<RunSummary> {
        let mut steady = false;
        while !self.finished() {
            let rec = self.advance_step()?;
            observer(self, &rec)?;
            if let Some(tol) = self.settings.steady_tol {
                if rec.update_rate < tol {
                    steady = true;
                    break;
                }
            }
        }
        Ok(RunSummary {
            steps: self.state.step,
            t: self.state.t,
            steady,
        })
    }

    /// Momentum of cell `i`.
    pub fn momentum(&self, i: usize) -> Vec2 {
        cell(&self.state.w, i)
    }
}
