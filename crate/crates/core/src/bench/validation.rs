//! Case runs compared against exact profiles or reference data.

use super::cases::{cavity, poiseuille2d, stokes1, womersley};
use super::exact::ExactSolution;
use super::sampling::{compare_cavity, ghia_re100, sample_line, ProfileDeviation};
use crate::driver::{MonitorRecord, RunSummary, SolverSettings};
use crate::error::{Error, Result};
use crate::Vec2;

/// Output times of the Womersley comparison.
pub const WOMERSLEY_TIMES: [f64; 5] = [0.35, 0.7, 1.4, 2.1, 2.45];

/// Velocity along a sampling line with the exact value where one exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub t: f64,
    pub x: Vec2,
    pub u: Vec2,
    pub exact: Option<Vec2>,
}

/// Sampled profile at one time with its largest pointwise deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCheck {
    pub t: f64,
    pub rows: Vec<ProfileRow>,
    /// `max |u - u_exact|` over the rows.
    pub max_error: f64,
    /// Velocity scale the error is measured against.
    pub scale: f64,
}

impl ProfileCheck {
    pub fn relative_error(&self) -> f64 {
        self.max_error / self.scale
    }
}

/// Checks plus the run statistics they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRun<T> {
    pub checks: T,
    pub summary: RunSummary,
    pub history: Vec<MonitorRecord>,
}

fn profile(
    w: &[f64],
    meshes: &crate::meshcore::Meshes,
    rho: f64,
    exact: &ExactSolution,
    t: f64,
    line: (Vec2, Vec2, usize),
    scale: f64,
) -> Result<ProfileCheck> {
    let mut rows = Vec::with_capacity(line.2);
    let mut max_error = 0.0f64;
    for (x, u) in sample_line(w, meshes, rho, line.0, line.1, line.2)? {
        let e = exact.evaluate(x, t)?.0;
        max_error = max_error.max((u - e).norm());
        rows.push(ProfileRow { t, x, u, exact: Some(e) });
    }
    Ok(ProfileCheck { t, rows, max_error, scale })
}

fn exact_of(e: Option<ExactSolution>) -> Result<ExactSolution> {
    e.ok_or_else(|| Error::InvalidArgument("case has no exact solution".into()))
}

/// Shear layer at `t = 1` on the line `x_2 = 0`, against the 0.1 amplitude.
pub fn stokes_check(mu: f64, numerics: &SolverSettings) -> Result<CaseRun<ProfileCheck>> {
    let case = stokes1(mu);
    let exact = exact_of(case.exact)?;
    let mut sim = case.simulation(numerics)?;
    let summary = sim.run(&mut |_, _| Ok(()))?;
    let line = (Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0), 201);
    let check = profile(&sim.state.w, &sim.meshes, case.rho, &exact, sim.state.t, line, 0.1)?;
    Ok(CaseRun {
        checks: check,
        summary,
        history: sim.history,
    })
}

/// Womersley profiles on `x_1 = 0` at [`WOMERSLEY_TIMES`], against the peak
/// amplitude of the exact solution.
pub fn womersley_check(ny: usize, numerics: &SolverSettings) -> Result<CaseRun<Vec<ProfileCheck>>> {
    let case = womersley(ny);
    let exact = exact_of(case.exact)?;
    let ExactSolution::Womersley { flow, .. } = exact else {
        return Err(Error::InvalidArgument("womersley case without Womersley solution".into()));
    };
    let peak = flow.peak_amplitude();
    let line = (Vec2::new(0.0, -flow.half_width), Vec2::new(0.0, flow.half_width), 81);
    let mut sim = case.simulation(numerics)?;
    let mut checks = Vec::new();
    let summary = sim.run(&mut |sim, rec| {
        for &ts in &WOMERSLEY_TIMES {
            if (rec.t - ts).abs() < 1e-9 * ts.max(1.0) {
                checks.push(profile(&sim.state.w, &sim.meshes, case.rho, &exact, rec.t, line, peak)?);
            }
        }
        Ok(())
    })?;
    if checks.len() != WOMERSLEY_TIMES.len() {
        return Err(Error::InvalidArgument(format!(
            "time steps do not land on all comparison times ({} of {})",
            checks.len(),
            WOMERSLEY_TIMES.len()
        )));
    }
    Ok(CaseRun {
        checks,
        summary,
        history: sim.history,
    })
}

/// Steady channel profile on the mid-section `x_1 = 1`, against the
/// centerline speed.
pub fn poiseuille_check(ny: usize, numerics: &SolverSettings) -> Result<CaseRun<ProfileCheck>> {
    let case = poiseuille2d(ny);
    let exact = exact_of(case.exact)?;
    let ExactSolution::Poiseuille { flow, .. } = exact else {
        return Err(Error::InvalidArgument("poiseuille case without Poiseuille solution".into()));
    };
    let mut sim = case.simulation(numerics)?;
    let summary = sim.run(&mut |_, _| Ok(()))?;
    let line = (Vec2::new(1.0, -flow.half_width), Vec2::new(1.0, flow.half_width), 101);
    let check = profile(&sim.state.w, &sim.meshes, case.rho, &exact, sim.state.t, line, flow.centerline_velocity())?;
    Ok(CaseRun {
        checks: check,
        summary,
        history: sim.history,
    })
}

/// Cavity centerlines against the bundled reference with tolerance
/// `max(rel |ref|, abs)`.
pub fn cavity_check(n: usize, mu: f64, cfl: f64, numerics: &SolverSettings, rel: f64, abs: f64) -> Result<CaseRun<Vec<ProfileDeviation>>> {
    let case = cavity(n, mu, cfl);
    let reference = ghia_re100()?;
    let mut sim = case.simulation(numerics)?;
    let summary = sim.run(&mut |_, _| Ok(()))?;
    let checks = compare_cavity(&sim.state.w, &sim.meshes, case.rho, &reference, rel, abs)?;
    Ok(CaseRun {
        checks,
        summary,
        history: sim.history,
    })
}
