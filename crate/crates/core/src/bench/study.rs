use super::cases::BenchmarkCase;
use super::exact::ExactSolution;
use crate::driver::{Simulation, SolverSettings};
use crate::error::Result;
use crate::meshcore::Meshes;

/// `sqrt(sum_i vol_i |v_i - e_i|^2)` over blocks of `dim` components.
pub fn l2_error(numerical: &[f64], exact: &[f64], volumes: &[f64]) -> f64 {
    let dim = numerical.len() / volumes.len().max(1);
    volumes
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let s: f64 = (0..dim).map(|c| (numerical[i * dim + c] - exact[i * dim + c]).powi(2)).sum();
            v * s
        })
        .sum::<f64>()
        .sqrt()
}

/// Momentum error on dual cells against `rho u_exact` at the CR nodes.
pub fn momentum_error(w: &[f64], meshes: &Meshes, exact: &ExactSolution, t: f64, rho: f64) -> Result<f64> {
    let mut e = Vec::with_capacity(w.len());
    for &x in &meshes.geometry.node_position {
        let u = exact.evaluate(x, t)?.0 * rho;
        e.extend([u.x, u.y]);
    }
    Ok(l2_error(w, &e, &meshes.geometry.cell_volume))
}

/// Pressure error on vertex dofs with lumped areas, after shifting the
/// numerical field to the area-weighted mean of the exact one.
pub fn pressure_error(p: &[f64], meshes: &Meshes, exact: &ExactSolution, t: f64) -> Result<f64> {
    let g = &meshes.geometry;
    let mut e = Vec::with_capacity(p.len());
    for &x in &g.dof_position {
        e.push(exact.evaluate(x, t)?.1);
    }
    let area: f64 = g.dof_area.iter().sum();
    let mean = |v: &[f64]| v.iter().zip(&g.dof_area).map(|(a, b)| a * b).sum::<f64>() / area;
    let shift = mean(&e) - mean(p);
    let shifted: Vec<f64> = p.iter().map(|v| v + shift).collect();
    Ok(l2_error(&shifted, &e, &g.dof_area))
}

/// Observed order between two levels.
pub fn convergence_rate(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Longest primal edge.
pub fn mesh_size(meshes: &Meshes) -> f64 {
    meshes
        .dual
        .edges
        .edges
        .iter()
        .map(|&[a, b]| (meshes.primal.vertices[a] - meshes.primal.vertices[b]).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub level: usize,
    pub h: f64,
    pub e_p: f64,
    pub e_w: f64,
    /// Rates against the previous level; `None` on the first.
    pub rate_p: Option<f64>,
    pub rate_w: Option<f64>,
    pub steps: usize,
    pub newton_iters_avg: f64,
    pub krylov_iters_avg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub case: String,
    pub rows: Vec<ErrorRow>,
    /// Level and message of the first level that failed.
    pub failure: Option<(usize, String)>,
}

impl ErrorReport {
    pub fn finest_rates(&self) -> Option<(f64, f64)> {
        let r = self.rows.last()?;
        Some((r.rate_p?, r.rate_w?))
    }
}

/// Errors of a finished simulation at its current time.
pub fn simulation_errors(sim: &Simulation, exact: &ExactSolution) -> Result<(f64, f64)> {
    let t = sim.state.t;
    Ok((
        pressure_error(&sim.state.p, &sim.meshes, exact, t)?,
        momentum_error(&sim.state.w, &sim.meshes, exact, t, sim.settings.flux.rho)?,
    ))
}

fn run_level(case: &BenchmarkCase, settings: &SolverSettings, level: usize) -> Result<ErrorRow> {
    let exact = case
        .exact
        .ok_or_else(|| crate::Error::InvalidArgument(format!("case {} has no exact solution", case.name)))?;
    let mut sim = case.simulation(settings)?;
    sim.run(&mut |_, _| Ok(()))?;
    let (e_p, e_w) = simulation_errors(&sim, &exact)?;
    let n = sim.history.len().max(1) as f64;
    Ok(ErrorRow {
        level,
        h: mesh_size(&sim.meshes),
        e_p,
        e_w,
        rate_p: None,
        rate_w: None,
        steps: sim.state.step,
        newton_iters_avg: sim.history.iter().map(|r| r.newton_iters as f64).sum::<f64>() / n,
        krylov_iters_avg: sim.history.iter().map(|r| r.krylov_iters as f64).sum::<f64>() / n,
    })
}

/// Runs `case_at(level)` for each level and fills rates between consecutive
/// levels. A failing level stops the study and is recorded in the report.
pub fn convergence_study(
    name: &str,
    case_at: impl Fn(usize) -> BenchmarkCase,
    levels: &[usize],
    settings: &SolverSettings,
) -> Result<ErrorReport> {
    if levels.len() < 2 {
        return Err(crate::Error::InvalidArgument("a convergence study needs at least two levels".into()));
    }
    let mut report = ErrorReport {
        case: name.to_string(),
        rows: Vec::new(),
        failure: None,
    };
    for &level in levels {
        match run_level(&case_at(level), settings, level) {
            Ok(mut row) => {
                if let Some(prev) = report.rows.last() {
                    row.rate_p = Some(convergence_rate(prev.e_p, row.e_p, prev.h, row.h));
                    row.rate_w = Some(convergence_rate(prev.e_w, row.e_w, prev.h, row.h));
                }
                report.rows.push(row);
            }
            Err(e) => {
                report.failure = Some((level, e.to_string()));
                break;
            }
        }
    }
    Ok(report)
}
