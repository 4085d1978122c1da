//! Projection stage: P1 pressure-increment Poisson problem and momentum
//! correction.

use crate::driver::bc::{BoundaryData, BoundaryMap};
use crate::error::{Result, SolverError};
use crate::krylov::{cg_solve, KrylovConfig, KrylovMethod, KrylovStats, LinearOperator};
use crate::meshcore::Meshes;
use crate::transport::field::{add_cell, cell, set_cell};
use crate::transport::gradient::p1_cell_gradients;
use crate::Vec2;

/// Adds the P1 stiffness product `A x` over the pressure dofs to `y`.
pub fn laplacian_apply(meshes: &Meshes, x: &[f64], y: &mut [f64]) {
    y.iter_mut().for_each(|v| *v = 0.0);
    let dofs = &meshes.dual.vertex_dofs;
    for (t, tg) in meshes.primal.triangles.iter().zip(&meshes.geometry.triangles) {
        let d = [dofs[t[0]], dofs[t[1]], dofs[t[2]]];
        for a in 0..3 {
            let mut s = 0.0;
            for b in 0..3 {
                s += tg.p1_stiffness(a, b) * x[d[b]];
            }
            y[d[a]] += s;
        }
    }
}

/// Poisson problem for the pressure increment.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSystem {
    pub rhs: Vec<f64>,
    /// Prescribed increment per pressure dof.
    pub dirichlet: Vec<Option<f64>>,
}

impl ProjectionSystem {
    pub fn n_dofs(&self) -> usize {
        self.rhs.len()
    }

    pub fn has_dirichlet(&self) -> bool {
        self.dirichlet.iter().any(|d| d.is_some())
    }
}

/// Right-hand side `(1/dt) int W* . grad psi - (1/dt) int_boundary psi W^{n+1} . n`
/// and Dirichlet data `p_BC(t_new) - P^n` on pressure boundaries.
///
/// Without any pressure boundary the dof `pin` is fixed to zero; with
/// neither, the system is singular.
#[allow(clippy::too_many_arguments)]
pub fn assemble_projection(
    w_star: &[f64],
    pn: &[f64],
    meshes: &Meshes,
    bcs: &BoundaryMap,
    t_new: f64,
    dt: f64,
    rho: f64,
    pin: Option<usize>,
) -> Result<ProjectionSystem> {
    let nd = meshes.dual.n_pressure_dofs;
    let dofs = &meshes.dual.vertex_dofs;
    let mut rhs = vec![0.0; nd];
    for (k, (t, tg)) in meshes.primal.triangles.iter().zip(&meshes.geometry.triangles).enumerate() {
        let tc = meshes.dual.triangle_cells[k];
        let mean = (cell(w_star, tc[0]) + cell(w_star, tc[1]) + cell(w_star, tc[2])) / 3.0;
        for m in 0..3 {
            rhs[dofs[t[m]]] += tg.area * mean.dot(&tg.grad_lambda[m]) / dt;
        }
    }
    let mut dirichlet = vec![None; nd];
    for (k, be) in meshes.primal.boundary_edges.iter().enumerate() {
        if meshes.primal.periodic_pairs.iter().any(|p| p.first == k || p.second == k) {
            continue;
        }
        let bc = bcs
            .get(be.tag)
            .ok_or_else(|| crate::Error::Config(format!("boundary tag {} has no boundary condition", be.tag)))?;
        let [a, b] = be.vertices;
        let (pa, pb) = (meshes.primal.vertices[a], meshes.primal.vertices[b]);
        if bc.pressure(pa, t_new).is_some() {
            for v in [a, b] {
                let x = meshes.primal.vertices[v];
                let p = bc.pressure(x, t_new).unwrap_or(0.0);
                dirichlet[dofs[v]] = Some(p - pn[dofs[v]]);
            }
            continue;
        }
        let mid = (pa + pb) * 0.5;
        if let Some(u) = bc.normal_velocity_source(mid, t_new) {
            let eta = Vec2::new(pb.y - pa.y, pa.x - pb.x);
            let q = rho * u.dot(&eta) / dt;
            rhs[dofs[a]] -= 0.5 * q;
            rhs[dofs[b]] -= 0.5 * q;
        }
    }
    if !dirichlet.iter().any(|d| d.is_some()) {
        match pin {
            Some(p) if p < nd => dirichlet[p] = Some(0.0),
            _ => return Err(SolverError::SingularSystem.into()),
        }
    }
    Ok(ProjectionSystem { rhs, dirichlet })
}

struct ReducedLaplacian<'a> {
    meshes: &'a Meshes,
    dirichlet: &'a [Option<f64>],
}

impl LinearOperator for ReducedLaplacian<'_> {
    fn dim(&self) -> usize {
        self.dirichlet.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut xm = x.to_vec();
        for (i, d) in self.dirichlet.iter().enumerate() {
            if d.is_some() {
                xm[i] = 0.0;
            }
        }
        laplacian_apply(self.meshes, &xm, y);
        for (i, d) in self.dirichlet.iter().enumerate() {
            if d.is_some() {
                y[i] = x[i];
            }
        }
    }
}

/// Solves for `dP` by lifting the Dirichlet data and running CG on the free
/// dofs; prescribed entries are reproduced exactly.
pub fn solve_projection(system: &ProjectionSystem, meshes: &Meshes, cfg: &KrylovConfig) -> Result<(Vec<f64>, KrylovStats)> {
    let nd = system.n_dofs();
    let lift: Vec<f64> = system.dirichlet.iter().map(|d| d.unwrap_or(0.0)).collect();
    let mut a_lift = vec![0.0; nd];
    laplacian_apply(meshes, &lift, &mut a_lift);
    let rhs: Vec<f64> = (0..nd)
        .map(|i| if system.dirichlet[i].is_some() { 0.0 } else { system.rhs[i] - a_lift[i] })
        .collect();
    let op = ReducedLaplacian { meshes, dirichlet: &system.dirichlet };
    let cg_cfg = KrylovConfig { method: KrylovMethod::Cg, ..*cfg };
    let (c, stats) = cg_solve(&op, &rhs, &cg_cfg)?;
    if !stats.converged {
        return Err(SolverError::NotConverged(format!(
            "pressure CG reached {} iterations at relative residual {:.3e}",
            stats.iterations, stats.relative_residual
        ))
        .into());
    }
    let dp = (0..nd).map(|i| system.dirichlet[i].unwrap_or(c[i])).collect();
    Ok((dp, stats))
}

/// `W^{n+1} = W* - dt grad(dP)`, the gradient averaged onto each dual cell.
pub fn post_projection_update(w_star: &[f64], dp: &[f64], meshes: &Meshes, dt: f64) -> Vec<f64> {
    let g = p1_cell_gradients(dp, meshes);
    let mut w = w_star.to_vec();
    for (i, gi) in g.iter().enumerate() {
        add_cell(&mut w, i, -dt * gi);
    }
    w
}

/// Per-cell discrete divergence `sum_j 0.5 (u_i + u_j) . eta_ij`, boundary
/// faces closed with the residual ghost states.
pub fn divergence_measure(w: &[f64], meshes: &Meshes, boundary: &BoundaryData, rho: f64) -> Vec<f64> {
    let (dual, geom) = (&meshes.dual, &meshes.geometry);
    let mut d = vec![0.0; dual.n_cells()];
    for (f, face) in dual.faces.iter().enumerate() {
        let [a, b] = face.cells;
        let q = 0.5 * (cell(w, a) + cell(w, b)).dot(&geom.face_normal[f]) / rho;
        d[a] += q;
        d[b] -= q;
    }
    for (k, bf) in dual.boundary_faces.iter().enumerate() {
        let n = geom.boundary_normal[k] / geom.boundary_length[k];
        let wi = cell(w, bf.cell);
        let wg = boundary.ghosts[k].state(wi, n);
        d[bf.cell] += 0.5 * (wi + wg).dot(&geom.boundary_normal[k]) / rho;
    }
    d
}

/// `sqrt(sum D_i^2 / |C_i|)`
pub fn divergence_norm(w: &[f64], meshes: &Meshes, boundary: &BoundaryData, rho: f64) -> f64 {
    divergence_measure(w, meshes, boundary, rho)
        .iter()
        .zip(&meshes.geometry.cell_volume)
        .map(|(d, v)| d * d / v)
        .sum::<f64>()
        .sqrt()
}

/// P1-tested divergence `int W . grad psi - int_boundary psi rho u_BC . n`
/// per pressure dof, the quantity the projection drives to zero; dofs with
/// prescribed pressure are reported as zero.
pub fn weak_divergence(w: &[f64], meshes: &Meshes, bcs: &BoundaryMap, t: f64, rho: f64) -> Result<Vec<f64>> {
    let zeros = vec![0.0; meshes.dual.n_pressure_dofs];
    let sys = assemble_projection(w, &zeros, meshes, bcs, t, 1.0, rho, Some(0))?;
    let pressure_bc = bcs.has_pressure_boundary();
    Ok(sys
        .rhs
        .iter()
        .zip(&sys.dirichlet)
        .map(|(r, d)| if pressure_bc && d.is_some() { 0.0 } else { r / rho })
        .collect())
}

/// `sqrt(sum D_v^2 / A_v)` of [`weak_divergence`] with lumped vertex areas.
pub fn weak_divergence_norm(w: &[f64], meshes: &Meshes, bcs: &BoundaryMap, t: f64, rho: f64) -> Result<f64> {
    Ok(weak_divergence(w, meshes, bcs, t, rho)?
        .iter()
        .zip(&meshes.geometry.dof_area)
        .map(|(d, a)| d * d / a)
        .sum::<f64>()
        .sqrt())
}

/// Overwrites strongly imposed cells after the correction.
pub fn reimpose(w: &mut [f64], boundary: &BoundaryData) {
    for (i, d) in boundary.dirichlet.iter().enumerate() {
        if let Some(v) = d {
            set_cell(w, i, *v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::bc::{constant_scalar, BoundaryCondition};
    use crate::krylov::testing::dense_solve;
    use crate::meshcore::{generate_structured_triangulation, Rectangle, SideTags};
    use crate::transport::field::from_cells;
    use std::f64::consts::PI;

    fn square(n: usize, l: f64) -> Meshes {
        Meshes::build(generate_structured_triangulation(n, n, Rectangle::new(0.0, l, 0.0, l), SideTags::default()).unwrap()).unwrap()
    }

    fn periodic(n: usize) -> Meshes {
        let l = 2.0 * PI;
        let mut m = generate_structured_triangulation(n, n, Rectangle::new(0.0, l, 0.0, l), SideTags::default()).unwrap();
        m.pair_periodic(4, 2, Vec2::new(l, 0.0)).unwrap();
        m.pair_periodic(1, 3, Vec2::new(0.0, l)).unwrap();
        Meshes::build(m).unwrap()
    }

    fn all_outlets() -> BoundaryMap {
        (1..=4).fold(BoundaryMap::new(), |b, t| b.with(t, BoundaryCondition::PressureOutlet(constant_scalar(0.0))))
    }

    fn cfg() -> KrylovConfig {
        KrylovConfig { method: KrylovMethod::Cg, tol: 1e-13, max_iter: 5000, restart: 30 }
    }

    #[test]
    fn laplacian_symmetric_with_zero_row_sums() {
        let meshes = periodic(5);
        let nd = meshes.dual.n_pressure_dofs;
        let x: Vec<f64> = (0..nd).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let y: Vec<f64> = (0..nd).map(|i| ((i * 3) % 5) as f64 * 0.3).collect();
        let (mut ax, mut ay) = (vec![0.0; nd], vec![0.0; nd]);
        laplacian_apply(&meshes, &x, &mut ax);
        laplacian_apply(&meshes, &y, &mut ay);
        let (a, b): (f64, f64) = (crate::krylov::dot(&y, &ax), crate::krylov::dot(&x, &ay));
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        let mut ac = vec![0.0; nd];
        laplacian_apply(&meshes, &vec![1.0; nd], &mut ac);
        assert!(ac.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn zero_momentum_gives_zero_increment() {
        let meshes = square(4, 1.0);
        let w = vec![0.0; 2 * meshes.n_cells()];
        let pn = vec![0.0; meshes.dual.n_pressure_dofs];
        let sys = assemble_projection(&w, &pn, &meshes, &all_outlets(), 0.1, 0.1, 1.0, None).unwrap();
        assert!(sys.rhs.iter().all(|r| *r == 0.0));
        let (dp, _) = solve_projection(&sys, &meshes, &cfg()).unwrap();
        assert!(dp.iter().all(|p| *p == 0.0));
    }

    #[test]
    fn constant_momentum_on_periodic_box_is_compatible() {
        let meshes = periodic(6);
        let w = from_cells((0..meshes.n_cells()).map(|_| Vec2::new(0.4, -1.3)));
        let pn = vec![0.0; meshes.dual.n_pressure_dofs];
        let sys = assemble_projection(&w, &pn, &meshes, &BoundaryMap::new(), 0.1, 0.1, 1.0, Some(0)).unwrap();
        assert!(sys.rhs.iter().all(|r| r.abs() < 1e-12));
        assert_eq!(sys.dirichlet[0], Some(0.0));
        assert!(matches!(
            assemble_projection(&w, &pn, &meshes, &BoundaryMap::new(), 0.1, 0.1, 1.0, None),
            Err(crate::Error::Solver(SolverError::SingularSystem))
        ));
    }

    #[test]
    fn periodic_rhs_sums_to_zero() {
        let meshes = periodic(7);
        let w = from_cells(meshes.geometry.node_position.iter().map(|x| Vec2::new((2.0 * x.y).sin() + x.x.cos(), x.x.sin() * x.y.cos())));
        let pn = vec![0.0; meshes.dual.n_pressure_dofs];
        let sys = assemble_projection(&w, &pn, &meshes, &BoundaryMap::new(), 0.0, 0.05, 1.0, Some(0)).unwrap();
        let s: f64 = sys.rhs.iter().sum();
        let scale: f64 = sys.rhs.iter().map(|r| r.abs()).sum();
        assert!(s.abs() < 1e-13 * scale);
    }

    #[test]
    fn linear_increment_is_exact_on_strip() {
        let m = generate_structured_triangulation(6, 2, Rectangle::new(0.0, 3.0, 0.0, 1.0), SideTags::default()).unwrap();
        let meshes = Meshes::build(m).unwrap();
        // Neumann top/bottom, linear Dirichlet data left/right
        let bcs = BoundaryMap::new()
            .with(1, BoundaryCondition::InviscidWall)
            .with(3, BoundaryCondition::InviscidWall)
            .with(4, BoundaryCondition::PressureInlet { velocity: None, pressure: constant_scalar(2.0) })
            .with(2, BoundaryCondition::PressureOutlet(constant_scalar(-1.0)));
        let w = vec![0.0; 2 * meshes.n_cells()];
        let pn = vec![0.0; meshes.dual.n_pressure_dofs];
        let sys = assemble_projection(&w, &pn, &meshes, &bcs, 0.0, 1.0, 1.0, None).unwrap();
        let (dp, _) = solve_projection(&sys, &meshes, &cfg()).unwrap();
        for (v, x) in meshes.primal.vertices.iter().enumerate() {
            assert!((dp[meshes.dual.vertex_dofs[v]] - (2.0 - x.x)).abs() < 1e-11);
        }
    }

    #[test]
    fn two_triangle_square_matches_dense() {
        let meshes = square(1, 1.0);
        // vertex 0 pinned, unit load on vertex 2
        let sys = ProjectionSystem { rhs: vec![0.0, 0.0, 1.0, 0.0], dirichlet: vec![Some(0.0), None, None, None] };
        let (dp, _) = solve_projection(&sys, &meshes, &cfg()).unwrap();
        let mut k = vec![vec![0.0; 4]; 4];
        for j in 0..4 {
            let mut e = vec![0.0; 4];
            e[j] = 1.0;
            let mut col = vec![0.0; 4];
            laplacian_apply(&meshes, &e, &mut col);
            for i in 0..4 {
                k[i][j] = col[i];
            }
        }
        let reduced: Vec<Vec<f64>> = (1..4).map(|i| (1..4).map(|j| k[i][j]).collect()).collect();
        let oracle = dense_solve(&reduced, &[0.0, 1.0, 0.0]);
        assert_eq!(dp[0], 0.0);
        for i in 0..3 {
            assert!((dp[i + 1] - oracle[i]).abs() < 1e-12);
        }
    }

    fn manufactured_error(n: usize) -> f64 {
        let meshes = square(n, PI);
        let nd = meshes.dual.n_pressure_dofs;
        let exact = |x: Vec2| x.x.sin() * x.y.sin();
        let mut rhs = vec![0.0; nd];
        // edge-midpoint quadrature of int 2 sin x sin y psi
        for (t, tg) in meshes.primal.triangles.iter().zip(&meshes.geometry.triangles) {
            for l in 0..3 {
                let f = 2.0 * exact(tg.edge_midpoints[l]);
                for m in [l, (l + 1) % 3] {
                    rhs[meshes.dual.vertex_dofs[t[m]]] += tg.area / 3.0 * f * 0.5;
                }
            }
        }
        let dirichlet = (0..nd)
            .map(|d| {
                let x = meshes.geometry.dof_position[d];
                let on_boundary = x.x.abs() < 1e-12 || x.y.abs() < 1e-12 || (x.x - PI).abs() < 1e-12 || (x.y - PI).abs() < 1e-12;
                on_boundary.then_some(0.0)
            })
            .collect();
        let (dp, _) = solve_projection(&ProjectionSystem { rhs, dirichlet }, &meshes, &cfg()).unwrap();
        (0..nd)
            .map(|d| meshes.geometry.dof_area[d] * (dp[d] - exact(meshes.geometry.dof_position[d])).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn manufactured_second_order() {
        let e: Vec<f64> = [8, 16, 32].iter().map(|&n| manufactured_error(n)).collect();
        for k in 1..3 {
            let rate = (e[k - 1] / e[k]).ln() / 2f64.ln();
            assert!(rate >= 1.9, "rate {rate} from {:?}", e);
        }
    }

    #[test]
    fn correction_examples() {
        let meshes = square(3, 1.0);
        let n = meshes.n_cells();
        let w: Vec<f64> = (0..2 * n).map(|i| i as f64 * 0.1).collect();
        let constant = vec![3.0; meshes.dual.n_pressure_dofs];
        assert_eq!(post_projection_update(&w, &constant, &meshes, 0.1), w);
        let linear: Vec<f64> = meshes.geometry.dof_position.iter().map(|x| x.x).collect();
        let out = post_projection_update(&w, &linear, &meshes, 0.1);
        for i in 0..n {
            assert!((cell(&out, i) - cell(&w, i) + Vec2::new(0.1, 0.0)).norm() < 1e-14);
        }
    }
}
