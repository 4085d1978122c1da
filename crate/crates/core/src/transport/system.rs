use crate::driver::bc::BoundaryData;
use crate::error::Result;
use crate::krylov::{LinearOperator, NonlinearSystem, Preconditioner, SgsPreconditioner};
use crate::meshcore::{CellOrdering, Meshes};
use crate::transport::field::{add_cell, cell, set_cell};
use crate::transport::flux::{flux_jacobians, linearized_flux, numerical_flux, FaceCoefficient, FluxVariant};
use crate::transport::gradient::{cr_cell_gradients, muscl_reconstruct, p1_cell_gradients, FaceStates};
use crate::transport::FluxConfig;
use crate::{Mat2, Vec2};

/// Face coefficients frozen at the old time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceCoefficients {
    pub interior: Vec<FaceCoefficient>,
    pub boundary: Vec<FaceCoefficient>,
}

/// Evaluates `u_ij^n` and the dissipation coefficients from the face states
/// of `W^n` (cell values at first order, MUSCL-extrapolated at second);
/// boundary faces use the ghost of the inner state.
pub fn compute_face_coefficients(wn: &[f64], meshes: &Meshes, boundary: &BoundaryData, config: &FluxConfig) -> FaceCoefficients {
    let (dual, geom) = (&meshes.dual, &meshes.geometry);
    let rho = config.rho;
    let states = if config.order == 2 {
        let g = cr_cell_gradients(wn, meshes);
        muscl_reconstruct(wn, Some(&g), meshes)
    } else {
        muscl_reconstruct(wn, None, meshes)
    };
    let interior = dual
        .faces
        .iter()
        .enumerate()
        .map(|(f, _)| {
            let n = geom.face_normal[f] / geom.face_length[f];
            let (a, b) = states.interior[f];
            FaceCoefficient::new(a / rho, b / rho, n, config.c_alpha)
        })
        .collect();
    let boundary = dual
        .boundary_faces
        .iter()
        .enumerate()
        .map(|(k, _)| {
            let n = geom.boundary_normal[k] / geom.boundary_length[k];
            let wi = states.boundary[k];
            let wg = boundary.ghosts[k].state(wi, n);
            FaceCoefficient::new(wi / rho, wg / rho, n, config.c_alpha)
        })
        .collect();
    FaceCoefficients { interior, boundary }
}

/// Nonlinear momentum system of one time step,
///
/// `f(W) = M (W - W^n) + dt sum |Gamma| flux + dt M (grad P^n - rho g) + dt nu K W`,
///
/// with strongly imposed cells replaced by `|C_i| (W_i - W_BC)`.
pub struct TransportSystem<'a> {
    pub meshes: &'a Meshes,
    pub config: FluxConfig,
    pub dt: f64,
    pub wn: &'a [f64],
    pub pressure_gradient: Vec<Vec2>,
    pub coefficients: FaceCoefficients,
    pub boundary: &'a BoundaryData,
    pub ordering: &'a CellOrdering,
    unit_normals: Vec<Vec2>,
    boundary_unit_normals: Vec<Vec2>,
}

impl<'a> TransportSystem<'a> {
    /// `boundary` holds the data of the new time level; `pn` is the old
    /// pressure on the pressure dofs.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        meshes: &'a Meshes,
        config: FluxConfig,
        dt: f64,
        wn: &'a [f64],
        pn: &[f64],
        boundary: &'a BoundaryData,
        ordering: &'a CellOrdering,
    ) -> Self {
        let geom = &meshes.geometry;
        let unit_normals = geom.face_normal.iter().zip(&geom.face_length).map(|(e, l)| e / *l).collect();
        let boundary_unit_normals = geom.boundary_normal.iter().zip(&geom.boundary_length).map(|(e, l)| e / *l).collect();
        Self {
            meshes,
            config,
            dt,
            wn,
            pressure_gradient: p1_cell_gradients(pn, meshes),
            coefficients: compute_face_coefficients(wn, meshes, boundary, &config),
            boundary,
            ordering,
            unit_normals,
            boundary_unit_normals,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.meshes.n_cells()
    }

    /// `W^n` with the strongly imposed cells set to their new values.
    pub fn initial_guess(&self) -> Vec<f64> {
        let mut w = self.wn.to_vec();
        self.boundary.impose(&mut w);
        w
    }

    fn states(&self, w: &[f64]) -> FaceStates {
        if self.config.order == 2 {
            let g = cr_cell_gradients(w, self.meshes);
            muscl_reconstruct(w, Some(&g), self.meshes)
        } else {
            muscl_reconstruct(w, None, self.meshes)
        }
    }

    /// Adds `sum_j |Gamma_ij| flux_ij` to every cell.
    fn add_fluxes(&self, w: &[f64], out: &mut [f64]) {
        let (dual, geom) = (&self.meshes.dual, &self.meshes.geometry);
        let s = self.states(w);
        let (v, rho) = (self.config.variant, self.config.rho);
        for (f, face) in dual.faces.iter().enumerate() {
            let (wa, wb) = s.interior[f];
            let fl = numerical_flux(wa, wb, self.unit_normals[f], &self.coefficients.interior[f], v, rho) * geom.face_length[f];
            add_cell(out, face.cells[0], fl);
            add_cell(out, face.cells[1], -fl);
        }
        for (k, bf) in dual.boundary_faces.iter().enumerate() {
            let n = self.boundary_unit_normals[k];
            let wi = s.boundary[k];
            let wg = self.boundary.ghosts[k].state(wi, n);
            let fl = numerical_flux(wi, wg, n, &self.coefficients.boundary[k], v, rho) * geom.boundary_length[k];
            add_cell(out, bf.cell, fl);
        }
    }

    /// Adds the directional derivative of the flux sum along `dw`.
    fn add_linear_fluxes(&self, base: Option<&FaceStates>, dw: &[f64], out: &mut [f64]) {
        let (dual, geom) = (&self.meshes.dual, &self.meshes.geometry);
        let d = self.states(dw);
        let (v, rho) = (self.config.variant, self.config.rho);
        let zero = Vec2::zeros();
        for (f, face) in dual.faces.iter().enumerate() {
            let (da, db) = d.interior[f];
            let (wa, wb) = base.map_or((zero, zero), |b| b.interior[f]);
            let fl = linearized_flux(da, db, wa, wb, self.unit_normals[f], &self.coefficients.interior[f], v, rho) * geom.face_length[f];
            add_cell(out, face.cells[0], fl);
            add_cell(out, face.cells[1], -fl);
        }
        for (k, bf) in dual.boundary_faces.iter().enumerate() {
            let n = self.boundary_unit_normals[k];
            let rule = &self.boundary.ghosts[k];
            let di = d.boundary[k];
            let dg = rule.linear(di, n);
            let (wi, wg) = match base {
                Some(b) => (b.boundary[k], rule.state(b.boundary[k], n)),
                None => (zero, zero),
            };
            let fl = linearized_flux(di, dg, wi, wg, n, &self.coefficients.boundary[k], v, rho) * geom.boundary_length[k];
            add_cell(out, bf.cell, fl);
        }
    }

    /// Adds `scale * K x` with the CR stiffness matrix.
    fn add_stiffness(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        if scale == 0.0 {
            return;
        }
        for (tc, tg) in self.meshes.dual.triangle_cells.iter().zip(&self.meshes.geometry.triangles) {
            for a in 0..3 {
                let mut s = Vec2::zeros();
                for b in 0..3 {
                    s += tg.cr_stiffness(a, b) * cell(x, tc[b]);
                }
                add_cell(out, tc[a], scale * s);
            }
        }
    }

    /// Explicit convective update `dW**`: flux sum, old pressure gradient and
    /// gravity per unit cell volume, times `dt`.
    pub fn convective_stage(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; w.len()];
        self.add_fluxes(w, &mut out);
        let geom = &self.meshes.geometry;
        for i in 0..self.n_cells() {
            let v = cell(&out, i) * (self.dt / geom.cell_volume[i]) + self.dt * (self.pressure_gradient[i] - self.config.rho * self.config.gravity);
            set_cell(&mut out, i, v);
        }
        out
    }

    pub fn evaluate_residual(&self, w: &[f64], f: &mut [f64]) {
        let geom = &self.meshes.geometry;
        let dstar = self.convective_stage(w);
        for i in 0..self.n_cells() {
            let vol = geom.cell_volume[i];
            set_cell(f, i, vol * (cell(w, i) - cell(self.wn, i)) + vol * cell(&dstar, i));
        }
        self.add_stiffness(w, self.dt * self.config.nu(), f);
        for (i, d) in self.boundary.dirichlet.iter().enumerate() {
            if let Some(v) = d {
                set_cell(f, i, geom.cell_volume[i] * (cell(w, i) - v));
            }
        }
    }

    fn masked(&self, dw: &[f64]) -> Vec<f64> {
        let mut m = dw.to_vec();
        for (i, d) in self.boundary.dirichlet.iter().enumerate() {
            if d.is_some() {
                set_cell(&mut m, i, Vec2::zeros());
            }
        }
        m
    }

    fn apply_jacobian(&self, base: Option<&FaceStates>, dw: &[f64], out: &mut [f64]) {
        let geom = &self.meshes.geometry;
        let dm = self.masked(dw);
        out.iter_mut().for_each(|x| *x = 0.0);
        self.add_linear_fluxes(base, &dm, out);
        for i in 0..self.n_cells() {
            let v = geom.cell_volume[i] * cell(&dm, i) + self.dt * cell(out, i);
            set_cell(out, i, v);
        }
        self.add_stiffness(&dm, self.dt * self.config.nu(), out);
        for (i, d) in self.boundary.dirichlet.iter().enumerate() {
            if d.is_some() {
                set_cell(out, i, geom.cell_volume[i] * cell(dw, i));
            }
        }
    }

    /// Product `J(W) dW`.
    pub fn jacobian_apply(&self, w: &[f64], dw: &[f64], out: &mut [f64]) {
        let base = (self.config.variant == FluxVariant::Rusanov).then(|| self.states(w));
        self.apply_jacobian(base.as_ref(), dw, out);
    }

    /// Diagonal blocks and couplings of the first-order Jacobian at `w`.
    pub fn sgs_blocks(&self, w: &[f64]) -> (Vec<Mat2>, Vec<Vec<(usize, Mat2)>>) {
        let (dual, geom) = (&self.meshes.dual, &self.meshes.geometry);
        let n = self.n_cells();
        let (v, rho, dt) = (self.config.variant, self.config.rho, self.dt);
        let mut diag: Vec<Mat2> = geom.cell_volume.iter().map(|&vol| Mat2::identity() * vol).collect();
        let mut couplings: Vec<Vec<(usize, Mat2)>> = vec![Vec::with_capacity(4); n];
        fn add(row: &mut Vec<(usize, Mat2)>, j: usize, m: Mat2) {
            match row.iter_mut().find(|(k, _)| *k == j) {
                Some((_, b)) => *b += m,
                None => row.push((j, m)),
            }
        }
        for (f, face) in dual.faces.iter().enumerate() {
            let [a, b] = face.cells;
            let (ja, jb) = flux_jacobians(cell(w, a), cell(w, b), self.unit_normals[f], &self.coefficients.interior[f], v, rho);
            let s = dt * geom.face_length[f];
            diag[a] += s * ja;
            add(&mut couplings[a], b, s * jb);
            diag[b] -= s * jb;
            add(&mut couplings[b], a, -s * ja);
        }
        for (k, bf) in dual.boundary_faces.iter().enumerate() {
            let nrm = self.boundary_unit_normals[k];
            let rule = &self.boundary.ghosts[k];
            let wi = cell(w, bf.cell);
            let (ji, jg) = flux_jacobians(wi, rule.state(wi, nrm), nrm, &self.coefficients.boundary[k], v, rho);
            diag[bf.cell] += dt * geom.boundary_length[k] * (ji + jg * rule.jacobian(nrm));
        }
        let visc = dt * self.config.nu();
        if visc != 0.0 {
            for (tc, tg) in dual.triangle_cells.iter().zip(&geom.triangles) {
                for a in 0..3 {
                    diag[tc[a]] += Mat2::identity() * (visc * tg.cr_stiffness(a, a));
                    for b in 0..3 {
                        if a != b {
                            add(&mut couplings[tc[a]], tc[b], Mat2::identity() * (visc * tg.cr_stiffness(a, b)));
                        }
                    }
                }
            }
        }
        for (i, d) in self.boundary.dirichlet.iter().enumerate() {
            if d.is_some() {
                diag[i] = Mat2::identity() * geom.cell_volume[i];
                couplings[i].clear();
            }
        }
        for row in couplings.iter_mut() {
            row.retain(|(j, _)| self.boundary.dirichlet[*j].is_none());
        }
        (diag, couplings)
    }

    pub fn sgs_preconditioner(&self, w: &[f64]) -> Result<SgsPreconditioner> {
        let (d, c) = self.sgs_blocks(w);
        SgsPreconditioner::new(&d, &c, self.ordering)
    }
}

/// Jacobian at a fixed Newton iterate.
pub struct TransportJacobian<'s, 'a> {
    system: &'s TransportSystem<'a>,
    base: Option<FaceStates>,
}

impl LinearOperator for TransportJacobian<'_, '_> {
    fn dim(&self) -> usize {
        2 * self.system.n_cells()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.system.apply_jacobian(self.base.as_ref(), x, y);
    }
}

impl NonlinearSystem for TransportSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.n_cells()
    }
    fn residual(&self, w: &[f64], f: &mut [f64]) {
        self.evaluate_residual(w, f);
    }
    fn jacobian<'s>(&'s self, w: &[f64]) -> Box<dyn LinearOperator + 's> {
        let base = (self.config.variant == FluxVariant::Rusanov).then(|| self.states(w));
        Box::new(TransportJacobian { system: self, base })
    }
    fn preconditioner<'s>(&'s self, w: &[f64]) -> Result<Box<dyn Preconditioner + 's>> {
        Ok(Box::new(self.sgs_preconditioner(w)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::bc::{constant_scalar, BoundaryCondition, BoundaryMap, GhostRule};
    use crate::krylov::{newton_solve, KrylovConfig, NewtonConfig};
    use crate::meshcore::{generate_structured_triangulation, Rectangle, SideTags};
    use crate::transport::field::from_cells;
    use crate::transport::kinetic_energy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn periodic_box(n: usize) -> Meshes {
        let l = 2.0 * PI;
        let mut m = generate_structured_triangulation(n, n, Rectangle::new(0.0, l, 0.0, l), SideTags::default()).unwrap();
        m.pair_periodic(4, 2, Vec2::new(l, 0.0)).unwrap();
        m.pair_periodic(1, 3, Vec2::new(0.0, l)).unwrap();
        Meshes::build(m).unwrap()
    }

    fn walled_box(n: usize) -> (Meshes, BoundaryData) {
        let m = generate_structured_triangulation(n, n, Rectangle::new(0.0, 1.0, 0.0, 1.0), SideTags::default()).unwrap();
        let meshes = Meshes::build(m).unwrap();
        let bcs = BoundaryMap::new()
            .with(1, BoundaryCondition::InviscidWall)
            .with(2, BoundaryCondition::PressureOutlet(constant_scalar(0.0)))
            .with(3, BoundaryCondition::VelocityInlet(crate::driver::bc::constant_vector(Vec2::new(0.5, -0.2))))
            .with(4, BoundaryCondition::InviscidWall);
        let data = BoundaryData::evaluate(&bcs, &meshes, 0.0, 1.0).unwrap();
        (meshes, data)
    }

    fn random_field(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn config(variant: FluxVariant, order: u8) -> FluxConfig {
        FluxConfig { variant, order, c_alpha: 0.3, mu: 0.05, rho: 1.0, gravity: Vec2::zeros() }
    }

    #[test]
    fn second_order_face_velocity_is_exact_for_linear_fields() {
        let (meshes, data) = walled_box(4);
        let a = Mat2::new(0.3, -1.2, 0.7, 0.4);
        let w = from_cells(meshes.geometry.node_position.iter().map(|&x| a * x + Vec2::new(0.1, 0.2)));
        let c = compute_face_coefficients(&w, &meshes, &data, &config(FluxVariant::Ducros, 2));
        for (f, fc) in c.interior.iter().enumerate() {
            let g = &meshes.geometry;
            let u = a * g.face_midpoint[f] + Vec2::new(0.1, 0.2);
            assert!((fc.u_n - u.dot(&(g.face_normal[f] / g.face_length[f]))).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_state_has_zero_flux_balance() {
        let meshes = periodic_box(6);
        let n = meshes.n_cells();
        let w = from_cells((0..n).map(|_| Vec2::new(0.8, -0.3)));
        let p = vec![0.5; meshes.dual.n_pressure_dofs];
        let data = BoundaryData::empty(&meshes);
        let ord = CellOrdering::identity(n);
        for v in [FluxVariant::Ducros, FluxVariant::Rusanov] {
            for order in [1, 2] {
                let sys = TransportSystem::new(&meshes, config(v, order), 0.1, &w, &p, &data, &ord);
                let d = sys.convective_stage(&w);
                assert!(d.iter().all(|x| x.abs() < 1e-13));
                let mut f = vec![0.0; 2 * n];
                sys.evaluate_residual(&w, &mut f);
                assert!(f.iter().all(|x| x.abs() < 1e-13));
            }
        }
    }

    #[test]
    fn linear_pressure_and_gravity() {
        let (meshes, data) = walled_box(4);
        let n = meshes.n_cells();
        let w = vec![0.0; 2 * n];
        let p: Vec<f64> = meshes.geometry.dof_position.iter().map(|x| x.x).collect();
        let ord = CellOrdering::identity(n);
        let mut cfg = config(FluxVariant::Ducros, 1);
        cfg.c_alpha = 0.0;
        let data = BoundaryData { ghosts: vec![GhostRule::Outflow; data.ghosts.len()], ..data };
        let sys = TransportSystem::new(&meshes, cfg, 0.1, &w, &p, &data, &ord);
        let d = sys.convective_stage(&w);
        for i in 0..n {
            assert!((cell(&d, i) - Vec2::new(0.1, 0.0)).norm() < 1e-14);
        }
        cfg.gravity = Vec2::new(0.0, -9.81);
        let zero_p = vec![0.0; p.len()];
        let sys = TransportSystem::new(&meshes, cfg, 0.1, &w, &zero_p, &data, &ord);
        let d = sys.convective_stage(&w);
        for i in 0..n {
            assert!((cell(&d, i) - Vec2::new(0.0, 0.981)).norm() < 1e-14);
        }
    }

    #[test]
    fn stiffness_kills_constants_and_matches_hand_integration() {
        let meshes = periodic_box(4);
        let n = meshes.n_cells();
        let ord = CellOrdering::identity(n);
        let data = BoundaryData::empty(&meshes);
        let w = from_cells((0..n).map(|_| Vec2::new(1.0, 2.0)));
        let p = vec![0.0; meshes.dual.n_pressure_dofs];
        let sys = TransportSystem::new(&meshes, config(FluxVariant::Ducros, 1), 1.0, &w, &p, &data, &ord);
        let mut kw = vec![0.0; 2 * n];
        sys.add_stiffness(&w, 1.0, &mut kw);
        assert!(kw.iter().all(|x| x.abs() < 1e-12));

        // reference triangle: K applied to nodal values of x equals int grad x . grad phi_a
        let v = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let b = (0..3).map(|l| crate::meshcore::BoundaryEdge { vertices: [l, (l + 1) % 3], tag: 1 }).collect();
        let tri = Meshes::build(crate::meshcore::PrimalMesh::new(v, vec![[0, 1, 2]], b).unwrap()).unwrap();
        let tg = tri.geometry.triangles[0];
        // phi_0 = 1 - 2 lambda_2 = 1 - 2y, phi_1 = 1 - 2 lambda_0 = 2x + 2y - 1, phi_2 = 1 - 2x
        let grads = [Vec2::new(0.0, -2.0), Vec2::new(2.0, 2.0), Vec2::new(-2.0, 0.0)];
        let mids = tg.edge_midpoints;
        for a in 0..3 {
            let kx: f64 = (0..3).map(|b| tg.cr_stiffness(a, b) * mids[b].x).sum();
            let exact = 0.5 * Vec2::new(1.0, 0.0).dot(&grads[a]);
            assert!((kx - exact).abs() < 1e-14);
            assert!((tg.grad_cr[a] - grads[a]).norm() < 1e-14);
        }
    }

    #[test]
    fn ducros_jacobian_matches_differences_exactly() {
        let (meshes, data) = walled_box(5);
        let n = meshes.n_cells();
        let wn = random_field(n, 1);
        let p = random_field(meshes.dual.n_pressure_dofs, 2)[..meshes.dual.n_pressure_dofs].to_vec();
        let ord = CellOrdering::identity(n);
        for order in [1, 2] {
            let sys = TransportSystem::new(&meshes, config(FluxVariant::Ducros, order), 0.05, &wn, &p, &data, &ord);
            let w = random_field(n, 3);
            let dw = random_field(n, 4);
            let (mut f0, mut f1, mut jd) = (vec![0.0; 2 * n], vec![0.0; 2 * n], vec![0.0; 2 * n]);
            let eps = 1e-3;
            let wp: Vec<f64> = w.iter().zip(&dw).map(|(a, b)| a + eps * b).collect();
            sys.evaluate_residual(&w, &mut f0);
            sys.evaluate_residual(&wp, &mut f1);
            sys.jacobian_apply(&w, &dw, &mut jd);
            let scale = jd.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for k in 0..2 * n {
                assert!(((f1[k] - f0[k]) / eps - jd[k]).abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn rusanov_remainder_is_quadratic() {
        // first order on a periodic box: remainder = dt sum |Gamma| 0.5 [(d_i . n) d_i + (d_j . n) d_j]
        let meshes = periodic_box(5);
        let n = meshes.n_cells();
        let wn = random_field(n, 5);
        let p = vec![0.0; meshes.dual.n_pressure_dofs];
        let data = BoundaryData::empty(&meshes);
        let ord = CellOrdering::identity(n);
        let dt = 0.07;
        let sys = TransportSystem::new(&meshes, config(FluxVariant::Rusanov, 1), dt, &wn, &p, &data, &ord);
        let w = random_field(n, 6);
        let d = random_field(n, 7);
        let mut oracle = vec![0.0; 2 * n];
        for (f, face) in meshes.dual.faces.iter().enumerate() {
            let eta = meshes.geometry.face_normal[f];
            let [a, b] = face.cells;
            let (da, db) = (cell(&d, a), cell(&d, b));
            let q = 0.5 * (da * da.dot(&eta) + db * db.dot(&eta)) * dt;
            add_cell(&mut oracle, a, q);
            add_cell(&mut oracle, b, -q);
        }
        for eps in [1e-2, 1e-3] {
            let (mut f0, mut f1, mut jd) = (vec![0.0; 2 * n], vec![0.0; 2 * n], vec![0.0; 2 * n]);
            let wp: Vec<f64> = w.iter().zip(&d).map(|(a, b)| a + eps * b).collect();
            sys.evaluate_residual(&w, &mut f0);
            sys.evaluate_residual(&wp, &mut f1);
            sys.jacobian_apply(&w, &d, &mut jd);
            for k in 0..2 * n {
                let rem = (f1[k] - f0[k]) / eps - jd[k];
                assert!((rem - eps * oracle[k]).abs() < 1e-9, "k {k}: {rem} vs {}", eps * oracle[k]);
            }
        }
    }

    #[test]
    fn jacobian_without_flow_is_mass() {
        let meshes = periodic_box(4);
        let n = meshes.n_cells();
        let wn = vec![0.0; 2 * n];
        let p = vec![0.0; meshes.dual.n_pressure_dofs];
        let data = BoundaryData::empty(&meshes);
        let ord = CellOrdering::identity(n);
        let mut cfg = config(FluxVariant::Ducros, 2);
        cfg.c_alpha = 0.0;
        cfg.mu = 0.0;
        let sys = TransportSystem::new(&meshes, cfg, 0.3, &wn, &p, &data, &ord);
        let dw = random_field(n, 9);
        let mut out = vec![0.0; 2 * n];
        sys.jacobian_apply(&random_field(n, 10), &dw, &mut out);
        for i in 0..n {
            assert!((cell(&out, i) - meshes.geometry.cell_volume[i] * cell(&dw, i)).norm() < 1e-15);
        }
        let mut zero = vec![1.0; 2 * n];
        sys.jacobian_apply(&dw, &vec![0.0; 2 * n], &mut zero);
        assert!(zero.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn sgs_blocks_reproduce_first_order_jacobian() {
        let (meshes, data) = walled_box(4);
        let n = meshes.n_cells();
        let wn = random_field(n, 11);
        let p = vec![0.0; meshes.dual.n_pressure_dofs];
        let ord = CellOrdering::identity(n);
        for v in [FluxVariant::Ducros, FluxVariant::Rusanov] {
            let sys = TransportSystem::new(&meshes, config(v, 1), 0.2, &wn, &p, &data, &ord);
            let w = random_field(n, 12);
            let x = random_field(n, 13);
            let mut jx = vec![0.0; 2 * n];
            sys.jacobian_apply(&w, &x, &mut jx);
            let (d, c) = sys.sgs_blocks(&w);
            for i in 0..n {
                let mut s = d[i] * cell(&x, i);
                for (j, m) in &c[i] {
                    s += m * cell(&x, *j);
                }
                assert!((s - cell(&jx, i)).norm() < 1e-12, "{v} cell {i}");
            }
        }
    }

    #[test]
    fn one_newton_step_solves_ducros() {
        let meshes = periodic_box(6);
        let n = meshes.n_cells();
        let wn = from_cells(meshes.geometry.node_position.iter().map(|x| Vec2::new(x.x.sin() * x.y.cos(), -x.x.cos() * x.y.sin())));
        let p = vec![0.0; meshes.dual.n_pressure_dofs];
        let data = BoundaryData::empty(&meshes);
        let ord = CellOrdering::identity(n);
        let mut cfg = config(FluxVariant::Ducros, 2);
        cfg.mu = 0.0;
        cfg.c_alpha = 0.0;
        let sys = TransportSystem::new(&meshes, cfg, 0.1, &wn, &p, &data, &ord);
        let (w, s) = newton_solve(&sys, sys.initial_guess(), &NewtonConfig::ducros(), &KrylovConfig::default()).unwrap();
        assert_eq!(s.iterations, 1);
        let mut f = vec![0.0; 2 * n];
        sys.evaluate_residual(&w, &mut f);
        assert!(crate::krylov::norm(&f) < 1e-8 * s.initial_residual);
        let (k0, k1) = (kinetic_energy(&wn, &meshes.geometry, 1.0), kinetic_energy(&w, &meshes.geometry, 1.0));
        assert!(k1.is_finite() && k0 > 0.0);
    }
}
