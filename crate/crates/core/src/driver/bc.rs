use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::meshcore::{Meshes, PrimalMesh, Tag};
use crate::{Mat2, Vec2};

/// Velocity prescribed as a function of position and time.
pub type VectorFn = Arc<dyn Fn(Vec2, f64) -> Vec2 + Send + Sync>;
/// Pressure prescribed as a function of position and time.
pub type ScalarFn = Arc<dyn Fn(Vec2, f64) -> f64 + Send + Sync>;

pub fn constant_vector(v: Vec2) -> VectorFn {
    Arc::new(move |_, _| v)
}

pub fn constant_scalar(p: f64) -> ScalarFn {
    Arc::new(move |_, _| p)
}

#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic { partner: Tag, offset: Vec2 },
    VelocityInlet(VectorFn),
    DirichletVelocity(VectorFn),
    NoSlip,
    InviscidWall,
    PressureOutlet(ScalarFn),
    /// Pressure inlet; without a velocity the momentum is left free.
    PressureInlet { velocity: Option<VectorFn>, pressure: ScalarFn },
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Periodic { partner, offset } => write!(f, "Periodic(partner {partner}, offset ({}, {}))", offset.x, offset.y),
            Self::VelocityInlet(_) => f.write_str("VelocityInlet"),
            Self::DirichletVelocity(_) => f.write_str("DirichletVelocity"),
            Self::NoSlip => f.write_str("NoSlip"),
            Self::InviscidWall => f.write_str("InviscidWall"),
            Self::PressureOutlet(_) => f.write_str("PressureOutlet"),
            Self::PressureInlet { velocity, .. } => {
                write!(f, "PressureInlet(velocity: {})", if velocity.is_some() { "given" } else { "free" })
            }
        }
    }
}

impl BoundaryCondition {
    /// Momentum value imposed strongly on the cell, if any.
    pub fn strong_velocity(&self, x: Vec2, t: f64) -> Option<Vec2> {
        match self {
            Self::DirichletVelocity(u) => Some(u(x, t)),
            Self::NoSlip => Some(Vec2::zeros()),
            _ => None,
        }
    }

    /// Prescribed velocity entering the pressure boundary integral.
    pub fn normal_velocity_source(&self, x: Vec2, t: f64) -> Option<Vec2> {
        match self {
            Self::VelocityInlet(u) | Self::DirichletVelocity(u) => Some(u(x, t)),
            Self::PressureInlet { velocity: Some(u), .. } => Some(u(x, t)),
            Self::NoSlip | Self::InviscidWall => Some(Vec2::zeros()),
            _ => None,
        }
    }

    pub fn pressure(&self, x: Vec2, t: f64) -> Option<f64> {
        match self {
            Self::PressureOutlet(p) => Some(p(x, t)),
            Self::PressureInlet { pressure, .. } => Some(pressure(x, t)),
            _ => None,
        }
    }

    pub fn ghost_rule(&self, x: Vec2, t: f64, rho: f64) -> GhostRule {
        match self {
            Self::VelocityInlet(u) => GhostRule::Inlet(rho * u(x, t)),
            Self::DirichletVelocity(u) => GhostRule::Inlet(rho * u(x, t)),
            Self::NoSlip => GhostRule::Inlet(Vec2::zeros()),
            Self::PressureInlet { velocity: Some(u), .. } => GhostRule::Inlet(rho * u(x, t)),
            Self::InviscidWall => GhostRule::Wall,
            Self::PressureOutlet(_) | Self::PressureInlet { velocity: None, .. } => GhostRule::Outflow,
            Self::Periodic { .. } => GhostRule::Outflow,
        }
    }
}

/// Ghost construction on a boundary face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GhostRule {
    /// Mirror about the prescribed momentum: `2 rho u_BC - W`.
    Inlet(Vec2),
    /// Normal reflection `W - 2 (W . n) n`.
    Wall,
    /// Inner state copied.
    Outflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhostContext {
    Residual,
    Linearized,
}

impl GhostRule {
    pub fn state(&self, w: Vec2, n: Vec2) -> Vec2 {
        match *self {
            Self::Inlet(wb) => 2.0 * wb - w,
            Self::Wall => w - 2.0 * w.dot(&n) * n,
            Self::Outflow => w,
        }
    }

    pub fn linear(&self, dw: Vec2, n: Vec2) -> Vec2 {
        self.jacobian(n) * dw
    }

    /// dGhost/dW.
    pub fn jacobian(&self, n: Vec2) -> Mat2 {
        match self {
            Self::Inlet(_) => -Mat2::identity(),
            Self::Wall => Mat2::identity() - 2.0 * n * n.transpose(),
            Self::Outflow => Mat2::identity(),
        }
    }

    pub fn apply(&self, w: Vec2, n: Vec2, context: GhostContext) -> Vec2 {
        match context {
            GhostContext::Residual => self.state(w, n),
            GhostContext::Linearized => self.linear(w, n),
        }
    }
}

/// Ghost states for all boundary faces, from the inner states `inner`
/// (one per boundary face).
pub fn apply_boundary_ghosts(inner: &[Vec2], rules: &[GhostRule], meshes: &Meshes, context: GhostContext) -> Vec<Vec2> {
    inner
        .iter()
        .zip(rules)
        .enumerate()
        .map(|(k, (&w, rule))| {
            let n = meshes.geometry.boundary_normal[k] / meshes.geometry.boundary_length[k];
            rule.apply(w, n, context)
        })
        .collect()
}

/// Boundary conditions keyed by boundary tag.
#[derive(Debug, Clone, Default)]
pub struct BoundaryMap {
    pub conditions: BTreeMap<Tag, BoundaryCondition>,
}

impl BoundaryMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, tag: Tag, bc: BoundaryCondition) -> Self {
        self.conditions.insert(tag, bc);
        self
    }

    pub fn get(&self, tag: Tag) -> Option<&BoundaryCondition> {
        self.conditions.get(&tag)
    }

    /// Checks that every mesh tag is mapped and periodic partners are mutual.
    pub fn validate(&self, primal: &PrimalMesh) -> Result<(), Error> {
        for tag in primal.tags() {
            if !self.conditions.contains_key(&tag) {
                return Err(Error::Config(format!("boundary tag {tag} has no boundary condition")));
            }
        }
        for (&tag, bc) in &self.conditions {
            if let BoundaryCondition::Periodic { partner, offset } = bc {
                match self.conditions.get(partner) {
                    Some(BoundaryCondition::Periodic { partner: back, offset: o }) if *back == tag => {
                        if (o + offset).norm() > 1e-12 * offset.norm().max(1.0) {
                            return Err(Error::Config(format!("periodic offsets of tags {tag} and {partner} are not opposite")));
                        }
                    }
                    _ => return Err(Error::Config(format!("periodic tag {tag} names partner {partner} which does not point back"))),
                }
            }
        }
        Ok(())
    }

    /// Applies the periodic pairings to the mesh (each family once).
    pub fn apply_periodic(&self, primal: &mut PrimalMesh) -> Result<(), Error> {
        self.validate(primal)?;
        for (&tag, bc) in &self.conditions {
            if let BoundaryCondition::Periodic { partner, offset } = bc {
                if tag < *partner {
                    primal.pair_periodic(tag, *partner, *offset)?;
                }
            }
        }
        Ok(())
    }

    pub fn has_pressure_boundary(&self) -> bool {
        self.conditions.values().any(|bc| bc.pressure(Vec2::zeros(), 0.0).is_some())
    }
}

/// Boundary data of one time level, laid out on the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub time: f64,
    /// Ghost rule of each boundary face.
    pub ghosts: Vec<GhostRule>,
    /// Strongly imposed momentum of each cell, if any.
    pub dirichlet: Vec<Option<Vec2>>,
}

impl BoundaryData {
    pub fn evaluate(bcs: &BoundaryMap, meshes: &Meshes, t: f64, rho: f64) -> Result<Self, Error> {
        let mut ghosts = Vec::with_capacity(meshes.dual.boundary_faces.len());
        for (k, bf) in meshes.dual.boundary_faces.iter().enumerate() {
            let bc = bcs
                .get(bf.tag)
                .ok_or_else(|| Error::Config(format!("boundary tag {} has no boundary condition", bf.tag)))?;
            if matches!(bc, BoundaryCondition::Periodic { .. }) {
                return Err(Error::Config(format!("tag {} is periodic but its edges were not paired", bf.tag)));
            }
            ghosts.push(bc.ghost_rule(meshes.geometry.boundary_midpoint[k], t, rho));
        }
        let mut dirichlet = vec![None; meshes.n_cells()];
        for (i, c) in meshes.dual.cells.iter().enumerate() {
            if let Some(tag) = c.tag {
                if let Some(bc) = bcs.get(tag) {
                    dirichlet[i] = bc.strong_velocity(meshes.geometry.node_position[i], t).map(|u| rho * u);
                }
            }
        }
        Ok(Self { time: t, ghosts, dirichlet })
    }

    /// Data for a mesh without any boundary.
    pub fn empty(meshes: &Meshes) -> Self {
        Self {
            time: 0.0,
            ghosts: vec![GhostRule::Outflow; meshes.dual.boundary_faces.len()],
            dirichlet: vec![None; meshes.n_cells()],
        }
    }

    pub fn impose(&self, w: &mut [f64]) {
        for (i, d) in self.dirichlet.iter().enumerate() {
            if let Some(v) = d {
                w[2 * i] = v.x;
                w[2 * i + 1] = v.y;
            }
        }
    }
}
