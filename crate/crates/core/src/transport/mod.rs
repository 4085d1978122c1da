//! Momentum transport-diffusion stage: numerical fluxes, MUSCL
//! reconstruction, the nonlinear residual and its linearization.

pub mod field;
pub mod flux;
pub mod gradient;
pub mod system;

pub use field::{cell, from_cells, kinetic_energy, set_cell};
pub use flux::{flux_jacobians, linearized_flux, numerical_flux, FaceCoefficient, FluxVariant};
pub use gradient::{cr_cell_gradients, cr_triangle_gradients, muscl_reconstruct, p1_cell_gradients, FaceStates};
pub use system::{compute_face_coefficients, FaceCoefficients, TransportSystem};

use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxConfig {
    pub variant: FluxVariant,
    /// Spatial order, 1 or 2.
    pub order: u8,
    pub c_alpha: f64,
    /// Dynamic viscosity.
    pub mu: f64,
    pub rho: f64,
    pub gravity: Vec2,
}

impl Default for FluxConfig {
    fn default() -> Self {
        Self {
            variant: FluxVariant::Ducros,
            order: 2,
            c_alpha: 0.0,
            mu: 0.0,
            rho: 1.0,
            gravity: Vec2::zeros(),
        }
    }
}

impl FluxConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.c_alpha >= 0.0) || !(self.mu >= 0.0) || !(self.rho > 0.0) || !(self.order == 1 || self.order == 2) {
            return Err(crate::Error::Config(format!(
                "invalid flux settings: c_alpha {}, mu {}, rho {}, order {}",
                self.c_alpha, self.mu, self.rho, self.order
            )));
        }
        Ok(())
    }

    /// Kinematic viscosity acting on the momentum.
    pub fn nu(&self) -> f64 {
        self.mu / self.rho
    }
}
