use num_complex::Complex64;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::Vec2;

/// Steady inviscid vortex on `[0, 2 pi]^2`.
pub fn taylor_green(x: Vec2) -> (Vec2, f64) {
    let u = Vec2::new(x.x.sin() * x.y.cos(), -x.x.cos() * x.y.sin());
    let p = 0.25 * ((2.0 * x.x).cos() + (2.0 * x.y).cos());
    (u, p)
}

/// Impulsively started shear layer; `u_2 = amplitude erf(x_1 / (2 sqrt(nu t)))`.
pub fn stokes_first_problem(x: Vec2, t: f64, nu: f64, amplitude: f64) -> Result<Vec2> {
    if !(t > 0.0) || !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!("Stokes solution needs t > 0 and nu > 0 (got t = {t}, nu = {nu})")));
    }
    Ok(Vec2::new(0.0, amplitude * erf(x.x / (2.0 * (nu * t).sqrt()))))
}

/// Oscillating flow between plates at `x_2 = +-a` driven by
/// `dp/dx_1 = -A cos(n t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Womersley {
    pub half_width: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub rho: f64,
    pub mu: f64,
}

impl Womersley {
    /// Frequency chosen so that `a sqrt(n / nu)` equals `wo`.
    pub fn with_number(wo: f64, half_width: f64, amplitude: f64, rho: f64, mu: f64) -> Self {
        let nu = mu / rho;
        Self {
            half_width,
            amplitude,
            frequency: wo * wo * nu / (half_width * half_width),
            rho,
            mu,
        }
    }

    pub fn number(&self) -> f64 {
        self.half_width * (self.frequency * self.rho / self.mu).sqrt()
    }

    pub fn velocity(&self, x2: f64, t: f64) -> f64 {
        let i = Complex64::i();
        let sqrt_i = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let wo = self.number();
        let ratio = (wo * sqrt_i * (x2 / self.half_width)).cosh() / (wo * sqrt_i).cosh();
        let u = self.amplitude / (i * self.rho * self.frequency) * (1.0 - ratio) * (i * self.frequency * t).exp();
        u.re
    }

    /// Upper bound of `|u_1|` over the cross section and the period.
    pub fn peak_amplitude(&self) -> f64 {
        let sqrt_i = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let wo = self.number();
        (0..=200)
            .map(|k| {
                let y = self.half_width * (k as f64 / 100.0 - 1.0);
                let ratio = (wo * sqrt_i * (y / self.half_width)).cosh() / (wo * sqrt_i).cosh();
                (self.amplitude / (self.rho * self.frequency) * (1.0 - ratio)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Pressure with `dp/dx_1 = -A cos(n t)` vanishing at `x_ref`.
    pub fn pressure(&self, x1: f64, t: f64, x_ref: f64) -> f64 {
        -self.amplitude * (self.frequency * t).cos() * (x1 - x_ref)
    }
}

/// Steady channel flow between `x_2 = +-a` under a constant pressure drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poiseuille {
    pub half_width: f64,
    /// `-dp/dx_1`.
    pub gradient: f64,
    pub mu: f64,
}

impl Poiseuille {
    pub fn velocity(&self, x2: f64) -> f64 {
        self.gradient / (2.0 * self.mu) * (self.half_width * self.half_width - x2 * x2)
    }

    pub fn centerline_velocity(&self) -> f64 {
        self.velocity(0.0)
    }

    pub fn pressure(&self, x1: f64, x_ref: f64) -> f64 {
        -self.gradient * (x1 - x_ref)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    TaylorGreen,
    Stokes { nu: f64, amplitude: f64 },
    Womersley { flow: Womersley, x_ref: f64 },
    Poiseuille { flow: Poiseuille, x_ref: f64 },
}

impl ExactSolution {
    /// Velocity and pressure at `(x, t)`.
    pub fn evaluate(&self, x: Vec2, t: f64) -> Result<(Vec2, f64)> {
        Ok(match *self {
            Self::TaylorGreen => taylor_green(x),
            Self::Stokes { nu, amplitude } => (stokes_first_problem(x, t, nu, amplitude)?, 0.0),
            Self::Womersley { flow, x_ref } => (Vec2::new(flow.velocity(x.y, t), 0.0), flow.pressure(x.x, t, x_ref)),
            Self::Poiseuille { flow, x_ref } => (Vec2::new(flow.velocity(x.y), 0.0), flow.pressure(x.x, x_ref)),
        })
    }
}
