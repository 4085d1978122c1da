use crate::{Mat2, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxVariant {
    Ducros,
    Rusanov,
}

impl std::str::FromStr for FluxVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ducros" => Ok(Self::Ducros),
            "rusanov" => Ok(Self::Rusanov),
            other => Err(format!("unknown flux variant '{other}' (expected ducros or rusanov)")),
        }
    }
}

impl std::fmt::Display for FluxVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Ducros => "ducros",
            Self::Rusanov => "rusanov",
        })
    }
}

/// Coefficients of one face frozen at the old time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceCoefficient {
    /// Averaged normal velocity `0.5 (u_i + u_j) . n`.
    pub u_n: f64,
    pub alpha_d: f64,
    pub alpha_r: f64,
}

impl FaceCoefficient {
    pub fn new(u_i: Vec2, u_j: Vec2, n: Vec2, c_alpha: f64) -> Self {
        let u_n = 0.5 * (u_i + u_j).dot(&n);
        Self {
            u_n,
            alpha_d: u_n.abs() + c_alpha,
            alpha_r: 2.0 * u_n.abs() + c_alpha,
        }
    }
}

/// Physical flux `F(W) . n = (1/rho) W (W . n)`.
pub fn physical_flux(w: Vec2, n: Vec2, rho: f64) -> Vec2 {
    w * (w.dot(&n) / rho)
}

/// Numerical flux per unit face length, outward along the unit normal `n`.
pub fn numerical_flux(w_i: Vec2, w_j: Vec2, n: Vec2, c: &FaceCoefficient, variant: FluxVariant, rho: f64) -> Vec2 {
    match variant {
        FluxVariant::Ducros => 0.5 * (w_i + w_j) * c.u_n - 0.5 * c.alpha_d * (w_j - w_i),
        FluxVariant::Rusanov => {
            0.5 * (physical_flux(w_i, n, rho) + physical_flux(w_j, n, rho)) - 0.5 * c.alpha_r * (w_j - w_i)
        }
    }
}

/// Directional derivative of [`numerical_flux`] at `(w_i, w_j)` along
/// `(dw_i, dw_j)`.
///
/// The Rusanov branch is the exact derivative of the quadratic flux, so
/// `flux(w + e dw) = flux(w) + e linearized + e^2 flux_quadratic(dw)`.
#[allow(clippy::too_many_arguments)]
pub fn linearized_flux(
    dw_i: Vec2,
    dw_j: Vec2,
    w_i: Vec2,
    w_j: Vec2,
    n: Vec2,
    c: &FaceCoefficient,
    variant: FluxVariant,
    rho: f64,
) -> Vec2 {
    match variant {
        FluxVariant::Ducros => 0.5 * c.u_n * (dw_i + dw_j) - 0.5 * c.alpha_d * (dw_j - dw_i),
        FluxVariant::Rusanov => {
            let d = |w: Vec2, dw: Vec2| (dw * w.dot(&n) + w * dw.dot(&n)) / rho;
            0.5 * (d(w_i, dw_i) + d(w_j, dw_j)) - 0.5 * c.alpha_r * (dw_j - dw_i)
        }
    }
}

/// Second-order part of the Rusanov flux along `(dw_i, dw_j)`; zero for Ducros.
pub fn flux_quadratic(dw_i: Vec2, dw_j: Vec2, n: Vec2, variant: FluxVariant, rho: f64) -> Vec2 {
    match variant {
        FluxVariant::Ducros => Vec2::zeros(),
        FluxVariant::Rusanov => 0.5 * (physical_flux(dw_i, n, rho) + physical_flux(dw_j, n, rho)),
    }
}

/// Jacobian blocks `(dF/dW_i, dF/dW_j)` of the numerical flux.
pub fn flux_jacobians(w_i: Vec2, w_j: Vec2, n: Vec2, c: &FaceCoefficient, variant: FluxVariant, rho: f64) -> (Mat2, Mat2) {
    let id = Mat2::identity();
    match variant {
        FluxVariant::Ducros => (0.5 * (c.u_n + c.alpha_d) * id, 0.5 * (c.u_n - c.alpha_d) * id),
        FluxVariant::Rusanov => {
            let d = |w: Vec2| (id * w.dot(&n) + w * n.transpose()) / rho;
            (0.5 * d(w_i) + 0.5 * c.alpha_r * id, 0.5 * d(w_j) - 0.5 * c.alpha_r * id)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const VARIANTS: [FluxVariant; 2] = [FluxVariant::Ducros, FluxVariant::Rusanov];

    fn v2() -> impl Strategy<Value = Vec2> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y)| Vec2::new(x, y))
    }

    fn unit() -> impl Strategy<Value = Vec2> {
        (0.0f64..std::f64::consts::TAU).prop_map(|t| Vec2::new(t.cos(), t.sin()))
    }

    #[test]
    fn coefficient_examples() {
        let n = Vec2::new(1.0, 0.0);
        let c = FaceCoefficient::new(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), n, 0.0);
        assert_eq!(c.u_n, 1.0);
        let c = FaceCoefficient::new(Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0), n, 0.3);
        assert_eq!(c.u_n, 0.0);
        assert_eq!(c.alpha_d, 0.3);
        let c = FaceCoefficient::new(Vec2::new(-2.0, 0.0), Vec2::new(-2.0, 0.0), n, 0.5);
        assert_eq!(c.u_n, -2.0);
        assert_eq!(c.alpha_d, 2.5);
        assert_eq!(c.alpha_r, 4.5);
    }

    #[test]
    fn ducros_jump_example() {
        let c = FaceCoefficient {
            u_n: 0.0,
            alpha_d: 1.0,
            alpha_r: 1.0,
        };
        let f = numerical_flux(Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), &c, FluxVariant::Ducros, 1.0);
        assert_eq!(f, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn ducros_linearized_example() {
        let c = FaceCoefficient {
            u_n: 2.0,
            alpha_d: 2.0,
            alpha_r: 4.0,
        };
        let z = Vec2::zeros();
        let l = linearized_flux(Vec2::new(1.0, 0.0), z, z, z, Vec2::new(1.0, 0.0), &c, FluxVariant::Ducros, 1.0);
        assert_eq!(l, Vec2::new(2.0, 0.0));
    }

    proptest! {
        #[test]
        fn consistency(w in v2(), n in unit(), c_alpha in 0.0f64..2.0) {
            let u = w;
            let c = FaceCoefficient::new(u, u, n, c_alpha);
            for v in VARIANTS {
                let f = numerical_flux(w, w, n, &c, v, 1.0);
                let exact = w * w.dot(&n);
                prop_assert!((f - exact).norm() <= 1e-12 * (1.0 + exact.norm()));
            }
        }

        #[test]
        fn antisymmetry(wi in v2(), wj in v2(), ui in v2(), uj in v2(), n in unit(), c_alpha in 0.0f64..2.0) {
            let c = FaceCoefficient::new(ui, uj, n, c_alpha);
            let c_rev = FaceCoefficient::new(uj, ui, -n, c_alpha);
            for v in VARIANTS {
                let a = numerical_flux(wi, wj, n, &c, v, 1.3);
                let b = numerical_flux(wj, wi, -n, &c_rev, v, 1.3);
                prop_assert!((a + b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }

        #[test]
        fn rusanov_expansion_is_exact(wi in v2(), wj in v2(), di in v2(), dj in v2(), n in unit(), e in -1.0f64..1.0) {
            let c = FaceCoefficient::new(wi, wj, n, 0.2);
            let v = FluxVariant::Rusanov;
            let lhs = numerical_flux(wi + e * di, wj + e * dj, n, &c, v, 0.8);
            let rhs = numerical_flux(wi, wj, n, &c, v, 0.8)
                + e * linearized_flux(di, dj, wi, wj, n, &c, v, 0.8)
                + e * e * flux_quadratic(di, dj, n, v, 0.8);
            prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + lhs.norm()));
        }

        #[test]
        fn jacobian_blocks_match_linearization(wi in v2(), wj in v2(), di in v2(), dj in v2(), n in unit()) {
            let c = FaceCoefficient::new(wi, wj, n, 0.4);
            for v in VARIANTS {
                let (a, b) = flux_jacobians(wi, wj, n, &c, v, 1.0);
                let l = linearized_flux(di, dj, wi, wj, n, &c, v, 1.0);
                prop_assert!((a * di + b * dj - l).norm() <= 1e-12 * (1.0 + l.norm()));
            }
        }

        #[test]
        fn ducros_linearization_equals_flux(di in v2(), dj in v2(), n in unit(), ui in v2(), uj in v2()) {
            let c = FaceCoefficient::new(ui, uj, n, 0.1);
            let z = Vec2::zeros();
            let l = linearized_flux(di, dj, z, z, n, &c, FluxVariant::Ducros, 1.0);
            let f = numerical_flux(di, dj, n, &c, FluxVariant::Ducros, 1.0);
            prop_assert_eq!(l, f);
        }
    }
}
