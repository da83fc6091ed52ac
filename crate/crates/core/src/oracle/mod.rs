//! Monodromy data of `psi'' = (4 lambda^3 - a lambda - b) psi` by direct
//! integration along the Stokes rays.
//!
//! Each subdominant solution `y_k` is seeded deep in its Stokes sector from
//! the asymptotic expansion of its logarithmic derivative and carried
//! inward to `lambda = 0`, where Wronskians are taken.

mod integrate;
mod monodromy;
mod pt;
mod wkb;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Z5};

pub use integrate::{integrate_ray, integrate_segment, RaySolution};
pub use monodromy::{
    asymptotic_values, cross_ratio_route, rotation_check, sigma, stokes_multipliers, y_oracle, Monodromy,
    RotationResiduals, StokesSet,
};
pub use pt::{pt_eigenvalue_scan, refine_root_secant, PtRoot};
pub use wkb::{asymptotic_coefficients, sqrt_on_ray, wkb_leading, wkb_seed, WkbSeed};

/// Smallest admissible starting radius for the ray integrations.
pub const MIN_RADIUS: f64 = 5.0;

/// `V(lambda) = 4 lambda^3 - a lambda - b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPotential {
    pub a: Complex64,
    pub b: Complex64,
}

impl CubicPotential {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        4.0 * lambda * lambda * lambda - self.a * lambda - self.b
    }
}

/// `e^{log_scale} * (y, dy)`: value and derivative of a solution with the
/// magnitude factored out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSolutionValue {
    pub y: Complex64,
    pub dy: Complex64,
    pub log_scale: Complex64,
}

impl ScaledSolutionValue {
    /// Moves magnitude into `log_scale` so that `max(|y|, |dy|)` is about 1.
    pub fn renormalized(self) -> Self {
        let m = self.y.norm().max(self.dy.norm());
        if !(m > 0.0) || (1e-2..=1e2).contains(&m) {
            return self;
        }
        Self {
            y: self.y / m,
            dy: self.dy / m,
            log_scale: self.log_scale + m.ln(),
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.y.norm().max(self.dy.norm())
    }
}

/// Where and how tightly a ray integration runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySpec {
    pub k: Z5,
    /// Starting `|lambda|`.
    pub radius: f64,
    /// Local relative error allowed per step.
    pub tolerance: f64,
    /// Upper bound on a single step length.
    pub max_step: f64,
}

impl Default for RaySpec {
    fn default() -> Self {
        Self {
            k: Z5::new(0),
            radius: 12.0,
            tolerance: 1e-13,
            max_step: 1.0,
        }
    }
}

impl RaySpec {
    pub fn on_ray(&self, k: Z5) -> Self {
        Self { k, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius >= MIN_RADIUS) || !self.radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "starting radius {} is below the minimum {MIN_RADIUS}",
                self.radius
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1e-3) {
            return Err(Error::InvalidInput(format!(
                "ray tolerance {} outside (0, 1e-3)",
                self.tolerance
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidInput("max_step must be positive".into()));
        }
        Ok(())
    }
}

/// `e^{2 pi i k / 5}`.
pub fn omega_pow(k: i32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(k) / 5.0)
}
