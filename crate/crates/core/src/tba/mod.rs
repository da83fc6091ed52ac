//! Grid solver for the deformed TBA.
//!
//! The unknowns are the Fourier modes `chi_l` of the subtracted
//! pseudo-energies `delta_k = eps_k - 2A e^s + 2a B e^{s/5 - 2 pi i k/5}`.
//! They satisfy `chi_l = phi_l * Lambda_l` with `Lambda_l` the Z_5 transform
//! of `L_k = ln(1 + e^{-eps_k})`. The solution on the real line is then
//! continued into the strip `|Im theta| <= pi/3` by the same convolutions and
//! beyond it with the Y-system.

mod convolve;
mod kernel;
mod solve;
mod strip;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Z5, Z5_ALL};

pub use convolve::{convolve, convolve_direct, Convolver};
pub use kernel::{kernel, kernel_integral, kernel_pole, KernelPole};
pub use solve::{tba_solve, tba_solve_a0, TbaState};
pub use strip::{
    chi_at, diagonal_residual, eps_at, extend_strip, y_eval, ysystem_relative_residual, ysystem_relative_residual_of,
    ysystem_residual, ysystem_residual_of, ysystem_residuals_of, Y_STRIP,
};

/// Uniform grid on `[sigma_min, sigma_max]` with `n` points, endpoints
/// included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(sigma_min: f64, sigma_max: f64, n: usize) -> Result<Self> {
        let g = Self { sigma_min, sigma_max, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("grid needs at least 2 points, got {}", self.n)));
        }
        if !(self.sigma_min.is_finite() && self.sigma_max.is_finite() && self.sigma_min < 0.0 && 0.0 < self.sigma_max)
        {
            return Err(Error::InvalidInput(format!(
                "grid bounds must satisfy min < 0 < max, got [{}, {}]",
                self.sigma_min, self.sigma_max
            )));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.sigma_max - self.sigma_min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.sigma_max
        } else {
            self.sigma_min + self.h() * i as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Index of the grid point nearest to `sigma`, clamped to the grid.
    pub fn nearest(&self, sigma: f64) -> usize {
        let x = ((sigma - self.sigma_min) / self.h()).round();
        x.clamp(0.0, (self.n - 1) as f64) as usize
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            sigma_min: -30.0,
            sigma_max: 30.0,
            n: 4096,
        }
    }
}

/// How the input of a convolution is continued beyond the grid on the left.
/// On the right it is always continued by zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// Constant continuation by the edge value, kernel tail integrated in
    /// closed form.
    ConstantExtension,
    ZeroExtension,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: Grid,
    /// Relaxation weight of the new iterate, in `(0, 1]`.
    pub damping: f64,
    /// Sup-norm step size at which the iteration stops.
    pub tol_sup: f64,
    pub max_iter: usize,
    /// Smallest admissible `|1 + e^{-eps_k}|` on the grid.
    pub assumption_guard: f64,
    pub tail_mode: TailMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: Grid::default(),
            damping: 0.5,
            tol_sup: 1e-10,
            max_iter: 500,
            assumption_guard: 1e-3,
            tail_mode: TailMode::ConstantExtension,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidInput(format!("damping {} outside (0, 1]", self.damping)));
        }
        if !(self.tol_sup > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance {} must be positive", self.tol_sup)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        if !(self.assumption_guard >= 0.0) {
            return Err(Error::InvalidInput("assumption guard must be non-negative".into()));
        }
        Ok(())
    }
}

/// The Gamma-function constants `A`, `B` of the driving terms.
///
/// With `Y_k(theta) = -R_0(w^{-k} a, e^{6 theta/5})` the ODE fixes
/// `ln Y_k ~ 2A e^theta - 2a B e^{theta/5 - 2 pi i k/5}` as `Re theta` grows,
/// which is what [`DrivingConstants::driving`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivingConstants {
    /// `sqrt(pi/3) Gamma(1/3) / (2^{5/3} Gamma(11/6))`
    pub a: f64,
    /// `sqrt(3 pi) Gamma(2/3) / (4^{2/3} Gamma(1/6))`
    pub b: f64,
}

pub fn driving_constants() -> DrivingConstants {
    use statrs::function::gamma::gamma;
    DrivingConstants {
        a: (PI / 3.0).sqrt() * gamma(1.0 / 3.0) / (2f64.powf(5.0 / 3.0) * gamma(11.0 / 6.0)),
        b: (3.0 * PI).sqrt() * gamma(2.0 / 3.0) / (4f64.powf(2.0 / 3.0) * gamma(1.0 / 6.0)),
    }
}

impl DrivingConstants {
    /// `2A e^theta - 2a B e^{theta/5 - 2 pi i k/5}`.
    pub fn driving(&self, a: Complex64, k: Z5, theta: Complex64) -> Complex64 {
        let phase = Complex64::from_polar(1.0, -2.0 * PI * f64::from(k.value()) / 5.0);
        2.0 * self.a * theta.exp() - 2.0 * a * self.b * (theta / 5.0).exp() * phase
    }
}

fn unit(kl: i32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * f64::from(kl.rem_euclid(5)) / 5.0)
}

/// `chi_l = sum_k e^{2 pi i k l/5} v_k`, arrays laid out as `[-2..=2]`.
pub fn dft5(v: &[Complex64; 5]) -> [Complex64; 5] {
    Z5_ALL.map(|l| {
        Z5_ALL
            .iter()
            .map(|&k| unit(k.value() * l.value()) * v[k.index()])
            .sum()
    })
}

/// `v_k = (1/5) sum_l e^{-2 pi i k l/5} chi_l`.
pub fn idft5(chi: &[Complex64; 5]) -> [Complex64; 5] {
    Z5_ALL.map(|k| {
        Z5_ALL
            .iter()
            .map(|&l| unit(-k.value() * l.value()) * chi[l.index()])
            .sum::<Complex64>()
            / 5.0
    })
}
