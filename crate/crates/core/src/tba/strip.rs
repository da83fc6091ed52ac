//! The solution off the real line: `chi_l` on horizontal lines of the strip
//! `|Im theta| <= pi/3` and `Y_k` on the wider strip `|Im theta| <= 5 pi/6`.

use std::f64::consts::FRAC_PI_3;

use num_complex::Complex64;
use rayon::prelude::*;

use super::convolve::transform_at;
use super::{idft5, Convolver, TbaState};
use crate::{Error, Result, Z5, Z5_ALL};

/// Half-width of the strip reached by the Y-system extension.
pub const Y_STRIP: f64 = 5.0 * FRAC_PI_3 / 2.0;

const EDGE_SLACK: f64 = 1e-12;
/// Relative size below which a Y-system denominator counts as zero.
const ZERO_GUARD: f64 = 1e-12;

/// `chi_l(sigma + i tau)` on the whole grid, for `|tau| <= pi/3`.
pub fn extend_strip(state: &TbaState, tau: f64) -> Result<[Vec<Complex64>; 5]> {
    let conv = Convolver::new(&state.config.grid, tau, state.config.tail_mode)?;
    let out: Vec<Vec<Complex64>> = Z5_ALL
        .par_iter()
        .map(|&l| conv.apply(l, &state.lambda[l.index()]))
        .collect::<Result<_>>()?;
    Ok(out.try_into().expect("five modes"))
}

/// `chi_l(z)` at a single point of the strip.
pub fn chi_at(state: &TbaState, l: Z5, z: Complex64) -> Result<Complex64> {
    transform_at(l, &state.lambda[l.index()], z, &state.config.grid, state.config.tail_mode)
}

/// `eps_k(z)` for `|Im z| <= pi/3`.
pub fn eps_at(state: &TbaState, k: Z5, z: Complex64) -> Result<Complex64> {
    let chi: Vec<Complex64> = Z5_ALL.iter().map(|&l| chi_at(state, l, z)).collect::<Result<_>>()?;
    let chi: [Complex64; 5] = chi.try_into().expect("five modes");
    Ok(idft5(&chi)[k.index()] + state.constants.driving(state.a, k, z))
}

fn check_point(state: &TbaState, theta: Complex64) -> Result<()> {
    let g = &state.config.grid;
    if !(theta.re >= g.sigma_min && theta.re <= g.sigma_max) {
        return Err(Error::InvalidInput(format!(
            "Re theta = {} outside the grid [{}, {}]",
            theta.re, g.sigma_min, g.sigma_max
        )));
    }
    if !(theta.im.abs() <= Y_STRIP + EDGE_SLACK) {
        return Err(Error::InvalidInput(format!("|Im theta| = {} exceeds 5 pi/6", theta.im.abs())));
    }
    Ok(())
}

fn y_step(num: Complex64, den: Complex64, at: Complex64) -> Result<Complex64> {
    if den.norm() <= ZERO_GUARD * num.norm().max(1.0) {
        return Err(Error::ZeroDivision(format!("Y-system denominator {den} at theta = {at}")));
    }
    Ok(num / den)
}

/// `Y_k(theta)` for `|Im theta| <= 5 pi/6`: `exp(eps_k)` inside the strip
/// `|Im theta| <= pi/3`, one or two Y-system steps beyond it.
pub fn y_eval(state: &TbaState, k: Z5, theta: Complex64) -> Result<Complex64> {
    check_point(state, theta)?;
    y_rec(state, k, theta)
}

fn y_rec(state: &TbaState, k: Z5, theta: Complex64) -> Result<Complex64> {
    let shift = Complex64::new(0.0, FRAC_PI_3);
    if theta.im.abs() <= FRAC_PI_3 + EDGE_SLACK {
        let z = Complex64::new(theta.re, theta.im.clamp(-FRAC_PI_3, FRAC_PI_3));
        return Ok(eps_at(state, k, z)?.exp());
    }
    // Y_k(t) Y_{k-2}(t - 2i pi/3) = 1 + Y_{k-1}(t - i pi/3), and its mirror
    let (near, far, dir) = if theta.im > 0.0 {
        (k - 1, k - 2, -shift)
    } else {
        (k + 1, k + 2, shift)
    };
    let num = 1.0 + y_rec(state, near, theta + dir)?;
    let den = y_rec(state, far, theta + 2.0 * dir)?;
    y_step(num, den, theta)
}

/// `Y_{k-1}(theta - i pi/3) Y_{k+1}(theta + i pi/3) - 1 - Y_k(theta)` for
/// all `k`, with `Y` supplied by `y`.
pub fn ysystem_residuals_of<F>(y: F, theta: Complex64) -> Result<[(Complex64, Complex64); 5]>
where
    F: Fn(Z5, Complex64) -> Result<Complex64>,
{
    let shift = Complex64::new(0.0, FRAC_PI_3);
    let mut out = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 5];
    for k in Z5_ALL {
        let yk = y(k, theta)?;
        let r = y(k - 1, theta - shift)? * y(k + 1, theta + shift)? - 1.0 - yk;
        out[k.index()] = (r, yk);
    }
    Ok(out)
}

fn largest(res: &[(Complex64, Complex64); 5]) -> Complex64 {
    res.iter().map(|p| p.0).max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("five entries")
}

/// The Y-system residual of largest modulus over `k`.
pub fn ysystem_residual_of<F>(y: F, theta: Complex64) -> Result<Complex64>
where
    F: Fn(Z5, Complex64) -> Result<Complex64>,
{
    Ok(largest(&ysystem_residuals_of(y, theta)?))
}

/// `max_k |residual_k| / max(1, |1 + Y_k(theta)|)`.
pub fn ysystem_relative_residual_of<F>(y: F, theta: Complex64) -> Result<f64>
where
    F: Fn(Z5, Complex64) -> Result<Complex64>,
{
    Ok(ysystem_residuals_of(y, theta)?
        .iter()
        .map(|(r, yk)| r.norm() / (1.0 + yk).norm().max(1.0))
        .fold(0.0, f64::max))
}

pub fn ysystem_residual(state: &TbaState, theta: Complex64) -> Result<Complex64> {
    ysystem_residual_of(|k, t| y_eval(state, k, t), theta)
}

pub fn ysystem_relative_residual(state: &TbaState, theta: Complex64) -> Result<f64> {
    ysystem_relative_residual_of(|k, t| y_eval(state, k, t), theta)
}

/// The residual of `e^{-2 pi i l/5} chi_l(theta + i pi/3) + e^{2 pi i l/5}
/// chi_l(theta - i pi/3) - chi_l(theta) - Lambda_l(theta)`, maximal over `l`,
/// at a grid node `theta`.
pub fn diagonal_residual(state: &TbaState, i: usize) -> Result<f64> {
    let s = state.config.grid.point(i);
    let mut worst: f64 = 0.0;
    for l in Z5_ALL {
        let ph = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(l.value()) / 5.0);
        let up = chi_at(state, l, Complex64::new(s, FRAC_PI_3))?;
        let down = chi_at(state, l, Complex64::new(s, -FRAC_PI_3))?;
        let r = up / ph + ph * down - state.chi[l.index()][i] - state.lambda[l.index()][i];
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tba::{tba_solve, Grid, SolverConfig};
    use std::sync::OnceLock;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn golden() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    fn state(a: f64) -> &'static TbaState {
        static S0: OnceLock<TbaState> = OnceLock::new();
        static S3: OnceLock<TbaState> = OnceLock::new();
        let cell = if a == 0.0 { &S0 } else { &S3 };
        cell.get_or_init(|| {
            let cfg = SolverConfig {
                grid: Grid::new(-24.0, 16.0, 2049).unwrap(),
                tol_sup: 1e-9,
                ..SolverConfig::default()
            };
            tba_solve(c(a, 0.0), &cfg).unwrap()
        })
    }

    #[test]
    fn golden_field_satisfies_ysystem() {
        let r = ysystem_residual_of(|_, _| Ok(c(golden(), 0.0)), c(0.3, 0.1)).unwrap();
        assert!(r.norm() < 1e-15);
        let rel = ysystem_relative_residual_of(|_, _| Ok(c(golden(), 0.0)), c(0.0, 0.0)).unwrap();
        assert!(rel < 1e-15);
    }

    #[test]
    fn real_line_reproduces_stored_modes() {
        let st = state(0.3);
        let row = extend_strip(st, 0.0).unwrap();
        for l in Z5_ALL {
            let d = row[l.index()]
                .iter()
                .zip(&st.chi[l.index()])
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(d <= 1e-9 + 2.0 * st.residual, "l={l}: {d:e}");
        }
        for &i in &[300, 1000, 1500] {
            let s = st.config.grid.point(i);
            for k in Z5_ALL {
                let e = eps_at(st, k, c(s, 0.0)).unwrap();
                assert!((e - st.eps[k.index()][i]).norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn conjugation_symmetry_for_real_deformation() {
        let st = state(0.3);
        let up = extend_strip(st, 0.7).unwrap();
        let down = extend_strip(st, -0.7).unwrap();
        for l in Z5_ALL {
            let d = up[l.index()]
                .iter()
                .zip(&down[l.index()])
                .map(|(u, v)| (u.conj() - v).norm())
                .fold(0.0, f64::max);
            assert!(d <= 1e-8, "l={l}: {d:e}");
        }
        for th in [c(-1.0, 1.4), c(0.5, 2.3), c(1.2, -0.4)] {
            for k in Z5_ALL {
                let y = y_eval(st, k, th.conj()).unwrap();
                let ym = y_eval(st, -k, th).unwrap();
                assert!((y.conj() - ym).norm() <= 1e-8 * ym.norm().max(1.0));
            }
        }
    }

    #[test]
    fn ysystem_holds_on_the_real_line() {
        // off the line one of the two shifted points is itself reached by a
        // Y-system step, so only real theta gives an independent check
        for a in [0.0, 0.3] {
            let st = state(a);
            for th in [c(-3.0, 0.0), c(-0.5, 0.0), c(0.0, 0.0), c(1.5, 0.0), c(4.0, 0.0)] {
                let r = ysystem_relative_residual(st, th).unwrap();
                assert!(r <= 5e-6, "a={a} theta={th}: {r:e}");
            }
        }
    }

    #[test]
    fn periodicity_across_the_wide_strip() {
        // the direct value at Im = -5pi/6 + pi and the Y-system value at
        // Im = 5pi/6 are both continuations of the same entire function
        let st = state(0.3);
        let shift = c(0.0, 5.0 * FRAC_PI_3);
        for k in Z5_ALL {
            let top = y_eval(st, k, c(0.4, Y_STRIP)).unwrap();
            let bottom = y_eval(st, k, c(0.4, Y_STRIP) - shift).unwrap();
            assert!((top - bottom).norm() <= 1e-6 * top.norm().max(1.0), "k={k}: {top} {bottom}");
        }
    }

    #[test]
    fn diagonal_relation_in_the_interior() {
        let st = state(0.3);
        for s in [-10.0, -2.0, 0.0, 3.0] {
            let i = st.config.grid.nearest(s);
            let r = diagonal_residual(st, i).unwrap();
            assert!(r <= 5e-6, "sigma={s}: {r:e}");
        }
    }

    #[test]
    fn rejects_points_outside_the_domain() {
        let st = state(0.0);
        assert!(matches!(y_eval(st, Z5::new(0), c(0.0, 2.7)), Err(Error::InvalidInput(_))));
        assert!(matches!(y_eval(st, Z5::new(0), c(-40.0, 0.0)), Err(Error::InvalidInput(_))));
        assert!(matches!(chi_at(st, Z5::new(1), c(0.0, 1.2)), Err(Error::PoleProximity(_))));
    }
}
