use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::{wkb_seed, CubicPotential, RaySpec, ScaledSolutionValue};
use crate::{Error, Result, Z5};

/// Taylor order used by the integrator.
const ORDER: usize = 30;
const MAX_STEPS: usize = 200_000;

/// A solution value at the end of a ray together with the accumulated
/// relative error estimate (local truncation plus seed truncation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySolution {
    pub k: Z5,
    pub value: ScaledSolutionValue,
    pub error_estimate: f64,
    pub steps: usize,
}

/// Subdominant solution `y_k` carried from `spec.radius` to `lambda = 0`.
pub fn integrate_ray(spec: &RaySpec, pot: &CubicPotential) -> Result<RaySolution> {
    spec.validate()?;
    let seed = wkb_seed(spec.k, spec.radius, pot)?;
    let mut sol = integrate_segment(spec, pot, seed.value, spec.radius, 0.0)?;
    sol.error_estimate += seed.truncation;
    Ok(sol)
}

/// Carries `start` (given at `|lambda| = from` on ray `spec.k`) to
/// `|lambda| = to` along the ray.
///
/// The solution is expanded in a Taylor series about the current point;
/// `psi'' = V psi` with cubic `V` gives the three-term recurrence
/// `(n+1)(n+2) p_{n+2} = sum_j v_j p_{n-j}`. The step length is chosen so
/// that the last two retained terms sit below the tolerance.
pub fn integrate_segment(
    spec: &RaySpec,
    pot: &CubicPotential,
    start: ScaledSolutionValue,
    from: f64,
    to: f64,
) -> Result<RaySolution> {
    let theta = 2.0 * PI * f64::from(spec.k.value()) / 5.0;
    let unit = Complex64::from_polar(1.0, theta);
    let dir = if to < from { -unit } else { unit };
    let tol = spec.tolerance;

    let mut y = start.y;
    let mut dy = start.dy;
    // power-of-two exponents accumulate exactly
    let mut exponent: i64 = 0;
    let mut t = from;
    let mut err = 0.0;
    let mut steps = 0usize;
    let mut p = [Complex64::new(0.0, 0.0); ORDER + 1];

    while (to - t).abs() > 0.0 {
        if steps >= MAX_STEPS {
            return Err(Error::ToleranceNotMet {
                estimate: err,
                tolerance: tol,
            });
        }
        let lambda0 = unit * t;
        let v0 = pot.eval(lambda0);
        let v1 = 12.0 * lambda0 * lambda0 - pot.a;
        let v2 = 12.0 * lambda0;
        let v3 = Complex64::new(4.0, 0.0);
        let v = [v0, v1, v2, v3];

        p[0] = y;
        p[1] = dy;
        for n in 0..ORDER - 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate().take(n.min(3) + 1) {
                acc += vj * p[n - j];
            }
            p[n + 2] = acc / (((n + 1) * (n + 2)) as f64);
        }

        let scale = y.norm().max(dy.norm());
        let mut h = spec.max_step.min((to - t).abs());
        for j in [ORDER - 1, ORDER] {
            let pj = p[j].norm();
            if pj > 0.0 {
                h = h.min(0.9 * (tol * scale / pj).powf(1.0 / j as f64));
            }
        }

        let (y_new, dy_new, local) = loop {
            let ds = dir * h;
            let (mut ys, mut dys) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            let mut pw = Complex64::new(1.0, 0.0);
            for (n, &pn) in p.iter().enumerate().take(ORDER + 1) {
                if n >= 1 {
                    dys += pn * pw * n as f64;
                    pw *= ds;
                }
                ys += pn * pw;
            }
            let tail_y = p[ORDER - 1].norm() * h.powi(ORDER as i32 - 1) + p[ORDER].norm() * h.powi(ORDER as i32);
            let tail_dy = (ORDER - 1) as f64 * p[ORDER - 1].norm() * h.powi(ORDER as i32 - 2)
                + ORDER as f64 * p[ORDER].norm() * h.powi(ORDER as i32 - 1);
            let denom = ys.norm().max(dys.norm()).max(scale);
            let local = tail_y.max(tail_dy) / denom;
            if local <= tol || h < 1e-14 * t.abs().max(1.0) {
                break (ys, dys, local);
            }
            h *= 0.5;
        };
        if h < 1e-12 * t.abs().max(1.0) && (to - t).abs() > h {
            return Err(Error::StepUnderflow { step: h, radius: t });
        }

        y = y_new;
        dy = dy_new;
        err += local;
        t = if (to - t).abs() <= h { to } else { t + h * (to - t).signum() };
        steps += 1;

        let m = y.norm().max(dy.norm());
        if !m.is_finite() || m == 0.0 {
            return Err(Error::ToleranceNotMet {
                estimate: f64::INFINITY,
                tolerance: tol,
            });
        }
        let e = m.log2().round() as i32;
        if e != 0 {
            let f = (-f64::from(e)).exp2();
            y *= f;
            dy *= f;
            exponent += i64::from(e);
        }
    }

    if err > 1e4 * tol.max(1e-14) * (steps.max(1) as f64) {
        return Err(Error::ToleranceNotMet {
            estimate: err,
            tolerance: tol,
        });
    }

    Ok(RaySolution {
        k: spec.k,
        value: ScaledSolutionValue {
            y,
            dy,
            log_scale: start.log_scale + exponent as f64 * LN_2,
        },
        error_estimate: err,
        steps,
    })
}
