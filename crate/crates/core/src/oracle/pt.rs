//! Zeros of a Stokes multiplier along a PT-symmetric line of potentials.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{omega_pow, sigma, CubicPotential, Monodromy, RaySpec};
use crate::geometry::det;
use crate::{Error, Result, Z5};

/// Target for `|sigma_k|` at a refined root.
pub const ROOT_TOL: f64 = 1e-9;
const SECANT_MAX_ITER: usize = 60;

/// A refined zero of `sigma_k(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtRoot {
    /// Root in the rotated variable `t = omega^{-3k} b`.
    pub t: Complex64,
    pub b: Complex64,
    pub sigma_abs: f64,
    /// `|d(w_{k-1}, w_{k+1})|` between normalized asymptotic values.
    pub w_gap: f64,
}

impl PtRoot {
    /// `omega^{-3k} b` real and negative within `tol`.
    pub fn is_pt_real(&self, tol: f64) -> bool {
        self.t.im.abs() <= tol && self.t.re < 0.0
    }
}

/// Complex secant iteration for `f(x) = 0` started from `x0, x1`.
///
/// Fails with `NoRootInBracket` if the iterate leaves the disc of radius
/// `reach` around the midpoint of the starting pair.
pub fn refine_root_secant<F>(f: F, x0: Complex64, x1: Complex64, reach: f64, tol: f64) -> Result<(Complex64, Complex64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mid = (x0 + x1) / 2.0;
    let (mut xa, mut xb) = (x0, x1);
    let (mut fa, mut fb) = (f(xa)?, f(xb)?);
    for _ in 0..SECANT_MAX_ITER {
        if fb.norm() <= tol {
            return Ok((xb, fb));
        }
        let denom = fb - fa;
        if denom.norm() == 0.0 {
            break;
        }
        let xn = xb - fb * (xb - xa) / denom;
        if !((xn - mid).norm() <= reach) {
            return Err(Error::NoRootInBracket { lo: x0.re, hi: x1.re });
        }
        xa = xb;
        fa = fb;
        xb = xn;
        fb = f(xb)?;
    }
    if fb.norm() <= tol {
        return Ok((xb, fb));
    }
    Err(Error::NonConvergence {
        iterations: SECANT_MAX_ITER,
        residual: fb.norm(),
    })
}

/// Locates zeros of `sigma_k(a_k, b)` with `a_k = omega^{2k} a` and
/// `b = omega^{3k} t`, for `t` in `[lo, hi]` sampled at `steps + 1` points.
///
/// The rotation `sigma_k(omega^{2k} a, omega^{3k} t) = sigma_0(a, t)` maps
/// the scan onto the real line, so with `a >= 0` every zero is expected at
/// real negative `t`. Candidates come from
/// sample segments passing close to the origin (the curve `t -> sigma`
/// crosses zero transversally at a simple root) and from deep local minima
/// of `|sigma|`; each is refined with a complex secant in `t`.
pub fn pt_eigenvalue_scan(a: f64, k: Z5, range: (f64, f64), steps: usize, template: &RaySpec) -> Result<Vec<PtRoot>> {
    if !(a >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "PT scan needs a real non-negative deformation, got {a}"
        )));
    }
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidInput("non-finite b range".into()));
    }
    if steps == 0 || !(hi > lo) {
        return Ok(Vec::new());
    }
    let ak = omega_pow(2 * k.value()) * a;
    let rot = omega_pow(3 * k.value());
    let f = |t: Complex64| sigma(&CubicPotential::new(ak, rot * t), k, template);

    let dt = (hi - lo) / steps as f64;
    let ts: Vec<f64> = (0..=steps).map(|j| lo + dt * j as f64).collect();
    let fs: Vec<Complex64> = ts
        .par_iter()
        .map(|&t| f(Complex64::new(t, 0.0)))
        .collect::<Result<_>>()?;

    let mut starts: Vec<(f64, f64)> = Vec::new();
    for j in 0..steps {
        let d = fs[j + 1] - fs[j];
        let dn = d.norm_sqr();
        if dn == 0.0 {
            continue;
        }
        let s = -(d.conj() * fs[j]).re / dn;
        if (0.0..=1.0).contains(&s) && (fs[j] + d * s).norm() <= 0.5 * dn.sqrt() {
            starts.push((ts[j], ts[j + 1]));
        }
    }
    for j in 1..steps {
        let m = fs[j].norm();
        if m < 0.5 * fs[j - 1].norm().min(fs[j + 1].norm()) {
            starts.push((ts[j - 1], ts[j + 1]));
        }
    }

    let mut roots: Vec<PtRoot> = Vec::new();
    for (t0, t1) in starts {
        let reach = 2.0 * (t1 - t0).abs();
        let (t, val) = match refine_root_secant(f, Complex64::new(t0, 0.0), Complex64::new(t1, 0.0), reach, ROOT_TOL) {
            Ok(r) => r,
            Err(Error::NoRootInBracket { .. }) => continue,
            Err(e) => return Err(e),
        };
        if t.re < lo - dt || t.re > hi + dt {
            continue;
        }
        if roots.iter().any(|r| (r.t - t).norm() <= 1e-6 * (1.0 + t.norm())) {
            continue;
        }
        let pot = CubicPotential::new(ak, rot * t);
        let w = Monodromy::compute(&pot, template)?.asymptotic_values()?;
        roots.push(PtRoot {
            t,
            b: rot * t,
            sigma_abs: val.norm(),
            w_gap: det(&w[k - 1], &w[k + 1]).norm(),
        });
    }
    roots.sort_by(|x, y| x.t.re.total_cmp(&y.t.re));
    Ok(roots)
}
