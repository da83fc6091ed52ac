//! Large-`lambda` expansion of the subdominant solutions.
//!
//! With `u = y'/y` the Riccati equation `u' + u^2 = V` is solved by the
//! formal series `u = sum_n c_n lambda^{(3-n)/2}`. Integrating term by term
//! gives `ln y`, and the normalization `y ~ lambda^{-3/4}
//! exp(-4/5 lambda^{5/2} + a/2 lambda^{1/2})` fixes the integration
//! constant to zero.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CubicPotential, ScaledSolutionValue};
use crate::{Error, Result, Z5};

const MAX_TERMS: usize = 80;

/// Coefficients `c_0 .. c_{n-1}` of the Riccati series for `y'/y`.
pub fn asymptotic_coefficients(pot: &CubicPotential, n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    // V = 4 lambda^3 - a lambda - b, read in powers lambda^{3 - m/2}
    let v = |m: usize| match m {
        0 => Complex64::new(4.0, 0.0),
        4 => -pot.a,
        6 => -pot.b,
        _ => zero,
    };
    let mut c = vec![zero; n];
    if n == 0 {
        return c;
    }
    c[0] = Complex64::new(-2.0, 0.0);
    for m in 1..n {
        let mut acc = v(m);
        for i in 1..m {
            acc -= c[i] * c[m - i];
        }
        if m >= 5 {
            acc -= c[m - 5] * (8.0 - m as f64) / 2.0;
        }
        c[m] = acc / (2.0 * c[0]);
    }
    c
}

/// `lambda^{1/2}` on the `k`-th ray, on the branch where `lambda^{5/2} > 0`.
pub fn sqrt_on_ray(k: Z5, r: f64) -> Complex64 {
    let kf = f64::from(k.value());
    Complex64::from_polar(ray_sign(k) * r.sqrt(), PI * kf / 5.0)
}

/// `lambda^{-3/4}` is read as `lambda^{-1/2} lambda^{-1/4}` with the ray
/// branch of `lambda^{1/2}` and the principal `lambda^{1/4}`; this differs
/// from the principal `lambda^{-3/4}` by `(-1)^k`.
fn ray_sign(k: Z5) -> f64 {
    if k.value() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn ray_point(k: Z5, r: f64) -> Complex64 {
    Complex64::from_polar(r, 2.0 * PI * f64::from(k.value()) / 5.0)
}

fn check_branch(k: Z5, s: Complex64) -> Result<()> {
    let s5 = s.powu(5);
    if !(s5.re > 0.0) || s5.im.abs() > 1e-10 * s5.re {
        return Err(Error::BranchError {
            k: k.value(),
            detail: format!("lambda^(5/2) = {s5} is not positive real"),
        });
    }
    Ok(())
}

/// Seed for the ray integration together with the size of the first
/// neglected term of the expansion (a relative error estimate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbSeed {
    pub value: ScaledSolutionValue,
    pub truncation: f64,
}

/// `y_k` and `y_k'` at `lambda = r e^{2 pi i k/5}` from the optimally
/// truncated expansion. The factor `exp(-4/5 lambda^{5/2})` goes into
/// `log_scale`.
pub fn wkb_seed(k: Z5, r: f64, pot: &CubicPotential) -> Result<WkbSeed> {
    let s = sqrt_on_ray(k, r);
    check_branch(k, s)?;
    let lambda = ray_point(k, r);
    let c = asymptotic_coefficients(pot, MAX_TERMS);

    // ln y minus the dominant exponential
    let mut log_rest = c[4] * 2.0 * s + c[5] * lambda.ln();
    // u = y'/y
    let mut u = c[0] * s.powu(3) + c[4] / s + c[5] / lambda;
    // terms n >= 6 of ln y and of u; the series is asymptotic, so stop
    // just before the smallest term, which then bounds the error
    let inv_s = 1.0 / s;
    let mut sp = inv_s; // s^{5-n} for n = 6
    let mut terms = Vec::with_capacity(MAX_TERMS);
    for (n, cn) in c.iter().enumerate().skip(6) {
        terms.push((*cn * sp / ((5.0 - n as f64) / 2.0), *cn * sp * inv_s * inv_s));
        sp *= inv_s;
    }
    let (cut, truncation) = terms
        .iter()
        .enumerate()
        .filter(|(_, t)| t.0.norm() > 0.0)
        .map(|(j, t)| (j, t.0.norm()))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((terms.len(), 0.0));
    for (dl, du) in &terms[..cut] {
        log_rest += dl;
        u += du;
    }

    let y = ray_sign(k) * log_rest.exp();
    let value = ScaledSolutionValue {
        y,
        dy: u * y,
        log_scale: Complex64::new(-0.8 * r.powf(2.5), 0.0),
    }
    .renormalized();
    Ok(WkbSeed { value, truncation })
}

/// Leading-order seed `lambda^{-3/4} exp(-4/5 lambda^{5/2} + a/2 lambda^{1/2})`
/// with `y'/y = -3/(4 lambda) - 2 lambda^{3/2} + a/4 lambda^{-1/2}`.
pub fn wkb_leading(k: Z5, r: f64, pot: &CubicPotential) -> Result<ScaledSolutionValue> {
    let s = sqrt_on_ray(k, r);
    check_branch(k, s)?;
    let lambda = ray_point(k, r);
    let y = ray_sign(k) * lambda.powf(-0.75) * (pot.a / 2.0 * s).exp();
    let u = -0.75 / lambda - 2.0 * s.powu(3) + pot.a / 4.0 / s;
    Ok(ScaledSolutionValue {
        y,
        dy: u * y,
        log_scale: Complex64::new(-0.8 * r.powf(2.5), 0.0),
    })
}
