//! The five TBA kernels
//! `phi_0 = (sqrt3/pi) 2 cosh u / (1 + 2 cosh 2u)`,
//! `phi_{+-1} = -(sqrt3/pi) e^{-+9u/5} / (1 + 2 cosh 2u)`,
//! `phi_{+-2} = -(sqrt3/pi) e^{-+3u/5} / (1 + 2 cosh 2u)`.
//!
//! Each is a sum of terms `w e^{-beta u} / (1 + 2 cosh 2u)` with
//! `|beta| < 2`, which is what the closed-form tails rely on.

use std::f64::consts::{FRAC_PI_3, PI};

use num_complex::Complex64;

use crate::{Error, Result, Z5};

const MAX_TAIL_TERMS: usize = 400;

fn prefactor() -> f64 {
    3f64.sqrt() / PI
}

/// `(w, beta)` pairs with `phi_l(u) = sum w e^{-beta u} / (1 + 2 cosh 2u)`.
fn pieces(l: Z5) -> Vec<(f64, f64)> {
    let s = prefactor();
    match l.value() {
        0 => vec![(s, -1.0), (s, 1.0)],
        1 => vec![(-s, 1.8)],
        -1 => vec![(-s, -1.8)],
        2 => vec![(-s, 0.6)],
        _ => vec![(-s, -0.6)],
    }
}

fn numerator(l: Z5, u: Complex64) -> (Complex64, Complex64) {
    pieces(l).iter().fold(
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        |(n, dn), &(w, beta)| {
            let e = w * (-beta * u).exp();
            (n + e, dn - beta * e)
        },
    )
}

/// `1 / (1 + 2 cosh 2u)` written in the decaying exponential, so it never
/// overflows.
fn inv_denominator(u: Complex64) -> Complex64 {
    let s = if u.re >= 0.0 { 1.0 } else { -1.0 };
    let x = (-2.0 * s * u).exp();
    x / (1.0 + x + x * x)
}

/// `phi_l(u)` without the pole guard.
pub(crate) fn kernel_value(l: Z5, u: Complex64) -> Complex64 {
    numerator(l, u).0 * inv_denominator(u)
}

pub fn kernel(l: Z5, z: Complex64) -> Result<Complex64> {
    let d = 1.0 + 2.0 * (2.0 * z).cosh();
    if d.norm() < 1e-12 {
        return Err(Error::PoleProximity(format!("phi_{l} evaluated at {z}")));
    }
    Ok(kernel_value(l, z))
}

/// `int_R phi_l = 1 / (2 cos(2 pi l/5) - 1)`.
pub fn kernel_integral(l: Z5) -> f64 {
    1.0 / (2.0 * (2.0 * PI * f64::from(l.value()) / 5.0).cos() - 1.0)
}

/// `int_x^{x + infinity} phi_l(u) du` along a horizontal line, for
/// `Re x > 0`, from `1/(1 + 2 cosh 2u) = sum_n e^{-(2+6n)u} - e^{-(4+6n)u}`.
pub(crate) fn kernel_tail(l: Z5, x: Complex64) -> Complex64 {
    debug_assert!(x.re > 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, beta) in pieces(l) {
        for n in 0..MAX_TAIL_TERMS {
            let p1 = beta + 2.0 + 6.0 * n as f64;
            let p2 = beta + 4.0 + 6.0 * n as f64;
            let t = (-p1 * x).exp() / p1 - (-p2 * x).exp() / p2;
            acc += w * t;
            if t.norm() <= 1e-18 * acc.norm() {
                break;
            }
        }
    }
    acc
}

/// Laurent data of `phi_l` at one of its poles `u = +- i pi/3`:
/// `phi_l(u) = residue / (u - at) + finite_part + O(u - at)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPole {
    pub at: Complex64,
    pub residue: Complex64,
    pub finite_part: Complex64,
}

/// The pole at `+i pi/3` if `upper`, else at `-i pi/3`.
pub fn kernel_pole(l: Z5, upper: bool) -> KernelPole {
    let at = Complex64::new(0.0, if upper { FRAC_PI_3 } else { -FRAC_PI_3 });
    let (n0, n1) = numerator(l, at);
    let d1 = 4.0 * (2.0 * at).sinh();
    let d2 = 8.0 * (2.0 * at).cosh();
    KernelPole {
        at,
        residue: n0 / d1,
        finite_part: n1 / d1 - n0 * d2 / (2.0 * d1 * d1),
    }
}
