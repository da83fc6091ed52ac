//! `F(s + i tau) = int phi_l(s + i tau - s') f(s') ds'` for `f` sampled on a
//! grid.
//!
//! The samples are padded by `PAD_WIDTH` on both sides (with the edge value
//! on the left in constant-extension mode, zero on the right) and the
//! padded range is integrated with the trapezoid rule; the constant left
//! continuation beyond the padding is integrated in closed form. Padding
//! keeps every output point at least `PAD_WIDTH` away from the junctions,
//! so the closed-form tail never meets the kernel poles.
//!
//! As `|tau| -> pi/3` a kernel pole approaches the real `s'` axis and the
//! trapezoid rule degrades. There the singular part
//! `q(u) = Res / sinh(u - u_p)` is subtracted: the rule is applied to the
//! smooth remainder and `q` is integrated exactly. On the line
//! `|tau| = pi/3` this yields the boundary values from inside the strip.

use std::f64::consts::{FRAC_PI_3, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::kernel::{kernel_pole, kernel_tail, kernel_value, KernelPole};
use super::{Grid, TailMode};
use crate::{Error, Result, Z5, Z5_ALL};

const PAD_WIDTH: f64 = 2.0;
/// Pole distance below which the singular part is subtracted.
const POLE_WINDOW: f64 = 0.3;
/// Pole distances below this count as lying on the line.
const ON_LINE: f64 = 1e-9;
const STRIP_SLACK: f64 = 1e-12;

/// Padded abscissae `s_j = s0 + j h`, `j < len`; grid point `i` sits at
/// `j = i + pad`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    h: f64,
    s0: f64,
    pad: usize,
    n: usize,
    len: usize,
}

impl Layout {
    fn new(grid: &Grid) -> Self {
        let h = grid.h();
        let pad = ((PAD_WIDTH / h).ceil() as usize).max(4);
        Self {
            h,
            s0: grid.sigma_min - pad as f64 * h,
            pad,
            n: grid.n,
            len: grid.n + 2 * pad,
        }
    }

    fn abscissa(&self, j: usize) -> f64 {
        self.s0 + self.h * j as f64
    }

    fn weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.len {
            0.5 * self.h
        } else {
            self.h
        }
    }

    fn padded(&self, f: &[Complex64], mode: TailMode) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        let left = match mode {
            TailMode::ConstantExtension => f[0],
            TailMode::ZeroExtension => zero,
        };
        let mut v = Vec::with_capacity(self.len);
        v.resize(self.pad, left);
        v.extend_from_slice(f);
        v.resize(self.len, zero);
        v
    }
}

/// Which kernel pole is close to the integration line and how far.
#[derive(Debug, Clone, Copy)]
struct NearPole {
    pole: KernelPole,
    /// `Im(z - u_p)`; the pole sits at `s' = Re z + i gamma`.
    gamma: f64,
    /// Side from which `gamma -> 0` is approached inside the strip.
    side: f64,
}

impl NearPole {
    fn find(l: Z5, tau: f64) -> Option<Self> {
        let up = FRAC_PI_3 - tau;
        let down = tau + FRAC_PI_3;
        let (upper, dist) = if up <= down { (true, up) } else { (false, down) };
        if dist >= POLE_WINDOW {
            return None;
        }
        let pole = kernel_pole(l, upper);
        let gamma = if dist < ON_LINE {
            0.0
        } else {
            tau - pole.at.im
        };
        Some(Self {
            pole,
            gamma,
            side: if upper { -1.0 } else { 1.0 },
        })
    }

    fn on_line(&self) -> bool {
        self.gamma == 0.0
    }

    /// `q(u) = Res / sinh(u - u_p)` at `u = z - s'`, passed as
    /// `x = Re z - s'`.
    fn q(&self, x: f64) -> Complex64 {
        self.pole.residue / Complex64::new(x, self.gamma).sinh()
    }

    /// `int_{s_a}^{s_b} q(z - s') ds'` with `x = Re z`.
    fn exact_integral(&self, x: f64, s_a: f64, s_b: f64) -> Complex64 {
        let w = Complex64::new(x, self.gamma);
        let t_b = ((s_b - w) / 2.0).tanh();
        let t_a = ((s_a - w) / 2.0).tanh();
        let inner = t_b.ln() - (-t_a).ln() + Complex64::new(0.0, PI * self.side);
        -self.pole.residue * inner
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau.abs() <= FRAC_PI_3 + STRIP_SLACK) {
        return Err(Error::PoleProximity(format!(
            "shift {tau} lies outside the strip |tau| <= pi/3"
        )));
    }
    Ok(())
}

/// Value of the degree-6 interpolant through `v[c-3..=c+3]` at the complex
/// position `c + t` (in units of the spacing), by Neville's scheme.
fn interpolate(v: &[Complex64], c: usize, t: Complex64) -> Complex64 {
    let mut p: [Complex64; 7] = std::array::from_fn(|m| v[c + m - 3]);
    let x: [f64; 7] = std::array::from_fn(|m| m as f64 - 3.0);
    for m in 1..7 {
        for i in 0..7 - m {
            p[i] = ((t - x[i + m]) * p[i] - (t - x[i]) * p[i + 1]) / (x[i] - x[i + m]);
        }
    }
    p[0]
}

fn derivative(v: &[Complex64], c: usize, h: f64) -> Complex64 {
    (-v[c + 2] + 8.0 * v[c + 1] - 8.0 * v[c - 1] + v[c - 2]) / (12.0 * h)
}

/// Everything that depends on the kernel but not on the input, for one `l`.
struct Channel {
    l: Z5,
    spectrum: Vec<Complex64>,
    /// Closed-form left tail per grid point (before scaling by the edge value).
    tail: Vec<Complex64>,
    near: Option<NearPole>,
    /// `sum_j w_j q(z_i - s_j) - int q(z_i - s') ds'` per grid point.
    q_defect: Vec<Complex64>,
}

/// FFT-backed convolutions on one grid at one imaginary shift, all five
/// kernels prepared up front.
pub struct Convolver {
    layout: Layout,
    tau: f64,
    mode: TailMode,
    fft_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    channels: Vec<Channel>,
}

impl Convolver {
    pub fn new(grid: &Grid, tau: f64, mode: TailMode) -> Result<Self> {
        grid.validate()?;
        check_tau(tau)?;
        let layout = Layout::new(grid);
        let fft_len = (2 * layout.len - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);
        let mut me = Self {
            layout,
            tau,
            mode,
            fft_len,
            forward,
            inverse,
            channels: Vec::with_capacity(5),
        };
        for l in Z5_ALL {
            let near = NearPole::find(l, tau);
            let skip_diag = near.is_some_and(|p| p.on_line());
            let spectrum = me.kernel_spectrum(|d| {
                if skip_diag && d == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    kernel_value(l, Complex64::new(d as f64 * layout.h, tau))
                }
            });
            let tail = (0..layout.n)
                .map(|i| kernel_tail(l, Complex64::new((i + layout.pad) as f64 * layout.h, tau)))
                .collect();
            let q_defect = match near {
                None => Vec::new(),
                Some(p) => {
                    let qs = me.kernel_spectrum(|d| {
                        if skip_diag && d == 0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            p.q(d as f64 * layout.h)
                        }
                    });
                    let ones = vec![Complex64::new(1.0, 0.0); layout.len];
                    let sums = me.apply_spectrum(&qs, &ones);
                    let (s_a, s_b) = (layout.abscissa(0), layout.abscissa(layout.len - 1));
                    (0..layout.n)
                        .map(|i| {
                            let x = layout.abscissa(i + layout.pad);
                            sums[i] - p.exact_integral(x, s_a, s_b)
                        })
                        .collect()
                }
            };
            me.channels.push(Channel {
                l,
                spectrum,
                tail,
                near,
                q_defect,
            });
        }
        Ok(me)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// FFT of the Toeplitz symbol `k(d)`, `|d| < len`, in wrap-around order.
    fn kernel_spectrum<F: Fn(i64) -> Complex64>(&self, k: F) -> Vec<Complex64> {
        let len = self.layout.len as i64;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        for d in -(len - 1)..len {
            let idx = d.rem_euclid(self.fft_len as i64) as usize;
            buf[idx] = k(d);
        }
        self.forward.process(&mut buf);
        buf
    }

    /// `sum_j w_j k(i - j) g_j` at the grid points, given the symbol's FFT.
    fn apply_spectrum(&self, spectrum: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        let lay = &self.layout;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        for (j, gj) in g.iter().enumerate() {
            buf[j] = gj * lay.weight(j);
        }
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(spectrum) {
            *b *= s;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.fft_len as f64;
        (0..lay.n).map(|i| buf[i + lay.pad] * scale).collect()
    }

    /// The transform of grid samples `f` with kernel `phi_l`.
    pub fn apply(&self, l: Z5, f: &[Complex64]) -> Result<Vec<Complex64>> {
        let lay = &self.layout;
        if f.len() != lay.n {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                lay.n,
                f.len()
            )));
        }
        let ch = &self.channels[l.index()];
        debug_assert_eq!(ch.l, l);
        let fp = lay.padded(f, self.mode);
        let sums = self.apply_spectrum(&ch.spectrum, &fp);
        Ok(finish(lay, ch, &fp, sums))
    }
}

/// Adds the left tail and the pole correction to the bare trapezoid sums.
fn finish(lay: &Layout, ch: &Channel, fp: &[Complex64], mut sums: Vec<Complex64>) -> Vec<Complex64> {
    let edge = fp[0];
    for (i, s) in sums.iter_mut().enumerate() {
        let j = i + lay.pad;
        *s += edge * ch.tail[i];
        if let Some(p) = &ch.near {
            let at_pole = interpolate(fp, j, Complex64::new(0.0, p.gamma / lay.h));
            *s -= at_pole * ch.q_defect[i];
            if p.on_line() {
                *s += lay.weight(j) * (p.pole.finite_part * fp[j] - p.pole.residue * derivative(fp, j, lay.h));
            }
        }
    }
    sums
}

/// One-shot transform through the FFT path.
pub fn convolve(l: Z5, f: &[Complex64], tau: f64, grid: &Grid, mode: TailMode) -> Result<Vec<Complex64>> {
    Convolver::new(grid, tau, mode)?.apply(l, f)
}

/// Same transform by direct `O(n^2)` summation; the reference for
/// [`convolve`].
pub fn convolve_direct(l: Z5, f: &[Complex64], tau: f64, grid: &Grid, mode: TailMode) -> Result<Vec<Complex64>> {
    grid.validate()?;
    check_tau(tau)?;
    if f.len() != grid.n {
        return Err(Error::InvalidInput(format!("expected {} samples, got {}", grid.n, f.len())));
    }
    let lay = Layout::new(grid);
    let fp = lay.padded(f, mode);
    let near = NearPole::find(l, tau);
    let skip_diag = near.is_some_and(|p| p.on_line());
    let (s_a, s_b) = (lay.abscissa(0), lay.abscissa(lay.len - 1));
    let mut sums = Vec::with_capacity(lay.n);
    let mut tail = Vec::with_capacity(lay.n);
    let mut q_defect = Vec::new();
    for i in 0..lay.n {
        let ji = i + lay.pad;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut qacc = Complex64::new(0.0, 0.0);
        for (j, fj) in fp.iter().enumerate() {
            if skip_diag && j == ji {
                continue;
            }
            let d = ji as f64 - j as f64;
            acc += lay.weight(j) * kernel_value(l, Complex64::new(d * lay.h, tau)) * fj;
            if let Some(p) = &near {
                qacc += lay.weight(j) * p.q(d * lay.h);
            }
        }
        sums.push(acc);
        tail.push(kernel_tail(l, Complex64::new(ji as f64 * lay.h, tau)));
        if let Some(p) = &near {
            q_defect.push(qacc - p.exact_integral(lay.abscissa(ji), s_a, s_b));
        }
    }
    let ch = Channel {
        l,
        spectrum: Vec::new(),
        tail,
        near,
        q_defect,
    };
    Ok(finish(&lay, &ch, &fp, sums))
}

/// The transform at a single point `z` with `|Im z| <= pi/3`, summed
/// directly; off-grid real parts are handled by the same pole subtraction
/// with the singular point interpolated.
pub(crate) fn transform_at(l: Z5, f: &[Complex64], z: Complex64, grid: &Grid, mode: TailMode) -> Result<Complex64> {
    check_tau(z.im)?;
    let lay = Layout::new(grid);
    let fp = lay.padded(f, mode);
    let near = NearPole::find(l, z.im);
    let pos = (z.re - lay.s0) / lay.h;
    let centre = pos.round().clamp(3.0, (lay.len - 4) as f64) as usize;
    let on_node = near.is_some_and(|p| p.on_line()) && (pos - centre as f64).abs() < 1e-6;

    let mut acc = Complex64::new(0.0, 0.0);
    let mut qacc = Complex64::new(0.0, 0.0);
    for (j, fj) in fp.iter().enumerate() {
        if on_node && j == centre {
            continue;
        }
        let x = z.re - lay.abscissa(j);
        acc += lay.weight(j) * kernel_value(l, Complex64::new(x, z.im)) * fj;
        if let Some(p) = &near {
            qacc += lay.weight(j) * p.q(x);
        }
    }
    acc += fp[0] * kernel_tail(l, z - lay.s0);
    if let Some(p) = &near {
        let (s_a, s_b) = (lay.abscissa(0), lay.abscissa(lay.len - 1));
        let offset = if on_node {
            Complex64::new(0.0, p.gamma / lay.h)
        } else {
            Complex64::new(pos - centre as f64, p.gamma / lay.h)
        };
        let at_pole = interpolate(&fp, centre, offset);
        acc -= at_pole * (qacc - p.exact_integral(z.re, s_a, s_b));
        if on_node {
            acc += lay.weight(centre)
                * (p.pole.finite_part * fp[centre] - p.pole.residue * derivative(&fp, centre, lay.h));
        }
    }
    Ok(acc)
}
