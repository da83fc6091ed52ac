use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{dft5, driving_constants, idft5, Convolver, DrivingConstants, SolverConfig};
use crate::{Error, Result, Z5, Z5_ALL};

type Modes = [Vec<Complex64>; 5];

/// A converged solution on the real grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TbaState {
    pub a: Complex64,
    pub config: SolverConfig,
    pub constants: DrivingConstants,
    /// `chi_l`, indexed by `l.index()`.
    pub chi: Modes,
    /// Pseudo-energies `eps_k`.
    pub eps: Modes,
    /// `L_k = ln(1 + e^{-eps_k})`, continuous and vanishing at the right end.
    pub log_terms: Modes,
    /// `Lambda_l = sum_k e^{2 pi i k l/5} L_k`.
    pub lambda: Modes,
    pub iteration: usize,
    /// Sup-norm change of `chi` under one further undamped sweep.
    pub residual: f64,
}

impl TbaState {
    /// `delta_k = eps_k - driving terms` on the grid.
    pub fn delta(&self, k: Z5) -> Vec<Complex64> {
        let n = self.config.grid.n;
        (0..n)
            .map(|i| idft5(&std::array::from_fn(|l| self.chi[l][i]))[k.index()])
            .collect()
    }

    pub fn sigma_points(&self) -> Vec<f64> {
        self.config.grid.points()
    }
}

fn zeros(n: usize) -> Modes {
    std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n])
}

/// `ln(1 + e^{-eps})` and `|1 + e^{-eps}|`, without overflow for very
/// negative `Re eps`.
fn log_term(eps: Complex64) -> (Complex64, f64) {
    if eps.re >= -30.0 {
        let one_plus = 1.0 + (-eps).exp();
        (one_plus.ln(), one_plus.norm())
    } else {
        // 1 + e^{-eps} = e^{-eps} (1 + e^{eps})
        let rest = (1.0 + eps.exp()).ln();
        let modulus = (-eps.re).exp() * (1.0 + eps.exp()).norm();
        (-eps + rest, modulus)
    }
}

/// Removes `2 pi i` jumps so that `L` is continuous, anchored at the right
/// end of the grid where it vanishes.
fn unwrap_from_right(v: &mut [Complex64]) {
    for j in (0..v.len().saturating_sub(1)).rev() {
        let d = v[j].im - v[j + 1].im;
        let turns = (d / (2.0 * PI)).round();
        if turns != 0.0 {
            v[j].im -= 2.0 * PI * turns;
        }
    }
}

struct Pointwise {
    eps: Modes,
    log_terms: Modes,
    lambda: Modes,
}

/// Everything that is local in `sigma`: `eps_k`, `L_k` and `Lambda_l` from
/// the current `chi_l`, with the assumption guard.
fn pointwise(chi: &Modes, drive: &Modes, guard: f64, sigma: &[f64]) -> Result<Pointwise> {
    let n = sigma.len();
    let mut eps = zeros(n);
    let mut log_terms = zeros(n);
    let mut lambda = zeros(n);
    for i in 0..n {
        let c: [Complex64; 5] = std::array::from_fn(|l| chi[l][i]);
        let d = idft5(&c);
        for k in Z5_ALL {
            let kk = k.index();
            let e = d[kk] + drive[kk][i];
            let (lt, modulus) = log_term(e);
            if !(modulus >= guard) {
                return Err(Error::AssumptionViolated {
                    k: k.value(),
                    sigma: sigma[i],
                    modulus,
                });
            }
            eps[kk][i] = e;
            log_terms[kk][i] = lt;
        }
    }
    for lt in log_terms.iter_mut() {
        unwrap_from_right(lt);
    }
    for i in 0..n {
        let v: [Complex64; 5] = std::array::from_fn(|k| log_terms[k][i]);
        let f = dft5(&v);
        for l in 0..5 {
            lambda[l][i] = f[l];
        }
    }
    Ok(Pointwise {
        eps,
        log_terms,
        lambda,
    })
}

fn sup_diff(a: &Modes, b: &Modes) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

/// Solves the deformed TBA for deformation `a` by damped fixed-point
/// iteration from `chi = 0`.
///
/// For `a != 0` the constant parts of `chi_{+-1}` on the left plateau are
/// almost neutral (the constant solutions of the Y-system form a family), so
/// the step size levels off at a floor of order `h^2 |a|` instead of going
/// to zero. `tol_sup` has to sit above that floor.
pub fn tba_solve(a: Complex64, cfg: &SolverConfig) -> Result<TbaState> {
    cfg.validate()?;
    let grid = cfg.grid;
    let consts = driving_constants();
    let sigma = grid.points();
    let drive: Modes = Z5_ALL.map(|k| {
        sigma
            .iter()
            .map(|&s| consts.driving(a, k, Complex64::new(s, 0.0)))
            .collect()
    });
    let conv = Convolver::new(&grid, 0.0, cfg.tail_mode)?;
    let eta = cfg.damping;

    let mut chi = zeros(grid.n);
    let mut step = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let pw = pointwise(&chi, &drive, cfg.assumption_guard, &sigma)?;
        let next: Vec<Vec<Complex64>> = Z5_ALL
            .par_iter()
            .map(|&l| conv.apply(l, &pw.lambda[l.index()]))
            .collect::<Result<_>>()?;
        let next: Modes = next.try_into().expect("five modes");
        step = sup_diff(&next, &chi);
        if !step.is_finite() {
            break;
        }
        if step < cfg.tol_sup {
            return Ok(TbaState {
                a,
                config: *cfg,
                constants: consts,
                chi,
                eps: pw.eps,
                log_terms: pw.log_terms,
                lambda: pw.lambda,
                iteration: it,
                residual: step,
            });
        }
        for (c, nx) in chi.iter_mut().zip(&next) {
            for (ci, ni) in c.iter_mut().zip(nx) {
                *ci += eta * (ni - *ci);
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual: step,
    })
}

/// The undeformed scalar equation
/// `delta_0 = phi_0 * ln(1 + exp(-(delta_0 + 2A e^s)))`, solved by the same
/// damped iteration.
pub fn tba_solve_a0(cfg: &SolverConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let grid = cfg.grid;
    let consts = driving_constants();
    let drive: Vec<f64> = grid.points().iter().map(|s| 2.0 * consts.a * s.exp()).collect();
    let conv = Convolver::new(&grid, 0.0, cfg.tail_mode)?;
    let l0 = Z5::new(0);
    let mut delta = vec![0.0; grid.n];
    let mut step = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        let src: Vec<Complex64> = delta
            .iter()
            .zip(&drive)
            .map(|(d, e)| Complex64::new((-(d + e)).exp().ln_1p(), 0.0))
            .collect();
        let next = conv.apply(l0, &src)?;
        step = next
            .iter()
            .zip(&delta)
            .map(|(x, d)| (x.re - d).abs())
            .fold(0.0, f64::max);
        if !step.is_finite() {
            break;
        }
        if step < cfg.tol_sup {
            return Ok(delta);
        }
        for (d, x) in delta.iter_mut().zip(&next) {
            *d += cfg.damping * (x.re - *d);
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual: step,
    })
}
