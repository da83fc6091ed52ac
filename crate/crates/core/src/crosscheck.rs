//! Validation campaigns that tie the TBA solver to the ODE oracle and the
//! cross-ratio geometry, with deterministic machine-readable reports.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{moebius_apply, r_functions, CrossRatioSet, MoebiusTransform, MonodromyPoint};
use crate::oracle::{cross_ratio_route, omega_pow, rotation_check, CubicPotential, Monodromy, RaySpec};
use crate::tba::{tba_solve, y_eval, ysystem_relative_residual, SolverConfig};
use crate::{Error, Result, Z5, Z5_ALL};

/// One `(theta, k)` comparison between the two routes to `Y_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSample {
    pub theta: Complex64,
    pub k: i32,
    pub y_tba: Option<Complex64>,
    pub y_oracle: Option<Complex64>,
    /// `|y_tba - y_oracle| / |y_oracle|`, absent when either side failed.
    pub rel_error: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: Complex64,
    pub theta_range: (f64, f64),
    pub samples: Vec<ComparisonSample>,
    /// Largest relative error over the samples that evaluated.
    pub max_rel_error: f64,
    pub failures: usize,
    /// Largest relative Y-system residual of the TBA solution at the sample
    /// points.
    pub ysystem_max_residual: f64,
    /// Largest Stokes relation residual of the oracle potentials.
    pub stokes_relation_max_residual: f64,
    pub solver_iterations: usize,
    pub solver_residual: f64,
    pub config: SolverConfig,
    pub ray_spec: RaySpec,
}

impl ComparisonReport {
    /// All samples evaluated and agree within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.failures == 0 && self.max_rel_error <= tol
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

/// `Y_k(theta) = i sigma_0(w^{-k} a, e^{6 theta/5})` with the Stokes relation
/// residual of the same multiplier set.
fn oracle_y(k: Z5, a: Complex64, theta: Complex64, spec: &RaySpec) -> Result<(Complex64, f64)> {
    let pot = CubicPotential::new(a * omega_pow(-k.value()), (1.2 * theta).exp());
    let s = Monodromy::compute(&pot, spec)?.stokes();
    Ok((Complex64::new(0.0, 1.0) * s[Z5::new(0)], s.relation_residual()))
}

/// Solves the TBA once and compares `Y_k` against the oracle at `n_samples`
/// equally spaced real `theta` and every `k`. Y-values are compared
/// directly, so no logarithm branch enters.
pub fn compare_tba_oracle(
    a: Complex64,
    theta_range: (f64, f64),
    n_samples: usize,
    cfg: &SolverConfig,
    spec: &RaySpec,
) -> Result<ComparisonReport> {
    spec.validate()?;
    let (lo, hi) = theta_range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidInput(format!("bad theta range [{lo}, {hi}]")));
    }
    let state = tba_solve(a, cfg)?;
    let thetas = linspace(lo, hi, n_samples);
    let points: Vec<(f64, Z5)> = thetas.iter().flat_map(|&t| Z5_ALL.map(|k| (t, k))).collect();

    let evaluated: Vec<(ComparisonSample, f64)> = points
        .par_iter()
        .map(|&(t, k)| {
            let theta = Complex64::new(t, 0.0);
            let tba = y_eval(&state, k, theta);
            let orc = oracle_y(k, a, theta, spec);
            let relation = orc.as_ref().map(|o| o.1).unwrap_or(0.0);
            let mut sample = ComparisonSample {
                theta,
                k: k.value(),
                y_tba: tba.as_ref().ok().copied(),
                y_oracle: orc.as_ref().ok().map(|o| o.0),
                rel_error: None,
                failure: None,
            };
            match (&tba, &orc) {
                (Ok(y), Ok((o, _))) => {
                    let e = (y - o).norm() / o.norm();
                    if e.is_finite() {
                        sample.rel_error = Some(e);
                    } else {
                        sample.failure = Some(format!("non-finite comparison {y} vs {o}"));
                    }
                }
                (Err(e), _) => sample.failure = Some(format!("tba: {e}")),
                (_, Err(e)) => sample.failure = Some(format!("oracle: {e}")),
            }
            (sample, relation)
        })
        .collect();

    let ysystem: Vec<f64> = thetas
        .par_iter()
        .map(|&t| ysystem_relative_residual(&state, Complex64::new(t, 0.0)).unwrap_or(f64::INFINITY))
        .collect();

    let samples: Vec<ComparisonSample> = evaluated.iter().map(|p| p.0.clone()).collect();
    Ok(ComparisonReport {
        a,
        theta_range,
        max_rel_error: samples.iter().filter_map(|s| s.rel_error).fold(0.0, f64::max),
        failures: samples.iter().filter(|s| s.failure.is_some()).count(),
        ysystem_max_residual: ysystem.iter().copied().fold(0.0, f64::max),
        stokes_relation_max_residual: evaluated.iter().map(|p| p.1).fold(0.0, f64::max),
        samples,
        solver_iterations: state.iteration,
        solver_residual: state.residual,
        config: *cfg,
        ray_spec: *spec,
    })
}

/// Maximal residual of one identity over a randomized battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryResult {
    /// The identity being checked.
    pub identity: String,
    pub trials: usize,
    pub max_residual: f64,
    /// Trials where evaluation itself failed.
    pub errors: usize,
    /// Trials whose value vanishes by construction and was confirmed to.
    pub expected_zero: usize,
}

impl CategoryResult {
    fn new(identity: &str) -> Self {
        Self {
            identity: identity.into(),
            trials: 0,
            max_residual: 0.0,
            errors: 0,
            expected_zero: 0,
        }
    }

    fn absorb(&mut self, r: Result<f64>) {
        self.trials += 1;
        match r {
            Ok(v) if v.is_finite() => self.max_residual = self.max_residual.max(v),
            _ => self.errors += 1,
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.errors == 0 && self.max_residual <= tol
    }
}

/// Sizes of the randomized battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random configurations for the pure geometry checks.
    pub geometry_trials: usize,
    /// Random potentials for the ODE checks.
    pub ode_trials: usize,
    /// Potentials for the rotation and Sibuya checks (three solves each).
    pub rotation_trials: usize,
    /// Radius of the disc from which `a` and `b` are drawn.
    pub radius: f64,
    pub ray_spec: RaySpec,
}

impl SuiteConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        Self {
            seed,
            geometry_trials: trials,
            ode_trials: trials,
            rotation_trials: trials,
            radius: 2.0,
            ray_spec: RaySpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub config: SuiteConfig,
    pub categories: BTreeMap<String, CategoryResult>,
}

impl InvariantReport {
    pub fn get(&self, name: &str) -> &CategoryResult {
        &self.categories[name]
    }
}

pub const QUADRATIC_RELATION: &str = "quadratic_relation";
pub const MOEBIUS_INVARIANCE: &str = "moebius_invariance";
pub const DEGENERATE_ZERO: &str = "degenerate_zero";
pub const STOKES_RELATION: &str = "stokes_relation";
pub const SIGMA_DUAL_ROUTE: &str = "sigma_dual_route";
pub const ROTATION: &str = "rotation";
pub const SIBUYA: &str = "sibuya";
pub const CONJUGATION: &str = "conjugation";

fn disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(-PI..PI))
}

fn moebius(rng: &mut ChaCha8Rng) -> MoebiusTransform {
    loop {
        let e: [Complex64; 4] = std::array::from_fn(|_| disc(rng, 1.5));
        if (e[0] * e[3] - e[1] * e[2]).norm() > 0.1 {
            return MoebiusTransform::new(e[0], e[1], e[2], e[3]).expect("non-singular");
        }
    }
}

/// `max_k |R_{k-2} R_{k+2} - 1 + R_k|`, relative to the size of the terms.
fn quadratic_relative(r: &CrossRatioSet) -> f64 {
    Z5_ALL
        .iter()
        .map(|&k| {
            let (p, q, s) = (r[k - 2], r[k + 2], r[k]);
            (p * q - 1.0 + s).norm() / (1.0 + (p * q).norm() + s.norm())
        })
        .fold(0.0, f64::max)
}

fn moebius_residual(m: &MonodromyPoint, t: &MoebiusTransform) -> Result<f64> {
    let before = r_functions(m)?;
    let after = r_functions(&moebius_apply(t, m))?;
    Ok(Z5_ALL
        .iter()
        .map(|&k| (before[k] - after[k]).norm() / before[k].norm().max(1.0))
        .fold(0.0, f64::max))
}

/// Randomized battery over every identity of the theory, reproducible from
/// the seed. Failures are counted in the report, never returned as errors.
pub fn invariant_suite(seed: u64, trials: usize) -> InvariantReport {
    run_suite(&SuiteConfig::new(seed, trials))
}

pub fn run_suite(cfg: &SuiteConfig) -> InvariantReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spec = cfg.ray_spec;

    // draw everything first so the stream does not depend on evaluation order
    let configs: Vec<([Complex64; 5], MoebiusTransform)> = (0..cfg.geometry_trials)
        .map(|_| (std::array::from_fn(|_| disc(&mut rng, cfg.radius)), moebius(&mut rng)))
        .collect();
    let degenerate: Vec<([Complex64; 5], Z5)> = (0..cfg.geometry_trials)
        .map(|_| {
            let mut v: [Complex64; 5] = std::array::from_fn(|_| disc(&mut rng, cfg.radius));
            let k = Z5::new(rng.gen_range(-2..=2));
            v[(k + 1).index()] = v[(k - 1).index()];
            (v, k)
        })
        .collect();
    let potentials: Vec<CubicPotential> = (0..cfg.ode_trials)
        .map(|_| CubicPotential::new(disc(&mut rng, cfg.radius), disc(&mut rng, cfg.radius)))
        .collect();
    let rotated: Vec<CubicPotential> = (0..cfg.rotation_trials)
        .map(|_| CubicPotential::new(disc(&mut rng, cfg.radius), disc(&mut rng, cfg.radius)))
        .collect();
    let conjugate: Vec<(f64, Complex64)> = (0..cfg.rotation_trials)
        .map(|_| {
            let a = rng.gen_range(-1.0..1.0);
            let theta = Complex64::new(rng.gen_range(-2.0..1.0), rng.gen_range(-FRAC_PI_2..FRAC_PI_2));
            (a, theta)
        })
        .collect();

    let mut cats = BTreeMap::new();

    let mut quad = CategoryResult::new("R_{k-2} R_{k+2} = 1 - R_k");
    let mut moeb = CategoryResult::new("R_k(T z) = R_k(z) for Moebius T");
    let geo: Vec<(Result<f64>, Result<f64>)> = configs
        .par_iter()
        .map(|(v, t)| match MonodromyPoint::from_values(*v) {
            Ok(m) => (r_functions(&m).map(|r| quadratic_relative(&r)), moebius_residual(&m, t)),
            Err(e) => (Err(e.clone()), Err(e)),
        })
        .collect();
    for (q, m) in geo {
        quad.absorb(q);
        moeb.absorb(m);
    }

    let mut zero = CategoryResult::new("R_k = 0 when z_{k-1} = z_{k+1}");
    for (v, k) in &degenerate {
        let r = MonodromyPoint::from_values(*v).and_then(|m| r_functions(&m)).map(|r| r[*k].norm());
        if matches!(r, Ok(x) if x <= 1e-12) {
            zero.expected_zero += 1;
        }
        zero.absorb(r);
    }

    let mut stokes = CategoryResult::new("-i sigma_{k+3} = 1 + sigma_k sigma_{k+1}");
    let mut dual = CategoryResult::new("sigma_k = i R_k");
    let ode: Vec<Result<(f64, f64)>> = potentials
        .par_iter()
        .map(|p| {
            let m = Monodromy::compute(p, &spec)?;
            let s = m.stokes();
            let r = cross_ratio_route(&m)?;
            let d = Z5_ALL
                .iter()
                .map(|&k| (s[k] - Complex64::new(0.0, 1.0) * r[k.index()]).norm())
                .fold(0.0, f64::max);
            Ok((s.relation_residual(), d))
        })
        .collect();
    for r in ode {
        match r {
            Ok((s, d)) => {
                stokes.absorb(Ok(s));
                dual.absorb(Ok(d));
            }
            Err(e) => {
                stokes.absorb(Err(e.clone()));
                dual.absorb(Err(e));
            }
        }
    }

    let mut rot = CategoryResult::new("R_k(w^-1 a, w b) = R_{k-2}(a, b)");
    let mut sib = CategoryResult::new("R_k(w^-1 a, w b) R_k(w a, w^-1 b) = 1 - R_k(a, b)");
    let rr: Vec<_> = rotated.par_iter().map(|p| rotation_check(p, &spec)).collect();
    for r in rr {
        rot.absorb(r.as_ref().map(|x| x.rotation).map_err(Clone::clone));
        sib.absorb(r.map(|x| x.sibuya));
    }

    let mut conj = CategoryResult::new("conj Y_k(conj theta) = Y_{-k}(theta) for real a");
    let cr: Vec<Result<f64>> = conjugate
        .par_iter()
        .map(|&(a, theta)| {
            let a = Complex64::new(a, 0.0);
            let mut worst: f64 = 0.0;
            for k in Z5_ALL {
                let y = crate::oracle::y_oracle(k, a, theta.conj(), &spec)?;
                let ym = crate::oracle::y_oracle(-k, a, theta, &spec)?;
                worst = worst.max((y.conj() - ym).norm() / ym.norm().max(1.0));
            }
            Ok(worst)
        })
        .collect();
    for r in cr {
        conj.absorb(r);
    }

    for (name, cat) in [
        (QUADRATIC_RELATION, quad),
        (MOEBIUS_INVARIANCE, moeb),
        (DEGENERATE_ZERO, zero),
        (STOKES_RELATION, stokes),
        (SIGMA_DUAL_ROUTE, dual),
        (ROTATION, rot),
        (SIBUYA, sib),
        (CONJUGATION, conj),
    ] {
        cats.insert(name.to_string(), cat);
    }
    InvariantReport {
        config: *cfg,
        categories: cats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tba::Grid;

    #[test]
    fn geometry_battery_is_tight_and_reproducible() {
        let cfg = SuiteConfig {
            ode_trials: 0,
            rotation_trials: 0,
            ..SuiteConfig::new(42, 100)
        };
        let r = run_suite(&cfg);
        assert!(r.get(QUADRATIC_RELATION).passes(1e-12), "{:?}", r.get(QUADRATIC_RELATION));
        assert!(r.get(MOEBIUS_INVARIANCE).passes(1e-12), "{:?}", r.get(MOEBIUS_INVARIANCE));
        let z = r.get(DEGENERATE_ZERO);
        assert_eq!(z.expected_zero, 100);
        assert!(z.passes(1e-12));
        assert_eq!(r, run_suite(&cfg));
        assert_ne!(r, run_suite(&SuiteConfig { seed: 43, ..cfg }));
    }

    #[test]
    fn ode_battery_small() {
        let r = run_suite(&SuiteConfig {
            geometry_trials: 0,
            ode_trials: 4,
            rotation_trials: 2,
            ..SuiteConfig::new(42, 0)
        });
        assert!(r.get(STOKES_RELATION).passes(1e-9), "{:?}", r.get(STOKES_RELATION));
        assert!(r.get(SIGMA_DUAL_ROUTE).passes(1e-8), "{:?}", r.get(SIGMA_DUAL_ROUTE));
        assert!(r.get(ROTATION).passes(1e-8));
        assert!(r.get(SIBUYA).passes(1e-8));
        assert!(r.get(CONJUGATION).passes(1e-8), "{:?}", r.get(CONJUGATION));
        assert_eq!(r.get(STOKES_RELATION).trials, 4);
    }

    #[test]
    fn comparison_on_a_small_grid() {
        let cfg = SolverConfig {
            grid: Grid::new(-24.0, 16.0, 2049).unwrap(),
            tol_sup: 1e-9,
            ..SolverConfig::default()
        };
        let r = compare_tba_oracle(Complex64::new(0.3, 0.0), (-1.0, 1.0), 3, &cfg, &RaySpec::default()).unwrap();
        assert_eq!(r.samples.len(), 15);
        assert_eq!(r.failures, 0);
        assert!(r.passes(1e-3), "{}", r.max_rel_error);
        assert!(r.ysystem_max_residual <= 5e-6);
        assert!(r.stokes_relation_max_residual <= 1e-9);
        let worst = r.samples.iter().filter_map(|s| s.rel_error).fold(0.0, f64::max);
        assert_eq!(worst, r.max_rel_error);
    }

    #[test]
    fn golden_limit_on_both_sides() {
        let cfg = SolverConfig {
            grid: Grid::new(-30.0, 12.0, 2049).unwrap(),
            ..SolverConfig::default()
        };
        let r = compare_tba_oracle(Complex64::new(0.0, 0.0), (-20.0, -20.0), 1, &cfg, &RaySpec::default()).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        for s in &r.samples {
            assert!((s.y_tba.unwrap() - golden).norm() <= 1e-4);
            assert!((s.y_oracle.unwrap() - golden).norm() <= 1e-4);
        }
    }

    #[test]
    fn bad_range_is_rejected() {
        let cfg = SolverConfig::default();
        assert!(compare_tba_oracle(Complex64::new(0.0, 0.0), (1.0, -1.0), 3, &cfg, &RaySpec::default()).is_err());
    }
}
