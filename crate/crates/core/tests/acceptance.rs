//! Acceptance criteria. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dtba::crosscheck::{
    compare_tba_oracle, run_suite, SuiteConfig, MOEBIUS_INVARIANCE, QUADRATIC_RELATION, ROTATION, SIBUYA,
    SIGMA_DUAL_ROUTE, STOKES_RELATION,
};
use dtba::io::{to_canonical_json, SolutionFile};
use dtba::oracle::{pt_eigenvalue_scan, stokes_multipliers, y_oracle, CubicPotential, RaySpec};
use dtba::tba::{
    dft5, idft5, kernel, tba_solve, tba_solve_a0, ysystem_residual, ysystem_residual_of, Grid, SolverConfig, TbaState,
};
use dtba::{Complex64, Z5, Z5_ALL};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn solve_default(a: f64) -> TbaState {
    tba_solve(c(a, 0.0), &SolverConfig::default()).expect("default solve converges")
}

fn plateau() -> Outcome {
    let (st, dt) = timed(|| solve_default(0.0));
    let i = st.config.grid.nearest(-25.0);
    let dev = Z5_ALL
        .iter()
        .map(|k| (st.eps[k.index()][i] - c(0.4812118, 0.0)).norm())
        .fold(0.0, f64::max);
    (
        dev <= 1e-4 && dt.as_secs_f64() <= 60.0,
        format!("max_k |eps_k(-25) - 0.4812118| = {dev:.2e}, {:.2} s", dt.as_secs_f64()),
    )
}

fn oracle_bridge() -> Outcome {
    let (reports, dt) = timed(|| {
        [0.0, 0.3].map(|a| {
            compare_tba_oracle(c(a, 0.0), (-3.0, 3.0), 25, &SolverConfig::default(), &RaySpec::default())
                .expect("comparison runs")
        })
    });
    let worst = reports.iter().map(|r| r.max_rel_error).fold(0.0, f64::max);
    let ok = reports.iter().all(|r| r.passes(1e-3)) && dt.as_secs_f64() <= 300.0;
    (
        ok,
        format!(
            "max relative error {worst:.2e} over 2 x 125 samples, {:.1} s",
            dt.as_secs_f64()
        ),
    )
}

fn ysystem() -> Outcome {
    let mut tba_worst: f64 = 0.0;
    for a in [0.0, 0.3] {
        let st = solve_default(a);
        for j in 0..50 {
            let theta = c(-5.0 + 7.0 * j as f64 / 49.0, 0.0);
            let r = ysystem_residual(&st, theta).expect("Y-system evaluates");
            tba_worst = tba_worst.max(r.norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = RaySpec::default();
    let mut oracle_worst: f64 = 0.0;
    for _ in 0..20 {
        let theta = c(rng.gen_range(-2.0..2.0), rng.gen_range(-FRAC_PI_2..FRAC_PI_2));
        let r = ysystem_residual_of(|k, t| y_oracle(k, c(0.3, 0.0), t, &spec), theta).expect("oracle evaluates");
        oracle_worst = oracle_worst.max(r.norm());
    }
    (
        tba_worst <= 5e-6 && oracle_worst <= 1e-7,
        format!("TBA residual {tba_worst:.2e} at 2 x 50 real theta, oracle residual {oracle_worst:.2e} at 20 complex theta"),
    )
}

fn suite(ode: usize, rotation: usize) -> dtba::crosscheck::InvariantReport {
    run_suite(&SuiteConfig {
        geometry_trials: 0,
        ode_trials: ode,
        rotation_trials: rotation,
        ..SuiteConfig::new(2024, 0)
    })
}

fn stokes_algebra() -> Outcome {
    let r = suite(20, 0);
    let cat = r.get(STOKES_RELATION);
    let s = stokes_multipliers(&CubicPotential::real(0.0, 0.0), &RaySpec::default()).expect("symmetric point");
    let sym = Z5_ALL
        .iter()
        .map(|&k| (s[k] - c(0.0, -golden())).norm())
        .fold(0.0, f64::max);
    (
        cat.passes(1e-9) && cat.trials == 20 && sym <= 1e-8,
        format!(
            "relation residual {:.2e} on {} potentials ({} errors), symmetric point deviation {sym:.2e}",
            cat.max_residual, cat.trials, cat.errors
        ),
    )
}

fn dual_route() -> Outcome {
    let r = suite(20, 0);
    let cat = r.get(SIGMA_DUAL_ROUTE);
    (
        cat.passes(1e-8) && cat.trials == 20,
        format!("max |sigma_k - i R_k| = {:.2e} on {} potentials", cat.max_residual, cat.trials),
    )
}

fn geometry() -> Outcome {
    let (r, dt) = timed(|| {
        run_suite(&SuiteConfig {
            ode_trials: 0,
            rotation_trials: 0,
            ..SuiteConfig::new(2024, 1000)
        })
    });
    let q = r.get(QUADRATIC_RELATION);
    let m = r.get(MOEBIUS_INVARIANCE);
    (
        q.passes(1e-12) && m.passes(1e-12) && q.trials == 1000 && dt.as_secs_f64() <= 5.0,
        format!(
            "quadratic {:.2e}, Moebius {:.2e} on 1000 configurations, {:.3} s",
            q.max_residual,
            m.max_residual,
            dt.as_secs_f64()
        ),
    )
}

fn rotation() -> Outcome {
    let r = suite(0, 10);
    let (rot, sib) = (r.get(ROTATION), r.get(SIBUYA));
    (
        rot.passes(1e-8) && sib.passes(1e-8) && rot.trials == 10,
        format!("rotation {:.2e}, Sibuya {:.2e} on 10 potentials", rot.max_residual, sib.max_residual),
    )
}

fn pt_reality() -> Outcome {
    let mut found = 0;
    let mut ok = true;
    let mut worst_im: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for a in [0.0, 1.0] {
        let roots = pt_eigenvalue_scan(a, Z5::new(0), (-8.0, -0.5), 150, &RaySpec::default()).expect("scan runs");
        found += roots.len();
        ok &= !roots.is_empty();
        for r in roots {
            worst_im = worst_im.max(r.b.im.abs());
            worst_gap = worst_gap.max(r.w_gap);
            ok &= r.b.im.abs() <= 1e-6 && r.b.re < 0.0 && r.w_gap <= 1e-6;
        }
    }
    (
        ok,
        format!("{found} roots, max |Im b| {worst_im:.2e}, max |d(w_-1, w_1)| {worst_gap:.2e}"),
    )
}

fn kernels_and_reduction() -> Outcome {
    let shift = c(0.0, FRAC_PI_3);
    let mut ident: f64 = 0.0;
    for l in Z5_ALL {
        let ph = Complex64::from_polar(1.0, 2.0 * PI * f64::from(l.value()) / 5.0);
        for j in 0..100 {
            let th = c(-6.0 + 0.12 * j as f64 + 0.017, 0.9 * ((j % 11) as f64 - 5.0) / 5.0);
            let r = kernel(l, th + shift).unwrap() / ph + ph * kernel(l, th - shift).unwrap() - kernel(l, th).unwrap();
            ident = ident.max(r.norm());
        }
    }
    let cfg = SolverConfig::default();
    let st = tba_solve(c(0.0, 0.0), &cfg).expect("solve");
    let d0 = tba_solve_a0(&cfg).expect("scalar solve");
    let gap = Z5_ALL
        .iter()
        .flat_map(|&k| st.delta(k).into_iter().zip(d0.iter()).map(|(x, y)| (x - y).norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    (
        ident <= 1e-12 && gap <= 1e-9,
        format!("kernel identity {ident:.2e}, scalar vs five-component {gap:.2e}"),
    )
}

fn hygiene() -> Outcome {
    let sols: Vec<TbaState> = [1025, 2049, 4097]
        .iter()
        .map(|&n| {
            let cfg = SolverConfig {
                grid: Grid::new(-20.0, 12.0, n).unwrap(),
                tol_sup: 1e-12,
                ..SolverConfig::default()
            };
            tba_solve(c(0.0, 0.0), &cfg).expect("solve")
        })
        .collect();
    let gap = |fine: &TbaState, coarse: &TbaState, step: usize| {
        (0..1025)
            .flat_map(|i| (0..5).map(move |l| (l, i)))
            .map(|(l, i)| (fine.chi[l][i * step] - coarse.chi[l][i * step / 2]).norm())
            .fold(0.0, f64::max)
    };
    let ratio = gap(&sols[1], &sols[0], 2) / gap(&sols[2], &sols[1], 4);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut roundtrip: f64 = 0.0;
    for _ in 0..1000 {
        let v: [Complex64; 5] = std::array::from_fn(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)));
        let back = idft5(&dft5(&v));
        roundtrip = roundtrip.max(v.iter().zip(&back).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max));
    }

    let bytes = || to_canonical_json(&SolutionFile::from_state(&solve_default(0.3))).expect("serializes");
    let identical = bytes() == bytes();
    (
        (3.5..=4.5).contains(&ratio) && roundtrip <= 1e-14 && identical,
        format!("Richardson ratio {ratio:.3}, dft roundtrip {roundtrip:.1e}, identical JSON {identical}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden-ratio plateau", plateau),
        ("TBA against ODE oracle", oracle_bridge),
        ("deformed Y-system", ysystem),
        ("Stokes algebra", stokes_algebra),
        ("sigma = iR dual route", dual_route),
        ("geometry identities", geometry),
        ("rotation and Sibuya", rotation),
        ("PT reality", pt_reality),
        ("kernel identity and a = 0 reduction", kernels_and_reduction),
        ("numerical hygiene", hygiene),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(o) => o,
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
