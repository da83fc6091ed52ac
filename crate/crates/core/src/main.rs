//! `dtba`: command-line front end.
//!
//! Exit codes: 0 ok, 1 usage or I/O error, 2 assumption violated,
//! 3 non-convergence or integrator failure, 4 acceptance failed,
//! 5 PT reality violated.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use dtba::crosscheck::{compare_tba_oracle, run_suite, SuiteConfig};
use dtba::io::{to_canonical_json, write_csv, write_json, write_solution};
use dtba::oracle::{pt_eigenvalue_scan, stokes_multipliers, CubicPotential, RaySpec};
use dtba::tba::{tba_solve, Grid, SolverConfig, TailMode};
use dtba::{Error, Z5};

const OK: u8 = 0;
const USAGE: u8 = 1;
const ASSUMPTION: u8 = 2;
const NONCONVERGENCE: u8 = 3;
const ACCEPTANCE: u8 = 4;
const PT_VIOLATION: u8 = 5;

/// Reality tolerance for PT roots.
const PT_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "dtba", version, about = "Deformed TBA and ODE monodromy for the cubic oscillator")]
struct Cli {
    /// Worker threads; falls back to DTBA_THREADS, then to the core count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the deformed TBA on a grid.
    #[command(allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Stokes multipliers of one potential from the ODE.
    #[command(allow_negative_numbers = true)]
    Oracle(OracleArgs),
    /// Compare TBA Y-functions against the ODE on a range of theta.
    #[command(allow_negative_numbers = true)]
    Compare(CompareArgs),
    /// Zeros of sigma_k along the PT-symmetric line.
    #[command(allow_negative_numbers = true)]
    Eigen(EigenArgs),
    /// Randomized identity battery.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Tail {
    Constant,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = -30.0)]
    sigma_min: f64,
    #[arg(long, default_value_t = 30.0)]
    sigma_max: f64,
    #[arg(long, default_value_t = 4096)]
    points: usize,
    #[arg(long, default_value_t = 0.5)]
    damping: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Smallest admissible |1 + exp(-eps_k)|.
    #[arg(long, default_value_t = 1e-3)]
    guard: f64,
    #[arg(long, value_enum, default_value_t = Tail::Constant)]
    tail: Tail,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Error> {
        let cfg = SolverConfig {
            grid: Grid::new(self.sigma_min, self.sigma_max, self.points)?,
            damping: self.damping,
            tol_sup: self.tol,
            max_iter: self.max_iter,
            assumption_guard: self.guard,
            tail_mode: match self.tail {
                Tail::Constant => TailMode::ConstantExtension,
                Tail::Zero => TailMode::ZeroExtension,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct RayArgs {
    /// Starting |lambda| of the ray integrations.
    #[arg(long, default_value_t = 12.0)]
    radius: f64,
    /// Local error tolerance of the ray integrations.
    #[arg(long, default_value_t = 1e-13)]
    rk_tol: f64,
}

impl RayArgs {
    fn spec(&self) -> Result<RaySpec, Error> {
        let spec = RaySpec {
            radius: self.radius,
            tolerance: self.rk_tol,
            ..RaySpec::default()
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, default_value_t = 0.0)]
    a_re: f64,
    #[arg(long, default_value_t = 0.0)]
    a_im: f64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output file; with `--format both` its extension is replaced by
    /// `.json` and `.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, default_value_t = 0.0)]
    a_re: f64,
    #[arg(long, default_value_t = 0.0)]
    a_im: f64,
    #[arg(long, default_value_t = 0.0)]
    b_re: f64,
    #[arg(long, default_value_t = 0.0)]
    b_im: f64,
    #[command(flatten)]
    ray: RayArgs,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, default_value_t = 0.0)]
    a_re: f64,
    #[arg(long, default_value_t = 0.0)]
    a_im: f64,
    #[arg(long, default_value_t = -3.0)]
    theta_min: f64,
    #[arg(long, default_value_t = 3.0)]
    theta_max: f64,
    #[arg(long, default_value_t = 25)]
    samples: usize,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-3)]
    accept: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    ray: RayArgs,
    /// JSON report file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EigenArgs {
    /// Real, non-negative deformation.
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 0)]
    k: i64,
    /// Scan range of `omega^{-3k} b`.
    #[arg(long, default_value_t = -8.0)]
    b_min: f64,
    #[arg(long, default_value_t = -0.5)]
    b_max: f64,
    #[arg(long, default_value_t = 150)]
    steps: usize,
    #[command(flatten)]
    ray: RayArgs,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// JSON report file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AssumptionViolated { .. } => ASSUMPTION,
        Error::NonConvergence { .. }
        | Error::StepUnderflow { .. }
        | Error::ToleranceNotMet { .. }
        | Error::RelationViolation { .. }
        | Error::BranchError { .. } => NONCONVERGENCE,
        _ => USAGE,
    }
}

fn fail(e: Error) -> u8 {
    eprintln!("dtba: {e}");
    exit_code(&e)
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Error> {
    if let Some(n) = flag {
        return Ok(Some(n).filter(|&n| n > 0));
    }
    match std::env::var("DTBA_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|n| Some(n).filter(|&n| n > 0))
            .map_err(|_| Error::InvalidInput(format!("DTBA_THREADS={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn with_extension(p: &Path, ext: &str) -> PathBuf {
    p.with_extension(ext)
}

fn cmd_solve(args: &SolveArgs) -> u8 {
    let cfg = match args.solver.config() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let a = Complex64::new(args.a_re, args.a_im);
    let state = match tba_solve(a, &cfg) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    println!("converged: iterations {}, residual {:e}", state.iteration, state.residual);
    if let Some(out) = &args.out {
        let written = match args.format {
            Format::Json => write_solution(out, &state),
            Format::Csv => write_csv(out, &state),
            Format::Both => {
                write_solution(&with_extension(out, "json"), &state).and_then(|_| write_csv(&with_extension(out, "csv"), &state))
            }
        };
        if let Err(e) = written {
            return fail(e);
        }
    }
    OK
}

fn cmd_oracle(args: &OracleArgs) -> u8 {
    let spec = match args.ray.spec() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let pot = CubicPotential::new(Complex64::new(args.a_re, args.a_im), Complex64::new(args.b_re, args.b_im));
    let s = match stokes_multipliers(&pot, &spec) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    match args.format {
        TextFormat::Text => {
            for v in s.0 {
                println!("{:.15e},{:.15e}", v.re, v.im);
            }
            println!("residual,{:e}", s.relation_residual());
        }
        TextFormat::Json => {
            let doc = serde_json::json!({
                "a": pot.a,
                "b": pot.b,
                "sigma": s.0,
                "relation_residual": s.relation_residual(),
                "ray_spec": spec,
            });
            match to_canonical_json(&doc) {
                Ok(t) => print!("{t}"),
                Err(e) => return fail(e),
            }
        }
    }
    OK
}

fn cmd_compare(args: &CompareArgs) -> u8 {
    let (cfg, spec) = match (args.solver.config(), args.ray.spec()) {
        (Ok(c), Ok(s)) => (c, s),
        (Err(e), _) | (_, Err(e)) => return fail(e),
    };
    let a = Complex64::new(args.a_re, args.a_im);
    let report = match compare_tba_oracle(a, (args.theta_min, args.theta_max), args.samples, &cfg, &spec) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Some(out) = &args.out {
        if let Err(e) = write_json(out, &report) {
            return fail(e);
        }
    }
    println!(
        "max relative error {:e} over {} samples ({} failed); Y-system residual {:e}",
        report.max_rel_error,
        report.samples.len(),
        report.failures,
        report.ysystem_max_residual
    );
    if report.passes(args.accept) {
        OK
    } else {
        eprintln!("dtba: acceptance threshold {:e} not met", args.accept);
        ACCEPTANCE
    }
}

fn cmd_eigen(args: &EigenArgs) -> u8 {
    let spec = match args.ray.spec() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let roots = match pt_eigenvalue_scan(args.a, Z5::new(args.k), (args.b_min, args.b_max), args.steps, &spec) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    match args.format {
        TextFormat::Text => {
            if roots.is_empty() {
                println!("no roots");
            }
            for r in &roots {
                println!(
                    "{:.12e},{:.12e},|sigma|={:.3e},w_gap={:.3e}",
                    r.b.re, r.b.im, r.sigma_abs, r.w_gap
                );
            }
        }
        TextFormat::Json => {
            let doc: Vec<_> = roots
                .iter()
                .map(|r| serde_json::json!({"t": r.t, "b": r.b, "sigma_abs": r.sigma_abs, "w_gap": r.w_gap}))
                .collect();
            match to_canonical_json(&doc) {
                Ok(t) => print!("{t}"),
                Err(e) => return fail(e),
            }
        }
    }
    if roots.iter().all(|r| r.is_pt_real(PT_TOL)) {
        OK
    } else {
        eprintln!("dtba: a root leaves the real negative axis");
        PT_VIOLATION
    }
}

fn cmd_suite(args: &SuiteArgs) -> u8 {
    let report = run_suite(&SuiteConfig::new(args.seed, args.trials));
    let written = match &args.out {
        Some(p) => write_json(p, &report),
        None => to_canonical_json(&report).map(|t| print!("{t}")),
    };
    match written {
        Ok(()) => OK,
        Err(e) => fail(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    match threads(cli.threads) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("dtba: {e}");
                return ExitCode::from(USAGE);
            }
        }
        Ok(None) => {}
        Err(e) => return ExitCode::from(fail(e)),
    }
    ExitCode::from(match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Eigen(a) => cmd_eigen(a),
        Command::Suite(a) => cmd_suite(a),
    })
}
