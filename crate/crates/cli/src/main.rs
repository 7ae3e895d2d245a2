//! Command-line front end: runs the verification suites, computes
//! frequencies, emits trajectory data, runs the limit checks, and prints
//! parameter-sweep tables. Every number printed comes from a library
//! operation; given the same configuration and seed, reruns are
//! byte-identical.
//!
//! Exit codes: 0 all checks passed, 1 internal/numerical error or a failed
//! check, 2 invalid input.

// negated comparisons are deliberate where NaN must fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand};
use laddermech::dynamics::{integrate_hamilton, motion_from_ladder};
use laddermech::ladder::{alpha_closed, eval_ladder, ladder_modulus};
use laddermech::limits::{flat_kc_limit_check, l_zero_limit_check, pt_limit_check};
use laddermech::numeric::format_g17;
use laddermech::system::{build_system, PhasePoint, Sign, System, SystemParams};
use laddermech::verify::verify_gha;
use laddermech::{Error, Result};
use rayon::prelude::*;
use serde::Deserialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "laddermech",
    about = "Ladder functions of one-dimensional wells: verification, frequencies, and algebraic motion",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run the bracket-algebra, factorization, signature, and
    /// representation checks at the given energies.
    Verify(VerifyArgs),
    /// Print closed-form alpha(E) against the quadrature frequency.
    Frequency(FrequencyArgs),
    /// Generate the motion at one energy, both algebraically and by the
    /// integrator oracle, and report their deviation.
    Motion(MotionArgs),
    /// Run the limit-regime checks suited to the chosen system.
    Limits(LimitsArgs),
    /// Sweep an energy grid and tabulate E, alpha, omega, |A|.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Clone)]
struct SystemArgs {
    /// System name: rmii, pt, kc, flatkc.
    #[arg(long)]
    system: Option<String>,
    /// Linear-term strength B (rmii, kc, flatkc).
    #[arg(long = "B", allow_hyphen_values = true)]
    b: Option<f64>,
    /// Well depth C (rmii, pt).
    #[arg(long = "C", allow_hyphen_values = true)]
    c: Option<f64>,
    /// Squared angular momentum l^2 (kc, flatkc).
    #[arg(long, allow_hyphen_values = true)]
    l2: Option<f64>,
    /// Curvature kappa > 0 (kc).
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// Optional JSON config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Energy of the shell; repeat for several energies.
    #[arg(long = "energy", allow_hyphen_values = true)]
    energies: Vec<f64>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Shell samples per energy (>= 10).
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for the shell sampling.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct FrequencyArgs {
    #[command(flatten)]
    sys: SystemArgs,
}

#[derive(Debug, Args)]
struct MotionArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Length of the generated trajectory (default: two periods).
    #[arg(long = "t-span", allow_hyphen_values = true)]
    t_span: Option<f64>,
    /// Sample spacing (default: period / 4096).
    #[arg(long)]
    dt: Option<f64>,
    /// Initial phase arg A_{-1}(t=0) (default: the phase at the inner
    /// turning point).
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<f64>,
}

#[derive(Debug, Args)]
struct LimitsArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Shell samples for the pointwise comparisons.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Grid size when no explicit energies are given.
    #[arg(long)]
    count: Option<usize>,
}

/// JSON config mirroring the command-line fields.
#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    system: Option<SystemConfig>,
    energies: Option<Vec<f64>>,
    #[allow(dead_code)]
    command: Option<String>,
    output_path: Option<String>,
    seed: Option<u64>,
    samples: Option<usize>,
    t_span: Option<f64>,
    dt: Option<f64>,
    theta0: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct SystemConfig {
    name: String,
    #[serde(rename = "B")]
    b: Option<f64>,
    #[serde(rename = "C")]
    c: Option<f64>,
    l2: Option<f64>,
    kappa: Option<f64>,
}

struct Resolved {
    sys: Box<dyn System>,
    energies: Vec<f64>,
    out: Option<PathBuf>,
    seed: u64,
    samples: usize,
    t_span: Option<f64>,
    dt: Option<f64>,
    theta0: Option<f64>,
}

fn resolve(args: &SystemArgs, samples: Option<usize>, seed: Option<u64>) -> Result<Resolved> {
    let file: ConfigFile = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::InvalidInput(format!("bad config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let name = args
        .system
        .clone()
        .or_else(|| file.system.as_ref().map(|s| s.name.clone()))
        .ok_or_else(|| Error::InvalidInput("missing --system".into()))?;
    let fsys = file.system.as_ref();
    let params = SystemParams {
        b: args.b.or(fsys.and_then(|s| s.b)),
        c: args.c.or(fsys.and_then(|s| s.c)),
        l2: args.l2.or(fsys.and_then(|s| s.l2)),
        kappa: args.kappa.or(fsys.and_then(|s| s.kappa)),
    };
    let sys = build_system(&name, &params)?;
    let energies = if args.energies.is_empty() {
        file.energies.unwrap_or_default()
    } else {
        args.energies.clone()
    };
    Ok(Resolved {
        sys,
        energies,
        out: args
            .out
            .clone()
            .or_else(|| file.output_path.map(PathBuf::from)),
        seed: seed.or(file.seed).unwrap_or(0),
        samples: samples.or(file.samples).unwrap_or(50),
        t_span: file.t_span,
        dt: file.dt,
        theta0: file.theta0,
    })
}

fn require_energies(r: &Resolved) -> Result<()> {
    if r.energies.is_empty() {
        return Err(Error::InvalidInput(
            "no energies given (use --energy or a config file)".into(),
        ));
    }
    // validate every energy before running anything
    let window = r.sys.energy_window()?;
    for &e in &r.energies {
        window.require(e)?;
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Numerical(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let r = resolve(&args.sys, args.samples, args.seed)?;
    require_energies(&r)?;
    if r.samples < 10 {
        return Err(Error::InvalidInput("--samples must be at least 10".into()));
    }
    let mut all_pass = true;
    let mut text = String::new();
    for &e in &r.energies {
        let report = verify_gha(r.sys.as_ref(), e, r.samples, r.seed)?;
        if !report.passed {
            all_pass = false;
            eprintln!(
                "verify failed at E={e}: alpha_residual={:.3e} beta_spread={:.3e} \
                 delta_residual={:.3e} representation={:.3e}",
                report.alpha_residual,
                report.beta_spread,
                report.delta_residual,
                report.representation_residual
            );
        }
        text.push_str(&serde_json::to_string(&report).expect("report serializes"));
        text.push('\n');
    }
    text.push_str(if all_pass {
        "verify: PASS\n"
    } else {
        "verify: FAIL\n"
    });
    emit(&r.out, &text)?;
    Ok(all_pass)
}

fn cmd_frequency(args: &FrequencyArgs) -> Result<bool> {
    let r = resolve(&args.sys, None, None)?;
    require_energies(&r)?;
    let mut text = String::from("E,alpha,omega\n");
    for &e in &r.energies {
        let a = alpha_closed(r.sys.as_ref(), e)?;
        let w = laddermech::dynamics::frequency_quadrature(r.sys.as_ref(), e)?;
        text.push_str(&format!(
            "{},{},{}\n",
            format_g17(e),
            format_g17(a),
            format_g17(w)
        ));
    }
    emit(&r.out, &text)?;
    Ok(true)
}

fn cmd_motion(args: &MotionArgs) -> Result<bool> {
    let r = resolve(&args.sys, None, None)?;
    require_energies(&r)?;
    if r.energies.len() != 1 {
        return Err(Error::InvalidInput(
            "motion needs exactly one --energy".into(),
        ));
    }
    let sys = r.sys.as_ref();
    let e = r.energies[0];
    let period = 2.0 * std::f64::consts::PI / alpha_closed(sys, e)?;
    let t_span = args.t_span.or(r.t_span).unwrap_or(2.0 * period);
    let dt = args.dt.or(r.dt).unwrap_or(period / 4096.0);
    if !(dt > 0.0) || t_span < 0.0 {
        return Err(Error::InvalidInput(format!(
            "motion needs dt > 0 and t-span >= 0 (got dt={dt}, t-span={t_span})"
        )));
    }
    let theta0 = match args.theta0.or(r.theta0) {
        Some(v) => v,
        None => {
            let (xm, _) = sys.turning_points(e)?;
            eval_ladder(sys, Sign::Minus, PhasePoint::new(xm, 0.0))?.phase
        }
    };

    // anchor the oracle at the ladder's t = 0 state, then evaluate the
    // ladder motion at the oracle's own sample times (it may have halved
    // its step to hold the energy-drift budget)
    let anchor = motion_from_ladder(sys, e, theta0, &[0.0])?.points[0];
    let ode = integrate_hamilton(sys, anchor, t_span, dt)?;
    let ladder = motion_from_ladder(sys, e, theta0, &ode.times)?;

    let (mut max_dx, mut max_dp) = (0.0_f64, 0.0_f64);
    for (lpt, opt) in ladder.points.iter().zip(&ode.points) {
        max_dx = max_dx.max((lpt.x - opt.x).abs());
        max_dp = max_dp.max((lpt.p - opt.p).abs());
    }
    let (qmod, qphase) = laddermech::dynamics::constant_of_motion_drift(sys, &ode, Sign::Minus)?;

    match &r.out {
        Some(base) => {
            let ladder_path = with_suffix(base, "_ladder.csv");
            let ode_path = with_suffix(base, "_ode.csv");
            std::fs::write(&ladder_path, ladder.to_csv())
                .map_err(|err| Error::Numerical(format!("cannot write ladder csv: {err}")))?;
            std::fs::write(&ode_path, ode.to_csv())
                .map_err(|err| Error::Numerical(format!("cannot write ode csv: {err}")))?;
            println!(
                "# wrote {} and {}",
                ladder_path.display(),
                ode_path.display()
            );
        }
        None => {
            println!("# ladder");
            print!("{}", ladder.to_csv());
            println!("# ode");
            print!("{}", ode.to_csv());
        }
    }
    println!(
        "# deviation max_dx={} max_dp={} qmod_drift={} qphase_drift={}",
        format_g17(max_dx),
        format_g17(max_dp),
        format_g17(qmod),
        format_g17(qphase)
    );
    Ok(true)
}

fn with_suffix(base: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = base.to_path_buf().into_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_limits(args: &LimitsArgs) -> Result<bool> {
    let r = resolve(&args.sys, args.samples, None)?;
    if r.energies.is_empty() {
        return Err(Error::InvalidInput("no energies given".into()));
    }
    let sys = r.sys.as_ref();
    let mut text = String::new();
    for &e in &r.energies {
        let line = match sys.name() {
            "pt" | "rmii" => {
                let c = param(sys, "C")?;
                serde_json::to_string(&pt_limit_check(c, e, r.samples)?)
            }
            "flatkc" => {
                let b = param(sys, "B")?;
                let l2 = param(sys, "l2")?;
                serde_json::to_string(&flat_kc_limit_check(b, l2, e)?)
            }
            "kc" => {
                let b = param(sys, "B")?;
                let kappa = param(sys, "kappa")?;
                serde_json::to_string(&l_zero_limit_check(b, kappa, e)?)
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "no limit regime registered for system '{other}'"
                )))
            }
        };
        text.push_str(&line.expect("report serializes"));
        text.push('\n');
    }
    text.push_str("limits: PASS\n");
    emit(&r.out, &text)?;
    Ok(true)
}

fn param(sys: &dyn System, key: &str) -> Result<f64> {
    sys.params()
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::InvalidInput(format!("{} has no parameter {key}", sys.name())))
}

fn cmd_sweep(args: &SweepArgs) -> Result<bool> {
    let r = resolve(&args.sys, None, None)?;
    let sys = r.sys.as_ref();
    let energies = if r.energies.is_empty() {
        let count = args.count.unwrap_or(50).max(1);
        sys.energy_window()?.interior_grid(count, 0.02)
    } else {
        let window = sys.energy_window()?;
        for &e in &r.energies {
            window.require(e)?;
        }
        r.energies.clone()
    };

    // rows compute in parallel and print in energy order
    let rows: Result<Vec<(f64, f64, f64, f64)>> = energies
        .par_iter()
        .map(|&e| {
            let a = alpha_closed(sys, e)?;
            let w = laddermech::dynamics::frequency_quadrature(sys, e)?;
            let m = ladder_modulus(sys, Sign::Minus, e)?;
            Ok((e, a, w, m))
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut text = String::from("E,alpha,omega,mod_A\n");
    let mut worst: f64 = 0.0;
    for (e, a, w, m) in &rows {
        worst = worst.max((a - w).abs() / w);
        text.push_str(&format!(
            "{},{},{},{}\n",
            format_g17(*e),
            format_g17(*a),
            format_g17(*w),
            format_g17(*m)
        ));
    }
    let pass = worst <= 1e-8;
    text.push_str(&format!(
        "# max_rel_alpha_omega_dev = {} threshold = 1e-8 -> {}\n",
        format_g17(worst),
        if pass { "PASS" } else { "FAIL" }
    ));
    emit(&r.out, &text)?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Frequency(a) => cmd_frequency(a),
        Cmd::Motion(a) => cmd_motion(a),
        Cmd::Limits(a) => cmd_limits(a),
        Cmd::Sweep(a) => cmd_sweep(a),
    };
    match outcome {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invalid_input() { 2 } else { 1 })
        }
    }
}
