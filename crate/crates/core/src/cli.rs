//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 runtime guard tripped during a
//! run, 3 verification failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::bridge::{eulerian_densities, EulerianSnapshot};
use crate::claws::{builtin_laws, diagnose, LawId};
use crate::config::RunConfig;
use crate::error::Error;
use crate::solver::{run, spatial_derivs, Trajectory};
use crate::symmetry::{classify_entropy, default_samples};
use crate::verify::{el_equivalence, euler_level, euler_study, noether_check, refinement_study, NoetherCriteria};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Maxima below this are treated as round-off and excluded from order checks.
pub const ROUND_OFF_FLOOR: f64 = 1e-11;
/// Smallest accepted order for the Eulerian continuity and entropy residuals.
pub const EULER_MIN_ORDER: f64 = 1.5;

#[derive(Debug, Parser)]
#[command(name = "relgas", version, about = "Relativistic polytropic gas in mass coordinates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (`key = value` lines); defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Random seed for sampled checks; overrides `seed` in the config.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate the configured problem; writes snapshots.csv, diagnostics.csv, summary.json.
    Simulate,
    /// Compare the Euler-Lagrange expansion with the equation of motion on random jets.
    VerifyEl,
    /// Noether residuals of every generator against the expected verdicts.
    CheckNoether,
    /// Classify the configured entropy profile.
    ClassifyEntropy,
    /// Refinement study of charge balance and divergence residuals.
    Diagnose,
    /// Eulerian fields, densities and residuals.
    ToEuler,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_runtime_guard() { EXIT_GUARD } else { EXIT_INVALID };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: format!("i/o error: {e}"),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> i32 {
    let result = load_config(cli).and_then(|cfg| {
        let threads = cli.threads.unwrap_or(0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Failure {
                code: EXIT_INVALID,
                message: format!("cannot build thread pool: {e}"),
            })?;
        std::fs::create_dir_all(&cli.out)?;
        pool.install(|| dispatch(cli.command, &cfg, &cli.out))
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_config(cli: &Cli) -> std::result::Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.threads == Some(0) {
        return Err(Failure {
            code: EXIT_INVALID,
            message: "--threads must be >= 1".into(),
        });
    }
    Ok(cfg)
}

fn dispatch(cmd: Command, cfg: &RunConfig, out: &Path) -> CmdResult {
    match cmd {
        Command::Simulate => cmd_simulate(cfg, out),
        Command::VerifyEl => cmd_verify_el(cfg, out),
        Command::CheckNoether => cmd_check_noether(cfg, out),
        Command::ClassifyEntropy => cmd_classify(cfg, out),
        Command::Diagnose => cmd_diagnose(cfg, out),
        Command::ToEuler => cmd_to_euler(cfg, out),
    }
}

fn write_json(out: &Path, name: &str, value: &serde_json::Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(out.join(name), text)
}

fn snapshots_csv(traj: &Trajectory) -> Result<String, Error> {
    let grid = &traj.grid;
    let mut s = String::from("t,xi,phi,phi_t,phi_xi,m,v\n");
    for state in &traj.snapshots {
        let d = spatial_derivs(state, grid)?;
        for j in 0..grid.len() {
            let xi = grid.xi(j);
            let q = d.phi_xi[j];
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                state.t,
                xi,
                xi + state.u[j],
                state.w[j],
                q,
                1.0 / q,
                state.w[j]
            );
        }
    }
    Ok(s)
}

fn eulerian_csv(seq: &[EulerianSnapshot], laws: &[LawId], gamma: f64) -> Result<String, Error> {
    let mut s = String::from("t,x,v,m,n,S");
    for l in laws {
        let _ = write!(s, ",{l}_t,{l}_x");
    }
    s.push('\n');
    for snap in seq {
        let dens = eulerian_densities(snap, laws, gamma)?;
        for j in 0..snap.len() {
            let _ = write!(
                s,
                "{},{},{},{},{},{}",
                snap.t, snap.x[j], snap.v[j], snap.m[j], snap.n[j], snap.s[j]
            );
            for d in &dens {
                let _ = write!(s, ",{},{}", d.tt[j], d.tx[j]);
            }
            s.push('\n');
        }
    }
    Ok(s)
}

fn cmd_simulate(cfg: &RunConfig, out: &Path) -> CmdResult {
    let solver = cfg.solver_config()?;
    let profile = cfg.profile()?;
    let outcome = run(&solver, &cfg.ic)?;
    let traj = &outcome.trajectory;
    std::fs::write(out.join("snapshots.csv"), snapshots_csv(traj)?)?;

    let mut laws_json = Vec::new();
    if cfg.diagnostics && traj.snapshots.len() >= 3 {
        let report = diagnose(traj, &profile, cfg.gamma)?;
        let mut csv = String::from("t,law,charge,balance_residual,max_div_residual\n");
        for (k, t) in report.times.iter().enumerate() {
            for l in &report.laws {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    t, l.law, l.charge[k], l.balance[k], l.max_divergence[k]
                );
            }
        }
        std::fs::write(out.join("diagnostics.csv"), csv)?;
        for l in &report.laws {
            laws_json.push(json!({
                "law": l.law,
                "initial_charge": l.charge[0],
                "final_charge": l.charge[l.charge.len() - 1],
                "relative_drift": l.relative_drift,
                "max_balance": l.max_balance,
                "max_divergence": l.max_divergence_interior,
            }));
        }
    }
    if cfg.euler_bridge && traj.snapshots.len() >= 3 {
        let (_, seq) = euler_level(cfg, traj)?;
        let ids: Vec<LawId> = builtin_laws(&profile, cfg.gamma).iter().map(|l| l.id).collect();
        std::fs::write(out.join("eulerian.csv"), eulerian_csv(&seq, &ids, cfg.gamma)?)?;
    }
    let summary = json!({
        "command": "simulate",
        "config_hash": cfg.hash(),
        "solver_hash": traj.meta.config_hash,
        "status": if outcome.failure.is_some() { "guard" } else { "ok" },
        "failure": outcome.failure.as_ref().map(|e| e.to_string()),
        "steps": traj.meta.steps,
        "dt": traj.meta.dt,
        "snapshots": traj.snapshots.len(),
        "t_final": traj.last().t,
        "guard_events": traj.meta.guard_events,
        "laws": laws_json,
    });
    write_json(out, "summary.json", &summary)?;
    match outcome.failure {
        Some(e) => {
            eprintln!("run stopped early: {e}");
            Ok(EXIT_GUARD)
        }
        None => Ok(EXIT_OK),
    }
}

fn cmd_verify_el(cfg: &RunConfig, out: &Path) -> CmdResult {
    let report = el_equivalence(cfg.gamma, cfg.el_samples, cfg.seed)?;
    let passed = report.max_deviation <= cfg.el_tol;
    write_json(
        out,
        "el_report.json",
        &json!({
            "command": "verify-el",
            "config_hash": cfg.hash(),
            "tolerance": cfg.el_tol,
            "passed": passed,
            "report": report,
        }),
    )?;
    println!(
        "max parallel deviation {:e} over {} jets (tolerance {:e}): {}",
        report.max_deviation,
        report.samples,
        cfg.el_tol,
        if passed { "pass" } else { "FAIL" }
    );
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_check_noether(cfg: &RunConfig, out: &Path) -> CmdResult {
    let criteria = NoetherCriteria {
        tol: cfg.noether_tol,
        floor: cfg.noether_floor,
        fraction: cfg.noether_fraction,
    };
    let rows = noether_check(cfg.gamma, cfg.noether_samples, cfg.seed, criteria)?;
    let mut csv = String::from("generator,profile,gamma,samples,max_relative,fraction_nonzero,verdict,expected\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.generator,
            r.profile,
            r.gamma,
            r.samples,
            r.max_relative,
            r.fraction_nonzero,
            r.observed.as_str(),
            r.expected.as_str()
        );
        println!(
            "{:<4} {:<22} max {:>10.3e}  {:<16} {}",
            r.generator,
            r.profile,
            r.max_relative,
            r.observed.as_str(),
            if r.matches() { "" } else { "MISMATCH" }
        );
    }
    std::fs::write(out.join("noether.csv"), csv)?;
    let passed = rows.iter().all(|r| r.matches());
    write_json(
        out,
        "noether.json",
        &json!({
            "command": "check-noether",
            "config_hash": cfg.hash(),
            "criteria": criteria,
            "passed": passed,
            "rows": rows,
        }),
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_classify(cfg: &RunConfig, out: &Path) -> CmdResult {
    let profile = cfg.profile()?;
    let samples = default_samples(cfg.xi_min, cfg.xi_max, cfg.classify_samples);
    let result = classify_entropy(&profile, &samples, cfg.classify_tol, cfg.gamma)?;
    println!("{}", serde_json::to_string(&result.family).expect("family serializes"));
    write_json(
        out,
        "classification.json",
        &json!({
            "command": "classify-entropy",
            "config_hash": cfg.hash(),
            "entropy": cfg.entropy,
            "result": result,
        }),
    )?;
    Ok(EXIT_OK)
}

fn within(order: Option<f64>, target: f64, tol: f64) -> bool {
    order.is_some_and(|o| (o - target).abs() <= tol)
}

fn cmd_diagnose(cfg: &RunConfig, out: &Path) -> CmdResult {
    let study = refinement_study(cfg)?;
    let mut csv = String::from("n,dxi,law,max_balance,max_divergence\n");
    for level in &study.levels {
        for l in &level.report.laws {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                level.n, level.dxi, l.law, l.max_balance, l.max_divergence_interior
            );
        }
    }
    std::fs::write(out.join("convergence.csv"), csv)?;
    let mut passed = true;
    let mut gates = Vec::new();
    for o in &study.orders {
        let round_off = o.max_balance.first().is_some_and(|b| *b <= ROUND_OFF_FLOOR);
        let ok = round_off || within(o.balance_order, cfg.order_target, cfg.order_tol);
        passed &= ok;
        println!(
            "{}: balance order {}  divergence order {}{}",
            o.law,
            fmt_order(o.balance_order),
            fmt_order(o.divergence_order),
            if round_off {
                "  (balance at round-off)"
            } else if ok {
                ""
            } else {
                "  FAIL"
            }
        );
        gates.push(json!({ "law": o.law, "round_off": round_off, "passed": ok }));
    }
    write_json(
        out,
        "diagnose.json",
        &json!({
            "command": "diagnose",
            "config_hash": cfg.hash(),
            "order_target": cfg.order_target,
            "order_tol": cfg.order_tol,
            "passed": passed,
            "gates": gates,
            "orders": study.orders,
        }),
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}

fn fmt_order(o: Option<f64>) -> String {
    o.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"))
}

fn cmd_to_euler(cfg: &RunConfig, out: &Path) -> CmdResult {
    let profile = cfg.profile()?;
    let traj = crate::verify::simulate(cfg)?;
    let (_, seq) = euler_level(cfg, &traj)?;
    let ids: Vec<LawId> = builtin_laws(&profile, cfg.gamma).iter().map(|l| l.id).collect();
    std::fs::write(out.join("eulerian.csv"), eulerian_csv(&seq, &ids, cfg.gamma)?)?;

    let study = euler_study(cfg)?;
    let first = &study.levels[0];
    let gate = |max: f64, order: Option<f64>| max <= ROUND_OFF_FLOOR || order.is_some_and(|o| o >= EULER_MIN_ORDER);
    let continuity_ok = gate(first.max_continuity, study.continuity_order);
    let entropy_ok = gate(first.max_entropy, study.entropy_order);
    let passed = continuity_ok && entropy_ok;
    println!(
        "continuity order {}  entropy order {}  momentum order {} (reported only)  constraint order {}",
        fmt_order(study.continuity_order),
        fmt_order(study.entropy_order),
        fmt_order(study.momentum_order),
        fmt_order(study.constraint_order)
    );
    write_json(
        out,
        "euler_residuals.json",
        &json!({
            "command": "to-euler",
            "config_hash": cfg.hash(),
            "min_order": EULER_MIN_ORDER,
            "continuity_passed": continuity_ok,
            "entropy_passed": entropy_ok,
            "passed": passed,
            "study": study,
        }),
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}
