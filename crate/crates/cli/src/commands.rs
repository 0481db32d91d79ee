//! Subcommands. Each returns a process exit code: 0 pass, 1 verification failure, 2 usage or I/O error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nambu_core::dynamics::{conservation_report, integrate, IntegratorConfig, RhsKind, DEFAULT_TOLERANCE};
use nambu_core::phase_space::invariants;
use nambu_core::qnb::JkMode;
use nambu_core::report::{VerificationReport, SCHEMA_VERSION};
use nambu_core::su2::prl_operator_identity_check;
use nambu_core::{PhaseState, RepSpec, Spin};

use crate::suites::{
    cnb_suite, conservation_suite, convention_suite, entwined_suite, evaluate_conventions, jordan_kurosh_suite,
    law_operators, qnb_suite, record_conventions, sector_suite, spectrum_suite, spin_ladder, BRACKET_TOL, DEFAULT_SEED,
    FLOW_TOL, LAW_TOL,
};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "nambu-verify", version, about = "Verify Nambu-bracket identities of the Kepler and Hydrogen problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one orbit and write the trajectory as CSV.
    Orbit(OrbitArgs),
    /// Bracket and flow-law equivalence over seeded phase-space points.
    VerifyCnb(CnbArgs),
    /// Hamiltonian spectrum for spins 0, 1/2, ..., smax.
    Spectrum(SpectrumArgs),
    /// Quantum bracket identities on a spin representation.
    VerifyQnb(QnbArgs),
    /// Run every suite with default settings and write one JSON document.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Initial state x,px,y,py,z,pz.
    #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
    pub z0: PhaseState,
    #[arg(long, default_value = "nambu")]
    pub rhs: RhsKind,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// CSV destination, `-` for standard output.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CnbArgs {
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = FLOW_TOL)]
    pub tol: f64,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_parser = parse_spin)]
    pub smax: Spin,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QnbArgs {
    /// Comma-separated spins, e.g. `0,1/2,1` or `0.5`.
    #[arg(long, default_value = "0.5")]
    pub spins: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Treat incompatible Jordan-Kurosh right-hand sides as errors.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

fn parse_state(text: &str) -> Result<PhaseState, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 6] = values.try_into().map_err(|v: Vec<f64>| format!("expected 6 components, got {}", v.len()))?;
    if arr.iter().any(|v| !v.is_finite()) {
        return Err("components must be finite".into());
    }
    Ok(PhaseState::from_array(arr))
}

fn parse_spin(text: &str) -> Result<Spin, String> {
    let spins = RepSpec::parse_spins(text).map_err(|e| e.to_string())?;
    match spins.as_slice() {
        [s] => Ok(*s),
        _ => Err("expected a single spin".into()),
    }
}

fn usage(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn verdict(pass: bool) -> u8 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Writes to `path`, or standard output for `-`.
pub fn write_output(path: &PathBuf, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    if path.as_os_str() == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        body(&mut lock)?;
        lock.flush()
    } else {
        let mut file = BufWriter::new(File::create(path)?);
        body(&mut file)?;
        file.flush()
    }
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> io::Result<()> {
    write_output(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::other)?;
        writeln!(w)
    })
}

fn emit_json<T: Serialize>(path: &PathBuf, value: &T, pass: bool) -> u8 {
    match write_json(path, value) {
        Ok(()) => verdict(pass),
        Err(e) => usage(format!("cannot write {}: {e}", path.display())),
    }
}

fn summarize(report: &VerificationReport) {
    let status = if report.pass { "PASS" } else { "FAIL" };
    eprintln!("{status} {} max_residual={:.3e}", report.test_name, report.max_residual);
    for chk in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("  {} residual={:.3e} tolerance={:.1e}", chk.name, chk.residual, chk.tolerance);
    }
}

pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Orbit(args) => cmd_orbit(&args),
        Command::VerifyCnb(args) => cmd_verify_cnb(&args),
        Command::Spectrum(args) => cmd_spectrum(&args),
        Command::VerifyQnb(args) => cmd_verify_qnb(&args),
        Command::Report(args) => cmd_report(&args),
    }
}

pub fn cmd_orbit(args: &OrbitArgs) -> u8 {
    if !(args.t_max >= 0.0 && args.t_max.is_finite()) {
        return usage(format!("--t-max must be finite and non-negative, got {}", args.t_max));
    }
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return usage(format!("--tol must be positive, got {}", args.tol));
    }
    if let Err(e) = invariants(&args.z0).and_then(|_| args.rhs.eval(&args.z0)) {
        return usage(format!("--z0 outside the domain of rhs={}: {e}", args.rhs));
    }
    let traj = match integrate(&args.z0, args.rhs, args.t_max, &IntegratorConfig::with_tolerance(args.tol)) {
        Ok(traj) => traj,
        Err(e) => {
            eprintln!("FAIL integration: {e}");
            return EXIT_FAIL;
        }
    };
    if let Err(e) = write_output(&args.out, |w| traj.write_csv(w)) {
        return usage(format!("cannot write {}: {e}", args.out.display()));
    }
    let mut report = conservation_report(&traj, 100.0 * args.tol);
    let (a, b) = (traj.initial().to_array(), traj.last().state.to_array());
    let closure = (0..6).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
    report.note(format!("closure residual |z(t_max) - z0| = {closure:.3e}"));
    summarize(&report);
    eprintln!("  closure_residual={closure:.3e} steps={} rejected={}", traj.accepted_steps, traj.rejected_steps);
    verdict(report.pass)
}

pub fn cmd_verify_cnb(args: &CnbArgs) -> u8 {
    if !(args.tol >= 0.0) {
        return usage(format!("--tol must be non-negative, got {}", args.tol));
    }
    let report = cnb_suite(args.points, args.seed, args.tol, args.tol);
    summarize(&report);
    emit_json(&args.out, &report, report.pass)
}

#[derive(Debug, Serialize)]
struct SpectrumOutput {
    schema: u32,
    hbar: f64,
    levels: Vec<nambu_core::su2::BalmerLevel>,
    report: VerificationReport,
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> u8 {
    if !(args.hbar > 0.0 && args.hbar.is_finite()) {
        return usage(format!("--hbar must be positive, got {}", args.hbar));
    }
    let (report, levels) = spectrum_suite(&spin_ladder(args.smax), args.hbar);
    summarize(&report);
    let pass = report.pass;
    emit_json(&args.out, &SpectrumOutput { schema: SCHEMA_VERSION, hbar: args.hbar, levels, report }, pass)
}

#[derive(Debug, Serialize)]
struct QnbOutput {
    schema: u32,
    spins: String,
    hbar: f64,
    strict: bool,
    convention_selected: Option<String>,
    max_residual: f64,
    pass: bool,
    reports: Vec<VerificationReport>,
}

/// Every quantum suite on one representation.
pub fn qnb_rep_reports(rep: &RepSpec, trials: usize, seed: u64, strict: bool) -> Vec<VerificationReport> {
    let mode = if strict { JkMode::Strict } else { JkMode::Lenient };
    let mut conv = VerificationReport::new("symmetrized_law", LAW_TOL).with_rep(rep.label()).with_seed(seed);
    let ops = law_operators(rep, trials, seed);
    conv.trials = ops.len();
    match evaluate_conventions(rep, &ops) {
        Ok(outcome) => record_conventions(&mut conv, &outcome, false),
        Err(e) => {
            conv.record("symmetrized_law", f64::NAN);
            conv.note(e.to_string());
        }
    }
    vec![
        prl_operator_identity_check(rep),
        entwined_suite(rep, trials, seed),
        conv,
        jordan_kurosh_suite(rep, trials, seed, mode),
        sector_suite(rep, trials, seed),
    ]
}

/// Decisive selections must agree; ambiguous representations defer to decisive ones.
fn combined_convention(reports: &[VerificationReport]) -> Option<String> {
    let picks: Vec<&str> = reports.iter().filter_map(|r| r.convention_selected.as_deref()).collect();
    let mut decisive: Vec<&str> = picks.iter().copied().filter(|p| *p != "ambiguous").collect();
    decisive.dedup();
    match decisive.as_slice() {
        [one] => Some(one.to_string()),
        [] if !picks.is_empty() => Some("ambiguous".to_string()),
        [] => None,
        _ => Some("conflicting".to_string()),
    }
}

pub fn cmd_verify_qnb(args: &QnbArgs) -> u8 {
    let spins = match RepSpec::parse_spins(&args.spins) {
        Ok(spins) => spins,
        Err(e) => return usage(e),
    };
    let full = match RepSpec::new(args.hbar, spins.clone()) {
        Ok(rep) => rep,
        Err(e) => return usage(e),
    };
    let mut reps = Vec::new();
    if spins.len() > 1 {
        for s in &spins {
            reps.push(RepSpec::new(args.hbar, vec![*s]).expect("validated above"));
        }
    }
    reps.push(full.clone());
    let reports: Vec<VerificationReport> =
        reps.iter().flat_map(|rep| qnb_rep_reports(rep, args.trials, args.seed, args.strict)).collect();
    reports.iter().for_each(summarize);
    let convention = combined_convention(&reports);
    let pass = reports.iter().all(|r| r.pass) && convention.as_deref() != Some("conflicting");
    let out = QnbOutput {
        schema: SCHEMA_VERSION,
        spins: full.label(),
        hbar: args.hbar,
        strict: args.strict,
        convention_selected: convention,
        max_residual: reports.iter().map(|r| r.max_residual).fold(0.0, f64::max),
        pass,
        reports,
    };
    emit_json(&args.out, &out, pass)
}

#[derive(Debug, Serialize)]
pub struct Toolchain {
    pub name: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ConsolidatedReport {
    pub schema: u32,
    pub toolchain: Toolchain,
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<VerificationReport>,
}

pub fn rep(spins: &[f64]) -> RepSpec {
    RepSpec::from_values(1.0, spins).expect("valid spins")
}

/// Every suite at default settings, in acceptance order.
pub fn default_suites() -> Vec<VerificationReport> {
    let seed = DEFAULT_SEED;
    let mut suites = vec![
        cnb_suite(100, seed, BRACKET_TOL, FLOW_TOL),
        conservation_suite(),
        spectrum_suite(&spin_ladder(Spin::from_twice(4)), 1.0).0,
        qnb_suite(50, seed, 2..=6),
    ];
    for spins in [&[0.5][..], &[1.0], &[0.0, 0.5, 1.0]] {
        suites.push(entwined_suite(&rep(spins), 20, seed));
    }
    suites.push(convention_suite(&rep(&[0.5]), 20, seed));
    let mut mixed = convention_suite(&rep(&[0.0, 0.5]), 20, seed);
    mixed.test_name = "symmetrized_convention_mixed_blocks".into();
    suites.push(mixed);
    suites.push(jordan_kurosh_suite(&rep(&[0.5]), 20, seed, JkMode::Lenient));
    suites.push(sector_suite(&rep(&[0.0, 0.5, 1.0]), 20, seed));
    suites.push(prl_operator_identity_check(&rep(&[0.0, 0.5, 1.0])));
    suites
}

pub fn consolidated_report() -> ConsolidatedReport {
    let suites = default_suites();
    ConsolidatedReport {
        schema: SCHEMA_VERSION,
        toolchain: Toolchain {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            core_version: nambu_core::VERSION,
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
        },
        seed: DEFAULT_SEED,
        pass: suites.iter().all(|s| s.pass),
        suites,
    }
}

pub fn cmd_report(args: &ReportArgs) -> u8 {
    let report = consolidated_report();
    report.suites.iter().for_each(summarize);
    emit_json(&args.out, &report, report.pass)
}
