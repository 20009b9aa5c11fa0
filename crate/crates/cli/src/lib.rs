//! `gcale` command-line interface.
//!
//! Exit codes are a stable contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | input error (unreadable or malformed file, bad flags) |
//! | 2 | sufficient conditions not satisfied |
//! | 3 | iteration did not converge (max iterations or divergence) |
//! | 4 | direct solve: singular operator |
//! | 5 | `compare`: a-priori bound violated at some iterate |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcale_core::io::{MatrixFile, OracleComparison, OracleSummary, ProblemFile, RunReport, SolveSummary, history_csv};
use gcale_core::{
    AsMatrix, CertificateConfig, ConditionReport, Error, ProblemInstance, SolverSettings, Sweep, check_theorem_with,
    compare_with_oracle, preset_cr1, preset_cr2, solve_coupled, solve_direct,
};

pub const EXIT_SUCCESS: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_CONDITIONS: u8 = 2;
pub const EXIT_NO_CONVERGENCE: u8 = 3;
pub const EXIT_SINGULAR: u8 = 4;
pub const EXIT_BOUND_VIOLATED: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "gcale", version, about = "Positive definite solutions of A*XB + B*XA = -Q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the sufficient conditions for a certificate and print the margins.
    Check(CheckArgs),
    /// Run the coupled fixed-point iteration.
    Solve(SolveArgs),
    /// Solve directly by Kronecker vectorization.
    Oracle(OracleArgs),
    /// Run both solvers and verify the a-priori error bound at every iterate.
    Compare(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    /// Q̃ = Q, M = 2Q (requires Hermitian A, B).
    Cr1,
    /// Q̃ = M = I (requires Hermitian A, B).
    Cr2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Sequential,
    Simultaneous,
}

#[derive(Debug, Args)]
pub struct CertArgs {
    /// Problem file.
    pub input: PathBuf,
    #[arg(long, value_enum, conflicts_with_all = ["qtilde", "m"])]
    pub preset: Option<PresetArg>,
    /// Matrix file holding a custom Q̃.
    #[arg(long, requires = "m")]
    pub qtilde: Option<PathBuf>,
    /// Matrix file holding a custom M.
    #[arg(long, requires = "qtilde")]
    pub m: Option<PathBuf>,
    /// Relative tolerance for accepting matrices as Hermitian.
    #[arg(long, default_value_t = 1e-10)]
    pub asym_tol: f64,
    /// A condition counts as satisfied only when its margin exceeds this.
    #[arg(long, default_value_t = 0.0)]
    pub strict_tol: f64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub cert: CertArgs,
    /// Write the condition report (JSON) here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub cert: CertArgs,
    /// Stop once max{E_n(X), E_n(Y)} falls to this value.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Run exactly this many iterations instead of stopping on `--tol`.
    #[arg(long, conflicts_with = "max_iter")]
    pub fixed_iters: Option<usize>,
    #[arg(long, value_enum, default_value_t = SweepArg::Sequential)]
    pub sweep: SweepArg,
    /// Iterate even when the sufficient conditions fail.
    #[arg(long)]
    pub force: bool,
    /// Loewner slack for the enclosure check.
    #[arg(long, default_value_t = 1e-9)]
    pub slack: f64,
    /// Write the residual history (CSV) here.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Write the run report (JSON) here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Leave wall-clock timings out of the report.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Problem file.
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub asym_tol: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub no_timings: bool,
}

/// A failed command: exit code plus a message for standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConditionsNotSatisfied => EXIT_CONDITIONS,
            Error::SingularOperator { .. } => EXIT_SINGULAR,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::input(format!("{}: {e}", path.display()))
}

fn load_problem(path: &Path, asym_tol: f64) -> Result<ProblemInstance, Failure> {
    let text = read(path)?;
    let file = ProblemFile::parse(&text).map_err(with_path(path))?;
    file.to_instance(asym_tol).map_err(with_path(path))
}

fn load_certificate(args: &CertArgs, p: &ProblemInstance) -> Result<CertificateConfig, Failure> {
    match (args.preset, &args.qtilde, &args.m) {
        (Some(PresetArg::Cr1), _, _) => Ok(preset_cr1(p, args.asym_tol)?),
        (Some(PresetArg::Cr2), _, _) => Ok(preset_cr2(p, args.asym_tol)?),
        (None, Some(qt), Some(m)) => {
            let load = |path: &PathBuf| {
                let text = read(path)?;
                MatrixFile::parse(&text).and_then(|f| f.to_hermitian(args.asym_tol)).map_err(with_path(path))
            };
            let (qt, m) = (load(qt)?, load(m)?);
            if qt.dim() != p.dim() || m.dim() != p.dim() {
                return Err(Failure::input(format!("certificate matrices must be {n}x{n}", n = p.dim())));
            }
            CertificateConfig::new(qt, m).map_err(|e| Failure::input(format!("certificate: {e}")))
        }
        _ => Err(Failure::input("one of --preset or --qtilde/--m is required")),
    }
}

fn settings(args: &SolveArgs) -> SolverSettings {
    let base = match args.fixed_iters {
        Some(n) => SolverSettings::fixed(n),
        None => SolverSettings { max_iter: args.max_iter, ..SolverSettings::default() },
    };
    SolverSettings {
        sweep: match args.sweep {
            SweepArg::Sequential => Sweep::Sequential,
            SweepArg::Simultaneous => Sweep::Simultaneous,
        },
        tol: args.tol,
        force: args.force,
        enclosure_slack: args.slack,
        record_history: true,
        ..base
    }
}

struct Clock {
    enabled: bool,
    phases: BTreeMap<String, f64>,
    last: Instant,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Self { enabled, phases: BTreeMap::new(), last: Instant::now() }
    }

    fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        self.phases.insert(phase.to_string(), (now - self.last).as_secs_f64());
        self.last = now;
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.phases)
    }
}

fn print_conditions(out: &mut String, r: &ConditionReport) {
    let _ = writeln!(out, "preset          {:?}", r.preset);
    let _ = writeln!(out, "hermitian_ab    {}", r.hermitian_ab);
    let _ = writeln!(out, "margin_a        {:.6e}", r.margin_a);
    let _ = writeln!(out, "margin_b        {:.6e}", r.margin_b);
    let _ = writeln!(out, "margin_c        {:.6e}", r.margin_c);
    let _ = writeln!(out, "margin_d_lower  {:.6e}", r.margin_d_lower);
    let _ = writeln!(out, "margin_d_upper  {:.6e}", r.margin_d_upper);
    let _ = writeln!(out, "delta           {:.6e}", r.delta);
    let _ = writeln!(out, "all_satisfied   {}", r.all_satisfied);
}

fn print_solve(out: &mut String, s: &SolveSummary) {
    let _ = writeln!(out, "status          {:?}", s.status);
    let _ = writeln!(out, "iterations      {}", s.iterations);
    let _ = writeln!(out, "E_n(X)          {:.6e}", s.e_x);
    let _ = writeln!(out, "E_n(Y)          {:.6e}", s.e_y);
    let _ = writeln!(out, "E_n             {:.6e}", s.e);
    let _ = writeln!(out, "eq_residual     {:.6e}", s.equation_residual);
    match s.a_priori_bound_final {
        Some(b) => {
            let _ = writeln!(out, "a_priori_bound  {b:.6e}");
        }
        None => {
            let _ = writeln!(out, "a_priori_bound  n/a (delta outside (0, 1))");
        }
    }
    let _ = writeln!(out, "enclosure_ok    {}", s.enclosure_ok);
    let _ = writeln!(out, "x_hat");
    for row in &s.x_hat {
        let cells: Vec<String> = row
            .iter()
            .map(|e| {
                let z = e.value();
                if z.im == 0.0 { format!("{:>14.6e}", z.re) } else { format!("{:>14.6e}{:+.6e}i", z.re, z.im) }
            })
            .collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
}

fn cmd_check(args: &CheckArgs, out: &mut String) -> CmdResult {
    let p = load_problem(&args.cert.input, args.cert.asym_tol)?;
    let c = load_certificate(&args.cert, &p)?;
    let r = check_theorem_with(&p, &c, args.cert.strict_tol, args.cert.asym_tol)?;
    print_conditions(out, &r);
    if let Some(path) = &args.report {
        let report = RunReport { condition_report: Some(r.clone()), ..RunReport::default() };
        write(path, &report.to_text())?;
    }
    Ok(if r.all_satisfied { EXIT_SUCCESS } else { EXIT_CONDITIONS })
}

fn cmd_solve(args: &SolveArgs, out: &mut String) -> CmdResult {
    let mut clock = Clock::new(!args.no_timings);
    let p = load_problem(&args.cert.input, args.cert.asym_tol)?;
    let c = load_certificate(&args.cert, &p)?;
    clock.lap("load");
    let s = settings(args);
    let r = solve_coupled(&p, &c, &s)?;
    clock.lap("solve");

    let summary = SolveSummary::from(&r);
    print_conditions(out, &r.conditions);
    print_solve(out, &summary);
    if let Some(path) = &args.history {
        write(path, &history_csv(&r.residual_history, None))?;
    }
    if let Some(path) = &args.report {
        let report = RunReport {
            condition_report: Some(r.conditions.clone()),
            solve_report: Some(summary),
            timings: clock.finish(),
            ..RunReport::default()
        };
        write(path, &report.to_text())?;
    }
    Ok(if r.converged { EXIT_SUCCESS } else { EXIT_NO_CONVERGENCE })
}

fn cmd_oracle(args: &OracleArgs, out: &mut String) -> CmdResult {
    let mut clock = Clock::new(!args.no_timings);
    let p = load_problem(&args.input, args.asym_tol)?;
    clock.lap("load");
    let r = solve_direct(&p)?;
    clock.lap("oracle");
    let summary = OracleSummary::from(&r);
    let _ = writeln!(out, "residual        {:.6e}", r.residual);
    let _ = writeln!(out, "hermiticity     {:.6e}", r.hermiticity_defect);
    let _ = writeln!(out, "rcond           {:.6e}", r.rcond);
    let _ = writeln!(out, "definite        {}", r.definite);
    if let Some(path) = &args.report {
        let report = RunReport { oracle: Some(summary), timings: clock.finish(), ..RunReport::default() };
        write(path, &report.to_text())?;
    }
    Ok(EXIT_SUCCESS)
}

fn cmd_compare(args: &SolveArgs, out: &mut String) -> CmdResult {
    let mut clock = Clock::new(!args.no_timings);
    let p = load_problem(&args.cert.input, args.cert.asym_tol)?;
    let c = load_certificate(&args.cert, &p)?;
    clock.lap("load");
    let cmp = compare_with_oracle(&p, &c, &settings(args))?;
    clock.lap("compare");

    let summary = SolveSummary::from(&cmp.solve);
    print_conditions(out, &cmp.solve.conditions);
    print_solve(out, &summary);
    let comparison = OracleComparison::from(&cmp);
    let _ = writeln!(out, "true_err_2      {:.6e}", comparison.true_error_spectral);
    let _ = writeln!(out, "true_err_1Q     {:.6e}", comparison.true_error_weighted);
    let _ = writeln!(out, "oracle_resid    {:.6e}", comparison.oracle_residual);
    if cmp.bound_checked {
        let _ = writeln!(out, "bound_holds     {}", cmp.bound_holds);
    } else {
        let _ = writeln!(out, "bound_holds     skipped (delta = {:.6e} outside (0, 1))", cmp.solve.delta);
    }
    if let Some(path) = &args.history {
        write(path, &history_csv(&cmp.solve.residual_history, Some(&cmp.per_iterate)))?;
    }
    if let Some(path) = &args.report {
        let report = RunReport {
            condition_report: Some(cmp.solve.conditions.clone()),
            solve_report: Some(summary),
            oracle: Some(OracleSummary::from(&cmp.oracle)),
            oracle_comparison: Some(comparison),
            timings: clock.finish(),
            ..RunReport::default()
        };
        write(path, &report.to_text())?;
    }
    Ok(if cmp.bound_checked && !cmp.bound_holds {
        EXIT_BOUND_VIOLATED
    } else if cmp.solve.converged {
        EXIT_SUCCESS
    } else {
        EXIT_NO_CONVERGENCE
    })
}

/// Parses `args` (including the program name), runs the command, writes
/// human-readable output to `stdout` and diagnostics to `stderr`, and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_SUCCESS };
        }
    };
    let mut out = String::new();
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, &mut out),
        Command::Solve(a) => cmd_solve(a, &mut out),
        Command::Oracle(a) => cmd_oracle(a, &mut out),
        Command::Compare(a) => cmd_compare(a, &mut out),
    };
    let _ = stdout.write_all(out.as_bytes());
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
