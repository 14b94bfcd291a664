use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dstrans_core::{
    norm2_estimate, sigma_from_scaled, spectral_trans_eig_with, standard_cholesky_eig, Error,
    NormSettings, PencilNorms, SpectralOptions, SpectralResult, StandardResult, SymMatrix,
};

use crate::error::{CliError, Result};
use crate::mm::{read_matrix_market, write_matrix_market};
use crate::modify::modify_mass_matrix;
use crate::report::{
    build_rows, write_compare_csv, write_csv, BestResiduals, DiagnosticsReport, ReportRow,
};

#[derive(Debug, Parser)]
#[command(name = "dstrans", version, about = "Dense shift-and-invert solver for beta A v = alpha B v")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve with the spectral transformation at one shift.
    Solve(SolveArgs),
    /// Solve with the Cholesky-based reference method (B must be definite).
    Standard(StandardArgs),
    /// Run both methods and write one joined CSV.
    Compare(SolveArgs),
    /// Add exp(-0.02 (n - k + 1)) ||B0||_2 to each diagonal entry of B0.
    Modify(ModifyArgs),
}

#[derive(Debug, Args)]
pub struct PencilArgs {
    #[arg(long, value_name = "PATH")]
    pub matrix_a: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub matrix_b: PathBuf,
    /// CSV output; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// all, none or sample:K
    #[arg(long, default_value = "none", value_name = "MODE")]
    pub best_residuals: BestResiduals,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("shift_choice").required(true))]
pub struct SolveArgs {
    #[command(flatten)]
    pub pencil: PencilArgs,
    #[arg(long, group = "shift_choice", allow_negative_numbers = true)]
    pub shift: Option<f64>,
    /// sigma0 = sigma ||B||_2 / ||A||_2
    #[arg(long, group = "shift_choice", allow_negative_numbers = true)]
    pub scaled_shift: Option<f64>,
    #[arg(long, default_value_t = 1e4)]
    pub etax_max: f64,
    /// Relative truncation tolerance for the pivoted Cholesky of B.
    #[arg(long, default_value_t = 0.0)]
    pub cholesky_tol: f64,
    #[arg(long, value_name = "PATH")]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StandardArgs {
    #[command(flatten)]
    pub pencil: PencilArgs,
}

#[derive(Debug, Args)]
pub struct ModifyArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Standard(args) => cmd_standard(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Modify(args) => cmd_modify(&args),
    }
}

fn load_pencil(p: &PencilArgs) -> Result<(SymMatrix, SymMatrix)> {
    let a = read_matrix_market(&p.matrix_a)?;
    let b = read_matrix_market(&p.matrix_b)?;
    if a.n() != b.n() {
        return Err(CliError::Core(Error::DimensionMismatch { expected: a.n(), found: b.n() }));
    }
    Ok((a, b))
}

fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| CliError::io(p, e))
        }
        None => f(&mut io::stdout().lock()),
    }
}

/// Shift-and-invert solve plus report rows.
pub struct SolveOutcome {
    pub result: SpectralResult,
    pub rows: Vec<ReportRow>,
    pub report: DiagnosticsReport,
}

pub fn solve_pencil(
    a: &SymMatrix,
    b: &SymMatrix,
    args: &SolveArgs,
) -> Result<SolveOutcome> {
    let norms = NormSettings::default();
    let sigma = match (args.shift, args.scaled_shift) {
        (Some(s), None) => s,
        (None, Some(s0)) => sigma_from_scaled(a, b, s0, norms)?.sigma,
        _ => return Err(CliError::Usage("exactly one of --shift, --scaled-shift".into())),
    };
    if !sigma.is_finite() {
        return Err(CliError::Usage("shift must be finite".into()));
    }
    let opts = SpectralOptions { etax_max: args.etax_max, norms, cholesky_tol: args.cholesky_tol };
    let result = spectral_trans_eig_with(a, b, sigma, &opts)?;
    let d = &result.diagnostics;
    let pn = PencilNorms { a: d.norm_a.value, b: d.norm_b.value };
    let rows = build_rows(
        a,
        b,
        pn,
        &result.pairs,
        &result.v,
        Some(sigma),
        args.pencil.best_residuals,
    )?;
    let report = DiagnosticsReport::new(d, result.rank, a.n(), args.etax_max, args.cholesky_tol);
    Ok(SolveOutcome { result, rows, report })
}

/// Reference-method solve plus report rows.
pub fn standard_pencil(
    a: &SymMatrix,
    b: &SymMatrix,
    best: BestResiduals,
) -> Result<(StandardResult, Vec<ReportRow>)> {
    let res = standard_cholesky_eig(a, b).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => CliError::StandardInapplicable(e),
        other => CliError::Core(other),
    })?;
    let ns = NormSettings::default();
    let pn = PencilNorms {
        a: norm2_estimate(a, ns.tol, ns.max_iter).value,
        b: norm2_estimate(b, ns.tol, ns.max_iter).value,
    };
    let rows = build_rows(a, b, pn, &res.pairs, &res.v, None, best)?;
    Ok((res, rows))
}

fn write_diagnostics(path: Option<&Path>, report: &DiagnosticsReport) -> Result<()> {
    if let Some(p) = path {
        let file = File::create(p).map_err(|e| CliError::io(p, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, report)?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(p, e))?;
    }
    Ok(())
}

fn summary(report: &DiagnosticsReport, rows: &[ReportRow]) {
    let negatives = rows.iter().filter(|r| r.negative).count();
    eprintln!(
        "sigma {:e} (sigma0 {:e}), rank {} of {}, etaX {:e}, negative eigenvalues {}",
        report.sigma, report.sigma0, report.rank_r, report.n, report.etax, negatives
    );
}

pub fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let (a, b) = load_pencil(&args.pencil)?;
    let out = solve_pencil(&a, &b, args)?;
    with_output(args.pencil.out.as_deref(), |w| write_csv(w, &out.rows))?;
    write_diagnostics(args.diagnostics.as_deref(), &out.report)?;
    summary(&out.report, &out.rows);
    Ok(())
}

pub fn cmd_standard(args: &StandardArgs) -> Result<()> {
    let (a, b) = load_pencil(&args.pencil)?;
    let (_, rows) = standard_pencil(&a, &b, args.pencil.best_residuals)?;
    with_output(args.pencil.out.as_deref(), |w| write_csv(w, &rows))
}

pub fn cmd_compare(args: &SolveArgs) -> Result<()> {
    let (a, b) = load_pencil(&args.pencil)?;
    let out = solve_pencil(&a, &b, args)?;
    let (_, std_rows) = standard_pencil(&a, &b, args.pencil.best_residuals)?;
    with_output(args.pencil.out.as_deref(), |w| {
        write_compare_csv(w, &[("spectral", &out.rows), ("standard", &std_rows)])
    })?;
    write_diagnostics(args.diagnostics.as_deref(), &out.report)?;
    summary(&out.report, &out.rows);
    Ok(())
}

pub fn cmd_modify(args: &ModifyArgs) -> Result<()> {
    let b0 = read_matrix_market(&args.input)?;
    let b = modify_mass_matrix(&b0, NormSettings::default())?;
    write_matrix_market(&args.out, &b)
}
