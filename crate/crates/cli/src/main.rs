#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the checks

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qspec_core::{QContext, Window};

mod commands;
mod report;

use report::Output;

/// Spectral theory of the Stieltjes-Wigert q-difference operator.
#[derive(Parser, Debug)]
#[command(name = "qspec", version)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// base q in (0, 1)
    #[arg(long, global = true, default_value_t = 0.5)]
    pub q: f64,

    /// lattice base point t > 0
    #[arg(long, global = true, default_value_t = 1.0)]
    pub t: f64,

    /// series stopping tolerance
    #[arg(long, global = true, default_value_t = QContext::DEFAULT_TOL)]
    pub tol: f64,

    /// lattice window lower end (negative)
    #[arg(long, global = true, default_value_t = QContext::DEFAULT_WINDOW.kmin, allow_hyphen_values = true)]
    pub kmin: i64,

    /// lattice window upper end (positive)
    #[arg(long, global = true, default_value_t = QContext::DEFAULT_WINDOW.kmax)]
    pub kmax: i64,

    #[arg(long, global = true, value_enum, default_value_t = Output::Pretty)]
    pub output: Output,
}

impl Global {
    pub fn context(&self) -> Result<QContext> {
        let ctx = QContext::new(self.q)
            .and_then(|c| c.with_tol(self.tol))
            .and_then(|c| c.with_window(Window::new(self.kmin, self.kmax)))
            .context("invalid --q/--tol/--kmin/--kmax")?;
        if !(self.t > 0.0 && self.t.is_finite()) {
            bail!("--t must be positive");
        }
        Ok(ctx)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an eigenfunction or spectral quantity on a grid
    Eval(commands::EvalArgs),
    /// Run verification suites; exits 1 if any check fails
    Verify(commands::VerifyArgs),
    /// Finite-section eigenvalues against the theoretical point spectrum
    Spectrum(commands::SpectrumArgs),
    /// Expand a basis vector e_k in the eigenbasis of J_t
    Expand(commands::ExpandArgs),
    /// Both sides of the Plancherel identity for a test function
    Plancherel(commands::PlancherelArgs),
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("QSPEC_THREADS") {
        let n: usize = v
            .parse()
            .context("QSPEC_THREADS must be a positive integer")?;
        if n == 0 {
            bail!("QSPEC_THREADS must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    let g = &cli.global;
    let ctx = g.context()?;
    let (report, ok) = match &cli.command {
        Command::Eval(a) => (commands::eval(g, &ctx, a)?, true),
        Command::Verify(a) => commands::verify(g, &ctx, a)?,
        Command::Spectrum(a) => (commands::spectrum(g, &ctx, a)?, true),
        Command::Expand(a) => (commands::expand(g, &ctx, a)?, true),
        Command::Plancherel(a) => (commands::plancherel(g, &ctx, a)?, true),
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    report.write(g.output, &mut lock)?;
    lock.flush()?;
    Ok(ok)
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let kind = c
            .downcast_ref::<io::Error>()
            .map(io::Error::kind)
            .or_else(|| {
                c.downcast_ref::<serde_json::Error>()
                    .and_then(|j| j.io_error_kind())
            });
        kind == Some(io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
