use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qhahn_cli::export::{compute, parse_params, render, Format, What};
use qhahn_cli::{run, CliError, CliResult, PanelConfig, EXIT_CONFIG};
use qhahn_core::operators::Basis;

#[derive(Parser)]
#[command(name = "qhahn", version, about = "Exact checks and exports for q-Hahn biorthogonal rational functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Point,
    Phi,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites over a panel file and write a JSON report.
    ///
    /// Exit status: 0 when every check passes (skips allowed), 1 when a
    /// check fails, 2 on a configuration error.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Suite to run (repeatable); overrides the file's `suites`.
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
        /// Report path; defaults to the file's `output`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a matrix, a function U_n or the weight in exact form.
    Export {
        #[arg(long, value_enum)]
        what: What,
        /// Operator (X, Y, Z, V) for matrices, index n for brf.
        #[arg(long)]
        which: Option<String>,
        /// Parameters as q,A,B,N with exact rationals, e.g. 1/2,32,1/512,3.
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, value_enum, default_value = "point")]
        basis: BasisArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(config: &Path, suites: &[String], out: Option<PathBuf>) -> CliResult<u8> {
    let cfg = PanelConfig::load(config)?;
    let selected = cfg.select(suites)?;
    let report = run(&cfg, &selected);
    write_out(out.or(cfg.output.clone()).as_deref(), &report.to_json_string())?;
    let checks = report.instances.iter().map(|i| i.checks.len()).sum::<usize>();
    eprintln!(
        "qhahn verify: {} instances, {checks} checks, {} failed ({:.2}s)",
        report.instances.len(),
        report.failures(),
        report.seconds
    );
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { config, suites, out } => verify(&config, &suites, out),
        Command::Export { what, which, params, format, basis, out } => (|| {
            let p = parse_params(&params)?;
            let basis = match basis {
                BasisArg::Point => Basis::Point,
                BasisArg::Phi => Basis::Phi,
            };
            let e = compute(what, which.as_deref(), basis, &p)?;
            write_out(out.as_deref(), &render(&e, &p, format))?;
            Ok(0)
        })(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qhahn: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
