//! `opcone`: evaluate, convert and verify operator connections from the
//! command line.
//!
//! Exit codes: 0 success, 1 a verification property failed, 2 parse or
//! usage error, 3 dimension mismatch, 4 numeric failure, 5 unsupported
//! inversion.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use opcone::connections::NamedMean;
use opcone::matcore::{format_matrix, read_matrix_file, PsdMatrix};
use opcone::measures::{QuadSpec, DEFAULT_NODES};
use opcone::specs::{function_spec, parse_connection};
use opcone::verify::{format_csv, format_text, run_suite, Suite, TrialConfig};
use opcone::{Connection, Error};

#[derive(Parser)]
#[command(
    name = "opcone",
    version,
    about = "Operator connections on positive semidefinite matrices"
)]
struct Cli {
    /// Gauss-Legendre nodes for measure integrals.
    #[arg(long, global = true, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print A σ B in the matrix file format.
    Eval {
        #[arg(long)]
        spec: String,
        #[arg(long = "A", value_name = "PATH")]
        a: PathBuf,
        #[arg(long = "B", value_name = "PATH")]
        b: PathBuf,
    },
    /// Print the norm ‖σ‖.
    Norm {
        #[arg(long)]
        spec: String,
    },
    /// Print the representing function or measure of σ as spec text.
    Convert {
        #[arg(value_enum)]
        target: Target,
        #[arg(long)]
        spec: String,
    },
    /// Run a verification suite; exits 1 if any property fails.
    Verify {
        #[arg(default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Dimension range `lo:hi`.
        #[arg(long, default_value = "1:6")]
        dims: String,
        /// Tolerance override, repeatable.
        #[arg(long, value_name = "NAME=VALUE")]
        tol: Vec<String>,
    },
    /// List the closed-form connections with their functions and measures.
    Catalog,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Function,
    Measure,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) => 2,
        Error::DimensionMismatch { .. } => 3,
        Error::UnsupportedInversion(_) => 5,
        _ => 4,
    }
}

fn read_psd(path: &Path) -> opcone::Result<PsdMatrix<f64>> {
    PsdMatrix::try_from(read_matrix_file::<f64>(path)?)
}

fn connection(spec: &str, quad: &QuadSpec<f64>) -> opcone::Result<Connection> {
    parse_connection(spec, quad)
}

fn parse_dims(text: &str) -> opcone::Result<(usize, usize)> {
    let bad = || Error::Parse(format!("--dims expects lo:hi, got `{text}`"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn config(
    seed: u64,
    trials: usize,
    dims: &str,
    tol: &[String],
    nodes: usize,
) -> opcone::Result<TrialConfig> {
    let (lo, hi) = parse_dims(dims)?;
    let mut cfg = TrialConfig::new(lo, hi, trials, seed).map_err(usage)?;
    cfg.nodes = nodes;
    for t in tol {
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--tol expects NAME=VALUE, got `{t}`")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Parse(format!("bad tolerance value `{value}`")))?;
        cfg.tol.set(name.trim(), value).map_err(usage)?;
    }
    Ok(cfg)
}

/// Bad flag values are usage errors.
fn usage(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) => Error::Parse(m),
        e => e,
    }
}

fn catalog(quad: &QuadSpec<f64>) -> opcone::Result<String> {
    let mut out = String::new();
    for m in NamedMean::ALL {
        let c = Connection::named(m);
        let f = function_spec(&c.representing_function())?;
        let mu = c
            .representing_measure_with(quad)?
            .to_string()
            .replace('\n', "; ");
        out.push_str(&format!("{}\tf: {f}\tmu: {mu}\n", m.spec()));
    }
    Ok(out)
}

/// Output text and whether every verified property passed.
fn run(cli: &Cli) -> opcone::Result<(String, bool)> {
    let quad = QuadSpec::<f64>::new(cli.nodes).map_err(usage)?;
    Ok(match &cli.command {
        Command::Eval { spec, a, b } => {
            let sigma = connection(spec, &quad)?;
            let out = sigma.evaluate(&read_psd(a)?, &read_psd(b)?)?;
            (format_matrix(out.as_hermitian()), true)
        }
        Command::Norm { spec } => (
            format!("{:.12}\n", connection(spec, &quad)?.norm()?.value),
            true,
        ),
        Command::Convert { target, spec } => {
            let sigma = connection(spec, &quad)?;
            let text = match target {
                Target::Function => function_spec(&sigma.representing_function())?,
                Target::Measure => sigma.representing_measure_with(&quad)?.to_string(),
            };
            (text + "\n", true)
        }
        Command::Verify {
            suite,
            format,
            seed,
            trials,
            dims,
            tol,
        } => {
            let cfg = config(*seed, *trials, dims, tol, cli.nodes)?;
            let suite = Suite::from_name(suite)
                .ok_or_else(|| Error::Parse(format!("unknown suite `{suite}`")))?;
            let reports = run_suite::<f64>(suite, &cfg);
            let text = match format {
                Format::Text => format_text(&reports),
                Format::Csv => format_csv(&reports)?,
            };
            (text, reports.iter().all(|r| r.passed))
        }
        Command::Catalog => (catalog(&quad)?, true),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, passed)| {
        match &cli.out {
            Some(path) => std::fs::write(path, &text)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("opcone: some properties failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("opcone: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
