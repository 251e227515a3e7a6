//! `levyq`: best atomic approximations under the ε-Lévy metric.

mod commands;
mod input;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levyq::{LevyError, Result};

use crate::output::Output;

/// Environment variable capping the worker thread count.
const THREADS_VAR: &str = "LEVYQ_THREADS";

#[derive(Parser)]
#[command(
    name = "levyq",
    version,
    about = "Best atomic approximations of probability measures under the ε-Lévy metric"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write data here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Suppress the human-readable summary on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Best,
    Uniform,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Best => "best",
            Mode::Uniform => "uniform",
        }
    }
}

#[derive(Args)]
struct Common {
    /// Distribution: shorthand such as `exp(1)`, inline JSON, a JSON file or
    /// a `location,mass` CSV file.
    #[arg(long, short)]
    spec: String,
    /// Metric parameter ε > 0.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between a spec and an explicit atomic measure.
    Dist {
        #[command(flatten)]
        common: Common,
        /// `{"atoms": [{"x": .., "p": ..}]}`, inline or a file path.
        #[arg(long)]
        atoms: String,
    },
    /// Best n-atom approximation.
    Best {
        #[command(flatten)]
        common: Common,
        #[arg(long, short)]
        n: usize,
    },
    /// Best n-atom approximation with equal weights.
    Uniform {
        #[command(flatten)]
        common: Common,
        #[arg(long, short)]
        n: usize,
    },
    /// Errors over a range of n with limit predictions.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `N`, `a,b,c`, `a..b`, `a..b+k` or `a..b*k`.
        #[arg(long, short)]
        n: String,
        #[arg(long, value_enum, default_value_t = Mode::Best)]
        mode: Mode,
    },
    /// Asymptotic constants; second-order predictions at `--n` if given.
    Limits {
        #[command(flatten)]
        common: Common,
        #[arg(long, short)]
        n: Option<usize>,
    },
    /// Limiting point density next to the atom histogram at n.
    Density {
        #[command(flatten)]
        common: Common,
        /// `lo..hi`; defaults to the 0.001 and 0.999 quantiles.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, short, default_value_t = 200)]
        n: usize,
    },
    /// Compare the solver with a brute-force grid search for n ≤ 3.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Grid resolution in x and in cumulative weight.
        #[arg(long, default_value_t = 1e-4)]
        resolution: f64,
        /// Largest admissible oracle − solver gap.
        #[arg(long, default_value_t = 2e-4)]
        tolerance: f64,
    },
}

fn exit_code(e: &LevyError) -> u8 {
    match e {
        LevyError::Parse(_) | LevyError::InvalidParameter(_) => 2,
        LevyError::NumericalIntegrity(_) => 3,
        LevyError::Unsupported(_) | LevyError::CandidateCap { .. } => 4,
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(LevyError::InvalidParameter(format!("ε must be positive and finite, got {eps}")))
    }
}

/// Runs the command; `Ok(false)` signals a verification violation.
fn run(command: Command, notes: &mut Vec<String>) -> Result<(Output, bool)> {
    let spec_of = |c: &Common| -> Result<_> {
        check_eps(c.eps)?;
        input::spec(&c.spec)
    };
    match command {
        Command::Dist { common, atoms } => {
            let spec = spec_of(&common)?;
            let (nu, warning) = input::atoms(&atoms)?;
            notes.extend(warning);
            Ok((commands::dist(&spec, &nu, common.eps)?, true))
        }
        Command::Best { common, n } => Ok((commands::solve("best", &spec_of(&common)?, n, common.eps)?, true)),
        Command::Uniform { common, n } => Ok((commands::solve("uniform", &spec_of(&common)?, n, common.eps)?, true)),
        Command::Sweep { common, n, mode } => {
            let spec = spec_of(&common)?;
            let ns = input::n_values(&n)?;
            Ok((commands::sweep(mode.name(), &spec, &ns, common.eps)?, true))
        }
        Command::Limits { common, n } => {
            let (out, skipped) = commands::limits(&spec_of(&common)?, common.eps, n)?;
            notes.extend(skipped);
            Ok((out, true))
        }
        Command::Density { common, x, points, n } => {
            let spec = spec_of(&common)?;
            let range = x.as_deref().map(input::x_range).transpose()?;
            Ok((commands::density(&spec, common.eps, range, points, n)?, true))
        }
        Command::Verify { common, n_max, resolution, tolerance } => {
            let spec = spec_of(&common)?;
            commands::verify(&spec, common.eps, n_max, resolution, tolerance)
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn emit(out: &Output, format: Format, path: Option<&PathBuf>) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Json => out.write_json(&mut sink)?,
        Format::Csv => out.write_csv(&mut sink)?,
    }
    sink.flush()
}

fn main() -> ExitCode {
    let Cli { format, output, quiet, command } = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let mut notes = Vec::new();
    let result = run(command, &mut notes);
    for note in &notes {
        eprintln!("{note}");
    }
    let (out, ok) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = emit(&out, format, output.as_ref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if !quiet {
        for line in &out.summary {
            eprintln!("{line}");
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: solver and oracle disagree beyond tolerance");
        ExitCode::from(1)
    }
}
