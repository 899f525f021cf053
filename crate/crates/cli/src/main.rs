use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use confspace::ce::{CeEngine, CeError, MAX_SLICE_DIM};
use confspace::lie::build_lie_model;
use confspace::oracle::{run_oracle_suite_with, SuiteError};
use confspace::stability::{verify_stability, StabilityError, Verdict};
use confspace::Exec;

mod cache;
mod manifold;
mod render;

use manifold::{resolve_manifold, resolve_variant, VariantArg};
use render::Format;

#[derive(Parser)]
#[command(name = "confspace", version, about = "Rational Betti numbers of unordered configuration spaces")]
struct Cli {
    /// Evaluate on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ManifoldArgs {
    /// Preset name or path to a model file.
    #[arg(long, short)]
    manifold: String,
    /// Preset parameters, `key=value[,key=value]`.
    #[arg(long, value_delimiter = ',')]
    param: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers of B_k(M).
    Betti {
        #[command(flatten)]
        manifold: ManifoldArgs,
        /// A weight `k` or an inclusive range `a..b`.
        #[arg(long, value_parser = parse_k_spec)]
        k: (usize, usize),
        #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Print every degree up to the top of the complex, zeros included.
        #[arg(long)]
        dense: bool,
        /// Report Chevalley-Eilenberg degrees instead of space degrees.
        #[arg(long)]
        raw_degrees: bool,
        /// Largest number of monomials allowed in one weight.
        #[arg(long, default_value_t = MAX_SLICE_DIM)]
        max_slice_dim: usize,
    },
    /// Check the stable range of H_*(B_{k+1}) -> H_*(B_k).
    Stability {
        #[command(flatten)]
        manifold: ManifoldArgs,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compare the pipeline against the independent oracles.
    Check {
        #[command(flatten)]
        manifold: ManifoldArgs,
        #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
        variant: VariantArg,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// List the built-in manifolds.
    Presets {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Keep presets whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
}

fn parse_k_spec(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a weight"));
    match s.split_once("..") {
        None => parse(s).map(|k| (k, k)),
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok((a, b))
        }
    }
}

/// A failed run and its exit code.
pub enum Failure {
    /// 1: a stability violation or an oracle disagreement; the report is
    /// already on stdout.
    Violation,
    /// 2: bad input or unmet preconditions.
    Invalid(String),
    /// 3: a slice larger than the cap.
    Cap(String),
}

impl From<CeError> for Failure {
    fn from(e: CeError) -> Self {
        match e {
            CeError::SliceTooLarge { .. } => Failure::Cap(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<StabilityError> for Failure {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Ce(inner) => inner.into(),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<SuiteError> for Failure {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Ce(inner) => inner.into(),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let mut out = String::new();
    match cli.command {
        Command::Betti {
            manifold,
            k: (lo, hi),
            variant,
            format,
            dense,
            raw_degrees,
            max_slice_dim,
        } => {
            let model = resolve_manifold(&manifold.manifold, &manifold.param)?;
            let variant = resolve_variant(&model, variant)?;
            let lm = build_lie_model(&model, variant).map_err(|e| Failure::Invalid(e.to_string()))?;
            let engine = CeEngine::new(lm).with_exec(exec).with_max_slice_dim(max_slice_dim);
            let ks: Vec<usize> = (lo..=hi).collect();
            let rows = cache::betti_rows(&engine, &model, &ks)?;
            let opts = render::BettiOptions { dense, raw_degrees };
            let lm = engine.lie_model();
            out = render::betti(&model.name, lm.variant, lm.degree_offset_per_weight, &rows, opts, format);
        }
        Command::Stability { manifold, kmax, format } => {
            let model = resolve_manifold(&manifold.manifold, &manifold.param)?;
            let lm = build_lie_model(&model, confspace::lie::Variant::Standard)
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            let engine = CeEngine::new(lm).with_exec(exec);
            let report = verify_stability(&engine, kmax)?;
            print!("{}", render::stability(&model.name, &report, format));
            if report.verdict == Verdict::Fail {
                return Err(Failure::Violation);
            }
        }
        Command::Check {
            manifold,
            variant,
            kmax,
            format,
        } => {
            let model = resolve_manifold(&manifold.manifold, &manifold.param)?;
            let variant = resolve_variant(&model, variant)?;
            let lm = build_lie_model(&model, variant).map_err(|e| Failure::Invalid(e.to_string()))?;
            let engine = CeEngine::new(lm).with_exec(exec);
            let outcomes = run_oracle_suite_with(&engine, &model, kmax)?;
            print!("{}", render::check(&outcomes, format));
            if outcomes.iter().any(|o| !o.agree) {
                return Err(Failure::Violation);
            }
        }
        Command::Presets { format, filter } => {
            out = render::presets(filter.as_deref(), format);
        }
    }
    print!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Invalid(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}
