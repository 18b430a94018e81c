use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pattern_forge::RenderOptions;
use pattern_forge_cli::{self as cli, CliError};

/// Declarative texture patterns: render, measure and check pattern specs.
///
/// Exit codes: 0 success, 1 rejected spec or failed check (JSON on stderr), 2 I/O error.
#[derive(Parser)]
#[command(name = "pattern-forge", version)]
struct Cli {
    /// Seed override for every spec (wins over the spec's own seed).
    #[arg(long, global = true, env = "PATTERN_FORGE_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Pattern spec JSON file.
    spec: PathBuf,
    /// Host symbol: `rect:W×H` or a host JSON file.
    #[arg(long, default_value = "rect:100x100")]
    host: String,
    /// Records for a data-driven spec (CSV with header, or JSON array).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Coordinate columns of `--data`.
    #[arg(long, default_value = "x")]
    x_col: String,
    #[arg(long, default_value = "y")]
    y_col: String,
}

impl Input {
    fn load(&self) -> Result<(pattern_forge::PatternSpec, pattern_forge::HostSymbol), CliError> {
        let mut spec = cli::load_spec(&self.spec)?;
        if let Some(data) = &self.data {
            cli::attach_data(&mut spec, data, &self.x_col, &self.y_col)?;
        }
        Ok((spec, cli::load_host(&self.host)?))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Render a spec to SVG.
    Render {
        #[command(flatten)]
        input: Input,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        padding: f64,
        /// Decimal places for coordinates.
        #[arg(long, default_value_t = 3)]
        precision: usize,
    },
    /// Print ink ratio, regional shade and solid-fill flag as JSON.
    Metrics {
        #[command(flatten)]
        input: Input,
        /// Samples per pixel axis: 1, 2, 4 or 8.
        #[arg(long, default_value_t = 4)]
        supersample: u32,
    },
    /// Parse a spec and print design warnings for the host.
    Validate {
        spec: PathBuf,
        #[arg(long)]
        host: Option<String>,
        /// Print the canonical form instead of the report.
        #[arg(long)]
        canonical: bool,
    },
    /// Compare the ink ratio of two specs on one host.
    CheckPreserve {
        spec_a: PathBuf,
        spec_b: PathBuf,
        #[arg(long, default_value = "rect:100x100")]
        host: String,
        #[arg(long, default_value_t = 0.005)]
        tol: f64,
        #[arg(long, default_value_t = 4)]
        supersample: u32,
    },
    /// Render the gallery, check every entry and write an HTML index.
    Gallery {
        #[arg(long, default_value = "gallery-out")]
        out: PathBuf,
        /// Manifest file; the bundled gallery when omitted.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Serve POST /render, POST /metrics and GET /schema.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8717")]
        addr: String,
    },
}

fn json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = cli.seed;
    match cli.command {
        Command::Render {
            input,
            out,
            padding,
            precision,
        } => {
            let (spec, host) = input.load()?;
            let opts = RenderOptions {
                padding,
                precision,
                ..RenderOptions::default()
            };
            let svg = cli::render(&spec, &host, seed, &opts)?;
            cli::write_output(out.as_deref(), svg.as_bytes())
        }
        Command::Metrics { input, supersample } => {
            let (spec, host) = input.load()?;
            let m = cli::metrics(&spec, &host, seed, supersample)?;
            cli::write_output(None, json(&m).as_bytes())
        }
        Command::Validate { spec, host, canonical } => {
            let spec = cli::load_spec(&spec)?;
            if canonical {
                return cli::write_output(None, (pattern_forge::to_canonical_json(&spec) + "\n").as_bytes());
            }
            let host = host.as_deref().map(cli::load_host).transpose()?;
            cli::write_output(None, json(&cli::validate(&spec, host.as_ref())).as_bytes())
        }
        Command::CheckPreserve {
            spec_a,
            spec_b,
            host,
            tol,
            supersample,
        } => {
            let (a, b) = (cli::load_spec(&spec_a)?, cli::load_spec(&spec_b)?);
            let host = cli::load_host(&host)?;
            let report = cli::check_preserve(&a, &b, &host, tol, seed, supersample)?;
            cli::write_output(None, json(&report).as_bytes())
        }
        Command::Gallery { out, manifest } => {
            let report = cli::gallery(&out, manifest.as_deref(), seed)?;
            let passed = report.entries.iter().filter(|e| e.passed).count();
            let summary = format!("{passed} of {} entries pass; index at {}\n", report.entries.len(), out.join("index.html").display());
            cli::write_output(None, summary.as_bytes())?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::Failed(cli::gallery_failures(&report)))
            }
        }
        Command::Serve { addr } => cli::serve::run(&addr, seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = e.report();
            eprintln!("{}", report.trim_end());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
