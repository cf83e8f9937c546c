use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nonlocal_cli::{run, Command, Format, RunConfig, EXIT_USAGE};

/// Numerical verification suites for fractional Hessians, Pucci operators
/// and the radial counterexample family.
#[derive(Parser, Debug)]
#[command(name = "nonlocal", version)]
struct Args {
    /// Suite to run [default: constants]
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(Command::ALL.map(Command::name)))]
    command: Option<String>,
    /// Dimension [default: 2]
    #[arg(long)]
    n: Option<usize>,
    /// Order of the operator, 0 < sigma < 2 [default: 1.6]
    #[arg(long)]
    sigma: Option<f64>,
    /// Lower ellipticity constant [default: 1]
    #[arg(long)]
    lambda: Option<f64>,
    /// Upper ellipticity constant [default: 4]
    #[arg(long = "Lambda")]
    big_lambda: Option<f64>,
    /// Absolute quadrature tolerance [default: 1e-4]
    #[arg(long)]
    tol: Option<f64>,
    /// Counterexample ladder, comma separated [default: 16,64,256,1024]
    #[arg(long = "N", value_delimiter = ',')]
    big_n: Option<Vec<u64>>,
    /// Integrability exponent for abp-check [default: p0 + 0.3]
    #[arg(long)]
    p: Option<f64>,
    /// Write the report to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or json [default: csv]
    #[arg(long)]
    format: Option<String>,
    /// Seed for sampled checks [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with a full run configuration; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_config(args: Args) -> Result<RunConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(c) = args.command.as_deref().and_then(Command::parse) {
        cfg.command = c;
    }
    if let Some(v) = args.n {
        cfg.params.n = v;
    }
    if let Some(v) = args.sigma {
        cfg.params.sigma = v;
    }
    if let Some(v) = args.lambda {
        cfg.params.lambda = v;
    }
    if let Some(v) = args.big_lambda {
        cfg.params.big_lambda = v;
    }
    if let Some(v) = args.tol {
        cfg.spec.tol = v;
    }
    if let Some(v) = args.big_n {
        cfg.ladder = v;
    }
    if args.p.is_some() {
        cfg.p = args.p;
    }
    if args.out.is_some() {
        cfg.output_path = args.out;
    }
    if let Some(f) = args.format {
        cfg.format = match f.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(format!("unknown format '{other}', expected csv or json")),
        };
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE as u8) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = match build_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            print!("{}", report.table());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
