//! Command-line front end: run verification suites, print fundamental
//! decompositions, and list the built-in models.
//!
//! Exit codes: 0 when every verdict check passes, 1 when at least one check
//! fails, 2 for configuration or build errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use etafock::models::Params;
use etafock::suite::{
    decomposition_summary, list_models, load_model_file, run_suite, CheckKind, ModelRef, RunConfig,
    SuiteError, DEFAULT_SEED,
};

/// Environment variable naming a directory for report files when `--out`
/// is not given.
const REPORT_DIR_VAR: &str = "ETAFOCK_REPORT_DIR";

#[derive(Parser)]
#[command(
    name = "etafock",
    version,
    about = "Numerical verification of eta-canonical (anti)commutation relations on truncated Fock spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Print the fundamental decomposition of a model's metric.
    Decompose(DecomposeArgs),
    /// List the built-in models and their parameters.
    ListModels,
}

#[derive(Args)]
struct VerifyArgs {
    /// Built-in model name or path to a JSON model file.
    #[arg(long)]
    model: String,

    /// Model parameter as key=value (repeatable). `metric_tol` adjusts the
    /// metric validation tolerance.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,

    /// Total particle-number cutoff (defaults to the model's own).
    #[arg(long)]
    cutoff: Option<usize>,

    /// Override every check tolerance with a single value.
    #[arg(long)]
    tol: Option<f64>,

    /// Seed for the probe/sample/operator streams.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Comma-separated subset of checks to run
    /// (relations,adjoint,vacuum,cyclicity,decomposition,dagger-swap).
    #[arg(long)]
    checks: Option<String>,

    /// Write the report to this path as well as stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Built-in model name or path to a JSON model file.
    #[arg(long)]
    model: String,

    /// Total particle-number cutoff for the Fock-level summary.
    #[arg(long)]
    cutoff: Option<usize>,

    /// Model parameter as key=value (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

fn parse_params(items: &[String]) -> Result<Params, SuiteError> {
    let mut params = Params::new();
    for item in items {
        let Some((key, value)) = item.split_once('=') else {
            return Err(SuiteError::ConfigInvalid(format!(
                "parameter `{item}` is not of the form key=value"
            )));
        };
        let value: f64 = value.parse().map_err(|_| {
            SuiteError::ConfigInvalid(format!("parameter `{key}` has a non-numeric value"))
        })?;
        params.insert(key.to_string(), value);
    }
    Ok(params)
}

fn parse_checks(arg: Option<&str>) -> Result<Option<Vec<CheckKind>>, SuiteError> {
    match arg {
        None => Ok(None),
        Some(list) => {
            let mut kinds = Vec::new();
            for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                kinds.push(CheckKind::parse(name)?);
            }
            if kinds.is_empty() {
                return Err(SuiteError::ConfigInvalid("empty check list".into()));
            }
            Ok(Some(kinds))
        }
    }
}

/// A `--model` value names a registry entry unless it points at a file.
fn model_ref(value: &str) -> ModelRef {
    if etafock::models::MODEL_NAMES.contains(&value) {
        ModelRef::Name(value.to_string())
    } else {
        ModelRef::File(PathBuf::from(value))
    }
}

/// Writes to stdout, dying quietly with the conventional SIGPIPE status
/// when the consumer has closed the pipe (e.g. `etafock list-models | head`).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(err) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
        eprintln!("error: {err}");
        std::process::exit(2);
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, SuiteError> {
    let config = RunConfig {
        model: model_ref(&args.model),
        params: parse_params(&args.params)?,
        cutoff: args.cutoff,
        tol: args.tol,
        seed: args.seed,
        checks: parse_checks(args.checks.as_deref())?,
        basis_cap: None,
    };
    if let ModelRef::File(path) = &config.model {
        if !path.exists() {
            return Err(SuiteError::UnknownModel(args.model.clone()));
        }
    }
    let report = run_suite(&config)?;
    let json = report.to_json();
    emit(&json);
    if let Some(out) = &args.out {
        std::fs::write(out, &json)?;
    } else if let Ok(dir) = std::env::var(REPORT_DIR_VAR) {
        let dir = PathBuf::from(dir);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join(format!("{}.json", report.model.name)), &json)?;
    }
    Ok(report.passed())
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<(), SuiteError> {
    let params = parse_params(&args.params)?;
    let spec = match model_ref(&args.model) {
        ModelRef::Name(name) => etafock::models::build_model(&name, &params)?,
        ModelRef::File(path) => {
            if !path.exists() {
                return Err(SuiteError::UnknownModel(args.model.clone()));
            }
            load_model_file(&path)?
        }
    };
    let cutoff = args.cutoff.unwrap_or(spec.cutoff);
    emit(&decomposition_summary(&spec, cutoff, None)?);
    Ok(())
}

fn cmd_list_models() {
    let mut text = String::new();
    for info in list_models() {
        text.push_str(&format!("{}\n", info.name));
        text.push_str(&format!("  statistics: {}\n", info.statistics));
        text.push_str(&format!("  params:     {}\n", info.params));
        text.push_str(&format!("  relation:   {}\n", info.anchor));
    }
    emit(&text);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Decompose(args) => cmd_decompose(args).map(|()| true),
        Command::ListModels => {
            cmd_list_models();
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
