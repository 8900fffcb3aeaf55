mod render;

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use echocheck::checker::{check_one, SweepOutcome};
use echocheck::netconfig::parse_config;
use echocheck::{
    count_labeled, enumerate_canonical, shortest_trace_to, sweep, CheckError, CheckOptions, Config, ConfigError,
    SweepReport, Target,
};

/// Explicit-state verifier for the Echo wave protocol.
#[derive(Parser)]
#[command(name = "echocheck", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count configurations over a universe of node identifiers.
    Count {
        #[arg(long)]
        universe: usize,
        #[arg(long, value_enum)]
        column: Column,
    },
    /// List one configuration per isomorphism class.
    Enumerate {
        #[arg(long)]
        max_nodes: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the listing here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a property on one configuration or on every configuration up
    /// to a size.
    Check {
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[command(flatten)]
        scope: Scope,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write the full JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print a shortest run from the initial state to a target state.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = TargetArg::Finish)]
        target: TargetArg,
        /// Give up on runs longer than this many steps.
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Start the exploration HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of static files (the browser explorer).
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Scope {
    /// Configuration file (one text line or a JSON object).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep every canonical configuration with up to this many nodes.
    #[arg(long)]
    max_nodes: Option<usize>,
}

#[derive(Args)]
struct SearchArgs {
    /// Maximum number of stored states per configuration.
    #[arg(long)]
    state_budget: Option<usize>,
    /// Explore one state per symmetry orbit.
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    symmetry: Switch,
    /// Omit timings so output is reproducible.
    #[arg(long)]
    no_timing: bool,
}

impl SearchArgs {
    fn options(&self, max_depth: Option<usize>) -> CheckOptions {
        CheckOptions {
            state_budget: self.state_budget,
            symmetry: self.symmetry == Switch::On,
            max_depth,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Column {
    Labeled,
    Canonical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Chang,
    Fixed,
}

impl From<VariantArg> for echocheck::Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Chang => echocheck::Variant::Chang,
            VariantArg::Fixed => echocheck::Variant::Fixed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Correctness,
    Termination,
}

impl From<PropertyArg> for echocheck::Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Correctness => echocheck::Property::Correctness,
            PropertyArg::Termination => echocheck::Property::Termination,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Finish,
}

/// Failures that stop a command, by exit code.
#[derive(Debug)]
enum Failure {
    /// Bad input or usage (exit 2).
    Input(String),
    /// A state or size budget ran out (exit 3).
    Resource(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::BudgetExceeded { .. } => Failure::Resource(e.to_string()),
            CheckError::Config(e) => e.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

const PASS: u8 = 0;
const VIOLATION: u8 = 1;
const INPUT: u8 = 2;
const RESOURCE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(RESOURCE)
        }
    }
}

fn read_config(path: &Path) -> Result<Config, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let config = parse_config(&text)?;
    if let Err(v) = config.validate() {
        return Err(Failure::Input(format!("{}: {v}", path.display())));
    }
    Ok(config)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a panic
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Count { universe, column } => {
            let n = match column {
                Column::Labeled => count_labeled(universe)?,
                Column::Canonical => enumerate_canonical(universe)?.len() as u64,
            };
            println!("{n}");
            Ok(PASS)
        }
        Command::Enumerate { max_nodes, format, out } => {
            let configs = enumerate_canonical(max_nodes)?;
            let text = match format {
                Format::Json => to_json(&configs),
                Format::Text => configs.iter().map(|c| format!("{c}\n")).collect(),
            };
            emit(out.as_deref(), &text)?;
            Ok(PASS)
        }
        Command::Check {
            property,
            variant,
            scope,
            format,
            out,
            search,
        } => {
            let opts = search.options(None);
            let (property, variant) = (property.into(), variant.into());
            let report = match (scope.config, scope.max_nodes) {
                (Some(path), _) => {
                    let config = read_config(&path)?;
                    let result = check_one(&config, variant, property, &opts)?;
                    SweepReport {
                        variant,
                        property,
                        max_nodes: config.node_count(),
                        results: vec![result],
                    }
                }
                (None, Some(n)) => sweep(n, variant, property, &opts)?,
                (None, None) => unreachable!("clap requires one scope"),
            };
            let timing = !search.no_timing;
            let json = to_json(&report.to_json(timing));
            if let Some(path) = &out {
                emit(Some(path), &json)?;
            }
            match format {
                Format::Json => emit(None, &json)?,
                Format::Text => emit(None, &render::report(&report, timing))?,
            }
            // a violation is a definite answer, so it outranks budget exhaustion
            Ok(if report.violation_count() > 0 {
                VIOLATION
            } else if report
                .results
                .iter()
                .any(|r| r.outcome == SweepOutcome::Inconclusive)
            {
                RESOURCE
            } else {
                PASS
            })
        }
        Command::Run {
            config,
            variant,
            target,
            max_steps,
            format,
            out,
            search,
        } => {
            let config = read_config(&config)?;
            let target = match target {
                TargetArg::Finish => Target::Finish,
            };
            let opts = search.options(max_steps);
            match shortest_trace_to(&config, variant.into(), target, &opts)? {
                Some(trace) => {
                    let text = match format {
                        Format::Json => to_json(&trace),
                        Format::Text => render::trace(&trace),
                    };
                    emit(out.as_deref(), &text)?;
                    Ok(PASS)
                }
                None => {
                    eprintln!("target unreachable");
                    Ok(VIOLATION)
                }
            }
        }
        Command::Serve { port, static_dir } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
                )
                .init();
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Input(e.to_string()))?;
            let addr = SocketAddr::from(([127, 0, 0, 1], port));
            runtime
                .block_on(echocheck_service::serve(addr, static_dir))
                .map_err(|e| Failure::Input(format!("serve: {e}")))?;
            Ok(PASS)
        }
    }
}
