//! `qsc` — reproducible experiment runner for the channel-class toolkit:
//! class enumeration, robustness programs, complexity estimation, inequality
//! checks, and learning experiments. Every run writes CSV tables plus one
//! self-describing summary record (tool version, config hash, seed); with
//! identical configuration and seed the artifacts are byte-identical.

mod config;
mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{CommandKind, ExperimentConfig, MethodFlag, Overlay, VariantFlag};
use run::CliError;

#[derive(Parser)]
#[command(
    name = "qsc",
    version,
    about = "Statistical complexity, robustness and learning diagnostics for small quantum channel classes"
)]
struct Cli {
    /// TOML configuration file; explicit flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed for every randomized draw (default 7).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV tables and the summary record.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn parse_method(s: &str) -> Result<MethodFlag, String> {
    MethodFlag::parse(s).ok_or_else(|| format!("method must be exact|mc, got `{s}`"))
}

fn parse_variant(s: &str) -> Result<VariantFlag, String> {
    VariantFlag::parse(s).ok_or_else(|| {
        format!("variant must be rademacher-signed|rademacher-abs|gaussian-signed|gaussian-abs, got `{s}`")
    })
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a circuit class and write its manifest.
    Enumerate(EnumerateArgs),
    /// Solve the free-robustness program for a target channel, or verify a
    /// decomposition certificate.
    Robustness(RobustnessArgs),
    /// Empirical complexity of a class over seeded sample-set draws.
    Complexity(ComplexityArgs),
    /// Sandwich inequality (free class vs class with the resource appended)
    /// over exhaustive sample sets of sizes 1..=m.
    #[command(name = "check-theorem1")]
    CheckTheorem1(Theorem1Args),
    /// Amplification inequality for up to k resource uses on seeded draws.
    #[command(name = "check-theorem2")]
    CheckTheorem2(Theorem2Args),
    /// Tail-probability bound for the empirical complexity estimator.
    Concentration(ConcentrationArgs),
    /// ERM generalization experiment over seeded trials.
    #[command(name = "learn-experiment")]
    LearnExperiment(LearnArgs),
    /// Grid of amplification checks over (k, m) ranges.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    /// Class spec: stab:n | iqp:n | stab+T:k:L | iqp+CCZ:k:L.
    #[arg(long)]
    class: Option<String>,
    /// Embed full superoperator payloads in the manifest.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct RobustnessArgs {
    /// Target channel: a gate word (e.g. `T`) or a channel record file.
    #[arg(long)]
    target: Option<String>,
    /// Free class spec the target is decomposed over.
    #[arg(long)]
    free: Option<String>,
    /// JSON certificate {coefficients, channels} to verify instead of
    /// solving the program.
    #[arg(long, value_name = "FILE")]
    certificate: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Class spec.
    #[arg(long)]
    class: Option<String>,
    /// Sample-set size.
    #[arg(long)]
    m: Option<usize>,
    /// Estimator: exact | mc.
    #[arg(long, value_parser = parse_method)]
    method: Option<MethodFlag>,
    /// Weight/value variant: rademacher-signed | rademacher-abs |
    /// gaussian-signed | gaussian-abs.
    #[arg(long, value_parser = parse_variant)]
    variant: Option<VariantFlag>,
    /// Monte-Carlo samples per estimate.
    #[arg(long)]
    samples: Option<usize>,
    /// Number of seeded sample-set draws.
    #[arg(long)]
    repetitions: Option<usize>,
}

#[derive(Args)]
struct Theorem1Args {
    /// Free class spec.
    #[arg(long)]
    class: Option<String>,
    /// Resource channel: gate word or channel record file.
    #[arg(long)]
    resource: Option<String>,
    /// Largest sample-set size (sizes 1..=m are checked exhaustively).
    #[arg(long)]
    m: Option<usize>,
    /// Robustness bound; computed by the linear program when omitted.
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct Theorem2Args {
    /// Free class spec.
    #[arg(long)]
    class: Option<String>,
    /// Resource channel: gate word or channel record file.
    #[arg(long)]
    resource: Option<String>,
    /// Maximal number of resource uses.
    #[arg(long)]
    k: Option<usize>,
    /// Word-length cap for the product class.
    #[arg(long)]
    depth: Option<usize>,
    /// Largest sample-set size (each draw picks a size in 1..=m).
    #[arg(long)]
    m: Option<usize>,
    /// Number of seeded sample-set draws.
    #[arg(long)]
    draws: Option<usize>,
    /// Robustness bound; computed by the linear program when omitted.
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct ConcentrationArgs {
    /// Class spec.
    #[arg(long)]
    class: Option<String>,
    /// Sample-set size.
    #[arg(long)]
    m: Option<usize>,
    /// Deviation thresholds, comma-separated (e.g. `0.1,0.2,0.3`).
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Number of seeded trials.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct LearnArgs {
    /// Hypothesis base class spec.
    #[arg(long)]
    class: Option<String>,
    /// Resource channel appended to the class: gate word or record file.
    #[arg(long)]
    resource: Option<String>,
    /// Number of resource uses allowed in hypothesis words.
    #[arg(long)]
    k: Option<usize>,
    /// Word-length cap for the hypothesis class.
    #[arg(long)]
    depth: Option<usize>,
    /// Training-sample size per trial.
    #[arg(long)]
    m: Option<usize>,
    /// Confidence parameter in (0, 1).
    #[arg(long)]
    delta: Option<f64>,
    /// Number of seeded trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Label-generating channel for the task (defaults to the resource).
    #[arg(long, value_name = "CHANNEL")]
    task_target: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Free class spec.
    #[arg(long)]
    class: Option<String>,
    /// Resource channel: gate word or channel record file.
    #[arg(long)]
    resource: Option<String>,
    /// Resource-use counts, comma-separated (e.g. `0,1,2`).
    #[arg(long, value_delimiter = ',')]
    k_values: Option<Vec<usize>>,
    /// Sample-set sizes, comma-separated (e.g. `2,4,6`).
    #[arg(long, value_delimiter = ',')]
    m_values: Option<Vec<usize>>,
    /// Word-length cap for the product classes.
    #[arg(long)]
    depth: Option<usize>,
    /// Seeded draws per cell.
    #[arg(long)]
    draws: Option<usize>,
    /// Robustness bound; computed by the linear program when omitted.
    #[arg(long)]
    gamma: Option<f64>,
}

impl Command {
    fn into_overlay(self) -> Overlay {
        match self {
            Command::Enumerate(a) => Overlay {
                command: Some(CommandKind::Enumerate),
                class: a.class,
                full: a.full.then_some(true),
                ..Overlay::default()
            },
            Command::Robustness(a) => Overlay {
                command: Some(CommandKind::Robustness),
                target: a.target,
                class: a.free,
                certificate: a.certificate,
                ..Overlay::default()
            },
            Command::Complexity(a) => Overlay {
                command: Some(CommandKind::Complexity),
                class: a.class,
                m: a.m,
                method: a.method,
                variant: a.variant,
                samples: a.samples,
                repetitions: a.repetitions,
                ..Overlay::default()
            },
            Command::CheckTheorem1(a) => Overlay {
                command: Some(CommandKind::CheckTheorem1),
                class: a.class,
                resource: a.resource,
                m: a.m,
                gamma: a.gamma,
                ..Overlay::default()
            },
            Command::CheckTheorem2(a) => Overlay {
                command: Some(CommandKind::CheckTheorem2),
                class: a.class,
                resource: a.resource,
                k: a.k,
                depth: a.depth,
                m: a.m,
                draws: a.draws,
                gamma: a.gamma,
                ..Overlay::default()
            },
            Command::Concentration(a) => Overlay {
                command: Some(CommandKind::Concentration),
                class: a.class,
                m: a.m,
                t_values: a.t,
                trials: a.trials,
                ..Overlay::default()
            },
            Command::LearnExperiment(a) => Overlay {
                command: Some(CommandKind::LearnExperiment),
                class: a.class,
                resource: a.resource,
                k: a.k,
                depth: a.depth,
                m: a.m,
                delta: a.delta,
                trials: a.trials,
                task_target: a.task_target,
                ..Overlay::default()
            },
            Command::Sweep(a) => Overlay {
                command: Some(CommandKind::Sweep),
                class: a.class,
                resource: a.resource,
                k_values: a.k_values,
                m_values: a.m_values,
                depth: a.depth,
                draws: a.draws,
                gamma: a.gamma,
                ..Overlay::default()
            },
        }
    }
}

/// The one summary record every run writes: enough to re-run the experiment
/// and to trust (or distrust) its artifacts.
#[derive(Serialize)]
struct Summary {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config_hash: String,
    outputs: Vec<String>,
    guards: Vec<String>,
    results: serde_json::Value,
}

fn drive(cfg: &ExperimentConfig) -> Result<Summary, CliError> {
    let output = run::execute(cfg)?;
    let mut outputs = output.files;
    outputs.push("summary.json".to_string());
    let summary = Summary {
        tool: "qsc",
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.name(),
        seed: cfg.seed,
        config_hash: cfg.hash(),
        outputs,
        guards: output.guards,
        results: output.results,
    };
    run::write_summary(cfg, &summary)?;
    Ok(summary)
}

fn main() {
    let cli = Cli::parse();
    let mut overlay = match cli.command {
        Some(command) => command.into_overlay(),
        None => Overlay::default(),
    };
    if cli.seed.is_some() {
        overlay.seed = cli.seed;
    }
    if cli.out.is_some() {
        overlay.out = cli.out;
    }
    let cfg = match ExperimentConfig::resolve(cli.config.as_deref(), overlay) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    };
    match drive(&cfg) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            println!("{text}");
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
