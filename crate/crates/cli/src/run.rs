//! Command implementations. Every command computes its results fully in
//! memory, then writes a CSV table (plus any structured records) and returns
//! the pieces of the summary record. Nothing is written when a command fails,
//! and no output contains timestamps or machine identity, so identical
//! configuration and seed give byte-identical artifacts.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use qsc_core::channel::CHANNEL_EQ_TOL;
use qsc_core::gates::parse_gate_word;
use qsc_core::{
    all_sample_sets, check_concentration, check_proposition, check_theorem1, check_theorem2,
    class_from_spec, empirical_complexity, free_robustness, load_channel, save_manifest,
    stream_rng, verify_decomposition, CircuitClass, ClassManifest, EstimatorMethod, LearningTask,
    QuantumChannel, RobustnessStatus, SampleDistribution, SampleSet,
};

use crate::config::{CommandKind, ExperimentConfig, MethodFlag};

/// Stream tags for draws made by the runner itself; disjoint from the tags
/// used inside the library.
const PHASE_CLI_COMPLEXITY: u64 = 30;
const PHASE_CLI_THEOREM2: u64 = 31;
const PHASE_CLI_SWEEP: u64 = 32;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(qsc_core::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<qsc_core::Error> for CliError {
    fn from(e: qsc_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 2 = configuration error, 3 = resource-guard violation, 4 = numerical
    /// failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                qsc_core::Error::GuardExceeded { .. } => 3,
                qsc_core::Error::NotUnitary { .. }
                | qsc_core::Error::NotCptp { .. }
                | qsc_core::Error::Numerical(_) => 4,
                _ => 2,
            },
        }
    }
}

/// Everything a command hands back for the summary record.
pub struct RunOutput {
    /// File names written inside the output directory.
    pub files: Vec<String>,
    /// Guard trips that were tolerated (sweep cells); never silently dropped.
    pub guards: Vec<String>,
    /// Command-specific result summary.
    pub results: serde_json::Value,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    match cfg.command {
        CommandKind::Enumerate => enumerate(cfg),
        CommandKind::Robustness => robustness(cfg),
        CommandKind::Complexity => complexity(cfg),
        CommandKind::CheckTheorem1 => theorem1(cfg),
        CommandKind::CheckTheorem2 => theorem2(cfg),
        CommandKind::Concentration => concentration(cfg),
        CommandKind::LearnExperiment => learn_experiment(cfg),
        CommandKind::Sweep => sweep(cfg),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers

fn require_str<'a>(field: &'a Option<String>, name: &str) -> Result<&'a str, CliError> {
    field
        .as_deref()
        .ok_or_else(|| CliError::Config(format!("--{name} is required for this command")))
}

/// Number of qubits a gate word mentions: one past the largest qubit index,
/// and one qubit when the word names no indices at all (`"T"` means `T0`).
fn infer_qubits(word: &str) -> usize {
    word.chars()
        .filter_map(|c| c.to_digit(10))
        .map(|d| d as usize + 1)
        .max()
        .unwrap_or(1)
}

/// A channel argument is either a path to a channel record file or a gate
/// word. Words are parsed on `n_hint` qubits when the caller knows the width
/// (e.g. from the free class), otherwise on the width the word itself
/// mentions.
fn resolve_channel(value: &str, n_hint: Option<usize>) -> Result<QuantumChannel, CliError> {
    let path = Path::new(value);
    if path.is_file() {
        return Ok(load_channel(path)?);
    }
    let n = n_hint.unwrap_or_else(|| infer_qubits(value));
    Ok(parse_gate_word(n, value)?)
}

fn load_class(cfg: &ExperimentConfig) -> Result<CircuitClass, CliError> {
    let spec = require_str(&cfg.class, "class")?;
    Ok(class_from_spec(spec)?)
}

/// The robustness bound used by the theorem checks: the explicit flag when
/// given, otherwise the linear-programming value for the resource over the
/// free class.
fn resolved_gamma(
    cfg: &ExperimentConfig,
    free: &CircuitClass,
    resource: &QuantumChannel,
) -> Result<(f64, &'static str), CliError> {
    if let Some(g) = cfg.gamma {
        if !(g >= 0.0) {
            return Err(CliError::Config(format!("--gamma must be >= 0, got {g}")));
        }
        return Ok((g, "flag"));
    }
    let res = free_robustness(resource, free, CHANNEL_EQ_TOL)?;
    if res.status != RobustnessStatus::Optimal {
        return Err(CliError::Core(qsc_core::Error::Numerical(format!(
            "free-robustness program infeasible for {}; supply --gamma explicitly",
            resource.label()
        ))));
    }
    Ok((res.lambda_star, "lp"))
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_table(header: &str, rows: &[Vec<String>]) -> String {
    let mut text = String::new();
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let escaped: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
        writeln!(text, "{}", escaped.join(",")).expect("write to string");
    }
    text
}

fn write_output(cfg: &ExperimentConfig, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(qsc_core::Error::Io)?;
    std::fs::write(cfg.out.join(name), text).map_err(qsc_core::Error::Io)?;
    Ok(())
}

fn pretty_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Writes the run's summary record into the output directory.
pub fn write_summary<T: serde::Serialize>(
    cfg: &ExperimentConfig,
    summary: &T,
) -> Result<(), CliError> {
    write_output(cfg, "summary.json", &pretty_json(summary))
}

fn one_line(msg: &str) -> String {
    msg.replace(',', ";").replace('\n', " ")
}

fn draw_set(d: &SampleDistribution, m: usize, rng: &mut ChaCha8Rng) -> Result<SampleSet, CliError> {
    Ok(d.draw(m, rng)?)
}

// ---------------------------------------------------------------------------
// Commands

fn enumerate(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let class = load_class(cfg)?;
    let manifest = ClassManifest::from_class(&class, cfg.full);
    let rows: Vec<Vec<String>> = class
        .channels()
        .iter()
        .enumerate()
        .map(|(i, c)| vec![i.to_string(), c.label().to_string()])
        .collect();
    write_output(cfg, "enumerate.csv", &csv_table("index,label", &rows))?;
    std::fs::create_dir_all(&cfg.out).map_err(qsc_core::Error::Io)?;
    save_manifest(&cfg.out.join("manifest.json"), &manifest)?;
    Ok(RunOutput {
        files: vec!["enumerate.csv".into(), "manifest.json".into()],
        guards: Vec::new(),
        results: json!({
            "spec": class.spec(),
            "n": class.n(),
            "count": class.len(),
            "payload_embedded": cfg.full,
        }),
    })
}

/// Certificate file schema for `robustness --certificate`: coefficients and
/// the gate words of the channels they multiply.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    coefficients: Vec<f64>,
    channels: Vec<String>,
}

fn robustness(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let target_arg = require_str(&cfg.target, "target")?;

    if let Some(cert_path) = &cfg.certificate {
        let text = std::fs::read_to_string(cert_path).map_err(|e| {
            CliError::Config(format!("cannot read certificate {}: {e}", cert_path.display()))
        })?;
        let cert: CertificateFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("certificate {}: {e}", cert_path.display())))?;
        let target = resolve_channel(target_arg, None)?;
        let channels = cert
            .channels
            .iter()
            .map(|w| Ok(parse_gate_word(target.n(), w)?))
            .collect::<Result<Vec<_>, CliError>>()?;
        let residual = verify_decomposition(&target, &cert.coefficients, &channels)?;
        let rows: Vec<Vec<String>> = cert
            .channels
            .iter()
            .zip(&cert.coefficients)
            .enumerate()
            .map(|(i, (w, c))| vec![i.to_string(), w.clone(), fmt_f(*c)])
            .collect();
        write_output(cfg, "robustness.csv", &csv_table("index,word,coefficient", &rows))?;
        return Ok(RunOutput {
            files: vec!["robustness.csv".into()],
            guards: Vec::new(),
            results: json!({
                "mode": "certificate",
                "target": target.label(),
                "terms": cert.coefficients.len(),
                "residual": residual,
            }),
        });
    }

    let free = load_class(cfg)?;
    let target = resolve_channel(target_arg, Some(free.n()))?;
    let result = free_robustness(&target, &free, CHANNEL_EQ_TOL)?;
    let rows: Vec<Vec<String>> = free
        .channels()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                c.label().to_string(),
                fmt_f(result.p.get(i).copied().unwrap_or(f64::NAN)),
                fmt_f(result.q.get(i).copied().unwrap_or(f64::NAN)),
            ]
        })
        .collect();
    write_output(cfg, "robustness.csv", &csv_table("index,label,p,q", &rows))?;
    write_output(cfg, "robustness.json", &pretty_json(&result))?;
    Ok(RunOutput {
        files: vec!["robustness.csv".into(), "robustness.json".into()],
        guards: Vec::new(),
        results: json!({
            "mode": "lp",
            "target": target.label(),
            "free": free.spec(),
            "status": result.status,
            "lambda_star": result.lambda_star,
            "residual": result.residual,
        }),
    })
}

fn complexity(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let class = load_class(cfg)?;
    if cfg.repetitions == 0 {
        return Err(CliError::Config("--repetitions must be >= 1".into()));
    }
    let d = SampleDistribution::uniform(class.n());
    let variant = cfg.variant.to_variant();
    let mut rows = Vec::with_capacity(cfg.repetitions);
    let mut values = Vec::with_capacity(cfg.repetitions);
    for draw in 0..cfg.repetitions {
        let mut rng = stream_rng(cfg.seed, PHASE_CLI_COMPLEXITY, draw as u64);
        let s = draw_set(&d, cfg.m, &mut rng)?;
        let method = match cfg.method {
            MethodFlag::Exact => EstimatorMethod::Exact,
            MethodFlag::Mc => EstimatorMethod::MonteCarlo {
                n_samples: cfg.samples,
                seed: cfg.seed.wrapping_add(draw as u64),
            },
        };
        let est = empirical_complexity(&class, &s, variant, method)?;
        values.push(est.value);
        rows.push(vec![
            draw.to_string(),
            cfg.m.to_string(),
            fmt_f(est.value),
            est.ci95_halfwidth.map(fmt_f).unwrap_or_default(),
            est.mc_samples.map(|v| v.to_string()).unwrap_or_default(),
        ]);
    }
    write_output(
        cfg,
        "complexity.csv",
        &csv_table("draw,m,value,ci95_halfwidth,mc_samples", &rows),
    )?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(RunOutput {
        files: vec!["complexity.csv".into()],
        guards: Vec::new(),
        results: json!({
            "class": class.spec(),
            "m": cfg.m,
            "variant": variant,
            "method": cfg.method,
            "repetitions": cfg.repetitions,
            "mean": mean,
            "min": min,
            "max": max,
        }),
    })
}

fn theorem1(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let free = load_class(cfg)?;
    let resource_arg = require_str(&cfg.resource, "resource")?;
    let psi = resolve_channel(resource_arg, Some(free.n()))?;
    let (gamma, gamma_source) = resolved_gamma(cfg, &free, &psi)?;
    let mut rows = Vec::new();
    let mut per_m = Vec::new();
    let mut all_ok = true;
    for m in 1..=cfg.m {
        let sets = all_sample_sets(free.n(), m)?;
        let mut min_lower = f64::INFINITY;
        let mut min_upper = f64::INFINITY;
        let mut ok = true;
        for s in &sets {
            let report = check_theorem1(&free, &psi, s, gamma)?;
            min_lower = min_lower.min(report.slack_lower);
            min_upper = min_upper.min(report.slack_upper);
            ok &= report.ok;
        }
        all_ok &= ok;
        rows.push(vec![
            m.to_string(),
            sets.len().to_string(),
            fmt_f(gamma),
            fmt_f(min_lower),
            fmt_f(min_upper),
            ok.to_string(),
        ]);
        per_m.push(json!({
            "m": m,
            "sets": sets.len(),
            "min_slack_lower": min_lower,
            "min_slack_upper": min_upper,
            "ok": ok,
        }));
    }
    write_output(
        cfg,
        "theorem1.csv",
        &csv_table("m,sets,gamma,min_slack_lower,min_slack_upper,ok", &rows),
    )?;
    Ok(RunOutput {
        files: vec!["theorem1.csv".into()],
        guards: Vec::new(),
        results: json!({
            "free": free.spec(),
            "resource": psi.label(),
            "gamma": gamma,
            "gamma_source": gamma_source,
            "per_m": per_m,
            "ok": all_ok,
        }),
    })
}

fn theorem2(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let free = load_class(cfg)?;
    let resource_arg = require_str(&cfg.resource, "resource")?;
    let psi = resolve_channel(resource_arg, Some(free.n()))?;
    let (gamma, gamma_source) = resolved_gamma(cfg, &free, &psi)?;
    if cfg.draws == 0 {
        return Err(CliError::Config("--draws must be >= 1".into()));
    }
    let d = SampleDistribution::uniform(free.n());
    let mut rows = Vec::with_capacity(cfg.draws);
    let mut min_slack = f64::INFINITY;
    let mut all_ok = true;
    for draw in 0..cfg.draws {
        let mut rng = stream_rng(cfg.seed, PHASE_CLI_THEOREM2, draw as u64);
        let m = rng.gen_range(1..=cfg.m.max(1));
        let s = draw_set(&d, m, &mut rng)?;
        let report = check_theorem2(&free, &psi, cfg.k, cfg.depth, &s, gamma, None)?;
        min_slack = min_slack.min(report.slack);
        all_ok &= report.ok;
        rows.push(vec![
            draw.to_string(),
            m.to_string(),
            cfg.k.to_string(),
            fmt_f(*report.values.last().expect("k+1 values")),
            fmt_f(report.bound_rhs),
            fmt_f(report.slack),
            report.monotone_ok.to_string(),
            report.bound_ok.to_string(),
            report.ok.to_string(),
        ]);
    }
    write_output(
        cfg,
        "theorem2.csv",
        &csv_table(
            "draw,m,k,value_at_k,bound_rhs,slack,monotone_ok,bound_ok,ok",
            &rows,
        ),
    )?;
    Ok(RunOutput {
        files: vec!["theorem2.csv".into()],
        guards: Vec::new(),
        results: json!({
            "free": free.spec(),
            "resource": psi.label(),
            "k": cfg.k,
            "depth": cfg.depth,
            "max_m": cfg.m,
            "draws": cfg.draws,
            "gamma": gamma,
            "gamma_source": gamma_source,
            "min_slack": min_slack,
            "ok": all_ok,
        }),
    })
}

fn concentration(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let class = load_class(cfg)?;
    if cfg.t_values.is_empty() {
        return Err(CliError::Config("--t needs at least one threshold".into()));
    }
    let d = SampleDistribution::uniform(class.n());
    let mut rows = Vec::new();
    let mut per_t = Vec::new();
    let mut all_ok = true;
    for &t in &cfg.t_values {
        let report = check_concentration(&class, &d, cfg.m, t, cfg.trials, cfg.seed)?;
        all_ok &= report.ok;
        rows.push(vec![
            fmt_f(t),
            cfg.m.to_string(),
            cfg.trials.to_string(),
            fmt_f(report.expected_estimate),
            fmt_f(report.tail_frequency),
            fmt_f(report.bound),
            fmt_f(report.binomial_se),
            report.ok.to_string(),
        ]);
        per_t.push(json!({
            "t": t,
            "tail_frequency": report.tail_frequency,
            "bound": report.bound,
            "ok": report.ok,
        }));
    }
    write_output(
        cfg,
        "concentration.csv",
        &csv_table(
            "t,m,trials,expected_estimate,tail_frequency,bound,binomial_se,ok",
            &rows,
        ),
    )?;
    Ok(RunOutput {
        files: vec!["concentration.csv".into()],
        guards: Vec::new(),
        results: json!({
            "class": class.spec(),
            "m": cfg.m,
            "trials": cfg.trials,
            "per_t": per_t,
            "ok": all_ok,
        }),
    })
}

fn learn_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let o = load_class(cfg)?;
    let resource_arg = require_str(&cfg.resource, "resource")?;
    let psi = resolve_channel(resource_arg, Some(o.n()))?;
    let task_target = match &cfg.task_target {
        Some(arg) => resolve_channel(arg, Some(o.n()))?,
        None => psi.clone(),
    };
    let task = LearningTask::uniform_consistent(task_target, cfg.m, cfg.delta)?;
    let report = check_proposition(&o, &psi, cfg.k, cfg.depth, &task, cfg.trials, cfg.seed)?;
    let rows: Vec<Vec<String>> = report
        .records
        .iter()
        .map(|r| {
            vec![
                r.trial.to_string(),
                r.erm_index.to_string(),
                r.erm_label.clone(),
                fmt_f(r.empirical_error),
                fmt_f(r.expected_error),
                fmt_f(r.free_complexity),
                fmt_f(r.bound),
                r.satisfied.to_string(),
            ]
        })
        .collect();
    write_output(
        cfg,
        "learn.csv",
        &csv_table(
            "trial,erm_index,erm_label,empirical_error,expected_error,free_complexity,bound,satisfied",
            &rows,
        ),
    )?;
    Ok(RunOutput {
        files: vec!["learn.csv".into()],
        guards: Vec::new(),
        results: json!({
            "class": o.spec(),
            "resource": psi.label(),
            "k": report.k,
            "depth": report.depth,
            "m": report.m,
            "delta": report.delta,
            "trials": report.trials,
            "lambda_star": report.lambda_star,
            "gamma_star": report.gamma_star_value,
            "satisfied": report.satisfied,
            "fraction": report.fraction,
            "threshold": report.threshold,
            "binomial_se": report.binomial_se,
            "ok": report.ok,
        }),
    })
}

fn sweep(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let header = "k,m,draws,lhs,rhs,slack,monotone_ok,bound_ok,status";
    if cfg.k_values.is_empty() || cfg.m_values.is_empty() {
        write_output(cfg, "sweep.csv", &csv_table(header, &[]))?;
        return Ok(RunOutput {
            files: vec!["sweep.csv".into()],
            guards: Vec::new(),
            results: json!({
                "cells": 0,
                "failures": 0,
                "ok": true,
            }),
        });
    }
    let free = load_class(cfg)?;
    let resource_arg = require_str(&cfg.resource, "resource")?;
    let psi = resolve_channel(resource_arg, Some(free.n()))?;
    let (gamma, gamma_source) = resolved_gamma(cfg, &free, &psi)?;
    if cfg.draws == 0 {
        return Err(CliError::Config("--draws must be >= 1".into()));
    }
    let d = SampleDistribution::uniform(free.n());
    let mut rows = Vec::new();
    let mut guards = Vec::new();
    let mut failures = 0usize;
    let mut all_ok = true;
    let mut cell = 0u64;
    for &k in &cfg.k_values {
        for &m in &cfg.m_values {
            let mut lhs_sum = 0.0;
            let mut rhs_sum = 0.0;
            let mut slack_min = f64::INFINITY;
            let mut monotone_ok = true;
            let mut bound_ok = true;
            let mut error: Option<String> = None;
            for draw in 0..cfg.draws {
                let mut rng = stream_rng(cfg.seed, PHASE_CLI_SWEEP, cell << 32 | draw as u64);
                let run = draw_set(&d, m, &mut rng).and_then(|s| {
                    Ok(check_theorem2(&free, &psi, k, cfg.depth, &s, gamma, None)?)
                });
                match run {
                    Ok(report) => {
                        lhs_sum += report.values.last().expect("k+1 values");
                        rhs_sum += report.bound_rhs;
                        slack_min = slack_min.min(report.slack);
                        monotone_ok &= report.monotone_ok;
                        bound_ok &= report.bound_ok;
                    }
                    Err(e) => {
                        error = Some(one_line(&e.to_string()));
                        if let CliError::Core(qsc_core::Error::GuardExceeded { .. }) = &e {
                            guards.push(format!("cell k={k} m={m}: {}", one_line(&e.to_string())));
                        }
                        break;
                    }
                }
            }
            match error {
                Some(msg) => {
                    failures += 1;
                    all_ok = false;
                    rows.push(vec![
                        k.to_string(),
                        m.to_string(),
                        cfg.draws.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        format!("error: {msg}"),
                    ]);
                }
                None => {
                    let cell_ok = monotone_ok && bound_ok;
                    all_ok &= cell_ok;
                    rows.push(vec![
                        k.to_string(),
                        m.to_string(),
                        cfg.draws.to_string(),
                        fmt_f(lhs_sum / cfg.draws as f64),
                        fmt_f(rhs_sum / cfg.draws as f64),
                        fmt_f(slack_min),
                        monotone_ok.to_string(),
                        bound_ok.to_string(),
                        "ok".to_string(),
                    ]);
                }
            }
            cell += 1;
        }
    }
    write_output(cfg, "sweep.csv", &csv_table(header, &rows))?;
    Ok(RunOutput {
        files: vec!["sweep.csv".into()],
        guards,
        results: json!({
            "free": free.spec(),
            "resource": psi.label(),
            "depth": cfg.depth,
            "gamma": gamma,
            "gamma_source": gamma_source,
            "k_values": cfg.k_values,
            "m_values": cfg.m_values,
            "draws": cfg.draws,
            "cells": cfg.k_values.len() * cfg.m_values.len(),
            "failures": failures,
            "ok": all_ok,
        }),
    })
}
