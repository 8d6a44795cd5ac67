//! Experiment configuration: defaults, an optional TOML file, and
//! command-line overrides, merged so that explicit flags always win. The
//! resolved configuration is hashed and the hash recorded in every summary,
//! making runs self-describing and reproducible.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Seed used when neither the flag nor the config file supplies one, so every
/// run is reproducible by default.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Enumerate,
    Robustness,
    Complexity,
    CheckTheorem1,
    CheckTheorem2,
    Concentration,
    LearnExperiment,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Enumerate => "enumerate",
            CommandKind::Robustness => "robustness",
            CommandKind::Complexity => "complexity",
            CommandKind::CheckTheorem1 => "check-theorem1",
            CommandKind::CheckTheorem2 => "check-theorem2",
            CommandKind::Concentration => "concentration",
            CommandKind::LearnExperiment => "learn-experiment",
            CommandKind::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "enumerate" => CommandKind::Enumerate,
            "robustness" => CommandKind::Robustness,
            "complexity" => CommandKind::Complexity,
            "check-theorem1" => CommandKind::CheckTheorem1,
            "check-theorem2" => CommandKind::CheckTheorem2,
            "concentration" => CommandKind::Concentration,
            "learn-experiment" => CommandKind::LearnExperiment,
            "sweep" => CommandKind::Sweep,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodFlag {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantFlag {
    RademacherSigned,
    RademacherAbs,
    GaussianSigned,
    GaussianAbs,
}

impl MethodFlag {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "exact" => MethodFlag::Exact,
            "mc" => MethodFlag::Mc,
            _ => return None,
        })
    }
}

impl VariantFlag {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rademacher-signed" => VariantFlag::RademacherSigned,
            "rademacher-abs" => VariantFlag::RademacherAbs,
            "gaussian-signed" => VariantFlag::GaussianSigned,
            "gaussian-abs" => VariantFlag::GaussianAbs,
            _ => return None,
        })
    }

    pub fn to_variant(self) -> qsc_core::ComplexityVariant {
        use qsc_core::{ComplexityVariant, ValueMode, WeightKind};
        match self {
            VariantFlag::RademacherSigned => ComplexityVariant {
                weights: WeightKind::Rademacher,
                mode: ValueMode::Signed,
            },
            VariantFlag::RademacherAbs => ComplexityVariant {
                weights: WeightKind::Rademacher,
                mode: ValueMode::Absolute,
            },
            VariantFlag::GaussianSigned => ComplexityVariant {
                weights: WeightKind::Gaussian,
                mode: ValueMode::Signed,
            },
            VariantFlag::GaussianAbs => ComplexityVariant {
                weights: WeightKind::Gaussian,
                mode: ValueMode::Absolute,
            },
        }
    }
}

/// Fully resolved run configuration. Everything that influences results is
/// in here (and is covered by [`ExperimentConfig::hash`]); the output
/// directory is plumbing and excluded from the hash.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
    pub class: Option<String>,
    pub target: Option<String>,
    pub resource: Option<String>,
    pub task_target: Option<String>,
    pub certificate: Option<PathBuf>,
    pub full: bool,
    pub k: usize,
    pub depth: usize,
    pub m: usize,
    pub delta: f64,
    pub trials: usize,
    pub t_values: Vec<f64>,
    pub method: MethodFlag,
    pub variant: VariantFlag,
    pub samples: usize,
    pub repetitions: usize,
    pub gamma: Option<f64>,
    pub draws: usize,
    pub k_values: Vec<usize>,
    pub m_values: Vec<usize>,
}

/// One layer of overrides; fields left `None` keep the value from the layer
/// below (defaults, then config file, then command-line flags).
#[derive(Clone, Debug, Default)]
pub struct Overlay {
    pub command: Option<CommandKind>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub class: Option<String>,
    pub target: Option<String>,
    pub resource: Option<String>,
    pub task_target: Option<String>,
    pub certificate: Option<PathBuf>,
    pub full: Option<bool>,
    pub k: Option<usize>,
    pub depth: Option<usize>,
    pub m: Option<usize>,
    pub delta: Option<f64>,
    pub trials: Option<usize>,
    pub t_values: Option<Vec<f64>>,
    pub method: Option<MethodFlag>,
    pub variant: Option<VariantFlag>,
    pub samples: Option<usize>,
    pub repetitions: Option<usize>,
    pub gamma: Option<f64>,
    pub draws: Option<usize>,
    pub k_values: Option<Vec<usize>>,
    pub m_values: Option<Vec<usize>>,
}

/// On-disk TOML schema. Keys are kebab-case; unknown keys are rejected so
/// typos cannot silently change an experiment.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    command: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    class: Option<String>,
    target: Option<String>,
    resource: Option<String>,
    task_target: Option<String>,
    certificate: Option<PathBuf>,
    full: Option<bool>,
    k: Option<usize>,
    depth: Option<usize>,
    m: Option<usize>,
    delta: Option<f64>,
    trials: Option<usize>,
    t_values: Option<Vec<f64>>,
    method: Option<String>,
    variant: Option<String>,
    samples: Option<usize>,
    repetitions: Option<usize>,
    gamma: Option<f64>,
    draws: Option<usize>,
    k_values: Option<Vec<usize>>,
    m_values: Option<Vec<usize>>,
}

fn file_overlay(path: &Path) -> Result<Overlay, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let file: ConfigFile =
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
    let command = match file.command {
        None => None,
        Some(s) => Some(
            CommandKind::parse(&s).ok_or_else(|| format!("config: unknown command `{s}`"))?,
        ),
    };
    let method = match file.method {
        None => None,
        Some(s) => Some(
            MethodFlag::parse(&s)
                .ok_or_else(|| format!("config: method must be exact|mc, got `{s}`"))?,
        ),
    };
    let variant = match file.variant {
        None => None,
        Some(s) => Some(VariantFlag::parse(&s).ok_or_else(|| {
            format!(
                "config: variant must be rademacher-signed|rademacher-abs|gaussian-signed|gaussian-abs, got `{s}`"
            )
        })?),
    };
    Ok(Overlay {
        command,
        seed: file.seed,
        out: file.out,
        class: file.class,
        target: file.target,
        resource: file.resource,
        task_target: file.task_target,
        certificate: file.certificate,
        full: file.full,
        k: file.k,
        depth: file.depth,
        m: file.m,
        delta: file.delta,
        trials: file.trials,
        t_values: file.t_values,
        method,
        variant,
        samples: file.samples,
        repetitions: file.repetitions,
        gamma: file.gamma,
        draws: file.draws,
        k_values: file.k_values,
        m_values: file.m_values,
    })
}

impl ExperimentConfig {
    fn base(command: CommandKind) -> Self {
        Self {
            command,
            seed: DEFAULT_SEED,
            out: PathBuf::from("qsc-out"),
            class: None,
            target: None,
            resource: None,
            task_target: None,
            certificate: None,
            full: false,
            k: 1,
            depth: 3,
            m: 3,
            delta: 0.1,
            trials: 1000,
            t_values: vec![0.1, 0.2, 0.3],
            method: MethodFlag::Exact,
            variant: VariantFlag::RademacherSigned,
            samples: 10_000,
            repetitions: 100,
            gamma: None,
            draws: 100,
            k_values: Vec::new(),
            m_values: Vec::new(),
        }
    }

    fn apply(&mut self, layer: Overlay) {
        if let Some(v) = layer.command {
            self.command = v;
        }
        if let Some(v) = layer.seed {
            self.seed = v;
        }
        if let Some(v) = layer.out {
            self.out = v;
        }
        if let Some(v) = layer.class {
            self.class = Some(v);
        }
        if let Some(v) = layer.target {
            self.target = Some(v);
        }
        if let Some(v) = layer.resource {
            self.resource = Some(v);
        }
        if let Some(v) = layer.task_target {
            self.task_target = Some(v);
        }
        if let Some(v) = layer.certificate {
            self.certificate = Some(v);
        }
        if let Some(v) = layer.full {
            self.full = v;
        }
        if let Some(v) = layer.k {
            self.k = v;
        }
        if let Some(v) = layer.depth {
            self.depth = v;
        }
        if let Some(v) = layer.m {
            self.m = v;
        }
        if let Some(v) = layer.delta {
            self.delta = v;
        }
        if let Some(v) = layer.trials {
            self.trials = v;
        }
        if let Some(v) = layer.t_values {
            self.t_values = v;
        }
        if let Some(v) = layer.method {
            self.method = v;
        }
        if let Some(v) = layer.variant {
            self.variant = v;
        }
        if let Some(v) = layer.samples {
            self.samples = v;
        }
        if let Some(v) = layer.repetitions {
            self.repetitions = v;
        }
        if let Some(v) = layer.gamma {
            self.gamma = Some(v);
        }
        if let Some(v) = layer.draws {
            self.draws = v;
        }
        if let Some(v) = layer.k_values {
            self.k_values = v;
        }
        if let Some(v) = layer.m_values {
            self.m_values = v;
        }
    }

    /// Builds the resolved configuration: defaults, then the config file (if
    /// any), then command-line flags on top.
    pub fn resolve(config_path: Option<&Path>, flags: Overlay) -> Result<Self, String> {
        let from_file = match config_path {
            Some(p) => file_overlay(p)?,
            None => Overlay::default(),
        };
        let command = flags
            .command
            .or(from_file.command)
            .ok_or_else(|| "no command given (on the command line or as `command` in the config file)".to_string())?;
        let mut cfg = Self::base(command);
        cfg.apply(from_file);
        cfg.apply(flags);
        cfg.command = command;
        Ok(cfg)
    }

    /// SHA-256 over the canonical JSON form of everything that influences
    /// results (the output path is excluded). Hex-encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(hex, "{byte:02x}").expect("write to string");
        }
        hex
    }
}
