//! Experiment configuration: a TOML document with a fixed set of keys.
//!
//! ```toml
//! kind = "orbit-average"      # orbit-average | ratio-trace | witness-sweep
//!                             # | noise-scan | toric-noise
//! n = 8                       # qubits, 2..=16 (toric-noise: 2·toric_lx·toric_ly)
//! thetas = [0.0, 0.785398]    # product-state angles in radians, one curve each
//! initial_state = "product"   # product | plus | toric; defaults to `plus` for
//!                             # noise-scan, `toric` for toric-noise, else `product`
//! layers = 200                # Clifford layers recorded (witness: max layers)
//! prep_layers = 300           # ratio-trace only: scrambling layers before recording
//! realizations = 500
//! epsilon = 0.005             # witness threshold
//! sigmas = [0.002, 0.004]     # noise strengths, one curve each
//! partition = "half"          # or an explicit qubit list such as [0, 1, 2]
//! seed = 1
//! output = "runs/orbit.csv"
//! gate_mode = "uniform"       # uniform | generators
//! witness_mode = "incremental" # incremental | fresh
//! toric_lx = 4
//! toric_ly = 2
//! ```
//!
//! Unknown keys are rejected. Every validation error names its field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clifford::GateMode;
use crate::error::{Error, Result};
use crate::statevec::{Bipartition, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    OrbitAverage,
    RatioTrace,
    WitnessSweep,
    NoiseScan,
    ToricNoise,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::OrbitAverage => "orbit-average",
            ExperimentKind::RatioTrace => "ratio-trace",
            ExperimentKind::WitnessSweep => "witness-sweep",
            ExperimentKind::NoiseScan => "noise-scan",
            ExperimentKind::ToricNoise => "toric-noise",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            ExperimentKind::OrbitAverage,
            ExperimentKind::RatioTrace,
            ExperimentKind::WitnessSweep,
            ExperimentKind::NoiseScan,
            ExperimentKind::ToricNoise,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// `⊗ (|0⟩ + e^{iθ}|1⟩)/√2`, one run per entry of `thetas`.
    #[default]
    Product,
    /// `|+⟩^{⊗n}`.
    Plus,
    /// Toric-code ground state on `toric_lx × toric_ly`.
    Toric,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMode {
    /// One trajectory, extended a layer at a time.
    #[default]
    Incremental,
    /// Iteration `k` applies a fresh `k`-layer circuit to the input.
    Fresh,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKeyword {
    /// First `⌈n/2⌉` qubits.
    #[default]
    Half,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartitionSpec {
    Keyword(PartitionKeyword),
    Qubits(Vec<usize>),
}

impl Default for PartitionSpec {
    fn default() -> Self {
        PartitionSpec::Keyword(PartitionKeyword::Half)
    }
}

impl PartitionSpec {
    pub fn resolve(&self, n: usize) -> Result<Bipartition> {
        let res = match self {
            PartitionSpec::Keyword(PartitionKeyword::Half) => Bipartition::half(n),
            PartitionSpec::Qubits(q) => Bipartition::new(n, q),
        };
        res.map_err(|e| Error::config("partition", e.to_string()))
    }

    /// `half` or a comma-separated qubit list.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("half") {
            return Ok(PartitionSpec::Keyword(PartitionKeyword::Half));
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(PartitionSpec::Qubits)
            .map_err(|_| Error::config("partition", format!("expected `half` or a qubit list, got {s:?}")))
    }
}

fn default_layers() -> usize {
    100
}

fn default_prep_layers() -> usize {
    300
}

fn default_realizations() -> usize {
    200
}

fn default_toric_lx() -> usize {
    4
}

fn default_toric_ly() -> usize {
    2
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thetas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_prep_layers")]
    pub prep_layers: usize,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigmas: Vec<f64>,
    #[serde(default)]
    pub partition: PartitionSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub gate_mode: GateMode,
    #[serde(default, skip_serializing_if = "is_default")]
    pub witness_mode: WitnessMode,
    #[serde(default = "default_toric_lx")]
    pub toric_lx: usize,
    #[serde(default = "default_toric_ly")]
    pub toric_ly: usize,
}

impl ExperimentConfig {
    /// A config of the given kind with every optional field at its default.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            n: None,
            thetas: Vec::new(),
            initial_state: None,
            layers: default_layers(),
            prep_layers: default_prep_layers(),
            realizations: default_realizations(),
            epsilon: 0.0,
            sigmas: Vec::new(),
            partition: PartitionSpec::default(),
            seed: 0,
            output: None,
            gate_mode: GateMode::default(),
            witness_mode: WitnessMode::default(),
            toric_lx: default_toric_lx(),
            toric_ly: default_toric_ly(),
        }
    }

    /// The configured initial state, or the default for the kind.
    pub fn initial(&self) -> InitialState {
        self.initial_state.unwrap_or(match self.kind {
            ExperimentKind::NoiseScan => InitialState::Plus,
            ExperimentKind::ToricNoise => InitialState::Toric,
            _ => InitialState::Product,
        })
    }

    /// Qubit count, derived from the lattice for toric inputs.
    pub fn num_qubits(&self) -> Result<usize> {
        let toric_n = 2 * self.toric_lx * self.toric_ly;
        match (self.n, self.initial()) {
            (Some(n), InitialState::Toric) if n != toric_n => Err(Error::config(
                "n",
                format!(
                    "toric {}×{} lattice has {toric_n} qubits, not {n}",
                    self.toric_lx, self.toric_ly
                ),
            )),
            (_, InitialState::Toric) => Ok(toric_n),
            (Some(n), _) => Ok(n),
            (None, _) => Err(Error::config("n", "missing required key")),
        }
    }

    pub fn bipartition(&self) -> Result<Bipartition> {
        self.partition.resolve(self.num_qubits()?)
    }

    /// Checks every field; capacity problems surface as [`Error::Capacity`].
    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        let n = self.num_qubits()?;
        if n > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "config field `n`",
                got: n,
                cap: MAX_QUBITS,
            });
        }
        if n < 2 {
            return Err(Error::config("n", format!("need at least 2 qubits, got {n}")));
        }
        if self.realizations == 0 {
            return Err(Error::config("realizations", "must be at least 1"));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::config(
                "epsilon",
                format!("must be a finite number ≥ 0, got {}", self.epsilon),
            ));
        }
        if let Some(t) = self.thetas.iter().find(|t| !t.is_finite()) {
            return Err(Error::config("thetas", format!("non-finite angle {t}")));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
            return Err(Error::config("sigmas", format!("must be finite and ≥ 0, got {s}")));
        }
        self.bipartition()?;

        let wants_thetas = self.initial() == InitialState::Product;
        if wants_thetas && self.thetas.is_empty() {
            return Err(Error::config("thetas", "product initial state needs at least one angle"));
        }
        if !wants_thetas && !self.thetas.is_empty() {
            return Err(Error::config(
                "thetas",
                "angles only apply to the product initial state",
            ));
        }

        match self.kind {
            OrbitAverage | RatioTrace => {
                if self.initial() != InitialState::Product {
                    return Err(Error::config("initial_state", "must be `product`"));
                }
                if self.sigmas.iter().any(|&s| s != 0.0) {
                    return Err(Error::config("sigmas", "noiseless experiment"));
                }
            }
            WitnessSweep => {
                if self.initial() == InitialState::Plus {
                    return Err(Error::config("initial_state", "must be `product` or `toric`"));
                }
                if !(self.epsilon > 0.0) {
                    return Err(Error::config("epsilon", "witness threshold must be > 0"));
                }
                if self.layers == 0 {
                    return Err(Error::config("layers", "witness needs at least one layer"));
                }
                if self.sigmas.iter().any(|&s| s != 0.0) {
                    return Err(Error::config("sigmas", "the witness runs noiseless circuits"));
                }
            }
            NoiseScan => {
                if self.initial() != InitialState::Plus {
                    return Err(Error::config("initial_state", "noise-scan starts from `plus`"));
                }
                if self.sigmas.is_empty() {
                    return Err(Error::config("sigmas", "at least one noise strength required"));
                }
            }
            ToricNoise => {
                if self.initial() != InitialState::Toric {
                    return Err(Error::config("initial_state", "toric-noise starts from `toric`"));
                }
                if self.sigmas.is_empty() {
                    return Err(Error::config("sigmas", "at least one noise strength required"));
                }
            }
        }
        if self.initial() == InitialState::Toric {
            crate::stabilizer::ToricCode::new(self.toric_lx, self.toric_ly)
                .map_err(|e| match e {
                    cap @ Error::Capacity { .. } => cap,
                    other => Error::config("toric_lx", other.to_string()),
                })?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<config>", e.to_string()))
    }

    /// Parses without validating.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = backticked(&message)
                .or_else(|| e.span().and_then(|span| key_at(text, span.start)))
                .unwrap_or_else(|| "<config>".to_string());
            Error::Config { field, message }
        })
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// First `` `name` `` in a serde message ("unknown field `x`", "missing field `y`").
fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let end = start + message[start..].find('`')?;
    Some(message[start..end].to_string())
}

/// The key on the line containing byte offset `pos`.
fn key_at(text: &str, pos: usize) -> Option<String> {
    let line_start = text[..pos.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next()?;
    let key = line.split('=').next()?.trim();
    (!key.is_empty()).then(|| key.to_string())
}
