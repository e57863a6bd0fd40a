//! System manifests (TOML) and dataset files (JSON).
//!
//! ```toml
//! format = "nesy-manifest/1"
//! circuit = "sum2.ac"
//!
//! [[networks]]
//! name = "digit"
//! weights = "digit.json"
//!
//! [[inputs]]
//! name = "left"
//! shape = [28, 28]
//! domain = [0.0, 1.0]
//!
//! [[calls]]
//! network = "digit"
//! input = "left"
//!
//! [[bindings]]
//! leaf = 0
//! call = 0
//! output = 0
//!
//! [[bindings]]
//! leaf = 7
//! constant = 0.5
//!
//! [query]
//! mode = "argmax"
//! ```
//!
//! Paths are relative to the manifest's directory. `[query]` is either
//! `mode = "argmax"` or `mode = "threshold"` with `output` and `threshold`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dataset::{DatasetMode, Sample};
use super::system::{BindingEntry, InputSpec, LeafSource, NeSySystem, NetworkCall, VerifyError};
use crate::circuit::{parse_circuit, FormatError};
use crate::nn::{load_weights, NnError, Tensor};

pub const MANIFEST_FORMAT: &str = "nesy-manifest/1";
pub const DATASET_FORMAT: &str = "nesy-dataset/1";

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("circuit file {path}: {source}")]
    Circuit { path: String, source: FormatError },
    #[error("weight file {path}: {source}")]
    Weights { path: String, source: NnError },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkRef {
    pub name: String,
    pub weights: PathBuf,
}

fn unit_domain() -> (f64, f64) {
    (0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputRef {
    pub name: String,
    pub shape: Vec<usize>,
    #[serde(default = "unit_domain")]
    pub domain: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallRef {
    pub network: String,
    pub input: String,
}

/// Either `call` and `output`, or `constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingRef {
    pub leaf: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub call: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub circuit: PathBuf,
    pub networks: Vec<NetworkRef>,
    pub inputs: Vec<InputRef>,
    pub calls: Vec<CallRef>,
    pub bindings: Vec<BindingRef>,
    pub query: DatasetMode,
}

fn read(path: &Path) -> Result<String, ManifestError> {
    std::fs::read_to_string(path).map_err(|e| ManifestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

impl Manifest {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ManifestError> {
        let m: Manifest = toml::from_str(text).map_err(|e| ManifestError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if m.format != MANIFEST_FORMAT {
            return Err(ManifestError::Invalid(format!(
                "unsupported manifest format `{}`, expected `{MANIFEST_FORMAT}`",
                m.format
            )));
        }
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ManifestError> {
        let path = path.as_ref();
        Self::parse(&read(path)?, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifests serialize")
    }

    /// Loads the referenced files, resolving relative paths against `base`.
    pub fn build_system(&self, base: &Path) -> Result<NeSySystem, ManifestError> {
        let circuit_path = base.join(&self.circuit);
        let circuit = parse_circuit(&read(&circuit_path)?).map_err(|source| ManifestError::Circuit {
            path: circuit_path.display().to_string(),
            source,
        })?;
        let networks = self
            .networks
            .iter()
            .map(|n| {
                let p = base.join(&n.weights);
                load_weights(&p).map_err(|source| ManifestError::Weights {
                    path: p.display().to_string(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let index = |names: Vec<&str>, name: &str, what: &str| {
            names
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| ManifestError::Invalid(format!("call names unknown {what} `{name}`")))
        };
        let calls = self
            .calls
            .iter()
            .map(|c| {
                Ok(NetworkCall {
                    network: index(self.networks.iter().map(|n| n.name.as_str()).collect(), &c.network, "network")?,
                    input: index(self.inputs.iter().map(|i| i.name.as_str()).collect(), &c.input, "input")?,
                })
            })
            .collect::<Result<Vec<_>, ManifestError>>()?;
        let binding = self
            .bindings
            .iter()
            .map(|b| {
                let source = match (b.call, b.output, b.constant) {
                    (Some(call), Some(output), None) => LeafSource::Output { call, output },
                    (None, None, Some(v)) => LeafSource::Constant(v),
                    _ => {
                        return Err(ManifestError::Invalid(format!(
                            "binding for leaf {} needs either call and output, or constant",
                            b.leaf
                        )))
                    }
                };
                Ok(BindingEntry { leaf: b.leaf, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let inputs = self
            .inputs
            .iter()
            .map(|i| InputSpec {
                shape: i.shape.clone(),
                domain: i.domain,
            })
            .collect();
        Ok(NeSySystem::new(networks, inputs, calls, binding, circuit)?)
    }
}

/// Reads a manifest and everything it references.
pub fn load_system(path: impl AsRef<Path>) -> Result<(NeSySystem, DatasetMode), ManifestError> {
    let path = path.as_ref();
    let m = Manifest::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok((m.build_system(base)?, m.query))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleFile {
    inputs: Vec<Vec<f64>>,
    target: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    format: String,
    samples: Vec<SampleFile>,
}

/// Each sample stores its input tensors flattened; shapes come from the system.
pub fn dataset_to_json(samples: &[Sample]) -> String {
    let file = DatasetFile {
        format: DATASET_FORMAT.into(),
        samples: samples
            .iter()
            .map(|s| SampleFile {
                inputs: s.inputs.iter().map(|t| t.data().to_vec()).collect(),
                target: s.target,
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("datasets serialize")
}

pub fn dataset_from_json(text: &str, inputs: &[InputSpec]) -> Result<Vec<Sample>, ManifestError> {
    let file: DatasetFile = serde_json::from_str(text).map_err(|e| ManifestError::Parse {
        path: "dataset".into(),
        message: e.to_string(),
    })?;
    if file.format != DATASET_FORMAT {
        return Err(ManifestError::Invalid(format!(
            "unsupported dataset format `{}`, expected `{DATASET_FORMAT}`",
            file.format
        )));
    }
    file.samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            if s.inputs.len() != inputs.len() {
                return Err(ManifestError::Invalid(format!(
                    "sample {i} has {} inputs, system takes {}",
                    s.inputs.len(),
                    inputs.len()
                )));
            }
            let tensors = s
                .inputs
                .into_iter()
                .zip(inputs)
                .map(|(data, spec)| Tensor::new(spec.shape.clone(), data))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ManifestError::Invalid(format!("sample {i}: {e}")))?;
            Ok(Sample {
                inputs: tensors,
                target: s.target,
            })
        })
        .collect()
}

pub fn load_dataset(path: impl AsRef<Path>, inputs: &[InputSpec]) -> Result<Vec<Sample>, ManifestError> {
    let path = path.as_ref();
    dataset_from_json(&read(path)?, inputs).map_err(|e| match e {
        ManifestError::Parse { message, .. } => ManifestError::Parse {
            path: path.display().to_string(),
            message,
        },
        other => other,
    })
}
