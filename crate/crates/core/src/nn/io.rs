//! Weight files: one JSON document per network.
//!
//! ```json
//! {"format": "nesy-network/1", "input_shape": [2],
//!  "layers": [{"kind": "dense", "in_features": 2, "out_features": 1,
//!              "weights": [1.0, -1.0], "bias": [0.0]}]}
//! ```
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! saved network reloads bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::layer::Layer;
use super::network::Network;
use super::NnError;

pub const NETWORK_FORMAT: &str = "nesy-network/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    format: String,
    input_shape: Vec<usize>,
    layers: Vec<Layer>,
}

/// Byte offset just past the character at a 1-based line/column position,
/// which for truncated input is the end of the text.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column).min(text.len())
}

pub fn network_to_json(net: &Network) -> String {
    let file = NetworkFile {
        format: NETWORK_FORMAT.to_string(),
        input_shape: net.input_shape().to_vec(),
        layers: net.layers().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("networks serialize")
}

pub fn network_from_json(text: &str) -> Result<Network, NnError> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| NnError::Format {
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    if file.format != NETWORK_FORMAT {
        return Err(NnError::Format {
            offset: 0,
            message: format!("unsupported format tag `{}`, expected `{NETWORK_FORMAT}`", file.format),
        });
    }
    Network::new(file.input_shape, file.layers)
}

pub fn save_weights(net: &Network, path: impl AsRef<Path>) -> Result<(), NnError> {
    std::fs::write(path.as_ref(), network_to_json(net)).map_err(|e| NnError::Io {
        path: path.as_ref().display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<Network, NnError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| NnError::Io {
        path: path.as_ref().display().to_string(),
        message: e.to_string(),
    })?;
    network_from_json(&text)
}
