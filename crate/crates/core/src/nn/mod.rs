//! Single-sample inference, interval bound propagation, and a dense trainer.

mod io;
mod layer;
mod network;
mod random;
mod tensor;
mod train;

use thiserror::Error;

pub use io::{load_weights, network_from_json, network_to_json, save_weights, NETWORK_FORMAT};
pub use layer::{softmax_bounds, Layer};
pub use network::Network;
pub use random::random_network;
pub use tensor::{epsilon_ball, BoundedTensor, Tensor, MAX_RANK};
pub use train::{accuracy, init_mlp, train_dense, TrainConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("lower bound {lower} exceeds upper bound {upper} at entry {index}")]
    InvertedBounds { index: usize, lower: f64, upper: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Data(String),
    #[error("weight file, byte {offset}: {message}")]
    Format { offset: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
