//! Minibatch SGD for dense networks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layer::{softmax, Layer};
use super::network::Network;
use super::tensor::Tensor;
use super::NnError;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 10,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// `Flatten` (when the input is not a vector), then `Dense + Relu` per hidden
/// width, then `Dense + Softmax`. Weights are uniform in `+-sqrt(6 / fan_in)`.
pub fn init_mlp(input_shape: &[usize], hidden: &[usize], classes: usize, seed: u64) -> Result<Network, NnError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::new();
    if input_shape.len() != 1 {
        layers.push(Layer::Flatten);
    }
    let mut width: usize = input_shape.iter().product();
    for &next in hidden.iter().chain([classes].iter()) {
        let limit = (6.0 / width as f64).sqrt();
        layers.push(Layer::Dense {
            in_features: width,
            out_features: next,
            weights: (0..width * next).map(|_| rng.gen_range(-limit..limit)).collect(),
            bias: vec![0.0; next],
        });
        layers.push(Layer::Relu);
        width = next;
    }
    *layers.last_mut().unwrap() = Layer::Softmax;
    Network::new(input_shape.to_vec(), layers)
}

#[derive(Clone, Copy, PartialEq)]
enum Head {
    /// Softmax cross-entropy on the output of layer `end`.
    Softmax { end: usize },
    /// Per-output binary cross-entropy against a one-hot target; the last
    /// layer is the sigmoid.
    Sigmoid,
}

fn head(net: &Network) -> Result<Head, NnError> {
    let layers = net.layers();
    for (k, l) in layers.iter().enumerate() {
        if matches!(l, Layer::Conv2d { .. } | Layer::MaxPool2d { .. }) {
            return Err(NnError::Unsupported(format!(
                "training supports dense networks only; layer {k} is {}",
                l.name()
            )));
        }
    }
    Ok(match layers.last() {
        Some(Layer::Softmax) => Head::Softmax { end: layers.len() - 1 },
        Some(Layer::Sigmoid) => Head::Sigmoid,
        _ => Head::Softmax { end: layers.len() },
    })
}

/// Trains a copy of `net` with cross-entropy loss. Deterministic in `cfg.seed`.
pub fn train_dense(net: &Network, data: &[(Tensor, usize)], cfg: &TrainConfig) -> Result<Network, NnError> {
    if data.is_empty() {
        return Err(NnError::Data("training set is empty".into()));
    }
    if cfg.batch_size == 0 || !(cfg.learning_rate > 0.0) {
        return Err(NnError::Data("batch size and learning rate must be positive".into()));
    }
    let head = head(net)?;
    let classes = net.output_size();
    for (i, (x, y)) in data.iter().enumerate() {
        if x.shape() != net.input_shape() {
            return Err(NnError::Shape(format!(
                "sample {i} has shape {:?}, network expects {:?}",
                x.shape(),
                net.input_shape()
            )));
        }
        if *y >= classes {
            return Err(NnError::Data(format!("sample {i} has label {y} >= {classes} outputs")));
        }
    }

    let mut layers = net.clone().into_layers();
    let mut grads: Vec<(Vec<f64>, Vec<f64>)> = layers
        .iter()
        .map(|l| match l {
            Layer::Dense { weights, bias, .. } => (vec![0.0; weights.len()], vec![0.0; bias.len()]),
            _ => (Vec::new(), Vec::new()),
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(layers.len() + 1);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            for g in grads.iter_mut() {
                g.0.iter_mut().for_each(|v| *v = 0.0);
                g.1.iter_mut().for_each(|v| *v = 0.0);
            }
            for &i in batch {
                let (x, y) = &data[i];
                acts.clear();
                acts.push(x.data().to_vec());
                for (k, l) in layers.iter().enumerate() {
                    let next = l.forward(net.layer_input_shape(k), &acts[k]);
                    acts.push(next);
                }
                let (mut delta, start) = match head {
                    Head::Softmax { end } => {
                        let mut p = softmax(&acts[end]);
                        p[*y] -= 1.0;
                        (p, end)
                    }
                    Head::Sigmoid => {
                        let n = layers.len();
                        let mut d = acts[n].clone();
                        d[*y] -= 1.0;
                        (d, n - 1)
                    }
                };
                for k in (0..start).rev() {
                    delta = backward(&layers[k], &acts[k], &acts[k + 1], &delta, &mut grads[k]);
                }
            }
            let scale = cfg.learning_rate / batch.len() as f64;
            for (l, g) in layers.iter_mut().zip(&grads) {
                if let Layer::Dense { weights, bias, .. } = l {
                    weights.iter_mut().zip(&g.0).for_each(|(w, d)| *w -= scale * d);
                    bias.iter_mut().zip(&g.1).for_each(|(b, d)| *b -= scale * d);
                }
            }
        }
    }
    Network::new(net.input_shape().to_vec(), layers)
}

/// Gradient with respect to the layer input; accumulates parameter gradients.
fn backward(layer: &Layer, input: &[f64], output: &[f64], delta: &[f64], grad: &mut (Vec<f64>, Vec<f64>)) -> Vec<f64> {
    match layer {
        Layer::Dense {
            in_features,
            weights,
            ..
        } => {
            let n = *in_features;
            let mut prev = vec![0.0; n];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                grad.1[o] += d;
                let row = &weights[o * n..(o + 1) * n];
                let grow = &mut grad.0[o * n..(o + 1) * n];
                for i in 0..n {
                    grow[i] += d * input[i];
                    prev[i] += d * row[i];
                }
            }
            prev
        }
        Layer::Relu => delta
            .iter()
            .zip(input)
            .map(|(&d, &x)| if x > 0.0 { d } else { 0.0 })
            .collect(),
        Layer::Sigmoid => delta
            .iter()
            .zip(output)
            .map(|(&d, &s)| d * s * (1.0 - s))
            .collect(),
        Layer::Flatten => delta.to_vec(),
        _ => unreachable!("rejected before training"),
    }
}

/// Fraction of samples whose arg-max output equals the label.
pub fn accuracy(net: &Network, data: &[(Tensor, usize)]) -> Result<f64, NnError> {
    if data.is_empty() {
        return Err(NnError::Data("evaluation set is empty".into()));
    }
    let mut hits = 0usize;
    for (x, y) in data {
        if net.forward(x)?.argmax() == *y {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}
