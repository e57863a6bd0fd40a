use rand::Rng;

use super::layer::Layer;
use super::network::Network;

fn uniform<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn dense<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Layer {
    Layer::Dense {
        in_features: inputs,
        out_features: outputs,
        weights: uniform(rng, inputs * outputs),
        bias: uniform(rng, outputs),
    }
}

fn activation<R: Rng + ?Sized>(rng: &mut R) -> Layer {
    if rng.gen_bool(0.7) {
        Layer::Relu
    } else {
        Layer::Sigmoid
    }
}

/// A small random network with weights in `[-1, 1)`, for property checks.
///
/// Dense networks take a vector of 2 to 6 inputs. Convolutional ones take a
/// `1..=2 x 6..=9 x 6..=9` image through one or two conv layers, an optional
/// max pool, and a dense head. Either may end in softmax, sigmoid, or nothing.
pub fn random_network<R: Rng + ?Sized>(rng: &mut R, conv: bool) -> Network {
    let mut layers = Vec::new();
    let input_shape;
    let mut width;
    if conv {
        let c = rng.gen_range(1..=2);
        let (h, w) = (rng.gen_range(6..=9), rng.gen_range(6..=9));
        input_shape = vec![c, h, w];
        let mut shape = input_shape.clone();
        for _ in 0..rng.gen_range(1..=2) {
            let out_channels = rng.gen_range(1..=3);
            let k = rng.gen_range(2..=3);
            let layer = Layer::Conv2d {
                in_channels: shape[0],
                out_channels,
                kernel: [k, k],
                stride: rng.gen_range(1..=2),
                padding: rng.gen_range(0..=1),
                weights: uniform(rng, out_channels * shape[0] * k * k),
                bias: uniform(rng, out_channels),
            };
            shape = layer.output_shape(&shape).expect("conv geometry fits");
            layers.push(layer);
            layers.push(activation(rng));
        }
        if shape[1] >= 2 && shape[2] >= 2 && rng.gen_bool(0.6) {
            let pool = Layer::MaxPool2d {
                kernel: [2, 2],
                stride: rng.gen_range(1..=2),
            };
            shape = pool.output_shape(&shape).expect("pool fits");
            layers.push(pool);
        }
        layers.push(Layer::Flatten);
        width = shape.iter().product();
    } else {
        width = rng.gen_range(2..=6);
        input_shape = vec![width];
        for _ in 0..rng.gen_range(1..=3) {
            let next = rng.gen_range(2..=8);
            layers.push(dense(rng, width, next));
            layers.push(activation(rng));
            width = next;
        }
    }
    let outputs = rng.gen_range(2..=5);
    layers.push(dense(rng, width, outputs));
    match rng.gen_range(0..3) {
        0 => layers.push(Layer::Softmax),
        1 => layers.push(Layer::Sigmoid),
        _ => {}
    }
    Network::new(input_shape, layers).expect("generated networks are well formed")
}
