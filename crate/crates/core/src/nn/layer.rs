use serde::{Deserialize, Serialize};

use super::NnError;

/// One network layer. Weight arrays are flat and row-major: dense weights
/// are `out_features x in_features`, convolution kernels are
/// `out_channels x in_channels x kh x kw`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Layer {
    Dense {
        in_features: usize,
        out_features: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    },
    Conv2d {
        in_channels: usize,
        out_channels: usize,
        kernel: [usize; 2],
        stride: usize,
        padding: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    },
    MaxPool2d {
        kernel: [usize; 2],
        stride: usize,
    },
    Relu,
    Sigmoid,
    Softmax,
    Flatten,
}

fn shape_err(msg: String) -> NnError {
    NnError::Shape(msg)
}

fn check_array(name: &str, values: &[f64], expected: usize) -> Result<(), NnError> {
    if values.len() != expected {
        return Err(shape_err(format!(
            "{name} has {} values, declared shape needs {expected}",
            values.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(NnError::NonFinite(format!("{name}[{i}] is {}", values[i])));
    }
    Ok(())
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(sum exp(xs))` shifted by the maximum.
fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub(crate) fn softmax(x: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(x.iter().copied());
    x.iter().map(|&v| (v - lse).exp()).collect()
}

/// Per-class softmax bounds over the logit box `[l, u]`:
/// `lower_i = 1 / (1 + sum_{j != i} exp(u_j - l_i))` and
/// `upper_i = 1 / (1 + sum_{j != i} exp(l_j - u_i))`.
pub fn softmax_bounds(l: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(l.len(), u.len(), "bound vectors differ in length");
    let n = l.len();
    let bound = |i: usize, own: f64, others: &[f64]| {
        let rest = (0..n).filter(move |&j| j != i).map(move |j| others[j]);
        // 1 / (1 + sum exp(o_j - own)) = exp(own - lse(own, o_j...)).
        (own - log_sum_exp(std::iter::once(own).chain(rest))).exp()
    };
    let lower = (0..n).map(|i| bound(i, l[i], u)).collect();
    let upper = (0..n).map(|i| bound(i, u[i], l)).collect();
    (lower, upper)
}

/// Affine map shared by dense and convolution layers, with the weight
/// passed through `w` (identity for values, `abs` for radii).
fn affine(layer: &Layer, shape: &[usize], x: &[f64], w: fn(f64) -> f64, bias: bool) -> Vec<f64> {
    match layer {
        Layer::Dense {
            in_features,
            out_features,
            weights,
            bias: b,
        } => (0..*out_features)
            .map(|o| {
                let row = &weights[o * in_features..(o + 1) * in_features];
                let dot: f64 = row.iter().zip(x).map(|(&wi, &xi)| w(wi) * xi).sum();
                if bias {
                    dot + b[o]
                } else {
                    dot
                }
            })
            .collect(),
        Layer::Conv2d {
            in_channels,
            out_channels,
            kernel: [kh, kw],
            stride,
            padding,
            weights,
            bias: b,
        } => {
            let (h, wd) = (shape[1], shape[2]);
            let oh = (h + 2 * padding - kh) / stride + 1;
            let ow = (wd + 2 * padding - kw) / stride + 1;
            let mut out = Vec::with_capacity(out_channels * oh * ow);
            for oc in 0..*out_channels {
                for oy in 0..oh {
                    for ox in 0..ow {
                        let mut acc = 0.0;
                        for ic in 0..*in_channels {
                            for ky in 0..*kh {
                                let iy = (oy * stride + ky) as isize - *padding as isize;
                                if iy < 0 || iy >= h as isize {
                                    continue;
                                }
                                for kx in 0..*kw {
                                    let ix = (ox * stride + kx) as isize - *padding as isize;
                                    if ix < 0 || ix >= wd as isize {
                                        continue;
                                    }
                                    let wi = weights[((oc * in_channels + ic) * kh + ky) * kw + kx];
                                    acc += w(wi) * x[(ic * h + iy as usize) * wd + ix as usize];
                                }
                            }
                        }
                        out.push(if bias { acc + b[oc] } else { acc });
                    }
                }
            }
            out
        }
        _ => unreachable!("affine called on a non-affine layer"),
    }
}

fn max_pool(shape: &[usize], x: &[f64], kernel: [usize; 2], stride: usize) -> Vec<f64> {
    let (c, h, w) = (shape[0], shape[1], shape[2]);
    let [kh, kw] = kernel;
    let (oh, ow) = ((h - kh) / stride + 1, (w - kw) / stride + 1);
    let mut out = Vec::with_capacity(c * oh * ow);
    for ch in 0..c {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut m = f64::NEG_INFINITY;
                for ky in 0..kh {
                    for kx in 0..kw {
                        m = m.max(x[(ch * h + oy * stride + ky) * w + ox * stride + kx]);
                    }
                }
                out.push(m);
            }
        }
    }
    out
}

impl Layer {
    pub fn name(&self) -> &'static str {
        match self {
            Layer::Dense { .. } => "dense",
            Layer::Conv2d { .. } => "conv2d",
            Layer::MaxPool2d { .. } => "max_pool2d",
            Layer::Relu => "relu",
            Layer::Sigmoid => "sigmoid",
            Layer::Softmax => "softmax",
            Layer::Flatten => "flatten",
        }
    }

    /// Shape produced from `input`, after checking parameter arrays.
    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>, NnError> {
        let name = self.name();
        let want_rank = |r: usize| {
            if input.len() == r {
                Ok(())
            } else {
                Err(shape_err(format!(
                    "{name} expects a rank-{r} input, got shape {input:?}"
                )))
            }
        };
        match self {
            Layer::Dense {
                in_features,
                out_features,
                weights,
                bias,
            } => {
                want_rank(1)?;
                if input[0] != *in_features {
                    return Err(shape_err(format!(
                        "dense layer declares {in_features} inputs, receives {}",
                        input[0]
                    )));
                }
                if *out_features == 0 {
                    return Err(shape_err("dense layer with zero outputs".into()));
                }
                check_array("dense weights", weights, in_features * out_features)?;
                check_array("dense bias", bias, *out_features)?;
                Ok(vec![*out_features])
            }
            Layer::Conv2d {
                in_channels,
                out_channels,
                kernel: [kh, kw],
                stride,
                padding,
                weights,
                bias,
            } => {
                want_rank(3)?;
                if input[0] != *in_channels {
                    return Err(shape_err(format!(
                        "conv2d declares {in_channels} input channels, receives {}",
                        input[0]
                    )));
                }
                if *stride == 0 || *kh == 0 || *kw == 0 || *out_channels == 0 {
                    return Err(shape_err("conv2d with zero stride, kernel or channels".into()));
                }
                let (h, w) = (input[1] + 2 * padding, input[2] + 2 * padding);
                if h < *kh || w < *kw {
                    return Err(shape_err(format!(
                        "conv2d kernel {kh}x{kw} exceeds padded input {h}x{w}"
                    )));
                }
                check_array("conv2d weights", weights, out_channels * in_channels * kh * kw)?;
                check_array("conv2d bias", bias, *out_channels)?;
                Ok(vec![*out_channels, (h - kh) / stride + 1, (w - kw) / stride + 1])
            }
            Layer::MaxPool2d {
                kernel: [kh, kw],
                stride,
            } => {
                want_rank(3)?;
                if *stride == 0 || *kh == 0 || *kw == 0 {
                    return Err(shape_err("max_pool2d with zero stride or kernel".into()));
                }
                if input[1] < *kh || input[2] < *kw {
                    return Err(shape_err(format!(
                        "pool window {kh}x{kw} exceeds input {}x{}",
                        input[1], input[2]
                    )));
                }
                Ok(vec![
                    input[0],
                    (input[1] - kh) / stride + 1,
                    (input[2] - kw) / stride + 1,
                ])
            }
            Layer::Softmax => {
                want_rank(1)?;
                Ok(input.to_vec())
            }
            Layer::Relu | Layer::Sigmoid => Ok(input.to_vec()),
            Layer::Flatten => Ok(vec![input.iter().product()]),
        }
    }

    pub(crate) fn forward(&self, shape: &[usize], x: &[f64]) -> Vec<f64> {
        match self {
            Layer::Dense { .. } | Layer::Conv2d { .. } => affine(self, shape, x, |w| w, true),
            Layer::MaxPool2d { kernel, stride } => max_pool(shape, x, *kernel, *stride),
            Layer::Relu => x.iter().map(|&v| v.max(0.0)).collect(),
            Layer::Sigmoid => x.iter().map(|&v| sigmoid(v)).collect(),
            Layer::Softmax => softmax(x),
            Layer::Flatten => x.to_vec(),
        }
    }

    pub(crate) fn forward_ibp(&self, shape: &[usize], lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self {
            Layer::Dense { .. } | Layer::Conv2d { .. } => {
                let mid: Vec<f64> = lo.iter().zip(hi).map(|(&l, &h)| 0.5 * (l + h)).collect();
                let rad: Vec<f64> = lo.iter().zip(hi).map(|(&l, &h)| 0.5 * (h - l)).collect();
                let m = affine(self, shape, &mid, |w| w, true);
                let r = affine(self, shape, &rad, f64::abs, false);
                m.iter().zip(&r).map(|(&m, &r)| (m - r, m + r)).unzip()
            }
            Layer::MaxPool2d { kernel, stride } => (
                max_pool(shape, lo, *kernel, *stride),
                max_pool(shape, hi, *kernel, *stride),
            ),
            Layer::Softmax => softmax_bounds(lo, hi),
            _ => (self.forward(shape, lo), self.forward(shape, hi)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_bound_examples() {
        let (l, u) = softmax_bounds(&[0.0, 0.0], &[0.0, 0.0]);
        assert_eq!((l, u), (vec![0.5, 0.5], vec![0.5, 0.5]));
        let (l, u) = softmax_bounds(&[0.0, 0.0], &[1.0, 1.0]);
        let e = std::f64::consts::E;
        for i in 0..2 {
            assert!((l[i] - 1.0 / (1.0 + e)).abs() < 1e-15);
            assert!((u[i] - e / (1.0 + e)).abs() < 1e-15);
        }
        assert_eq!(softmax_bounds(&[3.0], &[7.0]), (vec![1.0], vec![1.0]));
    }

    #[test]
    fn softmax_bounds_survive_extreme_logits() {
        let (l, u) = softmax_bounds(&[-800.0, 800.0], &[-700.0, 900.0]);
        assert!(l.iter().chain(&u).all(|v| v.is_finite()));
        assert_eq!(u[1], 1.0);
        assert_eq!(l[0], 0.0);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
    }
}
