//! Synthetic 28x28 digit images, used when no MNIST files are given.
//!
//! Each image is a seven-segment glyph drawn with random position, size,
//! slant, stroke width and intensity, plus sparse pixel noise.

use nesy_verify::nn::{accuracy, init_mlp, train_dense, Network, Tensor, TrainConfig};
use nesy_verify::verifier::Sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input_err, CliResult};
use crate::idx::IdxImages;

pub const SIDE: usize = 28;

// Segments a..g as bits 0..6: top, upper right, lower right, bottom, lower left, upper left, middle.
const GLYPHS: [u8; 10] = [
    0b0111111, 0b0000110, 0b1011011, 0b1001111, 0b1100110, 0b1101101, 0b1111101, 0b0000111, 0b1111111, 0b1101111,
];

fn segment_ends(seg: usize) -> ((f64, f64), (f64, f64)) {
    // Unit glyph box: x in [0, 1], y in [0, 2], y down.
    match seg {
        0 => ((0.0, 0.0), (1.0, 0.0)),
        1 => ((1.0, 0.0), (1.0, 1.0)),
        2 => ((1.0, 1.0), (1.0, 2.0)),
        3 => ((0.0, 2.0), (1.0, 2.0)),
        4 => ((0.0, 1.0), (0.0, 2.0)),
        5 => ((0.0, 0.0), (0.0, 1.0)),
        _ => ((0.0, 1.0), (1.0, 1.0)),
    }
}

fn dist_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// One glyph for `label`, as raw bytes.
pub fn render_digit<R: Rng + ?Sized>(rng: &mut R, label: usize) -> Vec<u8> {
    let h = rng.gen_range(8.0..10.0); // half height in pixels
    let w = h * rng.gen_range(0.8..1.1);
    let x0 = 14.0 - w / 2.0 + rng.gen_range(-3.0..3.0);
    let y0 = 14.0 - h + rng.gen_range(-3.0..3.0);
    let slant = rng.gen_range(-0.25..0.25);
    let stroke = rng.gen_range(1.0..1.8);
    let ink = rng.gen_range(170.0..255.0);
    let place = |(u, v): (f64, f64)| (x0 + u * w + slant * (h - v * h), y0 + v * h);
    let segs: Vec<_> = (0..7)
        .filter(|s| GLYPHS[label] >> s & 1 == 1)
        .map(|s| {
            let (a, b) = segment_ends(s);
            (place(a), place(b))
        })
        .collect();
    let mut px = vec![0u8; SIDE * SIDE];
    for (i, p) in px.iter_mut().enumerate() {
        let c = ((i % SIDE) as f64 + 0.5, (i / SIDE) as f64 + 0.5);
        let d = segs.iter().map(|&(a, b)| dist_to_segment(c, a, b)).fold(f64::INFINITY, f64::min);
        // Full ink inside the stroke, one pixel of linear falloff.
        let mut v = ink * (stroke + 1.0 - d).clamp(0.0, 1.0);
        if rng.gen_bool(0.05) {
            v += rng.gen_range(0.0..120.0);
        }
        *p = v.min(255.0) as u8;
    }
    px
}

/// `count` images with labels drawn uniformly.
pub fn synthetic_digits(count: usize, seed: u64) -> (IdxImages, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = Vec::with_capacity(count * SIDE * SIDE);
    let mut labels = Vec::with_capacity(count);
    for _ in 0..count {
        let label = rng.gen_range(0..10);
        pixels.extend(render_digit(&mut rng, label));
        labels.push(label as u8);
    }
    (IdxImages { rows: SIDE, cols: SIDE, pixels }, labels)
}

/// Train and held-out splits drawn from independent streams of one seed.
pub fn synthetic_split(train: usize, test: usize, seed: u64) -> (Vec<(Tensor, usize)>, Vec<(Tensor, usize)>) {
    let (ti, tl) = synthetic_digits(train, seed.wrapping_mul(2));
    let (hi, hl) = synthetic_digits(test, seed.wrapping_mul(2) + 1);
    (crate::idx::labelled(&ti, &tl), crate::idx::labelled(&hi, &hl))
}

#[derive(Debug, Clone)]
pub struct TrainedDigits {
    pub network: Network,
    pub train_accuracy: f64,
    pub held_out_accuracy: f64,
}

/// Default digit classifier: one hidden layer of 32 ReLUs with a softmax head.
pub fn train_classifier(
    train: &[(Tensor, usize)],
    held_out: &[(Tensor, usize)],
    hidden: &[usize],
    cfg: &TrainConfig,
) -> CliResult<TrainedDigits> {
    let shape = train.first().map(|(x, _)| x.shape().to_vec()).ok_or_else(|| input_err("no training data"))?;
    let init = init_mlp(&shape, hidden, 10, cfg.seed).map_err(input_err)?;
    let network = train_dense(&init, train, cfg).map_err(input_err)?;
    Ok(TrainedDigits {
        train_accuracy: accuracy(&network, train).map_err(input_err)?,
        held_out_accuracy: accuracy(&network, held_out).map_err(input_err)?,
        network,
    })
}

pub const DEFAULT_HIDDEN: [usize; 1] = [32];

pub fn default_train_config(seed: u64) -> TrainConfig {
    TrainConfig { learning_rate: 0.05, epochs: 8, batch_size: 32, seed }
}

/// Classifier trained on 3000 synthetic images, scored on 1000 more.
pub fn synthetic_classifier(seed: u64) -> CliResult<(TrainedDigits, Vec<(Tensor, usize)>)> {
    let (train, test) = synthetic_split(3000, 1000, seed);
    Ok((train_classifier(&train, &test, &DEFAULT_HIDDEN, &default_train_config(seed))?, test))
}

/// Addition instances: `digits` images drawn from `pool`, target the label sum.
pub fn addition_samples(pool: &[(Tensor, usize)], digits: usize, count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let picks: Vec<&(Tensor, usize)> = (0..digits).map(|_| &pool[rng.gen_range(0..pool.len())]).collect();
            Sample {
                inputs: picks.iter().map(|(x, _)| x.clone()).collect(),
                target: picks.iter().map(|(_, l)| l).sum(),
            }
        })
        .collect()
}
