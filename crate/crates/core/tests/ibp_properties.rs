use nesy_verify::nn::{epsilon_ball, random_network, softmax_bounds, BoundedTensor, Network, Tensor};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_input(rng: &mut ChaCha8Rng, net: &Network) -> Tensor {
    let n: usize = net.input_shape().iter().product();
    Tensor::new(net.input_shape().to_vec(), (0..n).map(|_| rng.gen()).collect()).unwrap()
}

/// Uniform draws from the box, with a share of pure corner points.
fn sample_box(rng: &mut ChaCha8Rng, b: &BoundedTensor) -> Tensor {
    let corner = rng.gen_bool(0.2);
    let data = b
        .lower()
        .data()
        .iter()
        .zip(b.upper().data())
        .map(|(&l, &u)| {
            if corner {
                if rng.gen_bool(0.5) {
                    l
                } else {
                    u
                }
            } else {
                rng.gen_range(l..=u)
            }
        })
        .collect();
    Tensor::new(b.shape().to_vec(), data).unwrap()
}

#[test]
fn ibp_contains_sampled_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..20 {
        let net = random_network(&mut rng, i % 2 == 1);
        let x = random_input(&mut rng, &net);
        for eps in [1e-3, 1e-2, 1e-1] {
            let ball = epsilon_ball(&x, eps, (0.0, 1.0)).unwrap();
            let out = net.forward_ibp(&ball).unwrap();
            for _ in 0..1000 {
                let y = net.forward(&sample_box(&mut rng, &ball)).unwrap();
                assert!(out.contains(&y, 1e-9), "network {i}, eps {eps}");
            }
        }
    }
}

#[test]
fn zero_radius_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for i in 0..20 {
        let net = random_network(&mut rng, i % 2 == 0);
        let x = random_input(&mut rng, &net);
        let out = net.forward_ibp(&epsilon_ball(&x, 0.0, (0.0, 1.0)).unwrap()).unwrap();
        let y = net.forward(&x).unwrap();
        for k in 0..y.len() {
            assert!((out.lower().data()[k] - y.data()[k]).abs() <= 1e-9);
            assert!((out.upper().data()[k] - y.data()[k]).abs() <= 1e-9);
        }
    }
}

#[test]
fn bounds_widen_with_eps() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for i in 0..20 {
        let net = random_network(&mut rng, i % 2 == 0);
        let x = random_input(&mut rng, &net);
        let mut prev: Option<BoundedTensor> = None;
        for eps in [0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
            let out = net.forward_ibp(&epsilon_ball(&x, eps, (0.0, 1.0)).unwrap()).unwrap();
            if let Some(p) = &prev {
                assert!(p.is_subset_of(&out), "network {i} at eps {eps}");
            }
            prev = Some(out);
        }
    }
}

proptest! {
    #[test]
    fn softmax_bounds_bracket_the_simplex(logits in prop::collection::vec((-20.0f64..20.0, 0.0f64..5.0), 1..8),
                                          t in prop::collection::vec(0.0f64..=1.0, 8)) {
        let l: Vec<f64> = logits.iter().map(|p| p.0).collect();
        let u: Vec<f64> = logits.iter().map(|p| p.0 + p.1).collect();
        let (lo, hi) = softmax_bounds(&l, &u);
        prop_assert!(lo.iter().sum::<f64>() <= 1.0 + 1e-12);
        prop_assert!(hi.iter().sum::<f64>() >= 1.0 - 1e-12);
        let z: Vec<f64> = l.iter().zip(&u).zip(&t).map(|((&a, &b), &s)| a + s * (b - a)).collect();
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
        let s: f64 = e.iter().sum();
        for k in 0..z.len() {
            let p = e[k] / s;
            prop_assert!(lo[k] - 1e-12 <= p && p <= hi[k] + 1e-12);
            prop_assert!(lo[k] <= hi[k]);
        }
    }
}
