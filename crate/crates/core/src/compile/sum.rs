//! Direct circuit for the distribution of a sum of independent categorical digits.

use super::CompileError;
use crate::circuit::{Circuit, CircuitBuilder};

/// Largest digit count [`build_sum_circuit`] accepts.
pub const MAX_SUM_DIGITS: usize = 8;

/// Leaf index of `P(digit = class)`.
pub fn sum_leaf(num_classes: usize, digit: usize, class: usize) -> usize {
    digit * num_classes + class
}

/// Circuit with one output per sum value `0..=num_digits * (num_classes - 1)`.
///
/// Leaf `digit * num_classes + class` carries `P(digit = class)`. Output `s`
/// is `sum over class tuples adding to s` of the product of their leaves,
/// built by convolving one digit at a time.
pub fn build_sum_circuit(num_digits: usize, num_classes: usize) -> Result<Circuit, CompileError> {
    if num_digits == 0 || num_digits > MAX_SUM_DIGITS || num_classes < 2 {
        return Err(CompileError::SumSize {
            digits: num_digits,
            classes: num_classes,
            max_digits: MAX_SUM_DIGITS,
        });
    }
    let mut b = CircuitBuilder::new(num_digits * num_classes);
    let mut partial: Vec<usize> = (0..num_classes).map(|c| b.leaf(sum_leaf(num_classes, 0, c))).collect();
    for digit in 1..num_digits {
        let leaves: Vec<usize> = (0..num_classes)
            .map(|c| b.leaf(sum_leaf(num_classes, digit, c)))
            .collect();
        let width = partial.len() + num_classes - 1;
        let mut next = Vec::with_capacity(width);
        for s in 0..width {
            let terms: Vec<usize> = (0..num_classes)
                .filter(|&c| c <= s && s - c < partial.len())
                .map(|c| b.mul([leaves[c], partial[s - c]]))
                .collect();
            next.push(b.add(terms));
        }
        partial = next;
    }
    Ok(b.finish(partial)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile_default;
    use crate::logic::{wmc_brute, Formula, VarId, WeightMap};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_distributions(rng: &mut ChaCha8Rng, digits: usize, classes: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(digits * classes);
        for _ in 0..digits {
            let raw: Vec<f64> = (0..classes).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let z: f64 = raw.iter().sum();
            out.extend(raw.iter().map(|r| r / z));
        }
        out
    }

    fn brute_sum_distribution(p: &[f64], digits: usize, classes: usize) -> Vec<f64> {
        let mut dist = vec![0.0; digits * (classes - 1) + 1];
        let total = classes.pow(digits as u32);
        for mut code in 0..total {
            let (mut s, mut prob) = (0, 1.0);
            for d in 0..digits {
                let c = code % classes;
                code /= classes;
                s += c;
                prob *= p[d * classes + c];
            }
            dist[s] += prob;
        }
        dist
    }

    #[test]
    fn matches_enumeration_up_to_four_digits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for digits in 1..=4 {
            let c = build_sum_circuit(digits, 10).unwrap();
            assert_eq!(c.num_leaves(), 10 * digits);
            assert_eq!(c.num_outputs(), 9 * digits + 1);
            for _ in 0..3 {
                let p = random_distributions(&mut rng, digits, 10);
                let got = c.eval(&p).unwrap();
                let want = brute_sum_distribution(&p, digits, 10);
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-9, "{digits} digits: {g} vs {w}");
                }
                assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn size_guard() {
        assert!(build_sum_circuit(9, 10).is_err());
        assert!(build_sum_circuit(0, 10).is_err());
        assert!(build_sum_circuit(2, 1).is_err());
        assert!(build_sum_circuit(8, 10).is_ok());
    }

    /// Digit `k` takes the first class `c` whose switch `b_{k,c}` is on, or the
    /// last class when all are off. Switch weights `p_c / (1 - sum_{c' < c} p_c')`
    /// make the Boolean encoding reproduce the categorical distribution.
    fn digit_is(digit: usize, class: usize, classes: usize) -> Formula {
        let var = |c: usize| VarId((digit * (classes - 1) + c) as u32);
        let mut parts: Vec<Formula> = (0..class).map(|c| Formula::lit(var(c), false)).collect();
        if class < classes - 1 {
            parts.push(Formula::var(var(class)));
        }
        Formula::And(parts)
    }

    fn switch_weights(p: &[f64], digits: usize, classes: usize) -> Vec<f64> {
        let mut w = Vec::new();
        for d in 0..digits {
            let mut rest = 1.0;
            for c in 0..classes - 1 {
                let pc = p[d * classes + c];
                w.push((pc / rest).clamp(0.0, 1.0));
                rest -= pc;
            }
        }
        w
    }

    #[test]
    fn boolean_encoding_route_agrees() {
        let (digits, classes) = (2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_distributions(&mut rng, digits, classes);
        let direct = build_sum_circuit(digits, classes).unwrap().eval(&p).unwrap();
        let w = switch_weights(&p, digits, classes);
        let n = digits * (classes - 1);
        for (s, want) in direct.iter().enumerate() {
            let mut cases = Vec::new();
            for a in 0..classes {
                for b in 0..classes {
                    if a + b == s {
                        cases.push(Formula::And(vec![digit_is(0, a, classes), digit_is(1, b, classes)]));
                    }
                }
            }
            let f = Formula::Or(cases);
            let circuit = compile_default(&f, n).unwrap().smooth().to_arith_circuit().unwrap();
            let got = circuit.eval(&w).unwrap()[0];
            let oracle = wmc_brute(&f, &WeightMap::new(w.clone()).unwrap()).unwrap();
            assert!((got - want).abs() < 1e-12, "sum {s}: {got} vs {want}");
            assert!((got - oracle).abs() < 1e-12);
        }
    }
}
