use nesy_verify::circuit::{e_wmc_decide, Circuit, LeafBounds, MultilinearPolynomial};
use nesy_verify::compile::{compile_default, compile_to_circuit};
use nesy_verify::logic::random::random_formula;
use nesy_verify::logic::{parse_formula, IntervalWeightMap, VarId};
use nesy_verify::Interval;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DRIVING: &str = "((red_light | car_in_front) -> brake) & (accelerate <-> !brake)";

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n = rng.gen_range(1..=10u32);
    let depth = rng.gen_range(2..=5);
    let f = random_formula(rng, n, depth);
    let order: Vec<VarId> = (0..n).map(VarId).collect();
    compile_to_circuit(&f, &order).unwrap()
}

fn random_box(rng: &mut ChaCha8Rng, n: usize) -> Vec<Interval> {
    (0..n)
        .map(|_| {
            let (a, b) = (rng.gen::<f64>(), rng.gen::<f64>());
            if rng.gen_bool(0.2) {
                Interval::point(a).unwrap()
            } else {
                Interval::new(a.min(b), a.max(b)).unwrap()
            }
        })
        .collect()
}

fn sample(rng: &mut ChaCha8Rng, b: &[Interval]) -> Vec<f64> {
    b.iter().map(|iv| rng.gen_range(iv.lo()..=iv.hi())).collect()
}

#[test]
fn containment_chain_on_random_compiled_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let c = random_circuit(&mut rng);
        let ivs = random_box(&mut rng, c.num_leaves());
        let bounds = LeafBounds::new(ivs.clone()).unwrap();
        let relaxed = c.eval_interval(&bounds).unwrap()[0];
        let exact = c.vertex_bounds(&bounds).unwrap()[0];
        assert!(exact.is_subset_of(&relaxed), "{exact} not in {relaxed}");
        for _ in 0..1000 {
            let v = c.eval(&sample(&mut rng, &ivs)).unwrap()[0];
            assert!(exact.lo() - 1e-12 <= v && v <= exact.hi() + 1e-12);
        }
        let poly = &MultilinearPolynomial::from_circuit(&c).unwrap()[0];
        let searched = poly.extrema(&ivs).unwrap();
        assert!((searched.lo() - exact.lo()).abs() < 1e-12);
        assert!((searched.hi() - exact.hi()).abs() < 1e-12);
    }
}

#[test]
fn widening_never_shrinks_relaxed_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let c = random_circuit(&mut rng);
        let inner = random_box(&mut rng, c.num_leaves());
        let outer: Vec<Interval> = inner
            .iter()
            .map(|iv| {
                let lo = (iv.lo() - rng.gen::<f64>() * 0.2).max(0.0);
                let hi = (iv.hi() + rng.gen::<f64>() * 0.2).min(1.0);
                Interval::new(lo, hi).unwrap()
            })
            .collect();
        let a = c.eval_interval(&LeafBounds::new(inner).unwrap()).unwrap()[0];
        let b = c.eval_interval(&LeafBounds::new(outer).unwrap()).unwrap()[0];
        assert!(a.is_subset_of(&b));
    }
}

#[test]
fn driving_circuit_widened_box_contains_golden_value() {
    let (f, pool) = parse_formula(DRIVING).unwrap();
    let c = compile_default(&f, pool.len()).unwrap().smooth().to_arith_circuit().unwrap();
    let w = [0.6, 0.8, 0.7, 0.3];
    assert!((c.eval(&w).unwrap()[0] - 0.4972).abs() < 1e-12);
    assert!(c.validate().is_empty());
    let ivs = w
        .iter()
        .map(|&p| Interval::new(p - 0.05, p + 0.05).unwrap())
        .collect();
    let r = c.eval_interval(&LeafBounds::new(ivs).unwrap()).unwrap()[0];
    assert!(r.contains(0.4972));
}

#[test]
fn e_wmc_worked_instances() {
    let (f, _) = parse_formula("x & y").unwrap();
    let c = compile_to_circuit(&f, &[VarId(0), VarId(1)]).unwrap();
    let iw = IntervalWeightMap::emajsat_construction(2, &[VarId(0)]).unwrap();
    assert!(e_wmc_decide(&c, &iw, 0.5).unwrap());
    assert!(e_wmc_decide(&c, &iw, 0.0).unwrap());

    let (g, _) = parse_formula("!x & y1 & y2").unwrap();
    let c = compile_to_circuit(&g, &[VarId(0), VarId(1), VarId(2)]).unwrap();
    let iw = IntervalWeightMap::emajsat_construction(3, &[VarId(0)]).unwrap();
    let range = c.vertex_bounds(&LeafBounds::from(&iw)).unwrap()[0];
    assert_eq!(range.hi(), 0.25);
    assert!(!e_wmc_decide(&c, &iw, 0.5).unwrap());
}
