//! Explicit multilinear polynomials and exact optimisation over a box.
//!
//! [`MultilinearPolynomial::from_circuit`] expands each circuit output into
//! a sum of monomials over leaf indices. The expansion can be exponential in
//! the circuit size, which is precisely the cost the relaxed interval pass
//! avoids.
//!
//! [`MultilinearPolynomial::extrema`] finds the exact range over a box by
//! branch and bound over box vertices:
//!
//! 1. For each free leaf, enclose the partial derivative over the current
//!    box. The derivative of a multilinear polynomial does not depend on the
//!    leaf itself, so a sign-definite enclosure proves the optimum lies on
//!    one face and the leaf is fixed to that endpoint.
//! 2. Repeat until no leaf can be fixed. If leaves remain free, prune with
//!    the interval enclosure of the polynomial, then branch on both
//!    endpoints of the leaf with the widest derivative enclosure.
//!
//! Only vertices provably no better than an explored one are discarded, so
//! the result equals vertex enumeration up to floating-point rounding.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use thiserror::Error;

use super::{Circuit, Node};
use crate::interval::{Interval, IntervalError};

/// Per-node monomial guard for [`MultilinearPolynomial::from_circuit`].
pub const MAX_MONOMIALS: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolynomialError {
    #[error("node {node} multiplies factors that share leaf {leaf}; the output is not multilinear")]
    NotMultilinear { node: usize, leaf: u32 },
    #[error("node {node} expands to more than {limit} monomials")]
    TooManyMonomials { node: usize, limit: usize },
    #[error("expected {expected} leaf bounds, got {got}")]
    LeafCount { expected: usize, got: usize },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// `coef * prod(leaves[v] for v in vars)`, with `vars` sorted and distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub vars: Box<[u32]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearPolynomial {
    num_leaves: usize,
    terms: Vec<Term>,
    occurrences: Vec<Vec<u32>>,
}

// Fixed-key hasher: iteration order, and with it float summation order, is reproducible.
type Sparse = HashMap<Box<[u32]>, f64, BuildHasherDefault<DefaultHasher>>;

fn merge_monomials(a: &[u32], b: &[u32]) -> Result<Box<[u32]>, u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return Err(a[i]),
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Ok(out.into_boxed_slice())
}

fn constant(c: f64) -> Sparse {
    let mut s = Sparse::default();
    if c != 0.0 {
        s.insert(Box::from([]), c);
    }
    s
}

#[inline]
fn signed(iv: Interval, sign: f64) -> Interval {
    if sign > 0.0 {
        iv
    } else {
        Interval::new(-iv.hi(), -iv.lo()).expect("negation keeps order")
    }
}

impl MultilinearPolynomial {
    /// Expands every output of `circuit` into a polynomial over its leaves.
    pub fn from_circuit(circuit: &Circuit) -> Result<Vec<Self>, PolynomialError> {
        let nodes = circuit.nodes();
        let mut remaining_uses = vec![0usize; nodes.len()];
        for node in nodes {
            for &c in node.children() {
                remaining_uses[c] += 1;
            }
        }
        for &o in circuit.outputs() {
            remaining_uses[o] += 1;
        }

        let mut polys: Vec<Option<Sparse>> = vec![None; nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            let poly = match node {
                Node::Leaf(i) => {
                    let mut s = Sparse::default();
                    s.insert(Box::from([*i as u32]), 1.0);
                    s
                }
                Node::Const(c) => constant(*c),
                Node::Add(cs) => {
                    let mut acc = Sparse::default();
                    for &c in cs {
                        for (m, k) in polys[c].as_ref().expect("child expanded") {
                            *acc.entry(m.clone()).or_insert(0.0) += k;
                        }
                    }
                    acc.retain(|_, k| *k != 0.0);
                    acc
                }
                Node::Mul(cs) => {
                    let mut acc = constant(1.0);
                    for &c in cs {
                        let child = polys[c].as_ref().expect("child expanded");
                        let mut next = Sparse::with_capacity_and_hasher(acc.len() * child.len(), Default::default());
                        for (ma, ka) in &acc {
                            for (mb, kb) in child {
                                let m = merge_monomials(ma, mb).map_err(|leaf| {
                                    PolynomialError::NotMultilinear { node: id, leaf }
                                })?;
                                *next.entry(m).or_insert(0.0) += ka * kb;
                            }
                        }
                        if next.len() > MAX_MONOMIALS {
                            return Err(PolynomialError::TooManyMonomials {
                                node: id,
                                limit: MAX_MONOMIALS,
                            });
                        }
                        acc = next;
                    }
                    acc.retain(|_, k| *k != 0.0);
                    acc
                }
                Node::OneMinus(c) => {
                    let mut acc = constant(1.0);
                    for (m, k) in polys[*c].as_ref().expect("child expanded") {
                        *acc.entry(m.clone()).or_insert(0.0) -= k;
                    }
                    acc.retain(|_, k| *k != 0.0);
                    acc
                }
            };
            if poly.len() > MAX_MONOMIALS {
                return Err(PolynomialError::TooManyMonomials {
                    node: id,
                    limit: MAX_MONOMIALS,
                });
            }
            for &c in node.children() {
                remaining_uses[c] -= 1;
                if remaining_uses[c] == 0 {
                    polys[c] = None;
                }
            }
            if remaining_uses[id] > 0 {
                polys[id] = Some(poly);
            }
        }

        Ok(circuit
            .outputs()
            .iter()
            .map(|&o| {
                let sparse = polys[o].as_ref().expect("outputs are kept");
                Self::from_sparse(circuit.num_leaves(), sparse)
            })
            .collect())
    }

    fn from_sparse(num_leaves: usize, sparse: &Sparse) -> Self {
        let mut terms: Vec<Term> = sparse
            .iter()
            .map(|(m, &coef)| Term {
                coef,
                vars: m.clone(),
            })
            .collect();
        terms.sort_by(|a, b| a.vars.cmp(&b.vars));
        Self::from_terms(num_leaves, terms)
    }

    /// Builds a polynomial from terms whose variable lists are sorted and distinct.
    pub fn from_terms(num_leaves: usize, terms: Vec<Term>) -> Self {
        let mut occurrences = vec![Vec::new(); num_leaves];
        for (t, term) in terms.iter().enumerate() {
            debug_assert!(term.vars.windows(2).all(|w| w[0] < w[1]));
            for &v in term.vars.iter() {
                occurrences[v as usize].push(t as u32);
            }
        }
        MultilinearPolynomial {
            num_leaves,
            terms,
            occurrences,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn num_leaves(&self) -> usize {
        self.num_leaves
    }

    pub fn eval(&self, leaves: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.vars.iter().map(|&v| leaves[v as usize]).product::<f64>())
            .sum()
    }

    fn term_enclosure(&self, t: &Term, state: &[Interval], skip: Option<u32>) -> Interval {
        let mut acc = Interval::point(t.coef).expect("finite coefficient");
        for &v in t.vars.iter() {
            if Some(v) != skip {
                acc = acc * state[v as usize];
            }
        }
        acc
    }

    /// Naive interval enclosure, term by term.
    pub fn enclosure(&self, state: &[Interval]) -> Interval {
        self.terms
            .iter()
            .fold(Interval::ZERO, |acc, t| acc + self.term_enclosure(t, state, None))
    }

    fn derivative(&self, state: &[Interval], leaf: u32) -> Interval {
        self.occurrences[leaf as usize]
            .iter()
            .fold(Interval::ZERO, |acc, &t| {
                acc + self.term_enclosure(&self.terms[t as usize], state, Some(leaf))
            })
    }

    fn eval_vertex(&self, state: &[Interval]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.vars.iter().map(|&v| state[v as usize].lo()).product::<f64>())
            .sum()
    }

    /// Exact range of the polynomial over the box `bounds`.
    pub fn extrema(&self, bounds: &[Interval]) -> Result<Interval, PolynomialError> {
        if bounds.len() != self.num_leaves {
            return Err(PolynomialError::LeafCount {
                expected: self.num_leaves,
                got: bounds.len(),
            });
        }
        let hi = self.optimize(bounds, 1.0);
        let lo = -self.optimize(bounds, -1.0);
        Ok(Interval::new(lo, hi)?)
    }

    /// Maximum of `sign * p` over the box.
    fn optimize(&self, bounds: &[Interval], sign: f64) -> f64 {
        let mut state = bounds.to_vec();
        let free: Vec<u32> = (0..self.num_leaves as u32)
            .filter(|&v| !self.occurrences[v as usize].is_empty())
            .filter(|&v| !bounds[v as usize].is_degenerate())
            .collect();
        let mut best = f64::NEG_INFINITY;
        self.search(&mut state, free, sign, &mut best);
        best
    }

    fn search(&self, state: &mut [Interval], mut free: Vec<u32>, sign: f64, best: &mut f64) {
        let mut undecided: Vec<(u32, Interval)>;
        loop {
            undecided = Vec::with_capacity(free.len());
            let mut fixed_any = false;
            for &v in &free {
                let d = signed(self.derivative(state, v), sign);
                let cur = state[v as usize];
                if d.lo() >= 0.0 {
                    state[v as usize] = Interval::point(cur.hi()).expect("finite");
                    fixed_any = true;
                } else if d.hi() <= 0.0 {
                    state[v as usize] = Interval::point(cur.lo()).expect("finite");
                    fixed_any = true;
                } else {
                    undecided.push((v, d));
                }
            }
            free = undecided.iter().map(|&(v, _)| v).collect();
            if !fixed_any || free.is_empty() {
                break;
            }
        }

        if free.is_empty() {
            *best = best.max(sign * self.eval_vertex(state));
            return;
        }
        if signed(self.enclosure(state), sign).hi() <= *best {
            return;
        }

        let &(var, d) = undecided
            .iter()
            .max_by(|a, b| {
                let wa = a.1.width() * state[a.0 as usize].width();
                let wb = b.1.width() * state[b.0 as usize].width();
                wa.total_cmp(&wb).then(b.0.cmp(&a.0))
            })
            .expect("free is nonempty");
        let rest: Vec<u32> = free.iter().copied().filter(|&v| v != var).collect();
        let cur = state[var as usize];
        let order = if d.midpoint() >= 0.0 {
            [cur.hi(), cur.lo()]
        } else {
            [cur.lo(), cur.hi()]
        };
        for endpoint in order {
            let mut branch = state.to_vec();
            branch[var as usize] = Interval::point(endpoint).expect("finite");
            self.search(&mut branch, rest.clone(), sign, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, LeafBounds};
    use crate::test_support::loose_circuit;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn expansion_of_loose_circuit() {
        // a + (1 - a) b = a + b - ab
        let p = &MultilinearPolynomial::from_circuit(&loose_circuit()).unwrap()[0];
        let mut terms: Vec<(Vec<u32>, f64)> =
            p.terms().iter().map(|t| (t.vars.to_vec(), t.coef)).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(terms, vec![(vec![0], 1.0), (vec![0, 1], -1.0), (vec![1], 1.0)]);
        assert_eq!(p.extrema(&[Interval::UNIT, iv(0.5, 0.5)]).unwrap(), iv(0.5, 1.0));
    }

    #[test]
    fn rejects_non_multilinear_products() {
        let mut b = CircuitBuilder::new(1);
        let x = b.leaf(0);
        let nx = b.one_minus(x);
        let sq = b.mul([x, nx]);
        let c = b.finish(vec![sq]).unwrap();
        assert!(matches!(
            MultilinearPolynomial::from_circuit(&c),
            Err(PolynomialError::NotMultilinear { leaf: 0, .. })
        ));
    }

    #[test]
    fn saddle_needs_branching() {
        // (x - 1/2)(y - 1/2) = xy - x/2 - y/2 + 1/4 on the unit square: range [-1/4, 1/4].
        let p = MultilinearPolynomial::from_terms(
            2,
            vec![
                Term { coef: 0.25, vars: Box::from([]) },
                Term { coef: -0.5, vars: Box::from([0]) },
                Term { coef: 1.0, vars: Box::from([0, 1]) },
                Term { coef: -0.5, vars: Box::from([1]) },
            ],
        );
        assert_eq!(p.extrema(&[Interval::UNIT, Interval::UNIT]).unwrap(), iv(-0.25, 0.25));
        assert!(matches!(p.extrema(&[Interval::UNIT]), Err(PolynomialError::LeafCount { .. })));
    }

    /// Random circuits with one-minus nodes over disjoint leaf groups, so products stay multilinear.
    fn random_circuit(seed: u64, leaves: usize) -> Circuit {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut b = CircuitBuilder::new(leaves);
        fn build(
            b: &mut CircuitBuilder,
            rng: &mut rand_chacha::ChaCha8Rng,
            vars: &[usize],
        ) -> usize {
            if vars.len() == 1 {
                let l = b.leaf(vars[0]);
                return if rng.gen_bool(0.4) { b.one_minus(l) } else { l };
            }
            if rng.gen_bool(0.3) {
                // Decision on the first leaf over two independent sub-circuits.
                let v = b.leaf(vars[0]);
                let nv = b.one_minus(v);
                let hi = build(b, rng, &vars[1..]);
                let lo = build(b, rng, &vars[1..]);
                let with = b.mul([v, hi]);
                let without = b.mul([nv, lo]);
                return b.add([with, without]);
            }
            let split = rng.gen_range(1..vars.len());
            let (l, r) = vars.split_at(split);
            let x = build(b, rng, l);
            let y = build(b, rng, r);
            match rng.gen_range(0..3) {
                0 => b.mul([x, y]),
                1 => {
                    let k = b.constant(rng.gen_range(0.1..0.9));
                    let kx = b.mul([k, x]);
                    let nk = b.constant(1.0 - rng.gen_range(0.1..0.9));
                    let ky = b.mul([nk, y]);
                    b.add([kx, ky])
                }
                _ => {
                    let m = b.mul([x, y]);
                    b.one_minus(m)
                }
            }
        }
        let vars: Vec<usize> = (0..leaves).collect();
        let out = build(&mut b, &mut rng, &vars);
        b.finish(vec![out]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_vertex_enumeration(seed in any::<u64>(), leaves in 1usize..9,
                                      raw in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0, any::<bool>()), 9)) {
            let c = random_circuit(seed, leaves);
            let ivs: Vec<Interval> = raw[..leaves].iter().map(|&(a, b, point)| {
                if point { iv(a, a) } else { iv(a.min(b), a.max(b)) }
            }).collect();
            let p = &MultilinearPolynomial::from_circuit(&c).unwrap()[0];
            let exact = p.extrema(&ivs).unwrap();
            let vertex = c.vertex_bounds(&LeafBounds::new(ivs.clone()).unwrap()).unwrap()[0];
            prop_assert!((exact.lo() - vertex.lo()).abs() < 1e-12, "{} vs {}", exact, vertex);
            prop_assert!((exact.hi() - vertex.hi()).abs() < 1e-12, "{} vs {}", exact, vertex);
            let mid: Vec<f64> = ivs.iter().map(Interval::midpoint).collect();
            prop_assert!((p.eval(&mid) - c.eval(&mid).unwrap()[0]).abs() < 1e-12);
        }
    }
}
