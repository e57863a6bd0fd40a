//! Decision-DNNF by top-down Shannon expansion.
//!
//! `f = (v & f|v) | (!v & f|!v)` on the caller's variable order, with three
//! simplifications before expanding: unit literals of a top-level
//! conjunction are pulled out, conjunctions whose children share no
//! variables are compiled component-wise, and every simplified sub-formula
//! is looked up in a cache first.

use std::collections::HashMap;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder, CircuitError};
use crate::logic::{Formula, VarId};

/// Largest universe [`compile`] accepts.
pub const MAX_COMPILE_VARS: usize = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("variable order is not a permutation: {0}")]
    BadOrder(String),
    #[error("{count} variables exceed the compilation guard of {limit}")]
    TooManyVariables { count: usize, limit: usize },
    #[error("decision node {node} on {var} is not smooth")]
    NotSmooth { node: DnnfId, var: VarId },
    #[error("sum circuit needs 1..={max_digits} digits and at least 2 classes, got {digits} x {classes}")]
    SumSize {
        digits: usize,
        classes: usize,
        max_digits: usize,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

pub type DnnfId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DnnfNode {
    True,
    False,
    Literal(VarId, bool),
    /// `(var & hi) | (!var & lo)`; neither branch mentions `var`.
    Decision {
        var: VarId,
        hi: DnnfId,
        lo: DnnfId,
    },
    /// Conjunction of children over pairwise disjoint variable sets.
    And(Vec<DnnfId>),
}

/// Hash-consed decision-DNNF rooted at [`Dnnf::root`].
#[derive(Debug, Clone)]
pub struct Dnnf {
    num_vars: usize,
    nodes: Vec<DnnfNode>,
    masks: Vec<u64>,
    unique: HashMap<DnnfNode, DnnfId>,
    root: DnnfId,
}

impl PartialEq for Dnnf {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.root == other.root && self.nodes == other.nodes
    }
}

impl Dnnf {
    fn empty(num_vars: usize) -> Self {
        let mut d = Dnnf {
            num_vars,
            nodes: Vec::new(),
            masks: Vec::new(),
            unique: HashMap::new(),
            root: 0,
        };
        d.intern(DnnfNode::False);
        d.intern(DnnfNode::True);
        d
    }

    const FALSE: DnnfId = 0;
    const TRUE: DnnfId = 1;

    fn intern(&mut self, node: DnnfNode) -> DnnfId {
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let mask = match &node {
            DnnfNode::True | DnnfNode::False => 0,
            DnnfNode::Literal(v, _) => 1 << v.0,
            DnnfNode::Decision { var, hi, lo } => (1 << var.0) | self.masks[*hi] | self.masks[*lo],
            DnnfNode::And(cs) => cs.iter().fold(0, |m, &c| m | self.masks[c]),
        };
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.masks.push(mask);
        self.unique.insert(node, id);
        id
    }

    fn literal(&mut self, v: VarId, positive: bool) -> DnnfId {
        self.intern(DnnfNode::Literal(v, positive))
    }

    fn and(&mut self, children: impl IntoIterator<Item = DnnfId>) -> DnnfId {
        let mut cs = Vec::new();
        for c in children {
            match &self.nodes[c] {
                DnnfNode::False => return Self::FALSE,
                DnnfNode::True => {}
                DnnfNode::And(inner) => cs.extend_from_slice(inner),
                _ => cs.push(c),
            }
        }
        cs.sort_unstable();
        cs.dedup();
        match cs.len() {
            0 => Self::TRUE,
            1 => cs[0],
            _ => self.intern(DnnfNode::And(cs)),
        }
    }

    fn decision(&mut self, var: VarId, hi: DnnfId, lo: DnnfId) -> DnnfId {
        if hi == lo {
            return hi;
        }
        if hi == Self::FALSE {
            let l = self.literal(var, false);
            return self.and([l, lo]);
        }
        if lo == Self::FALSE {
            let l = self.literal(var, true);
            return self.and([l, hi]);
        }
        self.intern(DnnfNode::Decision { var, hi, lo })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn root(&self) -> DnnfId {
        self.root
    }

    pub fn node(&self, id: DnnfId) -> &DnnfNode {
        &self.nodes[id]
    }

    /// Nodes reachable from the root, children before parents.
    pub fn reachable(&self) -> Vec<DnnfId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                order.push(id);
                continue;
            }
            if seen[id] {
                continue;
            }
            seen[id] = true;
            stack.push((id, true));
            match &self.nodes[id] {
                DnnfNode::Decision { hi, lo, .. } => {
                    stack.push((*lo, false));
                    stack.push((*hi, false));
                }
                DnnfNode::And(cs) => stack.extend(cs.iter().rev().map(|&c| (c, false))),
                _ => {}
            }
        }
        order
    }

    /// Number of nodes reachable from the root.
    pub fn size(&self) -> usize {
        self.reachable().len()
    }

    /// Variables mentioned below `id`.
    pub fn vars_of(&self, id: DnnfId) -> Vec<VarId> {
        let m = self.masks[id];
        (0..64u32).filter(|i| (m >> i) & 1 == 1).map(VarId).collect()
    }

    fn branches_smooth(&self, hi: DnnfId, lo: DnnfId) -> bool {
        hi == Self::FALSE || lo == Self::FALSE || self.masks[hi] == self.masks[lo]
    }

    /// Every reachable decision has branches over identical variable sets
    /// (a `False` branch matches any set).
    pub fn is_smooth(&self) -> bool {
        self.reachable().into_iter().all(|id| match self.nodes[id] {
            DnnfNode::Decision { hi, lo, .. } => self.branches_smooth(hi, lo),
            _ => true,
        })
    }

    /// Decomposability and determinism of every reachable node.
    pub fn check_structure(&self) -> Result<(), String> {
        for id in self.reachable() {
            match &self.nodes[id] {
                DnnfNode::And(cs) => {
                    let mut seen = 0u64;
                    for &c in cs {
                        if seen & self.masks[c] != 0 {
                            return Err(format!("and node {id} is not decomposable"));
                        }
                        seen |= self.masks[c];
                    }
                }
                DnnfNode::Decision { var, hi, lo } => {
                    if (self.masks[*hi] | self.masks[*lo]) >> var.0 & 1 == 1 {
                        return Err(format!("decision node {id} mentions {var} below itself"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Models over the full `num_vars` universe.
    pub fn model_count(&self) -> u128 {
        let mut counts = vec![0u128; self.nodes.len()];
        let bits = |m: u64| m.count_ones();
        for id in self.reachable() {
            counts[id] = match &self.nodes[id] {
                DnnfNode::True | DnnfNode::Literal(..) => 1,
                DnnfNode::False => 0,
                DnnfNode::And(cs) => cs.iter().map(|&c| counts[c]).product(),
                DnnfNode::Decision { hi, lo, .. } => {
                    let below = bits(self.masks[id]) - 1;
                    (counts[*hi] << (below - bits(self.masks[*hi])))
                        + (counts[*lo] << (below - bits(self.masks[*lo])))
                }
            };
        }
        counts[self.root] << (self.num_vars as u32 - bits(self.masks[self.root]))
    }

    /// Multiplies "don't care" gadgets `(w & true) | (!w & true)` into decision
    /// branches until both sides mention the same variables.
    pub fn smooth(&self) -> Dnnf {
        if self.is_smooth() {
            return self.clone();
        }
        let mut out = Dnnf::empty(self.num_vars);
        let mut map = vec![usize::MAX; self.nodes.len()];
        map[Self::FALSE] = Self::FALSE;
        map[Self::TRUE] = Self::TRUE;
        for id in self.reachable() {
            map[id] = match &self.nodes[id] {
                DnnfNode::True => Self::TRUE,
                DnnfNode::False => Self::FALSE,
                DnnfNode::Literal(v, p) => out.literal(*v, *p),
                DnnfNode::And(cs) => {
                    let cs: Vec<DnnfId> = cs.iter().map(|&c| map[c]).collect();
                    out.and(cs)
                }
                DnnfNode::Decision { var, hi, lo } => {
                    let (h, l) = (map[*hi], map[*lo]);
                    let (hm, lm) = (self.masks[*hi], self.masks[*lo]);
                    let h = if *hi == Self::FALSE { h } else { out.pad(h, lm & !hm) };
                    let l = if *lo == Self::FALSE { l } else { out.pad(l, hm & !lm) };
                    out.intern(DnnfNode::Decision { var: *var, hi: h, lo: l })
                }
            };
        }
        out.root = map[self.root];
        out
    }

    fn pad(&mut self, node: DnnfId, missing: u64) -> DnnfId {
        if missing == 0 {
            return node;
        }
        let mut parts = vec![node];
        for i in 0..64u32 {
            if (missing >> i) & 1 == 1 {
                parts.push(self.intern(DnnfNode::Decision {
                    var: VarId(i),
                    hi: Self::TRUE,
                    lo: Self::TRUE,
                }));
            }
        }
        self.and(parts)
    }

    /// NAT-semiring translation: and to product, decision to sum of
    /// literal-weighted branches, negative literal to `1 - leaf`.
    ///
    /// Leaf `i` of the circuit carries `p(VarId(i))`.
    pub fn to_arith_circuit(&self) -> Result<Circuit, CompileError> {
        let mut b = CircuitBuilder::new(self.num_vars);
        let mut map = vec![usize::MAX; self.nodes.len()];
        for id in self.reachable() {
            map[id] = match &self.nodes[id] {
                DnnfNode::True => b.constant(1.0),
                DnnfNode::False => b.constant(0.0),
                DnnfNode::Literal(v, true) => b.leaf(v.index()),
                DnnfNode::Literal(v, false) => {
                    let l = b.leaf(v.index());
                    b.one_minus(l)
                }
                DnnfNode::And(cs) => {
                    let cs: Vec<usize> = cs.iter().map(|&c| map[c]).collect();
                    b.mul(cs)
                }
                DnnfNode::Decision { var, hi, lo } => {
                    if !self.branches_smooth(*hi, *lo) {
                        return Err(CompileError::NotSmooth { node: id, var: *var });
                    }
                    let pos = b.leaf(var.index());
                    let neg = b.one_minus(pos);
                    let h = b.mul([pos, map[*hi]]);
                    let l = b.mul([neg, map[*lo]]);
                    b.add([h, l])
                }
            };
        }
        let root = map[self.root];
        Ok(b.finish(vec![root])?)
    }
}

fn is_literal(f: &Formula) -> Option<(VarId, bool)> {
    match f {
        Formula::Var(v) => Some((*v, true)),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Var(v) => Some((*v, false)),
            _ => None,
        },
        _ => None,
    }
}

/// Constant folding plus flattening; `And`/`Or` children are sorted and
/// deduplicated so equal sub-formulas share a cache entry.
pub(crate) fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Var(_) => f.clone(),
        Formula::Not(g) => match simplify(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(h) => *h,
            other => other.not(),
        },
        Formula::And(gs) => {
            let mut out = Vec::new();
            for g in gs {
                match simplify(g) {
                    Formula::False => return Formula::False,
                    Formula::True => {}
                    Formula::And(inner) => out.extend(inner),
                    other => out.push(other),
                }
            }
            out.sort();
            out.dedup();
            match out.len() {
                0 => Formula::True,
                1 => out.pop().unwrap(),
                _ => Formula::And(out),
            }
        }
        Formula::Or(gs) => {
            let mut out = Vec::new();
            for g in gs {
                match simplify(g) {
                    Formula::True => return Formula::True,
                    Formula::False => {}
                    Formula::Or(inner) => out.extend(inner),
                    other => out.push(other),
                }
            }
            out.sort();
            out.dedup();
            match out.len() {
                0 => Formula::False,
                1 => out.pop().unwrap(),
                _ => Formula::Or(out),
            }
        }
        Formula::Implies(a, b) => match (simplify(a), simplify(b)) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, b) => b,
            (a, Formula::False) => simplify(&a.not()),
            (a, b) if a == b => Formula::True,
            (a, b) => a.implies(b),
        },
        Formula::Iff(a, b) => match (simplify(a), simplify(b)) {
            (Formula::True, x) | (x, Formula::True) => x,
            (Formula::False, x) | (x, Formula::False) => simplify(&x.not()),
            (a, b) if a == b => Formula::True,
            (a, b) => a.iff(b),
        },
    }
}

fn substitute(f: &Formula, var: VarId, value: bool) -> Formula {
    match f {
        Formula::Var(v) if *v == var => {
            if value {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::True | Formula::False | Formula::Var(_) => f.clone(),
        Formula::Not(g) => substitute(g, var, value).not(),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| substitute(g, var, value)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| substitute(g, var, value)).collect()),
        Formula::Implies(a, b) => substitute(a, var, value).implies(substitute(b, var, value)),
        Formula::Iff(a, b) => substitute(a, var, value).iff(substitute(b, var, value)),
    }
}

/// `f` restricted by `var = value`, simplified.
pub(crate) fn condition(f: &Formula, var: VarId, value: bool) -> Formula {
    simplify(&substitute(f, var, value))
}

fn mask_of(f: &Formula) -> u64 {
    f.vars().into_iter().fold(0, |m, v| m | (1 << v.0))
}

struct Compiler<'a> {
    dnnf: Dnnf,
    cache: HashMap<Formula, DnnfId>,
    order: &'a [VarId],
}

impl Compiler<'_> {
    fn compile(&mut self, f: Formula) -> DnnfId {
        match f {
            Formula::True => return Dnnf::TRUE,
            Formula::False => return Dnnf::FALSE,
            _ => {}
        }
        if let Some(&id) = self.cache.get(&f) {
            return id;
        }
        let id = self.expand(&f);
        self.cache.insert(f, id);
        id
    }

    fn expand(&mut self, f: &Formula) -> DnnfId {
        if let Some((v, p)) = is_literal(f) {
            return self.dnnf.literal(v, p);
        }
        if let Formula::And(children) = f {
            let units: Vec<(VarId, bool)> = children.iter().filter_map(is_literal).collect();
            if !units.is_empty() {
                let mut rest = f.clone();
                let mut lits = Vec::with_capacity(units.len());
                for &(v, p) in &units {
                    rest = condition(&rest, v, p);
                    lits.push(self.dnnf.literal(v, p));
                }
                // Conflicting units leave `v & !v`, which conditioning folds to false.
                if units
                    .iter()
                    .any(|&(v, p)| units.contains(&(v, !p)))
                {
                    return Dnnf::FALSE;
                }
                let body = self.compile(rest);
                lits.push(body);
                return self.dnnf.and(lits);
            }
            if let Some(groups) = components(children) {
                let parts: Vec<DnnfId> = groups
                    .into_iter()
                    .map(|g| {
                        let sub = if g.len() == 1 {
                            g.into_iter().next().unwrap()
                        } else {
                            Formula::And(g)
                        };
                        self.compile(sub)
                    })
                    .collect();
                return self.dnnf.and(parts);
            }
        }
        let mask = mask_of(f);
        let var = *self
            .order
            .iter()
            .find(|v| (mask >> v.0) & 1 == 1)
            .expect("a non-constant formula mentions a variable");
        let hi = self.compile(condition(f, var, true));
        let lo = self.compile(condition(f, var, false));
        self.dnnf.decision(var, hi, lo)
    }
}

/// Splits conjuncts into variable-disjoint groups, or `None` if connected.
fn components(children: &[Formula]) -> Option<Vec<Vec<Formula>>> {
    let masks: Vec<u64> = children.iter().map(mask_of).collect();
    let mut group_masks: Vec<u64> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &m) in masks.iter().enumerate() {
        let mut merged_mask = m;
        let mut merged = vec![i];
        let mut k = 0;
        while k < groups.len() {
            if group_masks[k] & merged_mask != 0 {
                merged_mask |= group_masks.swap_remove(k);
                merged.extend(groups.swap_remove(k));
            } else {
                k += 1;
            }
        }
        group_masks.push(merged_mask);
        groups.push(merged);
    }
    if groups.len() < 2 {
        return None;
    }
    let mut out: Vec<Vec<Formula>> = groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            g.into_iter().map(|i| children[i].clone()).collect()
        })
        .collect();
    out.sort();
    Some(out)
}

/// Compiles `f` into decision-DNNF, branching on variables in `order`.
///
/// `order` must be a permutation of `VarId(0)..VarId(order.len())` and
/// cover every variable of `f`; its length fixes the variable universe.
pub fn compile(f: &Formula, order: &[VarId]) -> Result<Dnnf, CompileError> {
    let n = order.len();
    if n > MAX_COMPILE_VARS {
        return Err(CompileError::TooManyVariables {
            count: n,
            limit: MAX_COMPILE_VARS,
        });
    }
    let mut seen = vec![false; n];
    for v in order {
        match seen.get_mut(v.index()) {
            None => return Err(CompileError::BadOrder(format!("{v} is outside 0..{n}"))),
            Some(true) => return Err(CompileError::BadOrder(format!("{v} appears twice"))),
            Some(s) => *s = true,
        }
    }
    if let Some(v) = f.vars().into_iter().find(|v| v.index() >= n) {
        return Err(CompileError::BadOrder(format!(
            "formula mentions {v}, which the order omits"
        )));
    }
    let mut c = Compiler {
        dnnf: Dnnf::empty(n),
        cache: HashMap::new(),
        order,
    };
    let root = c.compile(simplify(f));
    c.dnnf.root = root;
    Ok(c.dnnf)
}

/// [`compile`] with variables ordered by first appearance in `f`, followed
/// by any remaining ids of the `num_vars` universe.
pub fn compile_default(f: &Formula, num_vars: usize) -> Result<Dnnf, CompileError> {
    let mut order = f.vars_in_order();
    order.retain(|v| v.index() < num_vars);
    for i in 0..num_vars as u32 {
        if !order.contains(&VarId(i)) {
            order.push(VarId(i));
        }
    }
    if let Some(v) = f.vars().into_iter().find(|v| v.index() >= num_vars) {
        return Err(CompileError::BadOrder(format!(
            "formula mentions {v} outside the {num_vars}-variable universe"
        )));
    }
    compile(f, &order)
}

/// Formula to smooth decision-DNNF to arithmetic circuit in one step.
pub fn compile_to_circuit(f: &Formula, order: &[VarId]) -> Result<Circuit, CompileError> {
    compile(f, order)?.smooth().to_arith_circuit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Node;
    use crate::logic::{count_models, parse_formula, wmc_brute, WeightMap};
    use crate::test_support::arb_formula;
    use proptest::prelude::*;

    const DRIVING: &str = "((red_light | car_in_front) -> brake) & (accelerate <-> !brake)";

    fn ids(n: u32) -> Vec<VarId> {
        (0..n).map(VarId).collect()
    }

    #[test]
    fn disjunction_shannon_shape() {
        let (f, pool) = parse_formula("a | b").unwrap();
        let (a, b) = (pool.get("a").unwrap(), pool.get("b").unwrap());
        let d = compile(&f, &[a, b]).unwrap();
        match d.node(d.root()) {
            DnnfNode::Decision { var, hi, lo } => {
                assert_eq!(*var, a);
                assert_eq!(d.node(*hi), &DnnfNode::True);
                assert_eq!(d.node(*lo), &DnnfNode::Literal(b, true));
            }
            other => panic!("expected a decision, got {other:?}"),
        }
        assert_eq!(d.model_count(), 3);
        assert!(!d.is_smooth());
    }

    #[test]
    fn contradiction_collapses() {
        let (f, _) = parse_formula("a & !a").unwrap();
        let d = compile(&f, &ids(1)).unwrap();
        assert_eq!(d.node(d.root()), &DnnfNode::False);
        let (g, _) = parse_formula("(a | b) & !a & a").unwrap();
        assert_eq!(compile(&g, &ids(2)).unwrap().model_count(), 0);
    }

    #[test]
    fn driving_constraint_counts_five() {
        let (f, pool) = parse_formula(DRIVING).unwrap();
        let d = compile_default(&f, pool.len()).unwrap();
        d.check_structure().unwrap();
        assert_eq!(d.model_count(), 5);
        let s = d.smooth();
        assert!(s.is_smooth());
        assert_eq!(s.model_count(), 5);
    }

    #[test]
    fn smoothing_adds_gadget() {
        let (f, pool) = parse_formula("a | b").unwrap();
        let (a, b) = (pool.get("a").unwrap(), pool.get("b").unwrap());
        let s = compile(&f, &[a, b]).unwrap().smooth();
        let DnnfNode::Decision { hi, lo, .. } = s.node(s.root()).clone() else {
            panic!("root should stay a decision");
        };
        assert_eq!(s.vars_of(hi), vec![b]);
        assert_eq!(s.vars_of(lo), vec![b]);
        assert_eq!(
            s.node(hi),
            &DnnfNode::Decision {
                var: b,
                hi: 1,
                lo: 1
            }
        );
        // Idempotent.
        assert_eq!(s.smooth(), s);
    }

    #[test]
    fn smoothed_circuit_matches_oracle_on_driving_weights() {
        let (f, pool) = parse_formula(DRIVING).unwrap();
        let c = compile_default(&f, pool.len()).unwrap().smooth().to_arith_circuit().unwrap();
        // Pool order (r, c, b, a).
        let w = [0.6, 0.8, 0.7, 0.3];
        let got = c.eval(&w).unwrap()[0];
        let oracle = wmc_brute(&f, &WeightMap::new(w.to_vec()).unwrap()).unwrap();
        assert!((got - 0.4972).abs() < 1e-12);
        assert!((got - oracle).abs() < 1e-12);
        let ones = c.eval(&[0.5; 4]).unwrap()[0];
        assert!((ones - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn literal_and_constant_translation() {
        let (f, _) = parse_formula("!x").unwrap();
        let c = compile(&f, &ids(1)).unwrap().to_arith_circuit().unwrap();
        assert_eq!(c.nodes(), &[Node::Leaf(0), Node::OneMinus(0)]);
        let t = compile(&Formula::True, &ids(0)).unwrap().to_arith_circuit().unwrap();
        assert_eq!(t.nodes(), &[Node::Const(1.0)]);
        assert_eq!(t.eval(&[]).unwrap(), vec![1.0]);
    }

    #[test]
    fn non_smooth_input_is_rejected() {
        let (f, _) = parse_formula("a | b").unwrap();
        let d = compile(&f, &ids(2)).unwrap();
        assert!(matches!(d.to_arith_circuit(), Err(CompileError::NotSmooth { .. })));
    }

    #[test]
    fn order_validation() {
        let (f, _) = parse_formula("a | b").unwrap();
        assert!(matches!(compile(&f, &[VarId(0)]), Err(CompileError::BadOrder(_))));
        assert!(matches!(
            compile(&f, &[VarId(0), VarId(0)]),
            Err(CompileError::BadOrder(_))
        ));
        assert!(matches!(
            compile(&f, &[VarId(0), VarId(2)]),
            Err(CompileError::BadOrder(_))
        ));
        let wide: Vec<VarId> = ids(31);
        assert!(matches!(
            compile(&f, &wide),
            Err(CompileError::TooManyVariables { count: 31, .. })
        ));
    }

    #[test]
    fn independent_components() {
        let (f, _) = parse_formula("(a | b) & (c | d) & (e <-> f)").unwrap();
        let d = compile(&f, &ids(6)).unwrap();
        d.check_structure().unwrap();
        assert!(matches!(d.node(d.root()), DnnfNode::And(cs) if cs.len() == 3));
        assert_eq!(d.model_count(), 3 * 3 * 2);
    }

    fn shuffled(n: u32, seed: u64) -> Vec<VarId> {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut v = ids(n);
        v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn circuit_equals_brute_wmc(f in arb_formula(12, 4),
                                    w in prop::collection::vec(0.0f64..=1.0, 12)) {
            let d = compile(&f, &ids(12)).unwrap();
            prop_assert!(d.check_structure().is_ok());
            prop_assert_eq!(d.model_count(), count_models(&f, 12, &[]).unwrap() as u128);
            let c = d.smooth().to_arith_circuit().unwrap();
            let got = c.eval(&w).unwrap()[0];
            let oracle = wmc_brute(&f, &WeightMap::new(w).unwrap()).unwrap();
            prop_assert!((got - oracle).abs() < 1e-12, "{} vs {}", got, oracle);
        }

        #[test]
        fn semantics_do_not_depend_on_order(f in arb_formula(8, 4), seed in any::<u64>(),
                                            w in prop::collection::vec(0.0f64..=1.0, 8)) {
            let base = compile_to_circuit(&f, &ids(8)).unwrap().eval(&w).unwrap()[0];
            for k in 0..5 {
                let order = shuffled(8, seed.wrapping_add(k));
                let c = compile_to_circuit(&f, &order).unwrap();
                prop_assert!((c.eval(&w).unwrap()[0] - base).abs() < 1e-12);
            }
        }

        #[test]
        fn compiled_circuits_are_multilinear(f in arb_formula(6, 4), leaf in 0usize..6,
                                             w in prop::collection::vec(0.0f64..=1.0, 6)) {
            let c = compile_to_circuit(&f, &ids(6)).unwrap();
            let at = |x: f64| {
                let mut v = w.clone();
                v[leaf] = x;
                c.eval(&v).unwrap()[0]
            };
            let (y0, y1, y2) = (at(0.0), at(0.5), at(1.0));
            prop_assert!((y1 - 0.5 * (y0 + y2)).abs() < 1e-12);
        }
    }
}
