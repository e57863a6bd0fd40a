//! Arithmetic circuits over leaf probabilities.
//!
//! A [`Circuit`] is a DAG stored in topological order: every child id is
//! smaller than its parent's id. Leaves are indexed `0..num_leaves` and are
//! fed either literal probabilities (compiled formulas) or network outputs.
//!
//! Three evaluators share the structure:
//!
//! - [`Circuit::eval`]: one concrete bottom-up pass.
//! - [`Circuit::eval_interval`]: the same pass in interval arithmetic. Sound
//!   but loose whenever a leaf feeds several paths.
//! - [`Circuit::vertex_bounds`] and [`MultilinearPolynomial::extrema`]: exact
//!   extrema over the leaf box, relying on the output being multilinear in
//!   the leaves.

mod bounds;
mod format;
mod polynomial;

use std::collections::HashMap;

use thiserror::Error;

use crate::interval::IntervalError;

pub use bounds::{e_wmc_decide, LeafBounds, MAX_VERTEX_LEAVES};
pub use format::{parse_circuit, write_circuit, FormatError};
pub use polynomial::{MultilinearPolynomial, PolynomialError, Term, MAX_MONOMIALS};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf(usize),
    Const(f64),
    Add(Vec<NodeId>),
    Mul(Vec<NodeId>),
    OneMinus(NodeId),
}

impl Node {
    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::Leaf(_) | Node::Const(_) => &[],
            Node::Add(cs) | Node::Mul(cs) => cs,
            Node::OneMinus(c) => std::slice::from_ref(c),
        }
    }
}

/// One broken structural invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub node: Option<NodeId>,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.node {
            Some(id) => write!(f, "node {id}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("invalid circuit: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("expected {expected} leaf values, got {got}")]
    LeafCount { expected: usize, got: usize },
    #[error("leaf {leaf} bound {lo}..{hi} is not inside [0, 1]")]
    LeafOutOfUnit { leaf: usize, lo: f64, hi: f64 },
    #[error("{free} non-degenerate leaves exceed the vertex-enumeration guard of {limit}")]
    TooManyVertices { free: usize, limit: usize },
    #[error("output index {index} out of range for {outputs} outputs")]
    OutputIndex { index: usize, outputs: usize },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// Reports every violated invariant of a candidate circuit.
pub fn validate(num_leaves: usize, nodes: &[Node], outputs: &[NodeId]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |node: Option<NodeId>, message: String| out.push(Diagnostic { node, message });
    for (id, node) in nodes.iter().enumerate() {
        match node {
            Node::Leaf(leaf) if *leaf >= num_leaves => diag(
                Some(id),
                format!("leaf out of range: index {leaf} but only {num_leaves} leaves"),
            ),
            Node::Const(c) if !c.is_finite() => {
                diag(Some(id), format!("non-finite constant {c}"))
            }
            Node::Add(cs) | Node::Mul(cs) if cs.is_empty() => {
                diag(Some(id), "add/mul node without children".into())
            }
            _ => {}
        }
        for &child in node.children() {
            if child >= id {
                diag(
                    Some(id),
                    format!("topology violation at node {id}: child {child} does not precede it"),
                );
            }
        }
    }
    if outputs.is_empty() {
        diag(None, "circuit declares no outputs".into());
    }
    for &o in outputs {
        if o >= nodes.len() {
            diag(None, format!("output {o} refers to a missing node"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_leaves: usize,
    nodes: Vec<Node>,
    outputs: Vec<NodeId>,
}

impl Circuit {
    pub fn new(
        num_leaves: usize,
        nodes: Vec<Node>,
        outputs: Vec<NodeId>,
    ) -> Result<Self, CircuitError> {
        let diags = validate(num_leaves, &nodes, &outputs);
        if !diags.is_empty() {
            return Err(CircuitError::Invalid(diags));
        }
        Ok(Circuit {
            num_leaves,
            nodes,
            outputs,
        })
    }

    pub fn num_leaves(&self) -> usize {
        self.num_leaves
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Always empty for a constructed circuit.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(self.num_leaves, &self.nodes, &self.outputs)
    }

    /// Number of `Add`/`Mul` child edges plus `OneMinus` edges.
    pub fn num_edges(&self) -> usize {
        self.nodes.iter().map(|n| n.children().len()).sum()
    }

    pub fn eval(&self, leaves: &[f64]) -> Result<Vec<f64>, CircuitError> {
        let mut scratch = Vec::new();
        self.eval_with(leaves, &mut scratch)
    }

    /// [`Circuit::eval`] using a caller-owned buffer for node values.
    pub fn eval_with(&self, leaves: &[f64], scratch: &mut Vec<f64>) -> Result<Vec<f64>, CircuitError> {
        self.check_leaves(leaves.len())?;
        self.eval_nodes(leaves, scratch);
        Ok(self.outputs.iter().map(|&o| scratch[o]).collect())
    }

    fn check_leaves(&self, got: usize) -> Result<(), CircuitError> {
        if got != self.num_leaves {
            return Err(CircuitError::LeafCount {
                expected: self.num_leaves,
                got,
            });
        }
        Ok(())
    }

    pub(crate) fn eval_nodes(&self, leaves: &[f64], values: &mut Vec<f64>) {
        values.clear();
        values.reserve(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Leaf(i) => leaves[*i],
                Node::Const(c) => *c,
                Node::Add(cs) => cs.iter().map(|&c| values[c]).sum(),
                Node::Mul(cs) => cs.iter().map(|&c| values[c]).product(),
                Node::OneMinus(c) => 1.0 - values[*c],
            };
            values.push(v);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Leaf(usize),
    Const(u64),
    Add(Vec<NodeId>),
    Mul(Vec<NodeId>),
    OneMinus(NodeId),
}

/// Hash-consing builder; structurally identical nodes are shared.
///
/// Light constant folding is applied: multiplicative ones and additive
/// zeros are dropped, a zero factor collapses a product, and single-child
/// sums and products are replaced by the child.
#[derive(Debug, Clone, Default)]
pub struct CircuitBuilder {
    num_leaves: usize,
    nodes: Vec<Node>,
    unique: HashMap<Key, NodeId>,
}

impl CircuitBuilder {
    pub fn new(num_leaves: usize) -> Self {
        CircuitBuilder {
            num_leaves,
            ..Default::default()
        }
    }

    fn intern(&mut self, key: Key, node: Node) -> NodeId {
        if let Some(&id) = self.unique.get(&key) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node);
        self.unique.insert(key, id);
        id
    }

    fn const_value(&self, id: NodeId) -> Option<f64> {
        match self.nodes[id] {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn leaf(&mut self, index: usize) -> NodeId {
        assert!(index < self.num_leaves, "leaf {index} out of range");
        self.intern(Key::Leaf(index), Node::Leaf(index))
    }

    pub fn constant(&mut self, value: f64) -> NodeId {
        // Normalise -0.0 so it shares with 0.0.
        let value = if value == 0.0 { 0.0 } else { value };
        self.intern(Key::Const(value.to_bits()), Node::Const(value))
    }

    pub fn add(&mut self, children: impl IntoIterator<Item = NodeId>) -> NodeId {
        let cs: Vec<NodeId> = children
            .into_iter()
            .filter(|&c| self.const_value(c) != Some(0.0))
            .collect();
        match cs.len() {
            0 => self.constant(0.0),
            1 => cs[0],
            _ => self.intern(Key::Add(cs.clone()), Node::Add(cs)),
        }
    }

    pub fn mul(&mut self, children: impl IntoIterator<Item = NodeId>) -> NodeId {
        let mut cs = Vec::new();
        for c in children {
            match self.const_value(c) {
                Some(v) if v == 0.0 => return self.constant(0.0),
                Some(v) if v == 1.0 => {}
                _ => cs.push(c),
            }
        }
        match cs.len() {
            0 => self.constant(1.0),
            1 => cs[0],
            _ => self.intern(Key::Mul(cs.clone()), Node::Mul(cs)),
        }
    }

    pub fn one_minus(&mut self, child: NodeId) -> NodeId {
        if let Some(v) = self.const_value(child) {
            return self.constant(1.0 - v);
        }
        self.intern(Key::OneMinus(child), Node::OneMinus(child))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn finish(self, outputs: Vec<NodeId>) -> Result<Circuit, CircuitError> {
        Circuit::new(self.num_leaves, self.nodes, outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::loose_circuit;

    #[test]
    fn validate_reports_violations() {
        let good = loose_circuit();
        assert!(good.validate().is_empty());

        let diags = validate(1, &[Node::Add(vec![1]), Node::Leaf(0)], &[0]);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("topology violation at node 0"));

        let diags = validate(1, &[Node::Leaf(3)], &[0]);
        assert!(diags[0].message.starts_with("leaf out of range"));
        assert_eq!(diags[0].node, Some(0));

        let diags = validate(0, &[Node::Const(1.0), Node::Mul(vec![])], &[]);
        assert_eq!(diags.len(), 2);

        assert!(matches!(
            Circuit::new(0, vec![Node::Const(f64::NAN)], vec![0]),
            Err(CircuitError::Invalid(_))
        ));
        assert!(!validate(0, &[Node::Const(1.0)], &[4]).is_empty());
    }

    #[test]
    fn eval_examples() {
        let c = loose_circuit();
        let v = c.eval(&[0.25, 0.5]).unwrap();
        assert_eq!(v, vec![0.25 + 0.75 * 0.5]);
        assert!(matches!(
            c.eval(&[0.1]),
            Err(CircuitError::LeafCount { expected: 2, got: 1 })
        ));

        let constants = Circuit::new(
            3,
            vec![Node::Const(0.25), Node::Const(2.0)],
            vec![1, 0],
        )
        .unwrap();
        assert_eq!(constants.eval(&[0.9, 0.1, 0.3]).unwrap(), vec![2.0, 0.25]);
    }

    #[test]
    fn builder_shares_and_folds() {
        let mut b = CircuitBuilder::new(2);
        let x = b.leaf(0);
        assert_eq!(b.leaf(0), x);
        let one = b.constant(1.0);
        let zero = b.constant(-0.0);
        assert_eq!(b.mul([x, one]), x);
        assert_eq!(b.mul([x, zero]), zero);
        assert_eq!(b.add([zero, x]), x);
        let nx = b.one_minus(x);
        assert_eq!(b.one_minus(x), nx);
        let folded = b.one_minus(one);
        assert_eq!(b.const_value(folded), Some(0.0));
        let s1 = b.add([x, nx]);
        let s2 = b.add([x, nx]);
        assert_eq!(s1, s2);
    }
}
