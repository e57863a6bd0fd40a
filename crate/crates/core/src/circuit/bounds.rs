use super::{Circuit, CircuitError, Node};
use crate::interval::Interval;
use crate::logic::IntervalWeightMap;

/// Largest number of non-degenerate leaves [`Circuit::vertex_bounds`] enumerates.
pub const MAX_VERTEX_LEAVES: usize = 20;

/// Per-leaf intervals, each inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafBounds(Vec<Interval>);

impl LeafBounds {
    pub fn new(bounds: Vec<Interval>) -> Result<Self, CircuitError> {
        for (leaf, b) in bounds.iter().enumerate() {
            if !b.is_subset_of(&Interval::UNIT) {
                return Err(CircuitError::LeafOutOfUnit {
                    leaf,
                    lo: b.lo(),
                    hi: b.hi(),
                });
            }
        }
        Ok(LeafBounds(bounds))
    }

    /// Degenerate bounds at the given point.
    pub fn points(values: &[f64]) -> Result<Self, CircuitError> {
        let ivs = values
            .iter()
            .map(|&v| Interval::point(v))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ivs)
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Interval> {
        self.0
    }
}

impl From<&IntervalWeightMap> for LeafBounds {
    fn from(iw: &IntervalWeightMap) -> Self {
        LeafBounds(iw.as_slice().to_vec())
    }
}

impl Circuit {
    /// Interval bottom-up pass. Outputs are not clamped to `[0, 1]`.
    pub fn eval_interval(&self, bounds: &LeafBounds) -> Result<Vec<Interval>, CircuitError> {
        self.check_leaves(bounds.len())?;
        let leaves = bounds.as_slice();
        let mut values: Vec<Interval> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Leaf(i) => leaves[*i],
                Node::Const(c) => Interval::point(*c)?,
                Node::Add(cs) => {
                    let mut acc = values[cs[0]];
                    for &c in &cs[1..] {
                        acc = acc.try_add(values[c])?;
                    }
                    acc
                }
                Node::Mul(cs) => {
                    let mut acc = values[cs[0]];
                    for &c in &cs[1..] {
                        acc = acc.try_mul(values[c])?;
                    }
                    acc
                }
                Node::OneMinus(c) => values[*c].one_minus(),
            };
            values.push(v);
        }
        Ok(self.outputs.iter().map(|&o| values[o]).collect())
    }

    /// Exact per-output range over the leaf box, by evaluating every vertex.
    ///
    /// Valid when each output is multilinear in the leaves, so that box
    /// extrema are attained at vertices. Degenerate leaves stay fixed; at most
    /// [`MAX_VERTEX_LEAVES`] leaves may be non-degenerate.
    pub fn vertex_bounds(&self, bounds: &LeafBounds) -> Result<Vec<Interval>, CircuitError> {
        self.check_leaves(bounds.len())?;
        let ivs = bounds.as_slice();
        let free: Vec<usize> = (0..ivs.len()).filter(|&i| !ivs[i].is_degenerate()).collect();
        if free.len() > MAX_VERTEX_LEAVES {
            return Err(CircuitError::TooManyVertices {
                free: free.len(),
                limit: MAX_VERTEX_LEAVES,
            });
        }
        let mut leaves: Vec<f64> = ivs.iter().map(Interval::lo).collect();
        let mut lo = vec![f64::INFINITY; self.outputs.len()];
        let mut hi = vec![f64::NEG_INFINITY; self.outputs.len()];
        let mut scratch = Vec::with_capacity(self.nodes.len());
        for k in 0u64..1 << free.len() {
            for (bit, &leaf) in free.iter().enumerate() {
                leaves[leaf] = if (k >> bit) & 1 == 1 {
                    ivs[leaf].hi()
                } else {
                    ivs[leaf].lo()
                };
            }
            self.eval_nodes(&leaves, &mut scratch);
            for (j, &o) in self.outputs.iter().enumerate() {
                lo[j] = lo[j].min(scratch[o]);
                hi[j] = hi[j].max(scratch[o]);
            }
        }
        lo.into_iter()
            .zip(hi)
            .map(|(l, h)| Interval::new(l, h).map_err(CircuitError::from))
            .collect()
    }
}

/// E-WMC: does some weight vector inside `weights` push output 0 of `circuit`
/// to at least `threshold`? The maximum is computed by vertex enumeration.
pub fn e_wmc_decide(
    circuit: &Circuit,
    weights: &IntervalWeightMap,
    threshold: f64,
) -> Result<bool, CircuitError> {
    let bounds = LeafBounds::from(weights);
    let range = circuit.vertex_bounds(&bounds)?;
    Ok(range[0].hi() >= threshold)
}
