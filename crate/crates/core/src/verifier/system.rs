use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, LeafBounds, MultilinearPolynomial, PolynomialError};
use crate::compile::{build_sum_circuit, CompileError};
use crate::interval::{Interval, IntervalError};
use crate::nn::{epsilon_ball, BoundedTensor, Network, NnError, Tensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid system: {0}")]
    System(String),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("leaf {leaf} receives [{lo}, {hi}], which leaves [0, 1]; bind probability outputs only")]
    LeafRange { leaf: usize, lo: f64, hi: f64 },
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Polynomial(#[from] PolynomialError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// One network input tensor and the domain its perturbations are clipped to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub shape: Vec<usize>,
    pub domain: (f64, f64),
}

/// Network `network` applied to input tensor `input`. Two heads reading one
/// image are two calls sharing an input; one digit classifier applied to
/// several images is several calls sharing a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkCall {
    pub network: usize,
    pub input: usize,
}

/// Where a circuit leaf gets its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LeafSource {
    Output { call: usize, output: usize },
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BindingEntry {
    pub leaf: usize,
    pub source: LeafSource,
}

/// How the circuit stage turns leaf intervals into output intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolicMethod {
    /// Interval arithmetic pass.
    Relaxed,
    /// Exact, by enumerating leaf-box vertices; limited to 20 free leaves.
    Vertex,
    /// Exact, by branch and bound on the expanded multilinear polynomial.
    Polynomial,
}

/// Networks, the binding of their outputs to circuit leaves, and the circuit.
#[derive(Debug, Clone)]
pub struct NeSySystem {
    networks: Vec<Network>,
    inputs: Vec<InputSpec>,
    calls: Vec<NetworkCall>,
    leaves: Vec<LeafSource>,
    circuit: Circuit,
    polynomials: OnceLock<Result<Vec<MultilinearPolynomial>, PolynomialError>>,
}

fn sys_err(msg: impl Into<String>) -> VerifyError {
    VerifyError::System(msg.into())
}

impl NeSySystem {
    pub fn new(
        networks: Vec<Network>,
        inputs: Vec<InputSpec>,
        calls: Vec<NetworkCall>,
        binding: Vec<BindingEntry>,
        circuit: Circuit,
    ) -> Result<Self, VerifyError> {
        for (i, spec) in inputs.iter().enumerate() {
            let (lo, hi) = spec.domain;
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(sys_err(format!("input {i} has invalid domain [{lo}, {hi}]")));
            }
        }
        for (k, call) in calls.iter().enumerate() {
            let net = networks
                .get(call.network)
                .ok_or_else(|| sys_err(format!("call {k} names missing network {}", call.network)))?;
            let spec = inputs
                .get(call.input)
                .ok_or_else(|| sys_err(format!("call {k} names missing input {}", call.input)))?;
            if net.input_shape() != spec.shape.as_slice() {
                return Err(sys_err(format!(
                    "call {k}: network {} expects shape {:?}, input {} has {:?}",
                    call.network,
                    net.input_shape(),
                    call.input,
                    spec.shape
                )));
            }
        }
        let n = circuit.num_leaves();
        let mut leaves: Vec<Option<LeafSource>> = vec![None; n];
        for entry in binding {
            let slot = leaves
                .get_mut(entry.leaf)
                .ok_or_else(|| sys_err(format!("binding names leaf {} of a {n}-leaf circuit", entry.leaf)))?;
            if slot.is_some() {
                return Err(sys_err(format!("leaf {} is bound twice", entry.leaf)));
            }
            match entry.source {
                LeafSource::Output { call, output } => {
                    let c = calls
                        .get(call)
                        .ok_or_else(|| sys_err(format!("leaf {} names missing call {call}", entry.leaf)))?;
                    let size = networks[c.network].output_size();
                    if output >= size {
                        return Err(sys_err(format!(
                            "leaf {} reads output {output} of call {call}, which has {size}",
                            entry.leaf
                        )));
                    }
                }
                LeafSource::Constant(v) => {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(sys_err(format!("constant leaf {} = {v} is outside [0, 1]", entry.leaf)));
                    }
                }
            }
            *slot = Some(entry.source);
        }
        let leaves = leaves
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| sys_err(format!("leaf {i} is unbound"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NeSySystem {
            networks,
            inputs,
            calls,
            leaves,
            circuit,
            polynomials: OnceLock::new(),
        })
    }

    pub fn networks(&self) -> &[Network] {
        &self.networks
    }

    pub fn inputs(&self) -> &[InputSpec] {
        &self.inputs
    }

    pub fn calls(&self) -> &[NetworkCall] {
        &self.calls
    }

    pub fn leaf_sources(&self) -> &[LeafSource] {
        &self.leaves
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn num_outputs(&self) -> usize {
        self.circuit.num_outputs()
    }

    pub(crate) fn check_inputs(&self, inputs: &[Tensor]) -> Result<(), VerifyError> {
        if inputs.len() != self.inputs.len() {
            return Err(VerifyError::Query(format!(
                "system takes {} input tensors, got {}",
                self.inputs.len(),
                inputs.len()
            )));
        }
        for (i, (x, spec)) in inputs.iter().zip(&self.inputs).enumerate() {
            if x.shape() != spec.shape.as_slice() {
                return Err(VerifyError::Query(format!(
                    "input {i} has shape {:?}, expected {:?}",
                    x.shape(),
                    spec.shape
                )));
            }
        }
        Ok(())
    }

    /// Concrete end-to-end inference: every call, scattered into the leaves, through the circuit.
    pub fn predict(&self, inputs: &[Tensor]) -> Result<Vec<f64>, VerifyError> {
        self.check_inputs(inputs)?;
        let outs = self
            .calls
            .iter()
            .map(|c| self.networks[c.network].forward(&inputs[c.input]))
            .collect::<Result<Vec<_>, _>>()?;
        let values: Vec<f64> = self
            .leaves
            .iter()
            .map(|s| match *s {
                LeafSource::Output { call, output } => outs[call].data()[output],
                LeafSource::Constant(v) => v,
            })
            .collect();
        Ok(self.circuit.eval(&values)?)
    }

    /// Per-leaf intervals from interval bound propagation over the `eps`-balls.
    pub fn leaf_bounds(&self, inputs: &[Tensor], eps: f64) -> Result<LeafBounds, VerifyError> {
        self.check_inputs(inputs)?;
        let balls = inputs
            .iter()
            .zip(&self.inputs)
            .map(|(x, spec)| epsilon_ball(x, eps, spec.domain))
            .collect::<Result<Vec<_>, _>>()?;
        let outs: Vec<BoundedTensor> = self
            .calls
            .iter()
            .map(|c| self.networks[c.network].forward_ibp(&balls[c.input]))
            .collect::<Result<_, _>>()?;
        let mut ivs = Vec::with_capacity(self.leaves.len());
        for (leaf, s) in self.leaves.iter().enumerate() {
            let iv = match *s {
                LeafSource::Output { call, output } => {
                    let (lo, hi) = (outs[call].lower().data()[output], outs[call].upper().data()[output]);
                    if !(0.0 <= lo && hi <= 1.0) {
                        return Err(VerifyError::LeafRange { leaf, lo, hi });
                    }
                    Interval::new(lo, hi)?
                }
                LeafSource::Constant(v) => Interval::point(v)?,
            };
            ivs.push(iv);
        }
        Ok(LeafBounds::new(ivs)?)
    }

    /// The expanded circuit outputs, computed on first use and cached.
    pub fn polynomials(&self) -> Result<&[MultilinearPolynomial], VerifyError> {
        match self
            .polynomials
            .get_or_init(|| MultilinearPolynomial::from_circuit(&self.circuit))
        {
            Ok(p) => Ok(p),
            Err(e) => Err(e.clone().into()),
        }
    }

    /// Output intervals over the `eps`-balls around `inputs`.
    pub fn output_bounds(
        &self,
        inputs: &[Tensor],
        eps: f64,
        method: SymbolicMethod,
    ) -> Result<Vec<Interval>, VerifyError> {
        let leaves = self.leaf_bounds(inputs, eps)?;
        Ok(match method {
            SymbolicMethod::Relaxed => self.circuit.eval_interval(&leaves)?,
            SymbolicMethod::Vertex => self.circuit.vertex_bounds(&leaves)?,
            SymbolicMethod::Polynomial => self
                .polynomials()?
                .iter()
                .map(|p| p.extrema(leaves.as_slice()))
                .collect::<Result<_, _>>()?,
        })
    }
}

/// Leaf order `(red_light, car_in_front, brake, accelerate)` of the driving
/// constraint `((red_light | car_in_front) -> brake) & (accelerate <-> !brake)`.
pub const DRIVING_CONSTRAINT: &str = "((red_light | car_in_front) -> brake) & (accelerate <-> !brake)";

/// The driving example with two constant-output heads over one shared
/// `input_shape` image: an action head emitting `(p(accelerate), p(brake))`
/// and a scene head emitting `(p(red_light), p(car_in_front))`.
pub fn driving_system(
    input_shape: Vec<usize>,
    action: [f64; 2],
    scene: [f64; 2],
) -> Result<NeSySystem, VerifyError> {
    use crate::compile::compile_default;
    use crate::logic::parse_formula;

    let (f, pool) = parse_formula(DRIVING_CONSTRAINT).expect("constraint parses");
    let circuit = compile_default(&f, pool.len())?.smooth().to_arith_circuit()?;
    let nets = vec![
        Network::constant(input_shape.clone(), &action)?,
        Network::constant(input_shape.clone(), &scene)?,
    ];
    let calls = vec![NetworkCall { network: 0, input: 0 }, NetworkCall { network: 1, input: 0 }];
    let leaf = |name: &str| pool.get(name).expect("declared").index();
    let out = |call, output| LeafSource::Output { call, output };
    let binding = vec![
        BindingEntry { leaf: leaf("accelerate"), source: out(0, 0) },
        BindingEntry { leaf: leaf("brake"), source: out(0, 1) },
        BindingEntry { leaf: leaf("red_light"), source: out(1, 0) },
        BindingEntry { leaf: leaf("car_in_front"), source: out(1, 1) },
    ];
    let inputs = vec![InputSpec { shape: input_shape, domain: (0.0, 1.0) }];
    NeSySystem::new(nets, inputs, calls, binding, circuit)
}

/// Multi-digit addition: `digits` copies of one classifier, each on its own
/// input, feeding [`build_sum_circuit`]. Output `s` is `P(sum = s)`.
pub fn digit_sum_system(net: Network, digits: usize, domain: (f64, f64)) -> Result<NeSySystem, VerifyError> {
    let classes = net.output_size();
    let circuit = build_sum_circuit(digits, classes)?;
    let inputs = (0..digits)
        .map(|_| InputSpec { shape: net.input_shape().to_vec(), domain })
        .collect();
    let calls = (0..digits).map(|d| NetworkCall { network: 0, input: d }).collect();
    let binding = (0..digits)
        .flat_map(|d| {
            (0..classes).map(move |c| BindingEntry {
                leaf: crate::compile::sum_leaf(classes, d, c),
                source: LeafSource::Output { call: d, output: c },
            })
        })
        .collect();
    NeSySystem::new(vec![net], inputs, calls, binding, circuit)
}
