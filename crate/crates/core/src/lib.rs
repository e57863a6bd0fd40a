//! Robustness verification for neurosymbolic pipelines: neural networks whose
//! outputs feed the leaves of an arithmetic circuit compiled from a
//! propositional constraint.
//!
//! Bounds flow in two stages. Interval bound propagation pushes an input
//! perturbation through each network to get per-leaf intervals; the circuit
//! then maps those into bounds on the query outputs, either by a cheap
//! interval pass or by an exact search over the leaf box.

pub mod circuit;
pub mod compile;
pub mod interval;
pub mod logic;
pub mod nn;
pub mod reduction;
pub mod verifier;

#[cfg(test)]
mod test_support;

pub use interval::{Interval, IntervalError};
