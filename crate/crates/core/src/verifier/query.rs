use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::system::{NeSySystem, SymbolicMethod, VerifyError};
use crate::interval::Interval;
use crate::nn::Tensor;

/// The property certified over the perturbation set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum QueryMode {
    /// `lower(correct) > upper(j)` for every other output `j`.
    Argmax { correct: usize },
    /// `lower(output) >= threshold`.
    Threshold { output: usize, threshold: f64 },
}

impl QueryMode {
    /// The output whose bounds the report tracks.
    pub fn target(&self) -> usize {
        match *self {
            QueryMode::Argmax { correct } => correct,
            QueryMode::Threshold { output, .. } => output,
        }
    }

    /// Decides the property from output intervals.
    pub fn holds(&self, bounds: &[Interval]) -> bool {
        match *self {
            QueryMode::Argmax { correct } => {
                let lo = bounds[correct].lo();
                bounds
                    .iter()
                    .enumerate()
                    .all(|(j, b)| j == correct || lo > b.hi())
            }
            QueryMode::Threshold { output, threshold } => bounds[output].lo() >= threshold,
        }
    }

    /// Holds at a concrete output vector.
    pub fn holds_at(&self, values: &[f64]) -> bool {
        let points: Vec<Interval> = values
            .iter()
            .map(|&v| Interval::point(v).expect("finite circuit output"))
            .collect();
        self.holds(&points)
    }

    pub(crate) fn check(&self, num_outputs: usize) -> Result<(), VerifyError> {
        let t = self.target();
        if t >= num_outputs {
            return Err(VerifyError::Query(format!(
                "query names output {t}, system has {num_outputs}"
            )));
        }
        if let QueryMode::Threshold { threshold, .. } = self {
            if !threshold.is_finite() {
                return Err(VerifyError::Query(format!("threshold {threshold} is not finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationQuery {
    pub mode: QueryMode,
    pub eps: f64,
    pub inputs: Vec<Tensor>,
}

/// `Robust` is a proof; `Unknown` means the bounds were too loose to decide.
/// `TimedOut` and `Error` mark samples without a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Robust,
    Unknown,
    TimedOut,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Robust => "robust",
            Status::Unknown => "unknown",
            Status::TimedOut => "timeout",
            Status::Error => "error",
        }
    }

    pub fn has_verdict(&self) -> bool {
        matches!(self, Status::Robust | Status::Unknown)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub sample_id: usize,
    pub status: Status,
    /// Output intervals, unclamped; empty without a verdict.
    pub bounds: Vec<Interval>,
    pub target: usize,
    pub runtime_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SampleReport {
    pub fn target_bounds(&self) -> Option<Interval> {
        self.bounds.get(self.target).copied()
    }

    pub(crate) fn failed(sample_id: usize, target: usize, status: Status, runtime_s: f64, error: Option<String>) -> Self {
        SampleReport {
            sample_id,
            status,
            bounds: Vec::new(),
            target,
            runtime_s,
            error,
        }
    }
}

/// Bounds and verdict for one query, by the given circuit method.
pub fn verify_with(
    sys: &NeSySystem,
    query: &VerificationQuery,
    method: SymbolicMethod,
) -> Result<(Vec<Interval>, Status), VerifyError> {
    query.mode.check(sys.num_outputs())?;
    let bounds = sys.output_bounds(&query.inputs, query.eps, method)?;
    let status = if query.mode.holds(&bounds) {
        Status::Robust
    } else {
        Status::Unknown
    };
    Ok((bounds, status))
}

fn timed(
    sys: &NeSySystem,
    query: &VerificationQuery,
    method: SymbolicMethod,
    sample_id: usize,
) -> Result<SampleReport, VerifyError> {
    let start = Instant::now();
    let (bounds, status) = verify_with(sys, query, method)?;
    Ok(SampleReport {
        sample_id,
        status,
        bounds,
        target: query.mode.target(),
        runtime_s: start.elapsed().as_secs_f64(),
        error: None,
    })
}

/// Interval propagation through networks and circuit.
pub fn verify_sample(sys: &NeSySystem, query: &VerificationQuery) -> Result<SampleReport, VerifyError> {
    timed(sys, query, SymbolicMethod::Relaxed, 0)
}

/// Interval propagation through the networks, exact optimisation over the
/// resulting leaf box for the circuit.
pub fn verify_sample_exact_symbolic(
    sys: &NeSySystem,
    query: &VerificationQuery,
) -> Result<SampleReport, VerifyError> {
    timed(sys, query, SymbolicMethod::Polynomial, 0)
}

pub(crate) fn verify_sample_as(
    sys: &NeSySystem,
    query: &VerificationQuery,
    method: SymbolicMethod,
    sample_id: usize,
) -> Result<SampleReport, VerifyError> {
    timed(sys, query, method, sample_id)
}
