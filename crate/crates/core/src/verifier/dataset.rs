use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::query::{verify_sample_as, QueryMode, SampleReport, Status, VerificationQuery};
use super::system::{NeSySystem, SymbolicMethod, VerifyError};
use crate::nn::Tensor;

/// One verification instance: a tensor per system input, and the correct
/// output index (used by argmax queries).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub inputs: Vec<Tensor>,
    pub target: usize,
}

/// How each sample becomes a query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DatasetMode {
    /// Argmax on each sample's own target.
    Argmax,
    Threshold { output: usize, threshold: f64 },
}

impl DatasetMode {
    pub fn query_mode(&self, target: usize) -> QueryMode {
        match *self {
            DatasetMode::Argmax => QueryMode::Argmax { correct: target },
            DatasetMode::Threshold { output, threshold } => QueryMode::Threshold { output, threshold },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub method: SymbolicMethod,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Per-sample wall-clock limit. A sample over the limit is reported as
    /// timed out and its bounds are dropped.
    pub timeout_s: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            method: SymbolicMethod::Relaxed,
            threads: None,
            timeout_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub total: usize,
    pub completed: usize,
    pub robust: usize,
    /// `robust / total`.
    pub robustness: f64,
    /// Means over completed samples of the target output's bounds.
    pub mean_lower: Option<f64>,
    pub mean_upper: Option<f64>,
    pub mean_runtime_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub eps: f64,
    pub method: SymbolicMethod,
    pub mode: DatasetMode,
    pub samples: Vec<SampleReport>,
    pub aggregates: Aggregates,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in xs {
        sum += x;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

impl VerificationReport {
    pub fn from_samples(eps: f64, method: SymbolicMethod, mode: DatasetMode, samples: Vec<SampleReport>) -> Self {
        let done: Vec<&SampleReport> = samples.iter().filter(|s| s.status.has_verdict()).collect();
        let robust = samples.iter().filter(|s| s.status == Status::Robust).count();
        let aggregates = Aggregates {
            total: samples.len(),
            completed: done.len(),
            robust,
            robustness: if samples.is_empty() {
                0.0
            } else {
                robust as f64 / samples.len() as f64
            },
            mean_lower: mean(done.iter().filter_map(|s| s.target_bounds()).map(|b| b.lo())),
            mean_upper: mean(done.iter().filter_map(|s| s.target_bounds()).map(|b| b.hi())),
            mean_runtime_s: mean(done.iter().map(|s| s.runtime_s)),
        };
        VerificationReport {
            eps,
            method,
            mode,
            samples,
            aggregates,
        }
    }

    /// Copy with every runtime zeroed, for comparing reruns byte for byte.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for s in &mut r.samples {
            s.runtime_s = 0.0;
        }
        r.aggregates.mean_runtime_s = r.aggregates.mean_runtime_s.map(|_| 0.0);
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// `sample_id,status,lower_correct,upper_correct,runtime_s`; bounds are
    /// empty for samples without a verdict.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_id,status,lower_correct,upper_correct,runtime_s\n");
        for s in &self.samples {
            let (lo, hi) = match s.target_bounds() {
                Some(b) => (format!("{:?}", b.lo()), format!("{:?}", b.hi())),
                None => (String::new(), String::new()),
            };
            writeln!(out, "{},{},{lo},{hi},{:?}", s.sample_id, s.status.as_str(), s.runtime_s).unwrap();
        }
        out
    }
}

fn run_one(sys: &NeSySystem, sample: &Sample, id: usize, eps: f64, mode: &DatasetMode, opts: &VerifyOptions) -> SampleReport {
    let query = VerificationQuery {
        mode: mode.query_mode(sample.target),
        eps,
        inputs: sample.inputs.clone(),
    };
    let target = query.mode.target();
    let start = Instant::now();
    match verify_sample_as(sys, &query, opts.method, id) {
        Ok(report) => match opts.timeout_s {
            Some(limit) if report.runtime_s > limit => {
                SampleReport::failed(id, target, Status::TimedOut, report.runtime_s, None)
            }
            _ => report,
        },
        Err(e) => SampleReport::failed(id, target, Status::Error, start.elapsed().as_secs_f64(), Some(e.to_string())),
    }
}

/// Verifies every sample at one `eps`. Samples run in parallel; results keep
/// dataset order. Per-sample failures are recorded in the report.
pub fn verify_dataset(
    sys: &NeSySystem,
    samples: &[Sample],
    eps: f64,
    mode: &DatasetMode,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    if samples.is_empty() {
        return Err(VerifyError::Query("dataset is empty".into()));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(VerifyError::Query(format!("eps must be finite and >= 0, got {eps}")));
    }
    if opts.method == SymbolicMethod::Polynomial {
        // Expand once up front rather than inside the first timed sample.
        sys.polynomials()?;
    }
    let run = || -> Vec<SampleReport> {
        samples
            .par_iter()
            .enumerate()
            .map(|(i, s)| run_one(sys, s, i, eps, mode, opts))
            .collect()
    };
    let reports = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| VerifyError::Query(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(VerificationReport::from_samples(eps, opts.method, *mode, reports))
}
