//! Digit-addition scaling runs: relaxed and exact-symbolic verification over
//! a grid of digit counts and perturbation radii.

use std::fmt::Write as _;

use nesy_verify::nn::{Network, Tensor};
use nesy_verify::verifier::{
    digit_sum_system, verify_dataset, DatasetMode, NeSySystem, SymbolicMethod, VerificationReport, VerifyOptions,
};

use crate::digits::addition_samples;
use crate::error::{input_err, CliResult};

/// `10^-5, 10^-4.5, ..., 10^-3`.
pub fn default_eps_grid() -> Vec<f64> {
    [-5.0, -4.5, -4.0, -3.5, -3.0].iter().map(|&e: &f64| 10f64.powf(e)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub digits: Vec<usize>,
    pub eps: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Per-sample limit for the exact method.
    pub timeout_s: Option<f64>,
    pub threads: Option<usize>,
    /// Timed repetitions per cell; the fastest is kept.
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            digits: vec![2, 3, 4],
            eps: default_eps_grid(),
            samples: 50,
            seed: 0,
            timeout_s: Some(60.0),
            threads: Some(1),
            repeats: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMethod {
    Relaxed,
    Exact,
}

impl BenchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchMethod::Relaxed => "relaxed",
            BenchMethod::Exact => "exact",
        }
    }

    fn symbolic(self) -> SymbolicMethod {
        match self {
            BenchMethod::Relaxed => SymbolicMethod::Relaxed,
            BenchMethod::Exact => SymbolicMethod::Polynomial,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub digits: usize,
    pub eps: f64,
    pub method: BenchMethod,
    /// Mean over completed samples, fastest repetition; `None` when nothing completed.
    pub mean_runtime_s: Option<f64>,
    pub robustness_pct: f64,
    pub completed_fraction: f64,
    /// Set when the whole cell could not run, e.g. polynomial expansion over its guard.
    pub error: Option<String>,
    /// Mean width of the target output's bounds over completed samples.
    pub mean_width: Option<f64>,
}

impl BenchRow {
    fn from_report(digits: usize, method: BenchMethod, runtime: Option<f64>, r: &VerificationReport) -> Self {
        let widths: Vec<f64> = r
            .samples
            .iter()
            .filter_map(|s| s.target_bounds())
            .map(|b| b.width())
            .collect();
        BenchRow {
            digits,
            eps: r.eps,
            method,
            mean_runtime_s: runtime,
            robustness_pct: 100.0 * r.aggregates.robustness,
            completed_fraction: r.aggregates.completed as f64 / r.aggregates.total as f64,
            error: None,
            mean_width: (!widths.is_empty()).then(|| widths.iter().sum::<f64>() / widths.len() as f64),
        }
    }
}

pub const CSV_HEADER: &str = "digits,eps,method,mean_runtime_s,robustness_pct,completed_fraction";

/// One line per row. Cells without a completed sample show `timeout`, or
/// `error` when the cell could not run.
pub fn to_csv(rows: &[BenchRow], with_timing: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let runtime = match (&r.error, r.mean_runtime_s) {
            _ if !with_timing => "-".to_string(),
            (Some(_), _) => "error".to_string(),
            (None, Some(t)) => format!("{t:.6e}"),
            (None, None) => "timeout".to_string(),
        };
        writeln!(
            out,
            "{},{:e},{},{},{:.2},{:.4}",
            r.digits,
            r.eps,
            r.method.as_str(),
            runtime,
            r.robustness_pct,
            r.completed_fraction
        )
        .unwrap();
    }
    out
}

fn run_cell(
    sys: &NeSySystem,
    samples: &[nesy_verify::verifier::Sample],
    eps: f64,
    method: BenchMethod,
    cfg: &BenchConfig,
) -> Result<(VerificationReport, Option<f64>), String> {
    let opts = VerifyOptions {
        method: method.symbolic(),
        threads: cfg.threads,
        timeout_s: if method == BenchMethod::Exact { cfg.timeout_s } else { None },
    };
    let mut best: Option<(VerificationReport, Option<f64>)> = None;
    for _ in 0..cfg.repeats.max(1) {
        let r = verify_dataset(sys, samples, eps, &DatasetMode::Argmax, &opts).map_err(|e| e.to_string())?;
        let t = r.aggregates.mean_runtime_s;
        match &best {
            Some((_, Some(b))) if t.map_or(true, |t| t >= *b) => {}
            _ => best = Some((r, t)),
        }
    }
    Ok(best.expect("at least one repetition"))
}

/// Runs every `(digits, eps, method)` cell. The digit network must map one
/// image to ten probabilities; samples are drawn from `pool`.
pub fn bench_addition(net: &Network, pool: &[(Tensor, usize)], cfg: &BenchConfig) -> CliResult<Vec<BenchRow>> {
    if cfg.samples == 0 {
        return Err(input_err("bench needs at least one sample per cell"));
    }
    let domain = (0.0, 1.0);
    let mut rows = Vec::new();
    for &d in &cfg.digits {
        let sys = digit_sum_system(net.clone(), d, domain).map_err(input_err)?;
        let samples = addition_samples(pool, d, cfg.samples, cfg.seed.wrapping_add(d as u64));
        for method in [BenchMethod::Relaxed, BenchMethod::Exact] {
            // Untimed warm-up; also expands the polynomials for the exact method.
            let warm_cfg = BenchConfig { repeats: 1, ..cfg.clone() };
            let warm = run_cell(&sys, &samples[..1], cfg.eps.first().copied().unwrap_or(0.0), method, &warm_cfg);
            for &eps in &cfg.eps {
                let cell = match &warm {
                    Ok(_) => run_cell(&sys, &samples, eps, method, cfg),
                    Err(e) => Err(e.clone()),
                };
                rows.push(match cell {
                    Ok((r, t)) => BenchRow::from_report(d, method, t, &r),
                    Err(e) => BenchRow {
                        digits: d,
                        eps,
                        method,
                        mean_runtime_s: None,
                        robustness_pct: 0.0,
                        completed_fraction: 0.0,
                        error: Some(e),
                        mean_width: None,
                    },
                });
            }
        }
    }
    Ok(rows)
}

/// Geometric mean of `runtime(d_{k+1}) / runtime(d_k)` over consecutive digit
/// counts, runtimes averaged over the eps grid. `None` if a cell lacks a runtime.
pub fn growth_ratio(rows: &[BenchRow], method: BenchMethod) -> Option<f64> {
    let mut digits: Vec<usize> = rows.iter().filter(|r| r.method == method).map(|r| r.digits).collect();
    digits.dedup();
    let mean_at = |d: usize| -> Option<f64> {
        let ts: Option<Vec<f64>> = rows
            .iter()
            .filter(|r| r.method == method && r.digits == d)
            .map(|r| r.mean_runtime_s)
            .collect();
        let ts = ts?;
        (!ts.is_empty()).then(|| ts.iter().sum::<f64>() / ts.len() as f64)
    };
    let means: Option<Vec<f64>> = digits.iter().map(|&d| mean_at(d)).collect();
    let means = means?;
    if means.len() < 2 {
        return None;
    }
    let log_sum: f64 = means.windows(2).map(|w| (w[1] / w[0]).ln()).sum();
    Some((log_sum / (means.len() - 1) as f64).exp())
}

/// Largest over smallest relaxed runtime across the eps grid, worst digit count.
pub fn relaxed_eps_spread(rows: &[BenchRow]) -> Option<f64> {
    let mut worst: Option<f64> = None;
    let mut digits: Vec<usize> = rows.iter().map(|r| r.digits).collect();
    digits.dedup();
    for d in digits {
        let ts: Option<Vec<f64>> = rows
            .iter()
            .filter(|r| r.method == BenchMethod::Relaxed && r.digits == d)
            .map(|r| r.mean_runtime_s)
            .collect();
        let ts = ts?;
        let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min);
        let spread = hi / lo;
        worst = Some(worst.map_or(spread, |w: f64| w.max(spread)));
    }
    worst
}
