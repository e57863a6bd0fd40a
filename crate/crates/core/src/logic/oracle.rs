//! Enumeration oracles. Every compiled artifact is checked against these.

use thiserror::Error;

use super::formula::{Formula, VarId};
use crate::interval::Interval;

/// Largest number of free variables enumerated by [`count_models`] and [`wmc_brute`].
pub const MAX_BRUTE_VARS: usize = 24;
/// Largest `|x| + |y|` accepted by [`emajsat_brute`].
pub const MAX_EMAJSAT_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{free} free variables exceed the enumeration guard of {limit}")]
    TooManyVariables { free: usize, limit: usize },
    #[error("formula mentions {var} outside the {num_vars}-variable universe")]
    VariableOutOfRange { var: VarId, num_vars: usize },
    #[error("{var} is assigned more than once")]
    DuplicateAssignment { var: VarId },
    #[error("variable partition is invalid: {0}")]
    Partition(String),
    #[error("weight {weight} for {var} is not a probability")]
    BadWeight { var: VarId, weight: f64 },
}

/// Per-variable probabilities `p(v)`; the negative literal weighs `1 - p(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap(Vec<f64>);

impl WeightMap {
    pub fn new(weights: Vec<f64>) -> Result<Self, OracleError> {
        for (i, &w) in weights.iter().enumerate() {
            if !(0.0..=1.0).contains(&w) {
                return Err(OracleError::BadWeight {
                    var: VarId(i as u32),
                    weight: w,
                });
            }
        }
        Ok(WeightMap(weights))
    }

    pub fn uniform(n: usize, p: f64) -> Result<Self, OracleError> {
        Self::new(vec![p; n])
    }

    pub fn get(&self, v: VarId) -> f64 {
        self.0[v.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-variable probability intervals, each inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalWeightMap(Vec<Interval>);

impl IntervalWeightMap {
    pub fn new(intervals: Vec<Interval>) -> Result<Self, OracleError> {
        for (i, iv) in intervals.iter().enumerate() {
            if !iv.is_subset_of(&Interval::UNIT) {
                let weight = if iv.lo() < 0.0 { iv.lo() } else { iv.hi() };
                return Err(OracleError::BadWeight {
                    var: VarId(i as u32),
                    weight,
                });
            }
        }
        Ok(IntervalWeightMap(intervals))
    }

    /// The hardness construction: existential variables range over `[0, 1]`,
    /// counting variables are pinned at `1/2`.
    pub fn emajsat_construction(
        num_vars: usize,
        x_vars: &[VarId],
    ) -> Result<Self, OracleError> {
        let half = Interval::point(0.5).expect("finite");
        let mut ivs = vec![half; num_vars];
        for &x in x_vars {
            let slot = ivs.get_mut(x.index()).ok_or(OracleError::VariableOutOfRange {
                var: x,
                num_vars,
            })?;
            *slot = Interval::UNIT;
        }
        Ok(IntervalWeightMap(ivs))
    }

    pub fn get(&self, v: VarId) -> Interval {
        self.0[v.index()]
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
}

fn check_universe(f: &Formula, num_vars: usize) -> Result<(), OracleError> {
    match f.vars().into_iter().find(|v| v.index() >= num_vars) {
        Some(var) => Err(OracleError::VariableOutOfRange { var, num_vars }),
        None => Ok(()),
    }
}

/// Scatters the low bits of `k` into the bit positions listed in `free`.
#[inline]
fn scatter(mut k: u64, free: &[u32]) -> u64 {
    let mut out = 0u64;
    for &pos in free {
        out |= (k & 1) << pos;
        k >>= 1;
    }
    out
}

/// Number of completions of `partial` over the remaining variables of the
/// `num_vars`-variable universe that satisfy `f`.
pub fn count_models(
    f: &Formula,
    num_vars: usize,
    partial: &[(VarId, bool)],
) -> Result<u64, OracleError> {
    check_universe(f, num_vars)?;
    if num_vars > 64 {
        return Err(OracleError::TooManyVariables {
            free: num_vars,
            limit: 64,
        });
    }
    let mut base = 0u64;
    let mut fixed = vec![false; num_vars];
    for &(v, value) in partial {
        let slot = fixed
            .get_mut(v.index())
            .ok_or(OracleError::VariableOutOfRange { var: v, num_vars })?;
        if *slot {
            return Err(OracleError::DuplicateAssignment { var: v });
        }
        *slot = true;
        if value {
            base |= 1 << v.0;
        }
    }
    let free: Vec<u32> = (0..num_vars as u32).filter(|&i| !fixed[i as usize]).collect();
    if free.len() > MAX_BRUTE_VARS {
        return Err(OracleError::TooManyVariables {
            free: free.len(),
            limit: MAX_BRUTE_VARS,
        });
    }
    Ok((0..1u64 << free.len())
        .filter(|&k| f.eval_bits(base | scatter(k, &free)))
        .count() as u64)
}

/// Weighted model count by full enumeration: the sum over models of the
/// product of literal weights. The universe is `0..w.len()`.
pub fn wmc_brute(f: &Formula, w: &WeightMap) -> Result<f64, OracleError> {
    let n = w.len();
    check_universe(f, n)?;
    if n > MAX_BRUTE_VARS {
        return Err(OracleError::TooManyVariables {
            free: n,
            limit: MAX_BRUTE_VARS,
        });
    }
    let p = w.as_slice();
    let mut total = 0.0;
    for bits in 0..1u64 << n {
        if !f.eval_bits(bits) {
            continue;
        }
        let mut mass = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            mass *= if (bits >> i) & 1 == 1 { pi } else { 1.0 - pi };
        }
        total += mass;
    }
    Ok(total)
}

fn check_partition(
    f: &Formula,
    x_vars: &[VarId],
    y_vars: &[VarId],
) -> Result<usize, OracleError> {
    let total = x_vars.len() + y_vars.len();
    if total > MAX_EMAJSAT_VARS {
        return Err(OracleError::TooManyVariables {
            free: total,
            limit: MAX_EMAJSAT_VARS,
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    for v in x_vars.iter().chain(y_vars) {
        if v.index() >= 64 {
            return Err(OracleError::Partition(format!("{v} is beyond the 64-bit universe")));
        }
        if !seen.insert(*v) {
            return Err(OracleError::Partition(format!("{v} appears twice")));
        }
    }
    if let Some(v) = f.vars().into_iter().find(|v| !seen.contains(v)) {
        return Err(OracleError::Partition(format!(
            "{v} occurs in the formula but in neither x nor y"
        )));
    }
    Ok(total)
}

/// Returns an existential assignment (as `(var, value)` pairs in `x_vars`
/// order) under which at least half of the counting assignments satisfy `f`.
pub fn emajsat_witness(
    f: &Formula,
    x_vars: &[VarId],
    y_vars: &[VarId],
) -> Result<Option<Vec<(VarId, bool)>>, OracleError> {
    check_partition(f, x_vars, y_vars)?;
    let xs: Vec<u32> = x_vars.iter().map(|v| v.0).collect();
    let ys: Vec<u32> = y_vars.iter().map(|v| v.0).collect();
    let m = ys.len();
    for kx in 0..1u64 << xs.len() {
        let base = scatter(kx, &xs);
        let count = (0..1u64 << m)
            .filter(|&ky| f.eval_bits(base | scatter(ky, &ys)))
            .count() as u64;
        // #phi|x >= 2^m / 2, written without the division so m = 0 stays integral.
        if 2 * count >= 1u64 << m {
            let witness = x_vars
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, (kx >> i) & 1 == 1))
                .collect();
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// E-MAJSAT by enumeration: is there an `x` such that `#f|x >= 2^m / 2`?
pub fn emajsat_brute(f: &Formula, x_vars: &[VarId], y_vars: &[VarId]) -> Result<bool, OracleError> {
    emajsat_witness(f, x_vars, y_vars).map(|w| w.is_some())
}
