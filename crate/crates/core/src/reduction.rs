//! E-MAJSAT against E-WMC: the hardness construction run as an equivalence check.
//!
//! For a formula over existential `x` and counting `y` variables, pin every
//! `y` weight at `1/2`, let every `x` weight range over `[0, 1]`, and ask
//! whether the compiled circuit can reach `1/2`. At an `x` vertex the circuit
//! computes `#f|x / 2^m`, so the answer coincides with E-MAJSAT.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{e_wmc_decide, CircuitError};
use crate::compile::{compile_default, CompileError};
use crate::logic::random::{random_formula, truth_table_formula};
use crate::logic::{emajsat_brute, Formula, IntervalWeightMap, OracleError, VarId};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCase {
    pub formula: Formula,
    pub x_vars: Vec<VarId>,
    pub y_vars: Vec<VarId>,
}

impl ReductionCase {
    pub fn num_vars(&self) -> usize {
        self.x_vars.len() + self.y_vars.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseOutcome {
    pub emajsat: bool,
    pub e_wmc: bool,
}

impl CaseOutcome {
    pub fn agrees(&self) -> bool {
        self.emajsat == self.e_wmc
    }
}

/// Both sides of the equivalence for one case.
pub fn check_case(case: &ReductionCase) -> Result<CaseOutcome, ReductionError> {
    let emajsat = emajsat_brute(&case.formula, &case.x_vars, &case.y_vars)?;
    let circuit = compile_default(&case.formula, case.num_vars())?
        .smooth()
        .to_arith_circuit()?;
    let weights = IntervalWeightMap::emajsat_construction(case.num_vars(), &case.x_vars)?;
    let e_wmc = e_wmc_decide(&circuit, &weights, 0.5)?;
    Ok(CaseOutcome { emajsat, e_wmc })
}

/// A formula over `n in 1..=max_n` existential and `m in 1..=max_m` counting
/// variables, with the partition shuffled across variable ids.
pub fn random_case<R: Rng + ?Sized>(rng: &mut R, max_n: usize, max_m: usize) -> ReductionCase {
    let n = rng.gen_range(1..=max_n.max(1));
    let m = rng.gen_range(1..=max_m.max(1));
    let depth = rng.gen_range(2..=4);
    let formula = random_formula(rng, (n + m) as u32, depth);
    let mut ids: Vec<VarId> = (0..(n + m) as u32).map(VarId).collect();
    ids.shuffle(rng);
    let y_vars = ids.split_off(n);
    ReductionCase {
        formula,
        x_vars: ids,
        y_vars,
    }
}

/// All 16 Boolean functions of one existential and one counting variable.
pub fn two_variable_cases() -> Vec<ReductionCase> {
    let (x, y) = (VarId(0), VarId(1));
    (0..16)
        .map(|table| ReductionCase {
            formula: truth_table_formula(&[x, y], table),
            x_vars: vec![x],
            y_vars: vec![y],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionSummary {
    pub total: usize,
    pub agree: usize,
    /// Indices of cases whose two sides differ.
    pub disagreements: Vec<usize>,
}

impl ReductionSummary {
    pub fn all_agree(&self) -> bool {
        self.agree == self.total
    }
}

pub fn check_cases(cases: &[ReductionCase]) -> Result<ReductionSummary, ReductionError> {
    let mut disagreements = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        if !check_case(case)?.agrees() {
            disagreements.push(i);
        }
    }
    Ok(ReductionSummary {
        total: cases.len(),
        agree: cases.len() - disagreements.len(),
        disagreements,
    })
}

/// `count` seeded random cases.
pub fn random_cases(count: usize, max_n: usize, max_m: usize, seed: u64) -> Vec<ReductionCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_case(&mut rng, max_n, max_m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn case(text: &str, x: &[&str], y: &[&str]) -> ReductionCase {
        let (formula, pool) = parse_formula(text).unwrap();
        let ids = |names: &[&str]| names.iter().map(|n| pool.get(n).unwrap()).collect();
        ReductionCase {
            formula,
            x_vars: ids(x),
            y_vars: ids(y),
        }
    }

    #[test]
    fn worked_instances() {
        let yes = check_case(&case("x & y", &["x"], &["y"])).unwrap();
        assert_eq!(yes, CaseOutcome { emajsat: true, e_wmc: true });
        let no = check_case(&case("!x & y1 & y2", &["x"], &["y1", "y2"])).unwrap();
        assert_eq!(no, CaseOutcome { emajsat: false, e_wmc: false });
    }

    #[test]
    fn exhaustive_two_variable_sweep() {
        let s = check_cases(&two_variable_cases()).unwrap();
        assert_eq!(s.total, 16);
        assert!(s.all_agree(), "{:?}", s.disagreements);
    }

    #[test]
    fn random_stream_is_seeded() {
        assert_eq!(random_cases(20, 4, 6, 3), random_cases(20, 4, 6, 3));
        assert_ne!(random_cases(20, 4, 6, 3), random_cases(20, 4, 6, 4));
    }

    #[test]
    fn two_hundred_random_cases_agree() {
        let cases = random_cases(200, 4, 6, 2024);
        assert!(cases.iter().all(|c| c.x_vars.len() <= 4 && c.y_vars.len() <= 6));
        let s = check_cases(&cases).unwrap();
        assert!(s.all_agree(), "{:?}", s.disagreements);
    }
}
