//! Propositional formulas, their concrete syntaxes, and brute-force oracles.

mod dimacs;
mod formula;
mod oracle;
mod parser;
pub mod random;

pub use dimacs::{parse_dimacs, DimacsError};
pub use formula::{Formula, VarId, VariablePool};
pub use oracle::{
    count_models, emajsat_brute, emajsat_witness, wmc_brute, IntervalWeightMap, OracleError,
    WeightMap, MAX_BRUTE_VARS, MAX_EMAJSAT_VARS,
};
pub use parser::{parse_formula, parse_formula_in, ParseError};
