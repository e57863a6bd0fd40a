//! Knowledge compilation: formulas to smooth decision-DNNF to arithmetic circuits.

mod dnnf;
mod sum;

pub use dnnf::{
    compile, compile_default, compile_to_circuit, CompileError, Dnnf, DnnfId, DnnfNode,
    MAX_COMPILE_VARS,
};
pub use sum::{build_sum_circuit, sum_leaf, MAX_SUM_DIGITS};
