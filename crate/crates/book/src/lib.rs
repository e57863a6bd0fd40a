//! The guide in `book/`, compiled so its snippets run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/intervals.md")]
pub mod intervals {}

#[doc = include_str!("../../../book/src/formulas.md")]
pub mod formulas {}

#[doc = include_str!("../../../book/src/compilation.md")]
pub mod compilation {}

#[doc = include_str!("../../../book/src/circuit-bounds.md")]
pub mod circuit_bounds {}

#[doc = include_str!("../../../book/src/networks.md")]
pub mod networks {}

#[doc = include_str!("../../../book/src/systems.md")]
pub mod systems {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
