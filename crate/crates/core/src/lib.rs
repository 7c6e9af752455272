//! Certified antiunification: compute least general generalizations and emit
//! matching-logic proof objects that an independent kernel re-checks.

pub mod exec;
pub mod pattern;
pub mod term;
pub mod antiunify;
pub mod encode;
pub mod proof;
pub mod generate;
pub mod check;
pub mod corpus;
pub mod semantics;
pub mod frontend;
