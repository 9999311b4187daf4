//! Satisfiability checking for constrained Horn clauses over algebraic data
//! types and linear integer arithmetic, by abstracting ADT values through
//! synthesized catamorphisms.

pub mod chc;
pub mod sexp;
pub mod preprocess;
pub mod cata;
pub mod abstraction;
pub mod sample;
pub mod backend;
pub mod counterexample;
pub mod synthesis;
pub mod driver;
