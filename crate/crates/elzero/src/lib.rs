//! Proof checking and program extraction for two-sorted intuitionistic
//! arithmetic with quantifier-free induction and choice, its affine
//! restrictions, and Markov's principle.
//!
//! The pipeline: check a sequent-calculus proof, make it affine
//! (contraction-similarity), normalize cuts, extract a `(v, w)` realizer by
//! recursion on the derivation, compile strong realizers into executable
//! reduction witnesses, and run those witnesses on concrete problem
//! instances.

pub mod calculus;
pub mod gen;
pub mod oml;
pub mod realizability;
pub mod sexpr;
pub mod syntax;
pub mod transform;
pub mod truth;
