//! Finite-scale workbench for propositional syntax, suplattices of theories,
//! matrix semantics, and algebraisation checks.
//!
//! The crate is organised bottom-up: [`term`] builds signatures and terms,
//! [`suplattice`] the order-theoretic layer, [`algebra`] finite algebras and
//! free algebras, [`consequence`] entailment engines, and [`equivalence`]
//! translations between formula-side and equation-side consequence. The
//! [`checks`] module packages the certification suites that the `aal` binary
//! and the acceptance tests share.

pub mod algebra;
pub mod checks;
pub mod consequence;
pub mod equivalence;
pub mod report;
pub mod suplattice;
pub mod term;
