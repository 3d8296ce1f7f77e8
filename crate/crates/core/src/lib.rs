//! Finite lattices, join-presentations, monotone modal logic, two-sorted frames,
//! and an ALBA-style rewriting engine for deriving first-order conditions of
//! lattice inequalities.

pub mod bitset;
pub mod syntax;
pub mod catalog;
pub mod lattice;
pub mod presentation;
pub mod term;
pub mod mml;
pub mod lplus;
pub mod two_sorted;
pub mod alba;
pub mod nation;
pub mod classical;
pub mod cli;
