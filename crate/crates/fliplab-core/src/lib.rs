//! Simulation and audit library for FLIP dynamics on smoothed max-cut
//! instances on the complete graph.
//!
//! The crate is organized around five subsystems:
//!
//! * [`weights`] — density-bounded random edge weights with reproducible,
//!   counter-based seeding.
//! * [`dynamics`] — the Hamiltonian / cut objective, single-flip gains, the
//!   FLIP engine with pluggable pivot rules, and exhaustive searches for long
//!   or slowly-improving move sequences at small `n`.
//! * [`movealg`] — move vectors, the signed {-1,0,1} move matrix of a move
//!   sequence, exact integer rank, sequence block statistics, and auditors
//!   for the rank lower bounds.
//! * [`blocks`] — critical-block detection and exhaustive enumeration at
//!   small alphabet sizes, plus the densest-block scanner.
//! * [`sparsewords`] — the two-stage probabilistic construction of words
//!   that are sparse at every scale, with deterministic and statistical
//!   verifiers and an exhaustive negative-correlation checker.

pub mod blocks;
pub mod dynamics;
pub mod movealg;
pub mod rng;
pub mod sparsewords;
pub mod weights;
