//! Realizability analysis of integer sequences as periodic-point counts.
//!
//! A sequence (U_n) counts the periodic points of some map exactly when, for
//! every n, the Möbius-convolved orbit total sum_{d|n} mu(n/d) U_d is
//! divisible by n (the Dold condition) and non-negative (the sign condition).
//! This crate evaluates Fibonacci- and Lucas-family sequences exactly and
//! modulo m, scans those two conditions at scale, computes Pisano periods
//! with Wall-style divisor guidance, and explores the Dold condition on the
//! discriminant-scaled grid ((P^2-4Q) U_{n^2}(P,Q)).

pub mod arith;
pub mod conjecture;
pub mod error;
pub mod pisano;
pub mod realize;
pub mod sequences;
pub(crate) mod serde_util;

pub use arith::{ExactRational, Factorization};
pub use conjecture::{CellStatus, ConjectureCell, ConjectureReport, DiscriminantClass};
pub use error::{Error, Result};
pub use pisano::{
    PeriodCache, PeriodMethod, PisanoRecord, PrimePowerPeriod, WallReport, WallRule, WallViolation,
};
pub use realize::{
    DenominatorWitness, DoldOptions, DoldReport, DoldRow, GoldenMeanCount, GrowthOutcome,
    OrbitReport, SignCertificate, SignReport, WitnessReport,
};
pub use sequences::{LucasParams, SequenceBase, SequenceSpec};
