//! Game engine, strategy library, and verification harness for the
//! Cantor-Kronecker query game.
//!
//! Kronecker maintains `m` hidden binary vectors of length `n`; Cantor asks
//! bit queries ("what is bit `j` of vector `i`?") and must either produce a
//! vector different from all of Kronecker's, or (when `m >= 2^n`) decide
//! whether Kronecker's list realizes every length-`n` vector.
//!
//! The crate is organized around the participants:
//!
//! * [`core`] - shared domain types: partial matrices, queries, transcripts.
//! * [`cantor`] - Cantor-side strategies (diagonal, adaptive, oblivious
//!   block plans, sparse endgame plans).
//! * [`kronecker`] - Kronecker-side adversaries (column-balanced, covering
//!   assignments, "0 first").
//! * [`matching`] - blocked/unblocked certification via a matching between
//!   matrix rows and `{0,1}^n`, with incremental repair.
//! * [`oracle`] - independent brute-force ground truth at desk scale.
//! * [`engine`] - plays strategies against adversaries, judges claims, and
//!   generates CSV experiment tables.

pub mod cantor;
pub mod core;
pub mod engine;
pub mod kronecker;
pub mod matching;
pub mod oracle;
