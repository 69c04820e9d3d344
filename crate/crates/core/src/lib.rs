//! Exact decoding-probability engine and codec simulator for sparse random
//! linear network coding (SRLNC).
//!
//! The crate is organized around three layers:
//!
//! * algebra: [`field`] (arithmetic in `F_q`), [`linalg`] (dense matrices
//!   over `F_q`), [`symbolic`] (exact univariate polynomials and rational
//!   functions in the sparsity `p0`);
//! * formulas: [`analysis`] computes the exact dependency probability
//!   `p(i,n)`, the full-rank probability of a sparse random matrix, rank
//!   distributions in two equivalent closed forms, and the RLNC/BKW
//!   reference expressions;
//! * validation: [`oracle`] recomputes the same quantities by exhaustive
//!   enumeration, and [`sim`] is a packet-level encoder/decoder with a
//!   Monte Carlo harness.

pub mod analysis;
pub mod field;
pub mod linalg;
pub mod oracle;
pub mod sim;
pub mod symbolic;
