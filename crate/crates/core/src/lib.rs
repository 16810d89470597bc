//! Quantum domain theory at desk scale.
//!
//! This crate implements a density-matrix interpreter for a small quantum
//! WHILE language together with the order-theoretic machinery needed to read
//! its programs denotationally: every construct denotes a completely positive
//! map on density matrices and loops are least fixed points computed as
//! partial sums. Around the interpreter it provides
//!
//! - [`linalg`]: dense complex matrices, a cyclic Jacobi eigensolver for
//!   Hermitian matrices, tensor products and trace distance;
//! - [`state`]: density matrices, the named gate set (H, X, P, T, CNOT),
//!   Kraus channels and measurement;
//! - [`domain`]: generic least-fixed-point iteration and brute-force oracles
//!   over explicit finite posets;
//! - [`ball`]: the domain of closed balls of pure states under reversed
//!   inclusion, with a gate-word basis and finite-precision approximation;
//! - [`valuation`]: simple valuations over the ball domain, their pointwise
//!   order decided by a transport-feasibility criterion, and approximation
//!   chains for mixed states;
//! - [`info`]: classical states under the Bayesian order, density matrices
//!   under the spectral order, and Shannon / von Neumann entropy as
//!   order-reversing measurements;
//! - [`qwhile`]: parser and evaluator for the WHILE language, plus a finite
//!   discrete probabilistic evaluator used as a cross-check oracle.
//!
//! Batch sweeps (grid order tables, program batches, oracle suites) run on
//! rayon when the default `parallel` feature is enabled and fall back to
//! plain iterators without it; results are identical either way.

pub mod ball;
pub mod domain;
pub mod exec;
pub mod info;
pub mod jsonio;
pub mod linalg;
pub mod oracle;
pub mod qwhile;
pub mod state;
#[cfg(test)]
pub(crate) mod testutil;
pub mod valuation;

/// Default comparison tolerance used across the crate.
pub const DEFAULT_TOL: f64 = 1e-9;
